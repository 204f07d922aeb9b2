import { describe, expect, it } from 'vitest';

import {
  Dataset,
  RF_GRID,
  SVM_GRID,
  XGB_GRID,
  baselineGrid,
  makeRng,
} from '../src/baselines.js';
import { gaussianRng } from './util.js';

/** Two Gaussian clouds in 8-d, linearly separable up to noise. */
function clouds(n: number, seed: number): Dataset {
  const g = gaussianRng(seed);
  const rng = makeRng(seed + 1);
  const x: number[][] = [];
  const y: number[] = [];
  for (let i = 0; i < n; i++) {
    const label = rng() < 0.5 ? 0 : 1;
    const offset = label === 1 ? 1.5 : -1.5;
    x.push(Array.from({ length: 8 }, (_, j) => g() * 0.6 + (j < 3 ? offset : 0)));
    y.push(label);
  }
  return { x, y };
}

describe('baseline hyperparameter grids', () => {
  const train = clouds(80, 1);
  const val = clouds(40, 2);

  it('svm grid enumerates exactly 24 combinations', () => {
    const result = baselineGrid('svm', train, val);
    expect(result.gridSize).toBe(24);
    expect(result.trials.length).toBe(
      SVM_GRID.kernel.length * SVM_GRID.c.length * SVM_GRID.gamma.length,
    );
    expect(result.bestValAccuracy).toBeGreaterThanOrEqual(0.9);
  });

  it('rf grid enumerates exactly 9 combinations', () => {
    const result = baselineGrid('rf', train, val);
    expect(result.gridSize).toBe(9);
    expect(result.trials.length).toBe(
      RF_GRID.maxDepth.length * RF_GRID.minSamplesSplit.length,
    );
    expect(result.bestValAccuracy).toBeGreaterThanOrEqual(0.9);
  });

  it('xgb grid enumerates exactly 18 combinations', () => {
    const result = baselineGrid('xgb', train, val);
    expect(result.gridSize).toBe(18);
    expect(result.trials.length).toBe(
      XGB_GRID.nEstimators.length *
        XGB_GRID.maxDepth.length *
        XGB_GRID.learningRate.length,
    );
    expect(result.bestValAccuracy).toBeGreaterThanOrEqual(0.9);
  });

  it('selection is by validation accuracy', () => {
    const result = baselineGrid('rf', train, val);
    const best = Math.max(...result.trials.map((t) => t.valAccuracy));
    expect(result.bestValAccuracy).toBe(best);
  });
});
