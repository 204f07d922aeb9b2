import { describe, expect, it } from 'vitest';

import { buildModel } from '../src/models.js';
import {
  accuracy,
  fineTune,
  fineTunePlan,
  sliceBatch,
  train,
} from '../src/train.js';
import { makeBatch } from './util.js';

describe('fine-tuning protocol', () => {
  it('rejects fractions outside the menu', () => {
    expect(() => fineTunePlan(0.5)).toThrow(/0.5/);
    for (const f of [0, 0.05, 0.1, 0.2]) {
      const plan = fineTunePlan(f);
      expect(plan.epochs).toBe(10);
      expect(plan.batchSize).toBe(64);
    }
  });

  it('fraction 0 leaves the model untouched', async () => {
    const { model } = buildModel('mini_rrwavenet', 9, { widthMultiplier: 0.125 });
    const before = model.getWeights().map((w) => w.dataSync() as Float32Array);
    const subject = makeBatch(40, 61);
    const result = await fineTune(model, subject, fineTunePlan(0));
    expect(result.epochsRun).toBe(0);
    expect(result.reservedIndices).toEqual([]);
    expect(result.evaluationIndices.length).toBe(40);
    model
      .getWeights()
      .forEach((w, i) => expect(w.dataSync() as Float32Array).toEqual(before[i]));
  });

  it('reserves the chronologically first fraction, disjoint from evaluation', async () => {
    const { model } = buildModel('mini_rrwavenet', 9, { widthMultiplier: 0.125 });
    const subject = makeBatch(100, 62);
    for (const f of [0.05, 0.1, 0.2]) {
      const result = await fineTune(model, subject, fineTunePlan(f));
      expect(result.epochsRun).toBe(10);
      expect(result.reservedIndices).toEqual(
        Array.from({ length: Math.round(f * 100) }, (_, i) => i),
      );
      const overlap = result.reservedIndices.filter((i) =>
        result.evaluationIndices.includes(i),
      );
      expect(overlap).toEqual([]);
      expect(
        result.reservedIndices.length + result.evaluationIndices.length,
      ).toBe(100);
    }
  });

  it('rejects an empty reserved set', async () => {
    const { model } = buildModel('mini_rrwavenet', 9, { widthMultiplier: 0.125 });
    const subject = makeBatch(4, 63);
    await expect(fineTune(model, subject, fineTunePlan(0.05))).rejects.toThrow(
      /reserves 0/,
    );
  });

  it('adaptation on a shifted subject: accuracy at 20% >= accuracy at 0%', async () => {
    // base distribution
    const trainSet = makeBatch(200, 71);
    const valSet = makeBatch(60, 72);
    // unseen subject with a distribution shift (sensor offset + weaker bump)
    const subject = makeBatch(120, 73, { inputShift: 0.8, bump: 0.6 });

    const { model } = buildModel('mini_rrwavenet', 12, { widthMultiplier: 0.125 });
    await train(model, trainSet, valSet, {
      epochs: 12,
      batchSize: 32,
      learningRate: 1e-3,
    });
    const baseWeights = model.getWeights().map((w) => w.clone());

    // all fractions are evaluated on the same remainder: the windows after
    // the largest reserved prefix, disjoint from every reserved set
    const evalStart = Math.round(0.2 * subject.n);
    const evalSet = sliceBatch(
      subject,
      Array.from({ length: subject.n - evalStart }, (_, i) => evalStart + i),
    );

    const accAt: Record<number, number> = {};
    for (const f of [0, 0.05, 0.1, 0.2]) {
      model.setWeights(baseWeights);
      const result = await fineTune(model, subject, fineTunePlan(f));
      if (f > 0) {
        expect(Math.max(...result.reservedIndices)).toBeLessThan(evalStart);
      }
      accAt[f] = accuracy(model, evalSet);
    }
    expect(accAt[0.2]).toBeGreaterThanOrEqual(accAt[0]);
  });
});
