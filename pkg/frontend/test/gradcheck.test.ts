import { describe, expect, it } from 'vitest';

import {
  CheckBlock,
  depthwiseSeparableBlock,
  lstmBlock,
  maxRelativeError,
  numericGradient,
  positionalEmbeddingBlock,
} from '../src/gradcheck.js';
import { gaussianRng } from './util.js';

function randomVector(n: number, seed: number): Float64Array {
  const g = gaussianRng(seed);
  return Float64Array.from({ length: n }, () => 0.5 * g());
}

function check(block: CheckBlock, inputSize: number, seed: number): number {
  const params = randomVector(block.paramCount, seed);
  const x = randomVector(inputSize, seed + 1);
  const analytic = block.grad(params, x);
  const numeric = numericGradient(block, params, x);
  return maxRelativeError(analytic, numeric);
}

describe('gradient checks on reduced blocks', () => {
  it('depthwise-separable conv matches central differences at 1e-4', () => {
    const block = depthwiseSeparableBlock(9, 3, 3, 4);
    expect(check(block, 9 * 3, 10)).toBeLessThan(1e-4);
  });

  it('positional embedding matches central differences at 1e-4', () => {
    const block = positionalEmbeddingBlock(8, 3, 4);
    expect(check(block, 8 * 3, 20)).toBeLessThan(1e-4);
  });

  it('lstm cell matches central differences at 1e-4', () => {
    const block = lstmBlock(6, 3, 4);
    expect(check(block, 6 * 3, 30)).toBeLessThan(1e-4);
  });

  it('holds across several random draws', () => {
    for (const seed of [1, 2, 3]) {
      expect(check(depthwiseSeparableBlock(7, 2, 3, 3), 14, seed)).toBeLessThan(1e-4);
      expect(check(positionalEmbeddingBlock(5, 2, 3), 10, seed)).toBeLessThan(1e-4);
      expect(check(lstmBlock(5, 2, 3), 10, seed)).toBeLessThan(1e-4);
    }
  });
});
