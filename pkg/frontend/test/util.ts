import { makeRng } from '../src/baselines.js';
import { WindowBatch } from '../src/train.js';

export function gaussianRng(seed: number): () => number {
  const rng = makeRng(seed);
  let spare: number | null = null;
  return () => {
    if (spare !== null) {
      const v = spare;
      spare = null;
      return v;
    }
    const u = Math.max(rng(), 1e-12);
    const v = rng();
    const r = Math.sqrt(-2 * Math.log(u));
    spare = r * Math.sin(2 * Math.PI * v);
    return r * Math.cos(2 * Math.PI * v);
  };
}

/**
 * Synthetic [n, 7, 60] windows: class 1 adds a smooth bump on channels 0-2,
 * making the task separable; `inputShift` models a subject-level
 * distribution shift added to every sample.
 */
export function makeBatch(
  n: number,
  seed: number,
  opts: { noise?: number; inputShift?: number; bump?: number } = {},
): WindowBatch {
  const { noise = 0.3, inputShift = 0, bump = 1.0 } = opts;
  const g = gaussianRng(seed);
  const rng = makeRng(seed + 1);
  const stride = 7 * 60;
  const features = new Float32Array(n * stride);
  const labels = new Float32Array(n);
  for (let i = 0; i < n; i++) {
    const label = rng() < 0.5 ? 0 : 1;
    labels[i] = label;
    for (let c = 0; c < 7; c++) {
      for (let t = 0; t < 60; t++) {
        let v = noise * g() + inputShift;
        if (label === 1 && c < 3) {
          v += bump * Math.sin((Math.PI * t) / 59);
        }
        features[i * stride + c * 60 + t] = v;
      }
    }
  }
  return { features, labels, n };
}
