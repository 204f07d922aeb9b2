/**
 * Training loop, the per-subject fine-tuning protocol, and run manifests.
 *
 * Determinism per seed comes from seeded initializers at build time plus a
 * fixed batch order here (no runtime shuffling, no dropout).
 */

import * as fs from 'node:fs';
import * as tf from '@tensorflow/tfjs';

export interface WindowBatch {
  /** Flattened [n, 7, 60] feature windows. */
  features: Float32Array;
  /** Binary labels, length n. */
  labels: Float32Array;
  n: number;
}

export interface TrainConfig {
  epochs: number;
  batchSize: number;
  learningRate: number;
}

export const DEFAULT_TRAIN: TrainConfig = {
  epochs: 30,
  batchSize: 64,
  learningRate: 1e-3,
};

export interface TrainCurves {
  loss: number[];
  valAccuracy: number[];
  bestEpoch: number;
}

export interface FineTunePlan {
  /** One of 0, 0.05, 0.10, 0.20. */
  fraction: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
}

export const FINE_TUNE_FRACTIONS = [0, 0.05, 0.1, 0.2] as const;

export function fineTunePlan(
  fraction: number,
  learningRate = DEFAULT_TRAIN.learningRate,
): FineTunePlan {
  if (!FINE_TUNE_FRACTIONS.includes(fraction as 0 | 0.05 | 0.1 | 0.2)) {
    throw new Error(`fraction ${fraction} not in {${FINE_TUNE_FRACTIONS}}`);
  }
  return { fraction, epochs: 10, batchSize: 64, learningRate };
}

export function batchToTensors(batch: WindowBatch): {
  xs: tf.Tensor3D;
  ys: tf.Tensor2D;
} {
  const xs = tf.tensor3d(batch.features, [batch.n, 7, 60]);
  const ys = tf.tensor2d(batch.labels, [batch.n, 1]);
  return { xs, ys };
}

export function sliceBatch(batch: WindowBatch, indices: number[]): WindowBatch {
  const stride = 7 * 60;
  const features = new Float32Array(indices.length * stride);
  const labels = new Float32Array(indices.length);
  indices.forEach((src, dst) => {
    features.set(batch.features.subarray(src * stride, (src + 1) * stride), dst * stride);
    labels[dst] = batch.labels[src];
  });
  return { features, labels, n: indices.length };
}

export function accuracy(model: tf.LayersModel, batch: WindowBatch): number {
  return tf.tidy(() => {
    const { xs, ys } = batchToTensors(batch);
    const preds = (model.predict(xs) as tf.Tensor).greater(0.5).cast('float32');
    const match = preds.equal(ys.cast('float32')).cast('float32');
    return match.mean().dataSync()[0];
  });
}

function snapshotWeights(model: tf.LayersModel): tf.Tensor[] {
  return model.getWeights().map((w) => w.clone());
}

/**
 * Binary cross-entropy training; returns the weights of the epoch with the
 * best validation accuracy. Throws if the loss diverges to NaN.
 */
export async function train(
  model: tf.LayersModel,
  trainSet: WindowBatch,
  valSet: WindowBatch,
  config: TrainConfig = DEFAULT_TRAIN,
): Promise<TrainCurves> {
  model.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: 'binaryCrossentropy',
    metrics: ['accuracy'],
  });
  const { xs, ys } = batchToTensors(trainSet);
  const curves: TrainCurves = { loss: [], valAccuracy: [], bestEpoch: -1 };
  let best = -1;
  let bestWeights: tf.Tensor[] | null = null;
  try {
    for (let epoch = 0; epoch < config.epochs; epoch++) {
      const history = await model.fit(xs, ys, {
        epochs: 1,
        batchSize: config.batchSize,
        shuffle: false,
        verbose: 0,
      });
      const loss = history.history['loss'][0] as number;
      if (!Number.isFinite(loss)) {
        throw new Error(`training diverged: loss ${loss} at epoch ${epoch}`);
      }
      const valAcc = accuracy(model, valSet);
      curves.loss.push(loss);
      curves.valAccuracy.push(valAcc);
      if (valAcc > best) {
        best = valAcc;
        curves.bestEpoch = epoch;
        if (bestWeights) bestWeights.forEach((w) => w.dispose());
        bestWeights = snapshotWeights(model);
      }
    }
    if (bestWeights) model.setWeights(bestWeights);
  } finally {
    xs.dispose();
    ys.dispose();
    if (bestWeights) bestWeights.forEach((w) => w.dispose());
  }
  return curves;
}

export interface FineTuneResult {
  /** Indices of the chronologically-first windows used for adaptation. */
  reservedIndices: number[];
  /** Remaining indices; the only ones evaluation may read. */
  evaluationIndices: number[];
  epochsRun: number;
}

/**
 * Adapt a trained model to one unseen subject using the chronologically
 * first `fraction` of that subject's windows; evaluation is restricted to
 * the disjoint remainder.
 */
export async function fineTune(
  model: tf.LayersModel,
  subject: WindowBatch,
  plan: FineTunePlan,
): Promise<FineTuneResult> {
  const all = Array.from({ length: subject.n }, (_, i) => i);
  if (plan.fraction === 0) {
    return { reservedIndices: [], evaluationIndices: all, epochsRun: 0 };
  }
  const nReserved = Math.round(plan.fraction * subject.n);
  if (nReserved < 1) {
    throw new Error(
      `fraction ${plan.fraction} reserves 0 of ${subject.n} windows`,
    );
  }
  const reserved = all.slice(0, nReserved);
  const evaluation = all.slice(nReserved);
  if (reserved.some((i) => evaluation.includes(i))) {
    throw new Error('reserved and evaluation windows overlap');
  }
  model.compile({
    optimizer: tf.train.adam(plan.learningRate),
    loss: 'binaryCrossentropy',
    metrics: ['accuracy'],
  });
  const { xs, ys } = batchToTensors(sliceBatch(subject, reserved));
  try {
    await model.fit(xs, ys, {
      epochs: plan.epochs,
      batchSize: plan.batchSize,
      shuffle: false,
      verbose: 0,
    });
  } finally {
    xs.dispose();
    ys.dispose();
  }
  return {
    reservedIndices: reserved,
    evaluationIndices: evaluation,
    epochsRun: plan.epochs,
  };
}

export interface RunManifest {
  seed: number;
  config: Record<string, unknown>;
  metrics: Record<string, number>;
}

export function writeRunManifest(path: string, manifest: RunManifest): void {
  fs.writeFileSync(path, JSON.stringify(manifest, null, 2) + '\n');
}
