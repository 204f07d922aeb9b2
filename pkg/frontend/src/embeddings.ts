/**
 * Export 512-d window embeddings (plus labels) as tensor files that the
 * Python pipeline's `knn-build` consumes unmodified.
 */

import * as tf from '@tensorflow/tfjs';

import { EMBEDDING_DIM } from './models.js';
import { WindowBatch, batchToTensors } from './train.js';
import { writeTensor } from './tensorfile.js';

export interface EmbeddingFiles {
  vectorsPath: string;
  labelsPath: string;
  dims: [number, number];
}

export function computeEmbeddings(
  embedder: tf.LayersModel,
  batch: WindowBatch,
): Float32Array {
  return tf.tidy(() => {
    const { xs } = batchToTensors(batch);
    const out = embedder.predict(xs) as tf.Tensor;
    if (out.shape[1] !== EMBEDDING_DIM) {
      throw new Error(
        `embedder output dim ${out.shape[1]}, expected ${EMBEDDING_DIM}`,
      );
    }
    return out.dataSync() as Float32Array;
  });
}

export function exportEmbeddings(
  embedder: tf.LayersModel,
  batch: WindowBatch,
  outPrefix: string,
): EmbeddingFiles {
  const vectors = computeEmbeddings(embedder, batch);
  const vectorsPath = `${outPrefix}.vectors.apsn`;
  const labelsPath = `${outPrefix}.labels.apsn`;
  writeTensor(vectorsPath, [batch.n, EMBEDDING_DIM], vectors);
  writeTensor(labelsPath, [batch.n], batch.labels);
  return { vectorsPath, labelsPath, dims: [batch.n, EMBEDDING_DIM] };
}
