/**
 * The three window-classifier architectures. All take a feature window of
 * shape [7, 60] (7 pulse-morphology channels x 60 resampled pulses):
 *
 *   dsep_embedder   depthwise-separated residual conv stack over a
 *                   positional-embedded input, temporally averaged to a
 *                   512-d embedding (classified externally by 5-NN).
 *   dsepnet         the same depthwise-separated front end followed by
 *                   parallel LSTM and conv temporal branches and a dense
 *                   sigmoid head.
 *   mini_rrwavenet  multi-scale conv front end, two residual conv blocks,
 *                   dense sigmoid head.
 *
 * Every layer's expected output shape is recorded in the returned spec and
 * verified at construction; a mismatch raises an error naming the layer.
 */

import * as tf from '@tensorflow/tfjs';

export type Architecture = 'dsep_embedder' | 'dsepnet' | 'mini_rrwavenet';

export const INPUT_SHAPE: [number, number] = [7, 60];
export const EMBEDDING_DIM = 512;

export interface LayerShape {
  layer: string;
  /** Output shape without the batch dimension. */
  shape: number[];
}

export interface ModelSpec {
  architecture: Architecture;
  inputShape: [number, number];
  outputShape: number[];
  layerShapes: LayerShape[];
  paramCount: number;
  /** 1.0 is the full-size architecture; tests may train narrower copies. */
  widthMultiplier: number;
}

export interface BuiltModel {
  model: tf.LayersModel;
  spec: ModelSpec;
}

class PositionalEmbedding extends tf.layers.Layer {
  static className = 'PositionalEmbedding';
  private seed: number;
  private table: tf.LayerVariable | null = null;

  constructor(config: { seed: number; name?: string }) {
    super({ name: config.name });
    this.seed = config.seed;
  }

  override build(inputShape: tf.Shape | tf.Shape[]): void {
    const shape = inputShape as number[];
    this.table = this.addWeight(
      'position_table',
      [shape[1], shape[2]],
      'float32',
      tf.initializers.randomNormal({ stddev: 0.02, seed: this.seed }),
    );
    super.build(inputShape);
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    const x = Array.isArray(inputs) ? inputs[0] : inputs;
    return tf.add(x, this.table!.read());
  }

  override computeOutputShape(inputShape: tf.Shape): tf.Shape {
    return inputShape;
  }
}
tf.serialization.registerClass(PositionalEmbedding);

/** Deterministic per-model seed stream for weight initializers. */
class SeedStream {
  private next: number;
  constructor(seed: number) {
    this.next = seed * 1000 + 1;
  }
  take(): number {
    return this.next++;
  }
}

interface Tap {
  layer: string;
  tensor: tf.SymbolicTensor;
  expected: number[];
}

function tap(taps: Tap[], layer: string, t: tf.SymbolicTensor, expected: number[]): tf.SymbolicTensor {
  taps.push({ layer, tensor: t, expected });
  return t;
}

/**
 * Depthwise-separated residual conv block: channel-wise conv (each feature
 * lane filtered independently), point-wise conv mixing lanes, plus a
 * point-wise residual projection. Works on [steps, 1, channels] so the 2-D
 * separable conv acts as a 1-D one.
 */
function dsepBlock(
  x: tf.SymbolicTensor,
  filters: number,
  seeds: SeedStream,
  name: string,
): tf.SymbolicTensor {
  const conv = tf.layers
    .separableConv2d({
      filters,
      kernelSize: [5, 1],
      padding: 'same',
      activation: 'relu',
      depthwiseInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      pointwiseInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: `${name}_sepconv`,
    })
    .apply(x) as tf.SymbolicTensor;
  const proj = tf.layers
    .conv2d({
      filters,
      kernelSize: [1, 1],
      padding: 'same',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: `${name}_residual_proj`,
    })
    .apply(x) as tf.SymbolicTensor;
  return tf.layers
    .add({ name: `${name}_residual_add` })
    .apply([conv, proj]) as tf.SymbolicTensor;
}

function buildDsepEmbedder(
  seeds: SeedStream,
  taps: Tap[],
  w: (n: number) => number,
): tf.LayersModel {
  const input = tf.input({ shape: INPUT_SHAPE, name: 'window' });
  let x = tf.layers
    .permute({ dims: [2, 1], name: 'to_time_major' })
    .apply(input) as tf.SymbolicTensor;
  tap(taps, 'to_time_major', x, [60, 7]);
  x = new PositionalEmbedding({ seed: seeds.take(), name: 'position_embed' }).apply(
    x,
  ) as tf.SymbolicTensor;
  tap(taps, 'position_embed', x, [60, 7]);
  x = tf.layers
    .reshape({ targetShape: [60, 1, 7], name: 'lift_2d' })
    .apply(x) as tf.SymbolicTensor;
  const widths = [w(64), w(128), w(256), w(EMBEDDING_DIM)];
  widths.forEach((filters, i) => {
    x = dsepBlock(x, filters, seeds, `dsep${i + 1}`);
    tap(taps, `dsep${i + 1}_residual_add`, x, [60, 1, filters]);
  });
  const embeddingDim = widths[widths.length - 1];
  x = tf.layers
    .reshape({ targetShape: [60, embeddingDim], name: 'drop_2d' })
    .apply(x) as tf.SymbolicTensor;
  tap(taps, 'drop_2d', x, [60, embeddingDim]);
  const out = tf.layers
    .globalAveragePooling1d({ name: 'temporal_average' })
    .apply(x) as tf.SymbolicTensor;
  tap(taps, 'temporal_average', out, [embeddingDim]);
  return tf.model({ inputs: input, outputs: out, name: 'dsep_embedder' });
}

function buildDsepNet(
  seeds: SeedStream,
  taps: Tap[],
  w: (n: number) => number,
): tf.LayersModel {
  const input = tf.input({ shape: INPUT_SHAPE, name: 'window' });
  let x = tf.layers
    .permute({ dims: [2, 1], name: 'to_time_major' })
    .apply(input) as tf.SymbolicTensor;
  tap(taps, 'to_time_major', x, [60, 7]);
  x = tf.layers
    .reshape({ targetShape: [60, 1, 7], name: 'lift_2d' })
    .apply(x) as tf.SymbolicTensor;
  const widths = [w(64), w(128)];
  widths.forEach((filters, i) => {
    x = dsepBlock(x, filters, seeds, `dsep${i + 1}`);
    tap(taps, `dsep${i + 1}_residual_add`, x, [60, 1, filters]);
  });
  const trunkWidth = widths[1];
  x = tf.layers
    .reshape({ targetShape: [60, trunkWidth], name: 'drop_2d' })
    .apply(x) as tf.SymbolicTensor;
  tap(taps, 'drop_2d', x, [60, trunkWidth]);

  const lstm = tf.layers
    .lstm({
      units: w(64),
      kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      recurrentInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: 'lstm_branch',
    })
    .apply(x) as tf.SymbolicTensor;
  tap(taps, 'lstm_branch', lstm, [w(64)]);

  // Time-invariant branch: each time stamp becomes a channel so one filter
  // spans the whole window at a fixed lag structure.
  let conv = tf.layers
    .permute({ dims: [2, 1], name: 'time_as_channels' })
    .apply(x) as tf.SymbolicTensor;
  tap(taps, 'time_as_channels', conv, [trunkWidth, 60]);
  conv = tf.layers
    .conv1d({
      filters: w(64),
      kernelSize: 3,
      padding: 'same',
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: 'conv_branch',
    })
    .apply(conv) as tf.SymbolicTensor;
  tap(taps, 'conv_branch', conv, [trunkWidth, w(64)]);
  conv = tf.layers
    .globalAveragePooling1d({ name: 'conv_branch_pool' })
    .apply(conv) as tf.SymbolicTensor;
  tap(taps, 'conv_branch_pool', conv, [w(64)]);

  let head = tf.layers
    .concatenate({ name: 'branch_concat' })
    .apply([lstm, conv]) as tf.SymbolicTensor;
  tap(taps, 'branch_concat', head, [2 * w(64)]);
  head = tf.layers
    .dense({
      units: w(64),
      activation: 'relu',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: 'head_dense',
    })
    .apply(head) as tf.SymbolicTensor;
  tap(taps, 'head_dense', head, [w(64)]);
  const out = tf.layers
    .dense({
      units: 1,
      activation: 'sigmoid',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: 'probability',
    })
    .apply(head) as tf.SymbolicTensor;
  tap(taps, 'probability', out, [1]);
  return tf.model({ inputs: input, outputs: out, name: 'dsepnet' });
}

function buildMiniRrwavenet(
  seeds: SeedStream,
  taps: Tap[],
  w: (n: number) => number,
): tf.LayersModel {
  const input = tf.input({ shape: INPUT_SHAPE, name: 'window' });
  const x = tf.layers
    .permute({ dims: [2, 1], name: 'to_time_major' })
    .apply(input) as tf.SymbolicTensor;
  tap(taps, 'to_time_major', x, [60, 7]);

  const scales = [3, 5, 7].map((k) => {
    const branch = tf.layers
      .conv1d({
        filters: w(32),
        kernelSize: k,
        padding: 'same',
        activation: 'relu',
        kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
        name: `scale_k${k}`,
      })
      .apply(x) as tf.SymbolicTensor;
    tap(taps, `scale_k${k}`, branch, [60, w(32)]);
    return branch;
  });
  let trunk = tf.layers
    .concatenate({ name: 'multiscale_concat' })
    .apply(scales) as tf.SymbolicTensor;
  tap(taps, 'multiscale_concat', trunk, [60, 3 * w(32)]);

  for (let i = 1; i <= 2; i++) {
    const conv = tf.layers
      .conv1d({
        filters: 3 * w(32),
        kernelSize: 3,
        padding: 'same',
        activation: 'relu',
        kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
        name: `res${i}_conv`,
      })
      .apply(trunk) as tf.SymbolicTensor;
    trunk = tf.layers
      .add({ name: `res${i}_add` })
      .apply([conv, trunk]) as tf.SymbolicTensor;
    tap(taps, `res${i}_add`, trunk, [60, 3 * w(32)]);
  }

  const pooled = tf.layers
    .globalAveragePooling1d({ name: 'temporal_average' })
    .apply(trunk) as tf.SymbolicTensor;
  tap(taps, 'temporal_average', pooled, [3 * w(32)]);
  const out = tf.layers
    .dense({
      units: 1,
      activation: 'sigmoid',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seeds.take() }),
      name: 'probability',
    })
    .apply(pooled) as tf.SymbolicTensor;
  tap(taps, 'probability', out, [1]);
  return tf.model({ inputs: input, outputs: out, name: 'mini_rrwavenet' });
}

export interface BuildOptions {
  /**
   * Scales every channel width; 1.0 (default) gives the published sizes.
   * Narrow copies keep the layer structure and are used to make training
   * tests affordable on the pure-JS CPU backend.
   */
  widthMultiplier?: number;
}

export function buildModel(
  architecture: Architecture,
  seed = 0,
  options: BuildOptions = {},
): BuiltModel {
  const mult = options.widthMultiplier ?? 1.0;
  if (!(mult > 0 && mult <= 1)) {
    throw new Error(`widthMultiplier ${mult} outside (0, 1]`);
  }
  const w = (n: number) => Math.max(2, Math.round(n * mult));
  const seeds = new SeedStream(seed);
  const taps: Tap[] = [];
  let model: tf.LayersModel;
  switch (architecture) {
    case 'dsep_embedder':
      model = buildDsepEmbedder(seeds, taps, w);
      break;
    case 'dsepnet':
      model = buildDsepNet(seeds, taps, w);
      break;
    case 'mini_rrwavenet':
      model = buildMiniRrwavenet(seeds, taps, w);
      break;
    default:
      throw new Error(`unknown architecture '${architecture}'`);
  }

  const layerShapes: LayerShape[] = [];
  for (const { layer, tensor, expected } of taps) {
    const actual = tensor.shape.slice(1).map((d) => d ?? -1);
    if (actual.length !== expected.length || actual.some((d, i) => d !== expected[i])) {
      throw new Error(
        `layer '${layer}' produced shape [${actual}], expected [${expected}]`,
      );
    }
    layerShapes.push({ layer, shape: expected });
  }

  return {
    model,
    spec: {
      architecture,
      inputShape: INPUT_SHAPE,
      outputShape: model.outputs[0].shape.slice(1).map((d) => d ?? -1),
      layerShapes,
      paramCount: model.countParams(),
      widthMultiplier: mult,
    },
  };
}

/**
 * Attach a temporary sigmoid head to the embedder so it can be trained with
 * cross-entropy; the head is discarded when exporting embeddings.
 */
export function withClassificationHead(
  embedder: tf.LayersModel,
  seed = 0,
): tf.LayersModel {
  const out = tf.layers
    .dense({
      units: 1,
      activation: 'sigmoid',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed * 1000 + 999 }),
      name: 'temporary_head',
    })
    .apply(embedder.outputs[0]) as tf.SymbolicTensor;
  return tf.model({
    inputs: embedder.inputs,
    outputs: out,
    name: `${embedder.name}_with_head`,
  });
}
