/**
 * Classic ML baselines (SVM, random forest, gradient-boosted trees) with
 * exhaustive grid search over fixed hyperparameter menus, selected by
 * validation accuracy. Inputs are flattened feature vectors.
 */

export type BaselineKind = 'svm' | 'rf' | 'xgb';

export interface Dataset {
  x: number[][];
  y: number[]; // binary {0, 1}
}

export interface GridResult {
  kind: BaselineKind;
  gridSize: number;
  best: Record<string, number | string>;
  bestValAccuracy: number;
  /** One entry per combination, in enumeration order. */
  trials: { params: Record<string, number | string>; valAccuracy: number }[];
}

export const SVM_GRID = {
  kernel: ['linear', 'rbf'] as const,
  c: [0.001, 0.01, 0.1, 10, 50, 100],
  gamma: [0.0001, 0.001],
  maxIterations: 10000,
};

export const RF_GRID = {
  maxDepth: [3, 5, 10],
  minSamplesSplit: [2, 5, 10],
  nEstimators: 50,
};

export const XGB_GRID = {
  nEstimators: [50, 100, 200],
  maxDepth: [3, 6],
  learningRate: [0.05, 0.1, 0.2],
};

/** Deterministic 32-bit RNG (mulberry32). */
export function makeRng(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

type Predictor = (x: number[]) => number;

function accuracyOf(predict: Predictor, data: Dataset): number {
  let hit = 0;
  for (let i = 0; i < data.y.length; i++) {
    if (predict(data.x[i]) === data.y[i]) hit++;
  }
  return hit / data.y.length;
}

// ---------------------------------------------------------------- SVM

function rbfKernel(gamma: number) {
  return (a: number[], b: number[]) => {
    let d2 = 0;
    for (let i = 0; i < a.length; i++) d2 += (a[i] - b[i]) ** 2;
    return Math.exp(-gamma * d2);
  };
}

function linearKernel(a: number[], b: number[]): number {
  let s = 0;
  for (let i = 0; i < a.length; i++) s += a[i] * b[i];
  return s;
}

/** Kernelized Pegasos sub-gradient solver for the soft-margin SVM. */
export function trainSvm(
  train: Dataset,
  kernel: 'linear' | 'rbf',
  c: number,
  gamma: number,
  maxIterations = SVM_GRID.maxIterations,
  seed = 0,
): Predictor {
  const n = train.y.length;
  const k = kernel === 'rbf' ? rbfKernel(gamma) : linearKernel;
  const ys = train.y.map((v) => (v === 1 ? 1 : -1));
  const gram: number[][] = train.x.map((a) => train.x.map((b) => k(a, b)));
  const lambda = 1 / (c * n);
  const alpha = new Float64Array(n);
  const rng = makeRng(seed);
  const T = Math.min(maxIterations, 200 * n);
  for (let t = 1; t <= T; t++) {
    const i = Math.floor(rng() * n);
    let margin = 0;
    for (let j = 0; j < n; j++) {
      if (alpha[j] !== 0) margin += alpha[j] * ys[j] * gram[j][i];
    }
    if ((ys[i] * margin) / (lambda * t) < 1) alpha[i] += 1;
  }
  const scale = 1 / (lambda * T);
  return (x) => {
    let score = 0;
    for (let j = 0; j < n; j++) {
      if (alpha[j] !== 0) score += alpha[j] * ys[j] * k(train.x[j], x);
    }
    return score * scale >= 0 ? 1 : 0;
  };
}

// --------------------------------------------------------- decision trees

interface TreeNode {
  feature: number;
  threshold: number;
  left: TreeNode | null;
  right: TreeNode | null;
  value: number;
}

/** CART with either gini (classification) or variance (regression) split. */
function buildTree(
  x: number[][],
  y: number[],
  indices: number[],
  depth: number,
  maxDepth: number,
  minSamplesSplit: number,
  features: number[],
  regression: boolean,
): TreeNode {
  const mean = indices.reduce((s, i) => s + y[i], 0) / indices.length;
  const leaf: TreeNode = {
    feature: -1,
    threshold: 0,
    left: null,
    right: null,
    value: regression ? mean : mean >= 0.5 ? 1 : 0,
  };
  if (depth >= maxDepth || indices.length < minSamplesSplit) return leaf;

  const impurity = (idx: number[]) => {
    if (idx.length === 0) return 0;
    const m = idx.reduce((s, i) => s + y[i], 0) / idx.length;
    if (regression) {
      return idx.reduce((s, i) => s + (y[i] - m) ** 2, 0);
    }
    return idx.length * 2 * m * (1 - m); // gini
  };

  let best: { feature: number; threshold: number; score: number } | null = null;
  for (const f of features) {
    const values = [...new Set(indices.map((i) => x[i][f]))].sort((a, b) => a - b);
    for (let v = 0; v + 1 < values.length; v++) {
      const threshold = (values[v] + values[v + 1]) / 2;
      const left = indices.filter((i) => x[i][f] <= threshold);
      const right = indices.filter((i) => x[i][f] > threshold);
      if (left.length === 0 || right.length === 0) continue;
      const score = impurity(left) + impurity(right);
      if (best === null || score < best.score) {
        best = { feature: f, threshold, score };
      }
    }
  }
  if (best === null || best.score >= impurity(indices) - 1e-12) return leaf;

  const left = indices.filter((i) => x[i][best!.feature] <= best!.threshold);
  const right = indices.filter((i) => x[i][best!.feature] > best!.threshold);
  return {
    feature: best.feature,
    threshold: best.threshold,
    left: buildTree(x, y, left, depth + 1, maxDepth, minSamplesSplit, features, regression),
    right: buildTree(x, y, right, depth + 1, maxDepth, minSamplesSplit, features, regression),
    value: leaf.value,
  };
}

function treePredict(node: TreeNode, x: number[]): number {
  while (node.left !== null && node.right !== null) {
    node = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return node.value;
}

export function trainRandomForest(
  train: Dataset,
  maxDepth: number,
  minSamplesSplit: number,
  nEstimators = RF_GRID.nEstimators,
  seed = 0,
): Predictor {
  const n = train.y.length;
  const d = train.x[0].length;
  const nFeatures = Math.max(1, Math.round(Math.sqrt(d)));
  const rng = makeRng(seed);
  const trees: TreeNode[] = [];
  for (let t = 0; t < nEstimators; t++) {
    const sample = Array.from({ length: n }, () => Math.floor(rng() * n));
    const pool = Array.from({ length: d }, (_, i) => i);
    for (let i = pool.length - 1; i > 0; i--) {
      const j = Math.floor(rng() * (i + 1));
      [pool[i], pool[j]] = [pool[j], pool[i]];
    }
    trees.push(
      buildTree(
        train.x,
        train.y,
        sample,
        0,
        maxDepth,
        minSamplesSplit,
        pool.slice(0, nFeatures),
        false,
      ),
    );
  }
  return (x) => {
    const votes = trees.reduce((s, tree) => s + treePredict(tree, x), 0);
    return votes * 2 >= trees.length ? 1 : 0;
  };
}

export function trainGradientBoosting(
  train: Dataset,
  nEstimators: number,
  maxDepth: number,
  learningRate: number,
): Predictor {
  const n = train.y.length;
  const d = train.x[0].length;
  const allFeatures = Array.from({ length: d }, (_, i) => i);
  const allIndices = Array.from({ length: n }, (_, i) => i);
  const sigmoid = (z: number) => 1 / (1 + Math.exp(-z));
  const base = 0;
  const scores = new Float64Array(n).fill(base);
  const trees: TreeNode[] = [];
  for (let t = 0; t < nEstimators; t++) {
    const residual = Array.from(
      { length: n },
      (_, i) => train.y[i] - sigmoid(scores[i]),
    );
    const tree = buildTree(
      train.x,
      residual,
      allIndices,
      0,
      maxDepth,
      2,
      allFeatures,
      true,
    );
    trees.push(tree);
    for (let i = 0; i < n; i++) {
      scores[i] += learningRate * treePredict(tree, train.x[i]);
    }
  }
  return (x) => {
    let score = base;
    for (const tree of trees) score += learningRate * treePredict(tree, x);
    return sigmoid(score) >= 0.5 ? 1 : 0;
  };
}

// ----------------------------------------------------------- grid search

export function baselineGrid(
  kind: BaselineKind,
  train: Dataset,
  val: Dataset,
): GridResult {
  const trials: GridResult['trials'] = [];
  if (kind === 'svm') {
    for (const kernel of SVM_GRID.kernel) {
      for (const c of SVM_GRID.c) {
        for (const gamma of SVM_GRID.gamma) {
          const predict = trainSvm(train, kernel, c, gamma);
          trials.push({
            params: { kernel, c, gamma, maxIterations: SVM_GRID.maxIterations },
            valAccuracy: accuracyOf(predict, val),
          });
        }
      }
    }
  } else if (kind === 'rf') {
    for (const maxDepth of RF_GRID.maxDepth) {
      for (const minSamplesSplit of RF_GRID.minSamplesSplit) {
        const predict = trainRandomForest(train, maxDepth, minSamplesSplit);
        trials.push({
          params: { maxDepth, minSamplesSplit },
          valAccuracy: accuracyOf(predict, val),
        });
      }
    }
  } else {
    for (const nEstimators of XGB_GRID.nEstimators) {
      for (const maxDepth of XGB_GRID.maxDepth) {
        for (const learningRate of XGB_GRID.learningRate) {
          const predict = trainGradientBoosting(
            train,
            nEstimators,
            maxDepth,
            learningRate,
          );
          trials.push({
            params: { nEstimators, maxDepth, learningRate },
            valAccuracy: accuracyOf(predict, val),
          });
        }
      }
    }
  }
  let bestIdx = 0;
  trials.forEach((t, i) => {
    if (t.valAccuracy > trials[bestIdx].valAccuracy) bestIdx = i;
  });
  return {
    kind,
    gridSize: trials.length,
    best: trials[bestIdx].params,
    bestValAccuracy: trials[bestIdx].valAccuracy,
    trials,
  };
}
