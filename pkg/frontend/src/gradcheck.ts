/**
 * Reduced float64 copies of the three trainable block types — depthwise-
 * separated conv, positional embedding, and an LSTM cell — with analytic
 * backprop, for verification against central finite differences. The full
 * models run in float32; 1e-4 relative agreement needs float64 arithmetic.
 *
 * Each block exposes `loss(params, x)` (scalar, here 0.5 * sum(y^2)) and
 * `grad(params, x)` returning d(loss)/d(params) as one flat array in the
 * same order as `params`.
 */

export interface CheckBlock {
  name: string;
  paramCount: number;
  loss(params: Float64Array, x: Float64Array): number;
  grad(params: Float64Array, x: Float64Array): Float64Array;
}

function sigmoid(z: number): number {
  return 1 / (1 + Math.exp(-z));
}

/**
 * Depthwise-separated conv over [T, C] input: channel-wise kernel [K, C]
 * ("same" padding), ReLU, then point-wise mix [C, F].
 * Params: depthwise (K*C), pointwise (C*F), bias (F).
 */
export function depthwiseSeparableBlock(
  T: number,
  C: number,
  K: number,
  F: number,
): CheckBlock {
  const half = (K - 1) >> 1;
  const nDw = K * C;
  const nPw = C * F;
  const paramCount = nDw + nPw + F;

  function forward(params: Float64Array, x: Float64Array) {
    const dw = params.subarray(0, nDw); // [k][c]
    const pw = params.subarray(nDw, nDw + nPw); // [c][f]
    const bias = params.subarray(nDw + nPw);
    const h = new Float64Array(T * C); // pre-activation of channel-wise conv
    for (let t = 0; t < T; t++) {
      for (let c = 0; c < C; c++) {
        let acc = 0;
        for (let k = 0; k < K; k++) {
          const tt = t + k - half;
          if (tt >= 0 && tt < T) acc += dw[k * C + c] * x[tt * C + c];
        }
        h[t * C + c] = acc;
      }
    }
    const r = h.map((v) => (v > 0 ? v : 0));
    const y = new Float64Array(T * F);
    for (let t = 0; t < T; t++) {
      for (let f = 0; f < F; f++) {
        let acc = bias[f];
        for (let c = 0; c < C; c++) acc += r[t * C + c] * pw[c * F + f];
        y[t * F + f] = acc;
      }
    }
    return { h, r, y };
  }

  return {
    name: 'depthwise_separable_conv',
    paramCount,
    loss(params, x) {
      const { y } = forward(params, x);
      return 0.5 * y.reduce((s, v) => s + v * v, 0);
    },
    grad(params, x) {
      const pw = params.subarray(nDw, nDw + nPw);
      const { h, r, y } = forward(params, x);
      const g = new Float64Array(paramCount);
      const gDw = g.subarray(0, nDw);
      const gPw = g.subarray(nDw, nDw + nPw);
      const gBias = g.subarray(nDw + nPw);
      const dR = new Float64Array(T * C);
      for (let t = 0; t < T; t++) {
        for (let f = 0; f < F; f++) {
          const dy = y[t * F + f];
          gBias[f] += dy;
          for (let c = 0; c < C; c++) {
            gPw[c * F + f] += dy * r[t * C + c];
            dR[t * C + c] += dy * pw[c * F + f];
          }
        }
      }
      for (let t = 0; t < T; t++) {
        for (let c = 0; c < C; c++) {
          if (h[t * C + c] <= 0) continue;
          const dh = dR[t * C + c];
          for (let k = 0; k < K; k++) {
            const tt = t + k - half;
            if (tt >= 0 && tt < T) gDw[k * C + c] += dh * x[tt * C + c];
          }
        }
      }
      return g;
    },
  };
}

/**
 * Positional embedding over [T, C] input: y = tanh((x + P) W + b) with a
 * learned position table P [T, C] and dense mix W [C, F], b [F].
 * Params: P (T*C), W (C*F), b (F).
 */
export function positionalEmbeddingBlock(
  T: number,
  C: number,
  F: number,
): CheckBlock {
  const nP = T * C;
  const nW = C * F;
  const paramCount = nP + nW + F;

  function forward(params: Float64Array, x: Float64Array) {
    const P = params.subarray(0, nP);
    const W = params.subarray(nP, nP + nW);
    const b = params.subarray(nP + nW);
    const s = new Float64Array(nP);
    for (let i = 0; i < nP; i++) s[i] = x[i] + P[i];
    const y = new Float64Array(T * F);
    for (let t = 0; t < T; t++) {
      for (let f = 0; f < F; f++) {
        let acc = b[f];
        for (let c = 0; c < C; c++) acc += s[t * C + c] * W[c * F + f];
        y[t * F + f] = Math.tanh(acc);
      }
    }
    return { s, y };
  }

  return {
    name: 'positional_embedding',
    paramCount,
    loss(params, x) {
      const { y } = forward(params, x);
      return 0.5 * y.reduce((sum, v) => sum + v * v, 0);
    },
    grad(params, x) {
      const W = params.subarray(nP, nP + nW);
      const { s, y } = forward(params, x);
      const g = new Float64Array(paramCount);
      const gP = g.subarray(0, nP);
      const gW = g.subarray(nP, nP + nW);
      const gB = g.subarray(nP + nW);
      for (let t = 0; t < T; t++) {
        for (let f = 0; f < F; f++) {
          const v = y[t * F + f];
          const dPre = v * (1 - v * v); // d(0.5 y^2)/d(pre-activation)
          gB[f] += dPre;
          for (let c = 0; c < C; c++) {
            gW[c * F + f] += dPre * s[t * C + c];
            gP[t * C + c] += dPre * W[c * F + f];
          }
        }
      }
      return g;
    },
  };
}

/**
 * Single-layer LSTM unrolled over [T, C] input, H hidden units, loss on the
 * final hidden state. Params: W [C, 4H], U [H, 4H], b [4H], gate order
 * (input, forget, cell, output).
 */
export function lstmBlock(T: number, C: number, H: number): CheckBlock {
  const nW = C * 4 * H;
  const nU = H * 4 * H;
  const paramCount = nW + nU + 4 * H;

  function forward(params: Float64Array, x: Float64Array) {
    const W = params.subarray(0, nW);
    const U = params.subarray(nW, nW + nU);
    const b = params.subarray(nW + nU);
    const gates = new Float64Array(T * 4 * H); // post-activation
    const cs = new Float64Array((T + 1) * H);
    const hs = new Float64Array((T + 1) * H);
    for (let t = 0; t < T; t++) {
      for (let j = 0; j < 4 * H; j++) {
        let z = b[j];
        for (let c = 0; c < C; c++) z += x[t * C + c] * W[c * 4 * H + j];
        for (let k = 0; k < H; k++) z += hs[t * H + k] * U[k * 4 * H + j];
        gates[t * 4 * H + j] = j < 2 * H || j >= 3 * H ? sigmoid(z) : Math.tanh(z);
      }
      for (let k = 0; k < H; k++) {
        const i = gates[t * 4 * H + k];
        const f = gates[t * 4 * H + H + k];
        const gc = gates[t * 4 * H + 2 * H + k];
        const o = gates[t * 4 * H + 3 * H + k];
        const cNew = f * cs[t * H + k] + i * gc;
        cs[(t + 1) * H + k] = cNew;
        hs[(t + 1) * H + k] = o * Math.tanh(cNew);
      }
    }
    return { gates, cs, hs };
  }

  return {
    name: 'lstm_cell',
    paramCount,
    loss(params, x) {
      const { hs } = forward(params, x);
      let sum = 0;
      for (let k = 0; k < H; k++) sum += hs[T * H + k] ** 2;
      return 0.5 * sum;
    },
    grad(params, x) {
      const W = params.subarray(0, nW);
      const U = params.subarray(nW, nW + nU);
      const { gates, cs, hs } = forward(params, x);
      const g = new Float64Array(paramCount);
      const gW = g.subarray(0, nW);
      const gU = g.subarray(nW, nW + nU);
      const gB = g.subarray(nW + nU);
      const dH = new Float64Array(H);
      const dC = new Float64Array(H);
      for (let k = 0; k < H; k++) dH[k] = hs[T * H + k];
      for (let t = T - 1; t >= 0; t--) {
        const dZ = new Float64Array(4 * H);
        for (let k = 0; k < H; k++) {
          const i = gates[t * 4 * H + k];
          const f = gates[t * 4 * H + H + k];
          const gc = gates[t * 4 * H + 2 * H + k];
          const o = gates[t * 4 * H + 3 * H + k];
          const cNew = cs[(t + 1) * H + k];
          const tc = Math.tanh(cNew);
          const dCTotal = dC[k] + dH[k] * o * (1 - tc * tc);
          dZ[3 * H + k] = dH[k] * tc * o * (1 - o);
          dZ[k] = dCTotal * gc * i * (1 - i);
          dZ[H + k] = dCTotal * cs[t * H + k] * f * (1 - f);
          dZ[2 * H + k] = dCTotal * i * (1 - gc * gc);
          dC[k] = dCTotal * f;
        }
        dH.fill(0);
        for (let j = 0; j < 4 * H; j++) {
          const d = dZ[j];
          if (d === 0) continue;
          gB[j] += d;
          for (let c = 0; c < C; c++) gW[c * 4 * H + j] += d * x[t * C + c];
          for (let k = 0; k < H; k++) {
            gU[k * 4 * H + j] += d * hs[t * H + k];
            dH[k] += d * U[k * 4 * H + j];
          }
        }
      }
      return g;
    },
  };
}

/** Central finite-difference gradient of `block.loss` at `params`. */
export function numericGradient(
  block: CheckBlock,
  params: Float64Array,
  x: Float64Array,
  h = 1e-6,
): Float64Array {
  const g = new Float64Array(block.paramCount);
  const p = params.slice();
  for (let i = 0; i < block.paramCount; i++) {
    const orig = p[i];
    p[i] = orig + h;
    const up = block.loss(p, x);
    p[i] = orig - h;
    const down = block.loss(p, x);
    p[i] = orig;
    g[i] = (up - down) / (2 * h);
  }
  return g;
}

/** Largest element-wise relative difference between two gradients. */
export function maxRelativeError(a: Float64Array, b: Float64Array): number {
  let worst = 0;
  for (let i = 0; i < a.length; i++) {
    const denom = Math.max(1e-8, Math.abs(a[i]) + Math.abs(b[i]));
    worst = Math.max(worst, Math.abs(a[i] - b[i]) / denom);
  }
  return worst;
}
