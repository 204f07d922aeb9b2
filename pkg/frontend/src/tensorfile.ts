/**
 * Binary tensor exchange format shared with the Python pipeline.
 *
 * Layout (little-endian): magic "APSN", version byte (1), dtype byte
 * (1 = float32), rank byte (1-4), rank x uint64 dims, row-major float32
 * payload.
 */

import * as fs from 'node:fs';

export const TENSOR_MAGIC = 'APSN';
export const TENSOR_VERSION = 1;
export const TENSOR_DTYPE_F32 = 1;
const MAX_RANK = 4;

export interface Tensor {
  dims: number[];
  values: Float32Array;
}

export class FormatError extends Error {}

export function encodeTensor(dims: number[], values: Float32Array): Buffer {
  if (dims.length < 1 || dims.length > MAX_RANK) {
    throw new FormatError(`rank ${dims.length} outside [1, ${MAX_RANK}]`);
  }
  let count = 1;
  for (const d of dims) {
    if (!Number.isInteger(d) || d < 0) {
      throw new FormatError(`bad dimension ${d} in [${dims}]`);
    }
    count *= d;
  }
  if (values.length !== count) {
    throw new FormatError(
      `${values.length} values for dims [${dims}] (need ${count})`,
    );
  }
  const header = Buffer.alloc(7 + 8 * dims.length);
  header.write(TENSOR_MAGIC, 0, 'ascii');
  header.writeUInt8(TENSOR_VERSION, 4);
  header.writeUInt8(TENSOR_DTYPE_F32, 5);
  header.writeUInt8(dims.length, 6);
  dims.forEach((d, i) => header.writeBigUInt64LE(BigInt(d), 7 + 8 * i));
  const payload = Buffer.alloc(4 * count);
  for (let i = 0; i < count; i++) payload.writeFloatLE(values[i], 4 * i);
  return Buffer.concat([header, payload]);
}

export function decodeTensor(data: Buffer): Tensor {
  if (data.length < 7) throw new FormatError('truncated header');
  if (data.toString('ascii', 0, 4) !== TENSOR_MAGIC) {
    throw new FormatError(`bad magic ${data.subarray(0, 4).toString('hex')}`);
  }
  const version = data.readUInt8(4);
  const dtype = data.readUInt8(5);
  const rank = data.readUInt8(6);
  if (version !== TENSOR_VERSION) {
    throw new FormatError(`unsupported version ${version}`);
  }
  if (dtype !== TENSOR_DTYPE_F32) {
    throw new FormatError(`unsupported dtype code ${dtype}`);
  }
  if (rank < 1 || rank > MAX_RANK) {
    throw new FormatError(`rank ${rank} outside [1, ${MAX_RANK}]`);
  }
  const offset = 7 + 8 * rank;
  if (data.length < offset) throw new FormatError('truncated dims');
  const dims: number[] = [];
  let count = 1;
  for (let i = 0; i < rank; i++) {
    const d = Number(data.readBigUInt64LE(7 + 8 * i));
    dims.push(d);
    count *= d;
  }
  if (data.length - offset !== 4 * count) {
    throw new FormatError(
      `payload ${data.length - offset} bytes, expected ${4 * count}`,
    );
  }
  const values = new Float32Array(count);
  for (let i = 0; i < count; i++) values[i] = data.readFloatLE(offset + 4 * i);
  return { dims, values };
}

export function writeTensor(
  path: string,
  dims: number[],
  values: Float32Array,
): void {
  fs.writeFileSync(path, encodeTensor(dims, values));
}

export function readTensor(path: string): Tensor {
  return decodeTensor(fs.readFileSync(path));
}
