/**
 * KCEM binary embedding format.
 *
 * Layout (all integers little-endian): magic "KCEM", version u16 = 1,
 * n_d u64, d u32, then n_d null-terminated UTF-8 document ids, then
 * n_d * d little-endian float32 values row-major.
 */

import { readFileSync, writeFileSync } from "node:fs";

export const KCEM_MAGIC = "KCEM";
export const KCEM_VERSION = 1;

export interface EmbeddingMatrix {
  ids: string[];
  /** row-major values; length ids.length * d */
  values: Float32Array;
  d: number;
}

export function writeKcem(path: string, matrix: EmbeddingMatrix): void {
  const { ids, values, d } = matrix;
  if (values.length !== ids.length * d) {
    throw new Error(`value buffer has ${values.length} floats, expected ${ids.length * d}`);
  }
  const header = Buffer.alloc(4 + 2 + 8 + 4);
  header.write(KCEM_MAGIC, 0, "ascii");
  header.writeUInt16LE(KCEM_VERSION, 4);
  header.writeBigUInt64LE(BigInt(ids.length), 6);
  header.writeUInt32LE(d, 14);
  const idTable = Buffer.concat(ids.map((id) => Buffer.concat([Buffer.from(id, "utf-8"), Buffer.from([0])])));
  const data = Buffer.alloc(values.length * 4);
  for (let i = 0; i < values.length; i++) {
    data.writeFloatLE(values[i], i * 4);
  }
  writeFileSync(path, Buffer.concat([header, idTable, data]));
}

export function readKcem(path: string): EmbeddingMatrix {
  const blob = readFileSync(path);
  if (blob.length < 18 || blob.toString("ascii", 0, 4) !== KCEM_MAGIC) {
    throw new Error(`${path}: not a KCEM file`);
  }
  const version = blob.readUInt16LE(4);
  if (version !== KCEM_VERSION) {
    throw new Error(`${path}: unsupported KCEM version ${version}`);
  }
  const n = Number(blob.readBigUInt64LE(6));
  const d = blob.readUInt32LE(14);
  let pos = 18;
  const ids: string[] = [];
  for (let i = 0; i < n; i++) {
    const end = blob.indexOf(0, pos);
    if (end < 0) throw new Error(`${path}: truncated id table`);
    ids.push(blob.toString("utf-8", pos, end));
    pos = end + 1;
  }
  const expected = n * d * 4;
  if (blob.length - pos !== expected) {
    throw new Error(`${path}: expected ${expected} bytes of float32 data, found ${blob.length - pos}`);
  }
  const values = new Float32Array(n * d);
  for (let i = 0; i < values.length; i++) {
    values[i] = blob.readFloatLE(pos + i * 4);
  }
  return { ids, values, d };
}
