/**
 * COIREMB1 vector file writer/reader.
 *
 * Layout: 8-byte ASCII magic "COIREMB1", u32 LE row count, u32 LE dimension,
 * then count*dim float32 LE values, row-major. Row names live in a sidecar
 * UTF-8 ids file, one per line, line i naming row i.
 */

import { writeFileSync, readFileSync } from "node:fs";

export const MAGIC = "COIREMB1";
const HEADER_BYTES = 16;

export interface EmbeddingFile {
  ids: string[];
  dim: number;
  rows: Float32Array[];
}

export function writeEmbeddings(
  ids: string[],
  rows: Float32Array[],
  vecPath: string,
  idsPath: string,
): void {
  if (ids.length !== rows.length) {
    throw new Error(`${ids.length} ids for ${rows.length} rows`);
  }
  const dim = rows.length > 0 ? rows[0]!.length : 0;
  const buffer = Buffer.alloc(HEADER_BYTES + rows.length * dim * 4);
  buffer.write(MAGIC, 0, "ascii");
  buffer.writeUInt32LE(rows.length, 8);
  buffer.writeUInt32LE(dim, 12);
  let offset = HEADER_BYTES;
  for (let r = 0; r < rows.length; r += 1) {
    const row = rows[r]!;
    if (row.length !== dim) {
      throw new Error(`row ${r} has dim ${row.length}, expected ${dim}`);
    }
    for (let d = 0; d < dim; d += 1) {
      const value = row[d]!;
      if (!Number.isFinite(value)) {
        throw new Error(`non-finite value at row ${r}`);
      }
      buffer.writeFloatLE(value, offset);
      offset += 4;
    }
  }
  writeFileSync(vecPath, buffer);
  writeFileSync(idsPath, ids.map((id) => `${id}\n`).join(""), "utf-8");
}

export function readEmbeddings(vecPath: string, idsPath: string): EmbeddingFile {
  const buffer = readFileSync(vecPath);
  if (buffer.length < HEADER_BYTES) {
    throw new Error(`${vecPath}: truncated header (${buffer.length} bytes)`);
  }
  const magic = buffer.toString("ascii", 0, 8);
  if (magic !== MAGIC) {
    throw new Error(`${vecPath}: bad magic ${JSON.stringify(magic)}`);
  }
  const count = buffer.readUInt32LE(8);
  const dim = buffer.readUInt32LE(12);
  const expected = HEADER_BYTES + count * dim * 4;
  if (buffer.length !== expected) {
    throw new Error(`${vecPath}: ${buffer.length} bytes, header implies ${expected}`);
  }
  const rows: Float32Array[] = [];
  let offset = HEADER_BYTES;
  for (let r = 0; r < count; r += 1) {
    const row = new Float32Array(dim);
    for (let d = 0; d < dim; d += 1) {
      row[d] = buffer.readFloatLE(offset);
      offset += 4;
    }
    rows.push(row);
  }
  const ids = readFileSync(idsPath, "utf-8").split("\n");
  if (ids[ids.length - 1] === "") ids.pop();
  if (ids.length !== count) {
    throw new Error(`${idsPath}: ${ids.length} id lines but header count is ${count}`);
  }
  return { ids, dim, rows };
}
