/**
 * Export job: corpus in, KCEM file plus JSON sidecar out, one embedding
 * row per document in corpus order.
 */

import { writeFileSync } from "node:fs";

import { CorpusDocument } from "./corpus.js";
import { EmbeddingMatrix, writeKcem } from "./kcem.js";
import { DocumentEncoder, Pooling, pool } from "./registry.js";

export interface ExportJob {
  model: string;
  corpusPath: string;
  format: "jsonl" | "tsv";
  pooling: Pooling;
  outPath: string;
  maxLength: number;
  /** optional path for the per-token debug dump (JSON) */
  dumpTokensPath?: string;
}

export interface ExportResult {
  nDocs: number;
  dimension: number;
  truncatedDocs: number;
}

interface TokenDump {
  id: string;
  tokens: string[];
  /** float32-rounded final-layer vectors, one per token */
  vectors: number[][];
}

function toFloat32(vector: Float64Array): number[] {
  return Array.from(vector, Math.fround);
}

export async function runExport(
  encoder: DocumentEncoder,
  docs: CorpusDocument[],
  job: ExportJob,
  warn: (message: string) => void = console.error,
): Promise<ExportResult> {
  const d = encoder.dimension;
  const values = new Float32Array(docs.length * d);
  const ids: string[] = [];
  const dumps: TokenDump[] = [];
  let truncatedDocs = 0;

  for (let row = 0; row < docs.length; row++) {
    const doc = docs[row];
    const encoded = await encoder.encodeDocument(doc.text, job.maxLength);
    if (encoded.truncated) {
      truncatedDocs++;
      warn(`warning: document ${doc.id} exceeds max length ${job.maxLength}; truncated`);
    }
    const pooled = pool(encoded.tokenVectors, job.pooling);
    values.set(Float32Array.from(pooled), row * d);
    ids.push(doc.id);
    if (job.dumpTokensPath) {
      dumps.push({
        id: doc.id,
        tokens: encoded.tokens,
        vectors: encoded.tokenVectors.map(toFloat32),
      });
    }
  }

  const matrix: EmbeddingMatrix = { ids, values, d };
  writeKcem(job.outPath, matrix);
  const sidecar = {
    model: job.model,
    backend: encoder.backend,
    pooling: job.pooling,
    dimension: d,
    n_docs: docs.length,
    max_length: job.maxLength,
  };
  writeFileSync(`${job.outPath}.json`, JSON.stringify(sidecar, null, 2) + "\n");
  if (job.dumpTokensPath) {
    writeFileSync(job.dumpTokensPath, JSON.stringify(dumps, null, 2) + "\n");
  }
  return { nDocs: docs.length, dimension: d, truncatedDocs };
}
