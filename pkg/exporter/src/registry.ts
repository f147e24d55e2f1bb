/**
 * Model registry: maps export model names to document encoders.
 *
 * The four pretrained names resolve through @xenova/transformers (an
 * optional dependency) and need hub network access for weights; the
 * built-in deterministic models run fully offline and exist so the
 * pipeline, pooling, and KCEM output can be exercised and tested
 * anywhere.
 */

import {
  DeterministicEncoder,
  EncodedDocument,
  Pooling,
  pool,
  tokenizeForEncoder,
} from "./encoder.js";

export interface DocumentEncoder {
  readonly name: string;
  readonly dimension: number;
  readonly backend: "builtin" | "transformers";
  /** Per-token final-layer vectors for one document. */
  encodeDocument(text: string, maxLength: number): Promise<EncodedDocument>;
}

const BUILTIN: Record<string, { d: number; layers: number; heads: number; seed: number }> = {
  "toy-8": { d: 8, layers: 1, heads: 2, seed: 8 },
  "toy-64": { d: 64, layers: 2, heads: 4, seed: 64 },
  "sim-768": { d: 768, layers: 2, heads: 8, seed: 768 },
};

const HUB_MODELS: Record<string, string> = {
  "roberta-base": "Xenova/roberta-base",
  biobert: "dmis-lab/biobert-base-cased-v1.2",
  clinicalbert: "emilyalsentzer/Bio_ClinicalBERT",
  pubmedbert: "microsoft/BiomedNLP-PubMedBERT-base-uncased-abstract",
};

class BuiltinDocumentEncoder implements DocumentEncoder {
  readonly backend = "builtin" as const;
  private readonly encoder: DeterministicEncoder;

  constructor(readonly name: string) {
    this.encoder = new DeterministicEncoder(BUILTIN[name]);
  }

  get dimension(): number {
    return this.encoder.config.d;
  }

  async encodeDocument(text: string, maxLength: number): Promise<EncodedDocument> {
    return this.encoder.encode(tokenizeForEncoder(text), maxLength);
  }
}

class TransformersDocumentEncoder implements DocumentEncoder {
  readonly backend = "transformers" as const;
  readonly dimension: number;

  private constructor(
    readonly name: string,
    dimension: number,
    private readonly extractor: (text: string) => Promise<{ data: ArrayLike<number>; dims: number[] }>,
  ) {
    this.dimension = dimension;
  }

  static async load(name: string, hubId: string): Promise<TransformersDocumentEncoder> {
    // optional dependency; the non-literal specifier keeps the compiler from
    // requiring it at build time
    const moduleName = "@xenova/transformers";
    let transformers: {
      pipeline: (task: string, model: string) => Promise<(text: string) => Promise<unknown>>;
    };
    try {
      transformers = await import(moduleName);
    } catch {
      throw new Error(
        `model ${JSON.stringify(name)} needs the optional @xenova/transformers package ` +
          `(npm install @xenova/transformers) and hub network access; ` +
          `offline alternatives: ${Object.keys(BUILTIN).join(", ")}`,
      );
    }
    const pipe = await transformers.pipeline("feature-extraction", hubId);
    const probe = (await pipe("dimension probe")) as { dims: number[] };
    const dimension = probe.dims[probe.dims.length - 1];
    return new TransformersDocumentEncoder(name, dimension, async (text) => {
      const out = (await pipe(text)) as { data: ArrayLike<number>; dims: number[] };
      return out;
    });
  }

  async encodeDocument(text: string, maxLength: number): Promise<EncodedDocument> {
    const out = await this.extractor(text);
    const seq = out.dims[out.dims.length - 2];
    const d = out.dims[out.dims.length - 1];
    const kept = Math.min(seq, maxLength);
    const tokenVectors: Float64Array[] = [];
    for (let t = 0; t < kept; t++) {
      const row = new Float64Array(d);
      for (let c = 0; c < d; c++) row[c] = Number(out.data[t * d + c]);
      tokenVectors.push(row);
    }
    return { tokenVectors, tokens: [], truncated: seq > maxLength };
  }
}

export function listModels(): string[] {
  return [...Object.keys(BUILTIN), ...Object.keys(HUB_MODELS)];
}

export async function loadEncoder(name: string): Promise<DocumentEncoder> {
  if (name in BUILTIN) {
    return new BuiltinDocumentEncoder(name);
  }
  if (name in HUB_MODELS) {
    return TransformersDocumentEncoder.load(name, HUB_MODELS[name]);
  }
  throw new Error(`unknown model ${JSON.stringify(name)}; available: ${listModels().join(", ")}`);
}

export { pool };
export type { Pooling };
