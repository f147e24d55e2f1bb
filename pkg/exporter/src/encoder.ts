/**
 * Built-in deterministic document encoder.
 *
 * A small eval-mode transformer encoder whose weights come from a seeded
 * PRNG: hash-derived token embeddings plus sinusoidal positions, then
 * pre-norm self-attention and feed-forward blocks. It stands in for a
 * pretrained model where hub access is unavailable: fully deterministic
 * (same text, same vectors), real attention mixing, and per-token final
 * vectors exposed for debug dumps so pooling can be verified externally.
 */

export interface EncoderConfig {
  d: number;
  layers: number;
  heads: number;
  seed: number;
}

export type Pooling = "cls" | "mean";

export interface EncodedDocument {
  /** final-layer vector per token position */
  tokenVectors: Float64Array[];
  tokens: string[];
  truncated: boolean;
}

// -- deterministic randomness -------------------------------------------------

export function fnv1a(text: string): number {
  let h = 0x811c9dc5;
  for (let i = 0; i < text.length; i++) {
    h ^= text.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return h >>> 0;
}

export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = a;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function gaussian(rng: () => number): number {
  // Box-Muller; consumes two uniforms per draw
  const u = Math.max(rng(), 1e-12);
  const v = rng();
  return Math.sqrt(-2 * Math.log(u)) * Math.cos(2 * Math.PI * v);
}

function seededMatrix(rows: number, cols: number, rng: () => number, scale: number): Float64Array {
  const m = new Float64Array(rows * cols);
  for (let i = 0; i < m.length; i++) m[i] = gaussian(rng) * scale;
  return m;
}

// -- small dense math ---------------------------------------------------------

function matvec(m: Float64Array, rows: number, cols: number, x: Float64Array): Float64Array {
  const out = new Float64Array(rows);
  for (let r = 0; r < rows; r++) {
    let acc = 0;
    const base = r * cols;
    for (let c = 0; c < cols; c++) acc += m[base + c] * x[c];
    out[r] = acc;
  }
  return out;
}

function layerNorm(x: Float64Array): Float64Array {
  let mean = 0;
  for (const v of x) mean += v;
  mean /= x.length;
  let variance = 0;
  for (const v of x) variance += (v - mean) * (v - mean);
  variance /= x.length;
  const inv = 1 / Math.sqrt(variance + 1e-5);
  const out = new Float64Array(x.length);
  for (let i = 0; i < x.length; i++) out[i] = (x[i] - mean) * inv;
  return out;
}

function gelu(x: number): number {
  return 0.5 * x * (1 + Math.tanh(Math.sqrt(2 / Math.PI) * (x + 0.044715 * x * x * x)));
}

function softmaxInPlace(x: Float64Array): void {
  let max = -Infinity;
  for (const v of x) if (v > max) max = v;
  let sum = 0;
  for (let i = 0; i < x.length; i++) {
    x[i] = Math.exp(x[i] - max);
    sum += x[i];
  }
  for (let i = 0; i < x.length; i++) x[i] /= sum;
}

// -- tokenizer ----------------------------------------------------------------

/** Lowercase alphanumeric runs; empty documents yield one empty-string token. */
export function tokenizeForEncoder(text: string): string[] {
  const tokens = text.toLowerCase().match(/[a-z0-9]+/g) ?? [];
  return tokens.length > 0 ? tokens : [""];
}

// -- the encoder --------------------------------------------------------------

interface LayerWeights {
  wq: Float64Array;
  wk: Float64Array;
  wv: Float64Array;
  wo: Float64Array;
  ff1: Float64Array;
  ff2: Float64Array;
}

export class DeterministicEncoder {
  readonly config: EncoderConfig;
  private readonly layerWeights: LayerWeights[];
  private readonly tokenCache = new Map<string, Float64Array>();

  constructor(config: EncoderConfig) {
    if (config.d % config.heads !== 0) {
      throw new Error(`model width ${config.d} not divisible by ${config.heads} heads`);
    }
    this.config = config;
    const rng = mulberry32(config.seed);
    const scale = 1 / Math.sqrt(config.d);
    this.layerWeights = [];
    for (let l = 0; l < config.layers; l++) {
      this.layerWeights.push({
        wq: seededMatrix(config.d, config.d, rng, scale),
        wk: seededMatrix(config.d, config.d, rng, scale),
        wv: seededMatrix(config.d, config.d, rng, scale),
        wo: seededMatrix(config.d, config.d, rng, scale),
        ff1: seededMatrix(2 * config.d, config.d, rng, scale),
        ff2: seededMatrix(config.d, 2 * config.d, rng, scale),
      });
    }
  }

  private tokenEmbedding(token: string): Float64Array {
    let cached = this.tokenCache.get(token);
    if (!cached) {
      // seed depends only on (token, model seed), never on corpus order
      const rng = mulberry32(fnv1a(token) ^ Math.imul(this.config.seed, 0x9e3779b1));
      cached = seededMatrix(1, this.config.d, rng, 1 / Math.sqrt(this.config.d));
      this.tokenCache.set(token, cached);
    }
    return cached;
  }

  private position(pos: number): Float64Array {
    const { d } = this.config;
    const out = new Float64Array(d);
    for (let i = 0; i < d; i += 2) {
      const angle = pos / Math.pow(10000, i / d);
      out[i] = Math.sin(angle);
      if (i + 1 < d) out[i + 1] = Math.cos(angle);
    }
    return out;
  }

  encode(tokens: string[], maxLength: number): EncodedDocument {
    const truncated = tokens.length > maxLength;
    const kept = truncated ? tokens.slice(0, maxLength) : tokens;
    const { d, heads } = this.config;
    const dk = d / heads;

    let states: Float64Array[] = kept.map((token, pos) => {
      const e = this.tokenEmbedding(token);
      const p = this.position(pos);
      const x = new Float64Array(d);
      for (let i = 0; i < d; i++) x[i] = e[i] + p[i];
      return x;
    });

    for (const w of this.layerWeights) {
      // pre-norm multi-head self-attention with residual
      const normed = states.map(layerNorm);
      const q = normed.map((x) => matvec(w.wq, d, d, x));
      const k = normed.map((x) => matvec(w.wk, d, d, x));
      const v = normed.map((x) => matvec(w.wv, d, d, x));
      const mixed = states.map((_, i) => {
        const concat = new Float64Array(d);
        for (let h = 0; h < heads; h++) {
          const off = h * dk;
          const scores = new Float64Array(states.length);
          for (let j = 0; j < states.length; j++) {
            let acc = 0;
            for (let c = 0; c < dk; c++) acc += q[i][off + c] * k[j][off + c];
            scores[j] = acc / Math.sqrt(dk);
          }
          softmaxInPlace(scores);
          for (let j = 0; j < states.length; j++) {
            const weight = scores[j];
            for (let c = 0; c < dk; c++) concat[off + c] += weight * v[j][off + c];
          }
        }
        return matvec(w.wo, d, d, concat);
      });
      states = states.map((x, i) => {
        const out = new Float64Array(d);
        for (let c = 0; c < d; c++) out[c] = x[c] + mixed[i][c];
        return out;
      });

      // pre-norm feed-forward with residual
      const ffIn = states.map(layerNorm);
      states = states.map((x, i) => {
        const hidden = matvec(w.ff1, 2 * d, d, ffIn[i]);
        for (let c = 0; c < hidden.length; c++) hidden[c] = gelu(hidden[c]);
        const back = matvec(w.ff2, d, 2 * d, hidden);
        const out = new Float64Array(d);
        for (let c = 0; c < d; c++) out[c] = x[c] + back[c];
        return out;
      });
    }

    return { tokenVectors: states.map(layerNorm), tokens: kept, truncated };
  }
}

// -- pooling ------------------------------------------------------------------

export function pool(vectors: Float64Array[], pooling: Pooling): Float64Array {
  if (vectors.length === 0) throw new Error("cannot pool zero token vectors");
  if (pooling === "cls") {
    return vectors[0];
  }
  const d = vectors[0].length;
  const out = new Float64Array(d);
  for (const v of vectors) {
    for (let i = 0; i < d; i++) out[i] += v[i];
  }
  for (let i = 0; i < d; i++) out[i] /= vectors.length;
  return out;
}
