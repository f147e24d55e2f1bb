/**
 * Corpus reader matching the classifier's file contract:
 * JSONL with {id, text, label} per line, or three-column TSV (id, text,
 * label) with no header and tabs forbidden inside text.
 */

import { readFileSync } from "node:fs";

export interface CorpusDocument {
  id: string;
  text: string;
  label: 0 | 1;
}

export type CorpusFormat = "jsonl" | "tsv";

export class CorpusParseError extends Error {
  constructor(path: string, lineNo: number, message: string) {
    super(`${path}:${lineNo}: ${message}`);
    this.name = "CorpusParseError";
  }
}

function validate(
  path: string,
  lineNo: number,
  id: unknown,
  text: unknown,
  label: unknown,
  seen: Set<string>,
): CorpusDocument {
  if (typeof id !== "string" || id.length === 0) {
    throw new CorpusParseError(path, lineNo, "record id must be a non-empty string");
  }
  if (typeof text !== "string") {
    throw new CorpusParseError(path, lineNo, "text must be a string");
  }
  if (label !== 0 && label !== 1) {
    throw new CorpusParseError(path, lineNo, `label must be 0 or 1, got ${JSON.stringify(label)}`);
  }
  if (seen.has(id)) {
    throw new CorpusParseError(path, lineNo, `duplicate document id ${JSON.stringify(id)}`);
  }
  seen.add(id);
  return { id, text, label };
}

export function loadCorpus(path: string, format: CorpusFormat = "jsonl"): CorpusDocument[] {
  const raw = readFileSync(path, "utf-8");
  const docs: CorpusDocument[] = [];
  const seen = new Set<string>();
  const lines = raw.split("\n");
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].replace(/\r$/, "");
    if (line.trim() === "") continue;
    const lineNo = i + 1;
    if (format === "jsonl") {
      let record: unknown;
      try {
        record = JSON.parse(line);
      } catch (err) {
        throw new CorpusParseError(path, lineNo, `invalid JSON: ${(err as Error).message}`);
      }
      const obj = record as Record<string, unknown>;
      if (typeof obj !== "object" || obj === null) {
        throw new CorpusParseError(path, lineNo, "record must be an object");
      }
      docs.push(validate(path, lineNo, obj.id, obj.text, obj.label, seen));
    } else {
      const cols = line.split("\t");
      if (cols.length !== 3) {
        throw new CorpusParseError(path, lineNo, `expected 3 tab-separated columns, got ${cols.length}`);
      }
      const label = cols[2] === "0" ? 0 : cols[2] === "1" ? 1 : null;
      if (label === null) {
        throw new CorpusParseError(path, lineNo, `label must be 0 or 1, got ${JSON.stringify(cols[2])}`);
      }
      docs.push(validate(path, lineNo, cols[0], cols[1], label, seen));
    }
  }
  return docs;
}
