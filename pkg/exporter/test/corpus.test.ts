import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { describe, expect, it } from "vitest";

import { CorpusParseError, loadCorpus } from "../src/corpus.js";

function tempFile(content: string, name = "corpus.jsonl"): string {
  const dir = mkdtempSync(join(tmpdir(), "kcx-"));
  const path = join(dir, name);
  writeFileSync(path, content);
  return path;
}

describe("loadCorpus jsonl", () => {
  it("parses records in order", () => {
    const path = tempFile(
      '{"id": "a", "text": "one", "label": 1}\n{"id": "b", "text": "two", "label": 0}\n',
    );
    const docs = loadCorpus(path);
    expect(docs.map((d) => d.id)).toEqual(["a", "b"]);
    expect(docs[0].label).toBe(1);
  });

  it("skips blank lines", () => {
    const path = tempFile('{"id": "a", "text": "x", "label": 0}\n\n');
    expect(loadCorpus(path)).toHaveLength(1);
  });

  it("reports the failing line number", () => {
    const path = tempFile('{"id": "a", "text": "x", "label": 0}\nnot json\n');
    expect(() => loadCorpus(path)).toThrowError(/:2:/);
  });

  it("rejects duplicate ids", () => {
    const path = tempFile(
      '{"id": "a", "text": "x", "label": 0}\n{"id": "a", "text": "y", "label": 1}\n',
    );
    expect(() => loadCorpus(path)).toThrowError(CorpusParseError);
    expect(() => loadCorpus(path)).toThrowError(/duplicate/);
  });

  it("rejects bad labels", () => {
    const path = tempFile('{"id": "a", "text": "x", "label": 2}\n');
    expect(() => loadCorpus(path)).toThrowError(/label/);
  });
});

describe("loadCorpus tsv", () => {
  it("parses three columns", () => {
    const path = tempFile("a\thello world\t1\nb\tbye\t0\n", "corpus.tsv");
    const docs = loadCorpus(path, "tsv");
    expect(docs).toHaveLength(2);
    expect(docs[0].text).toBe("hello world");
  });

  it("rejects extra columns", () => {
    const path = tempFile("a\thas\ttab\t1\n", "corpus.tsv");
    expect(() => loadCorpus(path, "tsv")).toThrowError(/3 tab-separated/);
  });
});
