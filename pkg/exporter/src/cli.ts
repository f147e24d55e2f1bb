#!/usr/bin/env node
/**
 * export-embeddings CLI.
 *
 * Usage:
 *   knowcage-export export-embeddings --model NAME --corpus PATH \
 *       [--format jsonl|tsv] --pooling cls|mean --out PATH \
 *       [--max-length N] [--dump-tokens PATH]
 *   knowcage-export list-models
 */

import { realpathSync } from "node:fs";
import { pathToFileURL } from "node:url";

import { loadCorpus } from "./corpus.js";
import { ExportJob, runExport } from "./export.js";
import { listModels, loadEncoder } from "./registry.js";

interface Flags {
  [key: string]: string;
}

function parseFlags(argv: string[]): Flags {
  const flags: Flags = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith("--")) {
      throw new Error(`unexpected argument ${JSON.stringify(arg)}`);
    }
    const key = arg.slice(2);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith("--")) {
      throw new Error(`flag --${key} needs a value`);
    }
    flags[key] = value;
    i++;
  }
  return flags;
}

function usage(): string {
  return [
    "usage: knowcage-export export-embeddings --model NAME --corpus PATH",
    "           [--format jsonl|tsv] --pooling cls|mean --out PATH",
    "           [--max-length N] [--dump-tokens PATH]",
    "       knowcage-export list-models",
    "",
    `models: ${listModels().join(", ")}`,
  ].join("\n");
}

export async function main(argv: string[]): Promise<number> {
  const [command, ...rest] = argv;
  if (command === "list-models") {
    console.log(listModels().join("\n"));
    return 0;
  }
  if (command !== "export-embeddings") {
    console.error(usage());
    return 2;
  }
  let flags: Flags;
  try {
    flags = parseFlags(rest);
  } catch (err) {
    console.error(`error: ${(err as Error).message}\n\n${usage()}`);
    return 2;
  }
  for (const required of ["model", "corpus", "out"]) {
    if (!flags[required]) {
      console.error(`error: --${required} is required\n\n${usage()}`);
      return 2;
    }
  }
  const pooling = flags.pooling ?? "mean";
  if (pooling !== "cls" && pooling !== "mean") {
    console.error(`error: --pooling must be cls or mean, got ${pooling}`);
    return 2;
  }
  const format = flags.format ?? "jsonl";
  if (format !== "jsonl" && format !== "tsv") {
    console.error(`error: --format must be jsonl or tsv, got ${format}`);
    return 2;
  }
  const maxLength = flags["max-length"] ? Number(flags["max-length"]) : 128;
  if (!Number.isInteger(maxLength) || maxLength < 1) {
    console.error(`error: --max-length must be a positive integer`);
    return 2;
  }

  const job: ExportJob = {
    model: flags.model,
    corpusPath: flags.corpus,
    format,
    pooling,
    outPath: flags.out,
    maxLength,
    dumpTokensPath: flags["dump-tokens"],
  };
  try {
    const docs = loadCorpus(job.corpusPath, job.format);
    const encoder = await loadEncoder(job.model);
    const result = await runExport(encoder, docs, job);
    console.log(
      `wrote ${job.outPath}: ${result.nDocs} documents x ${result.dimension} dims ` +
        `(${job.pooling} pooling, ${result.truncatedDocs} truncated)`,
    );
    return 0;
  } catch (err) {
    console.error(`error: ${(err as Error).message}`);
    return 1;
  }
}

function invokedDirectly(): boolean {
  if (!process.argv[1]) return false;
  try {
    // realpath resolves the bin symlink back to dist/cli.js
    return import.meta.url === pathToFileURL(realpathSync(process.argv[1])).href;
  } catch {
    return false;
  }
}

if (invokedDirectly()) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
