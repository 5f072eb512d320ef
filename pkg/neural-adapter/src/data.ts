/**
 * Shared file formats. Everything read or written here must round-trip
 * through the Python toolkit unchanged (same JSONL field names).
 */

import * as fs from "node:fs";
import * as path from "node:path";

/** One supervised instance, as emitted by the dataset builder. */
export interface Instance {
  id: string;
  mode: string;
  repr: string;
  input: string;
  target: string;
  repo: string;
  path: string;
  job: string;
  step: number;
}

/** One masked pre-training instance (sentinel-span format). */
export interface MaskedInstance {
  input: string;
  target: string;
  path: string;
}

/** One prediction, consumable by the evaluation command. */
export interface PredictionRecord {
  id: string;
  prediction: string;
  confidence: number;
  stop_reason: string;
}

export function readJsonl<T>(filePath: string): T[] {
  const text = fs.readFileSync(filePath, "utf-8");
  return text
    .split("\n")
    .filter((line) => line.trim() !== "")
    .map((line) => JSON.parse(line) as T);
}

export function writeJsonl(filePath: string, rows: unknown[]): void {
  const text = rows.map((r) => JSON.stringify(r)).join("\n") + (rows.length ? "\n" : "");
  atomicWrite(filePath, text);
}

export function writeJson(filePath: string, value: unknown): void {
  atomicWrite(filePath, JSON.stringify(value, null, 2) + "\n");
}

export function readJson<T>(filePath: string): T {
  return JSON.parse(fs.readFileSync(filePath, "utf-8")) as T;
}

/** Write via a temp file in the same directory, then rename. */
export function atomicWrite(filePath: string, content: string): void {
  fs.mkdirSync(path.dirname(filePath), { recursive: true });
  const tmp = `${filePath}.tmp-${process.pid}`;
  fs.writeFileSync(tmp, content, "utf-8");
  fs.renameSync(tmp, filePath);
}

export function writeCsv(
  filePath: string,
  header: string[],
  rows: (string | number)[][]
): void {
  const lines = [header.join(",")];
  for (const row of rows) lines.push(row.join(","));
  atomicWrite(filePath, lines.join("\n") + "\n");
}
