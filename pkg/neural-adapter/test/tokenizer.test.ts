import { describe, expect, it } from "vitest";

import { EmptyCorpus, SubwordTokenizer, trainTokenizer } from "../src/tokenizer.js";
import { mulberry32 } from "../src/rng.js";

const CORPUS = [
  '{ "name" : "build" , "on" : "push" }',
  '{ "uses" : "actions/checkout@v2" }',
  '{ "run" : "make test" , "run" : "make build" }',
  '{ "runs-on" : "ubuntu-latest" }',
  "the quick brown fox jumps over the lazy dog",
];

describe("trainTokenizer", () => {
  it("rejects an empty corpus", () => {
    expect(() => trainTokenizer([], 100)).toThrow(EmptyCorpus);
    expect(() => trainTokenizer(["   "], 100)).toThrow(EmptyCorpus);
  });

  it("respects the vocabulary budget", () => {
    const tok = trainTokenizer(CORPUS, 64);
    expect(tok.vocabSize).toBeLessThanOrEqual(64);
  });

  it("round-trips every corpus line", () => {
    const tok = trainTokenizer(CORPUS, 200);
    for (const line of CORPUS) {
      expect(tok.decode(tok.encode(line))).toBe(line);
    }
  });

  it("round-trips with a tiny vocabulary (character fallback)", () => {
    const tok = trainTokenizer(CORPUS, 1);
    for (const line of CORPUS) {
      expect(tok.decode(tok.encode(line))).toBe(line);
    }
  });

  it("round-trips 100 random in-corpus word shuffles", () => {
    const tok = trainTokenizer(CORPUS, 150);
    const words = CORPUS.flatMap((line) => line.split(" "));
    const rand = mulberry32(11);
    for (let i = 0; i < 100; i++) {
      const n = 1 + Math.floor(rand() * 12);
      const sample = Array.from(
        { length: n },
        () => words[Math.floor(rand() * words.length)]
      ).join(" ");
      expect(tok.decode(tok.encode(sample))).toBe(sample);
    }
  });

  it("merges frequent pairs into multi-character pieces", () => {
    const tok = trainTokenizer(CORPUS, 200);
    // "the" occurs three times; with budget to spare it becomes few pieces
    expect(tok.encode("the").length).toBeLessThan(3);
  });

  it("serializes and restores identically", () => {
    const tok = trainTokenizer(CORPUS, 120);
    const restored = SubwordTokenizer.fromJSON(
      JSON.parse(JSON.stringify(tok.toJSON()))
    );
    for (const line of CORPUS) {
      expect(restored.encode(line)).toEqual(tok.encode(line));
      expect(restored.decode(restored.encode(line))).toBe(line);
    }
  });

  it("maps unknown characters to a single unknown id", () => {
    const tok = trainTokenizer(CORPUS, 100);
    const ids = tok.encode("é");
    expect(ids.length).toBeGreaterThan(0);
    // decoding drops nothing silently except specials; text stays parseable
    expect(() => tok.decode(ids)).not.toThrow();
  });
});
