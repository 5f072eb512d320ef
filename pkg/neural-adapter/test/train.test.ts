import * as fs from "node:fs";
import * as os from "node:os";
import * as path from "node:path";

import { afterAll, describe, expect, it } from "vitest";

import type { Instance, MaskedInstance } from "../src/data.js";
import { ContextWindowLM } from "../src/model.js";
import { trainTokenizer } from "../src/tokenizer.js";
import {
  BadStrategy,
  DEFAULT_RUN,
  EarlyStopper,
  finetune,
  pretrain,
  toExamples,
  validateRun,
  type TrainRun,
} from "../src/train.js";

const tmpRoot = fs.mkdtempSync(path.join(os.tmpdir(), "adapter-train-"));
afterAll(() => fs.rmSync(tmpRoot, { recursive: true, force: true }));

function makeInstance(id: string, input: string, target: string): Instance {
  return {
    id,
    mode: "NS",
    repr: "raw",
    input,
    target,
    repo: "r",
    path: "p",
    job: "j",
    step: 1,
  };
}

const YAML_LINES = [
  '{ "run" : "make test" }',
  '{ "run" : "make build" }',
  '{ "uses" : "checkout" }',
  '{ "name" : "install" , "run" : "npm ci" }',
];

describe("validateRun", () => {
  it("accepts the defaults", () => {
    expect(() => validateRun(DEFAULT_RUN)).not.toThrow();
  });

  it.each([
    ["steps", { steps: 0 }],
    ["delta", { earlyStopDelta: 0 }],
    ["patience", { patience: 0 }],
  ])("rejects bad %s", (_label, patch) => {
    expect(() => validateRun({ ...DEFAULT_RUN, ...patch })).toThrow();
  });
});

describe("EarlyStopper", () => {
  it("flat scores stop after patience checkpoints, best stays at the jump", () => {
    const stopper = new EarlyStopper(0.01, 5);
    const scores = [0.1, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2];
    const stops = scores.map((s) => stopper.observe(s));
    expect(stops).toEqual([false, false, false, false, false, false, true]);
    expect(stopper.bestIndex).toBe(1); // the second checkpoint
    expect(stopper.bestScore).toBe(0.2);
  });

  it("never stops while scores keep improving", () => {
    const stopper = new EarlyStopper(0.01, 5);
    for (let i = 0; i < 50; i++) {
      expect(stopper.observe(i * 0.02)).toBe(false);
    }
  });

  it("sub-delta improvements do not reset patience", () => {
    const stopper = new EarlyStopper(0.05, 3);
    expect(stopper.observe(0.5)).toBe(false);
    expect(stopper.observe(0.51)).toBe(false);
    expect(stopper.observe(0.52)).toBe(false);
    expect(stopper.observe(0.53)).toBe(true);
    expect(stopper.bestIndex).toBe(0);
  });
});

describe("toExamples", () => {
  it("emits one example per target-side position plus the end marker", () => {
    const tok = trainTokenizer(YAML_LINES, 400);
    const examples = toExamples(tok, 8, '{ "run" :', '"make test" }');
    const targetLen = tok.encode('"make test" }').length;
    expect(examples.length).toBe(targetLen + 1); // + EOS prediction
    expect(examples.at(-1)!.target).toBe(tok.eosId);
    for (const ex of examples) expect(ex.context.length).toBe(8);
  });

  it("applies input/target token limits", () => {
    const tok = trainTokenizer(YAML_LINES, 400);
    const examples = toExamples(tok, 8, '{ "run" : "make test" }', '{ "x" }', {
      maxInputTokens: 2,
      maxTargetTokens: 1,
    });
    expect(examples.length).toBe(2); // 1 target token + EOS
  });
});

describe("pretrain", () => {
  const masked: MaskedInstance[] = YAML_LINES.map((line, i) => ({
    input: line.replace('"', "<extra_id_0>"),
    target: '<extra_id_0> "',
    path: `w${i}.yml`,
  }));

  it("rejects NO-PT", () => {
    const tok = trainTokenizer(YAML_LINES, 300);
    const model = new ContextWindowLM(
      { vocabSize: tok.vocabSize, contextSize: 8, embedDim: 8, hiddenDim: 16 },
      1
    );
    expect(() =>
      pretrain(model, tok, masked, { ...DEFAULT_RUN, strategy: "NO-PT" })
    ).toThrow(BadStrategy);
  });

  it.each(["YL", "NL", "NL+YL"] as const)(
    "%s training reduces the loss",
    (strategy) => {
      const tok = trainTokenizer(YAML_LINES, 300);
      const model = new ContextWindowLM(
        { vocabSize: tok.vocabSize, contextSize: 8, embedDim: 8, hiddenDim: 16 },
        1
      );
      const run: TrainRun = { ...DEFAULT_RUN, strategy, steps: 120, seed: 3 };
      const trace = pretrain(model, tok, masked, run);
      const head = average(trace.losses.slice(0, 10));
      const tail = average(trace.losses.slice(-10));
      expect(tail).toBeLessThan(head);
      expect(trace.rates.length).toBe(run.steps);
    }
  );

  it("is deterministic for a fixed seed", () => {
    const tok = trainTokenizer(YAML_LINES, 300);
    const config = { vocabSize: tok.vocabSize, contextSize: 8, embedDim: 8, hiddenDim: 16 };
    const run: TrainRun = { ...DEFAULT_RUN, strategy: "YL", steps: 40, seed: 9 };
    const a = pretrain(new ContextWindowLM(config, 5), tok, masked, run);
    const b = pretrain(new ContextWindowLM(config, 5), tok, masked, run);
    expect(a.losses).toEqual(b.losses);
  });
});

describe("finetune", () => {
  const instances = YAML_LINES.map((line, i) =>
    makeInstance(`i${i}`, `step ${i} :`, line)
  );

  it("returns the best checkpoint and writes run artifacts", () => {
    const tok = trainTokenizer(
      YAML_LINES.concat(instances.map((i) => i.input)),
      400
    );
    const model = new ContextWindowLM(
      { vocabSize: tok.vocabSize, contextSize: 8, embedDim: 12, hiddenDim: 24 },
      2
    );
    const runDir = path.join(tmpRoot, "run1");
    const run: TrainRun = {
      ...DEFAULT_RUN,
      steps: 150,
      checkpointEvery: 25,
      baseRate: 0.4,
      seed: 4,
    };
    const result = finetune(model, tok, instances, instances, run, runDir);
    expect(result.evalScores.length).toBeGreaterThan(0);
    expect(result.bestCheckpoint).toBeGreaterThanOrEqual(1);
    expect(Math.max(...result.evalScores)).toBeGreaterThan(0);
    expect(fs.existsSync(path.join(runDir, "run.json"))).toBe(true);
    expect(fs.existsSync(path.join(runDir, "best", "model.json"))).toBe(true);
    expect(fs.existsSync(path.join(runDir, "loss.csv"))).toBe(true);
    expect(fs.existsSync(path.join(runDir, "eval.csv"))).toBe(true);
    const evalCsv = fs.readFileSync(path.join(runDir, "eval.csv"), "utf-8");
    expect(evalCsv.split("\n")[0]).toBe("checkpoint,exact_match");
  });
});

function average(values: number[]): number {
  return values.reduce((a, b) => a + b, 0) / values.length;
}
