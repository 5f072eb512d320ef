/**
 * Training regimen: pre-training strategies, fine-tuning with learning-rate
 * schedules, checkpointing, and early stopping on eval exact match.
 */

import * as path from "node:path";

import { writeCsv, writeJson, type Instance, type MaskedInstance } from "./data.js";
import { ENGLISH_SAMPLE } from "./english.js";
import { ContextWindowLM, greedyDecode, type TrainingExample } from "./model.js";
import { makeScheduler, type SchedulerName } from "./schedule.js";
import { mulberry32, shuffled } from "./rng.js";
import type { Tokenizer } from "./tokenizer.js";

export type Strategy = "NO-PT" | "YL" | "NL" | "NL+YL";

export const STRATEGIES: Strategy[] = ["NO-PT", "YL", "NL", "NL+YL"];

export class BadStrategy extends Error {}

export interface TrainRun {
  strategy: Strategy;
  scheduler: SchedulerName;
  steps: number;
  batchSize: number;
  maxInputTokens: number;
  maxTargetTokens: number;
  checkpointEvery: number;
  earlyStopDelta: number;
  patience: number;
  baseRate: number;
  seed: number;
}

export const DEFAULT_RUN: TrainRun = {
  strategy: "NO-PT",
  scheduler: "C-LR",
  steps: 300,
  batchSize: 32,
  maxInputTokens: 256,
  maxTargetTokens: 64,
  checkpointEvery: 25,
  earlyStopDelta: 0.01,
  patience: 5,
  baseRate: 0.5,
  seed: 0,
};

export function validateRun(run: TrainRun): void {
  if (run.steps <= 0) throw new Error(`steps must be positive, got ${run.steps}`);
  if (run.earlyStopDelta <= 0) {
    throw new Error(`early-stop delta must be positive, got ${run.earlyStopDelta}`);
  }
  if (run.patience < 1) throw new Error(`patience must be >= 1, got ${run.patience}`);
  if (run.batchSize < 1) throw new Error(`batch size must be >= 1, got ${run.batchSize}`);
}

/**
 * Early-stopping controller: an observation counts as progress when it beats
 * the best score so far by at least `delta`; `patience` consecutive
 * non-improving checkpoints stop the run. The best checkpoint wins.
 */
export class EarlyStopper {
  bestScore = -Infinity;
  bestIndex = -1;
  private flat = 0;
  private observations = 0;

  constructor(private readonly delta: number, private readonly patience: number) {}

  /** Returns true when training should stop after this observation. */
  observe(score: number): boolean {
    const index = this.observations++;
    if (score - this.bestScore >= this.delta || this.bestIndex < 0) {
      this.bestScore = score;
      this.bestIndex = index;
      this.flat = 0;
    } else {
      this.flat += 1;
    }
    return this.flat >= this.patience;
  }
}

/**
 * Expand `input <sep> target </s>` into per-position context windows; only
 * the positions after the separator (the target span) produce examples.
 */
export function toExamples(
  tokenizer: Tokenizer,
  contextSize: number,
  input: string,
  target: string,
  limits?: { maxInputTokens: number; maxTargetTokens: number }
): TrainingExample[] {
  let inputIds = tokenizer.encode(input);
  let targetIds = tokenizer.encode(target);
  if (limits) {
    inputIds = inputIds.slice(-limits.maxInputTokens); // keep the recent end
    targetIds = targetIds.slice(0, limits.maxTargetTokens);
  }
  const sequence = [...inputIds, tokenizer.sepId, ...targetIds, tokenizer.eosId];
  const firstTarget = inputIds.length + 1;
  const examples: TrainingExample[] = [];
  for (let pos = firstTarget; pos < sequence.length; pos++) {
    const window = sequence.slice(Math.max(0, pos - contextSize), pos);
    const padded = [
      ...Array(contextSize - window.length).fill(tokenizer.bosId),
      ...window,
    ];
    examples.push({ context: padded, target: sequence[pos] });
  }
  return examples;
}

/** Plain language-modelling examples over a free text (used by NL). */
function textExamples(
  tokenizer: Tokenizer,
  contextSize: number,
  text: string
): TrainingExample[] {
  const ids = [...tokenizer.encode(text), tokenizer.eosId];
  const examples: TrainingExample[] = [];
  for (let pos = 0; pos < ids.length; pos++) {
    const window = ids.slice(Math.max(0, pos - contextSize), pos);
    const padded = [
      ...Array(contextSize - window.length).fill(tokenizer.bosId),
      ...window,
    ];
    examples.push({ context: padded, target: ids[pos] });
  }
  return examples;
}

export interface TrainTrace {
  losses: number[];
  rates: number[];
}

/** Deterministic round-robin batches over a seeded shuffle of the examples. */
function runSteps(
  model: ContextWindowLM,
  examples: TrainingExample[],
  run: TrainRun
): TrainTrace {
  if (examples.length === 0) throw new Error("no training examples");
  const scheduler = makeScheduler(run.scheduler, run.baseRate, run.steps);
  const order = shuffled(examples, mulberry32(run.seed));
  const losses: number[] = [];
  const rates: number[] = [];
  let cursor = 0;
  for (let step = 0; step < run.steps; step++) {
    const batch: TrainingExample[] = [];
    for (let i = 0; i < Math.min(run.batchSize, order.length); i++) {
      batch.push(order[cursor]);
      cursor = (cursor + 1) % order.length;
    }
    const rate = scheduler.rate(step);
    losses.push(model.trainBatch(batch, rate));
    rates.push(rate);
  }
  return { losses, rates };
}

/**
 * Pre-training. Strategy semantics: YL trains on sentinel-masked workflow
 * spans; NL trains on the bundled English sample; NL+YL does both in that
 * order; NO-PT is rejected (fine-tune directly instead).
 */
export function pretrain(
  model: ContextWindowLM,
  tokenizer: Tokenizer,
  masked: MaskedInstance[],
  run: TrainRun
): TrainTrace {
  validateRun(run);
  if (run.strategy === "NO-PT") {
    throw new BadStrategy("NO-PT skips pre-training; call finetune directly");
  }
  const contextSize = model.config.contextSize;
  const examples: TrainingExample[] = [];
  if (run.strategy === "NL" || run.strategy === "NL+YL") {
    for (const line of ENGLISH_SAMPLE) {
      examples.push(...textExamples(tokenizer, contextSize, line));
    }
  }
  if (run.strategy === "YL" || run.strategy === "NL+YL") {
    for (const inst of masked) {
      examples.push(
        ...toExamples(tokenizer, contextSize, inst.input, inst.target, run)
      );
    }
  }
  return runSteps(model, examples, run);
}

export interface FinetuneResult {
  model: ContextWindowLM;
  trace: TrainTrace;
  evalScores: number[];
  stoppedEarly: boolean;
  bestCheckpoint: number; // 1-based index of the winning checkpoint
}

/** Exact-match rate of greedy predictions against instance targets. */
export function exactMatchRate(
  model: ContextWindowLM,
  tokenizer: Tokenizer,
  instances: Instance[],
  maxTargetTokens: number
): number {
  if (instances.length === 0) return 0;
  let correct = 0;
  for (const inst of instances) {
    const prefix = [...tokenizer.encode(inst.input), tokenizer.sepId];
    const decoded = greedyDecode(
      model,
      prefix,
      tokenizer.eosId,
      tokenizer.bosId,
      maxTargetTokens
    );
    const text = tokenizer.decode(decoded.ids);
    if (normalize(text) === normalize(inst.target)) correct += 1;
  }
  return correct / instances.length;
}

function normalize(text: string): string {
  return text.split(/\s+/).filter(Boolean).join(" ");
}

/**
 * Fine-tune with periodic eval checkpoints and early stopping; the returned
 * model is the checkpoint with the best eval exact match. When `runDir` is
 * given, checkpoints, the run config, and loss/eval traces are written there.
 */
export function finetune(
  model: ContextWindowLM,
  tokenizer: Tokenizer,
  trainInstances: Instance[],
  evalInstances: Instance[],
  run: TrainRun,
  runDir?: string
): FinetuneResult {
  validateRun(run);
  const contextSize = model.config.contextSize;
  const examples = trainInstances.flatMap((inst) =>
    toExamples(tokenizer, contextSize, inst.input, inst.target, run)
  );
  if (examples.length === 0) throw new Error("no fine-tuning examples");

  const scheduler = makeScheduler(run.scheduler, run.baseRate, run.steps);
  const order = shuffled(examples, mulberry32(run.seed));
  const stopper = new EarlyStopper(run.earlyStopDelta, run.patience);
  const losses: number[] = [];
  const rates: number[] = [];
  const evalScores: number[] = [];
  let best = model.clone();
  let stoppedEarly = false;
  let cursor = 0;

  for (let step = 0; step < run.steps; step++) {
    const batch: TrainingExample[] = [];
    for (let i = 0; i < Math.min(run.batchSize, order.length); i++) {
      batch.push(order[cursor]);
      cursor = (cursor + 1) % order.length;
    }
    const rate = scheduler.rate(step);
    losses.push(model.trainBatch(batch, rate));
    rates.push(rate);

    if ((step + 1) % run.checkpointEvery === 0 || step === run.steps - 1) {
      const score = exactMatchRate(model, tokenizer, evalInstances, run.maxTargetTokens);
      evalScores.push(score);
      const shouldStop = stopper.observe(score);
      if (stopper.bestIndex === evalScores.length - 1) best = model.clone();
      if (runDir) {
        writeJson(path.join(runDir, `checkpoint-${evalScores.length}`, "model.json"), model.toJSON());
      }
      if (shouldStop) {
        stoppedEarly = true;
        break;
      }
    }
  }

  const result: FinetuneResult = {
    model: best,
    trace: { losses, rates },
    evalScores,
    stoppedEarly,
    bestCheckpoint: stopper.bestIndex + 1,
  };
  if (runDir) {
    writeJson(path.join(runDir, "run.json"), {
      ...run,
      stoppedEarly,
      bestCheckpoint: result.bestCheckpoint,
    });
    writeJson(path.join(runDir, "best", "model.json"), best.toJSON());
    writeCsv(
      path.join(runDir, "loss.csv"),
      ["step", "loss", "learning_rate"],
      losses.map((loss, i) => [i + 1, loss, rates[i]])
    );
    writeCsv(
      path.join(runDir, "eval.csv"),
      ["checkpoint", "exact_match"],
      evalScores.map((score, i) => [i + 1, score])
    );
  }
  return result;
}
