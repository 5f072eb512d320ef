export { mulberry32, shuffled, gaussian } from "./rng.js";
export {
  BOS,
  EOS,
  SEP,
  UNK,
  EmptyCorpus,
  SubwordTokenizer,
  trainTokenizer,
  type Tokenizer,
} from "./tokenizer.js";
export {
  ContextWindowLM,
  greedyDecode,
  type DecodeResult,
  type ModelConfig,
  type TrainingExample,
} from "./model.js";
export { SCHEDULERS, makeScheduler, type Scheduler, type SchedulerName } from "./schedule.js";
export {
  BadStrategy,
  DEFAULT_RUN,
  EarlyStopper,
  STRATEGIES,
  exactMatchRate,
  finetune,
  pretrain,
  toExamples,
  validateRun,
  type FinetuneResult,
  type Strategy,
  type TrainRun,
  type TrainTrace,
} from "./train.js";
export { predictInstances } from "./predict.js";
export {
  atomicWrite,
  readJson,
  readJsonl,
  writeCsv,
  writeJson,
  writeJsonl,
  type Instance,
  type MaskedInstance,
  type PredictionRecord,
} from "./data.js";
