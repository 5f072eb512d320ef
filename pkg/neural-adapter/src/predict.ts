/**
 * Batch greedy prediction in the shared predictions-JSONL format.
 */

import { type Instance, type PredictionRecord } from "./data.js";
import { ContextWindowLM, greedyDecode } from "./model.js";
import type { Tokenizer } from "./tokenizer.js";

/**
 * One greedy prediction per instance. Confidence is exp of the summed
 * per-token log-probabilities, clamped to [0, 1].
 */
export function predictInstances(
  model: ContextWindowLM,
  tokenizer: Tokenizer,
  instances: Instance[],
  maxTargetTokens = 64
): PredictionRecord[] {
  return instances.map((inst) => {
    const prefix = [...tokenizer.encode(inst.input), tokenizer.sepId];
    const decoded = greedyDecode(
      model,
      prefix,
      tokenizer.eosId,
      tokenizer.bosId,
      maxTargetTokens
    );
    const confidence = Math.min(1, Math.max(0, Math.exp(decoded.logLikelihood)));
    return {
      id: inst.id,
      prediction: tokenizer.decode(decoded.ids),
      confidence,
      stop_reason: decoded.stopReason,
    };
  });
}
