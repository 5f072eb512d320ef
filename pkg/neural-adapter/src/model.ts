/**
 * Context-window neural language model.
 *
 * The last `contextSize` token embeddings are concatenated, pushed through a
 * tanh hidden layer, and projected to vocabulary logits. Tiny by design: the
 * goal is reproducing training-regimen behavior (pre-training transfer, early
 * stopping, schedulers, greedy decoding) at desk scale, not model quality.
 */

import { gaussian, mulberry32 } from "./rng.js";

export interface ModelConfig {
  vocabSize: number;
  contextSize: number;
  embedDim: number;
  hiddenDim: number;
}

export interface TrainingExample {
  /** exactly `contextSize` token ids (left-padded with BOS by the caller) */
  context: number[];
  target: number;
}

interface SerializedModel {
  config: ModelConfig;
  weights: Record<string, number[]>;
}

export class ContextWindowLM {
  readonly config: ModelConfig;
  private embed: Float64Array; // [vocab, embedDim]
  private w1: Float64Array; // [contextSize*embedDim, hiddenDim]
  private b1: Float64Array; // [hiddenDim]
  private w2: Float64Array; // [hiddenDim, vocab]
  private b2: Float64Array; // [vocab]

  constructor(config: ModelConfig, seed = 0) {
    this.config = config;
    const { vocabSize, contextSize, embedDim, hiddenDim } = config;
    const rand = mulberry32(seed);
    const init = (n: number, scale: number) => {
      const arr = new Float64Array(n);
      for (let i = 0; i < n; i++) arr[i] = gaussian(rand) * scale;
      return arr;
    };
    this.embed = init(vocabSize * embedDim, 0.1);
    this.w1 = init(contextSize * embedDim * hiddenDim, 1 / Math.sqrt(contextSize * embedDim));
    this.b1 = new Float64Array(hiddenDim);
    this.w2 = init(hiddenDim * vocabSize, 1 / Math.sqrt(hiddenDim));
    this.b2 = new Float64Array(vocabSize);
  }

  /** log-softmax over the vocabulary for one context window */
  logProbs(context: number[]): Float64Array {
    const { hidden, logits } = this.forward(context);
    void hidden;
    return logSoftmax(logits);
  }

  private forward(context: number[]): {
    x: Float64Array;
    hidden: Float64Array;
    logits: Float64Array;
  } {
    const { contextSize, embedDim, hiddenDim, vocabSize } = this.config;
    if (context.length !== contextSize) {
      throw new Error(
        `context must have ${contextSize} tokens, got ${context.length}`
      );
    }
    const x = new Float64Array(contextSize * embedDim);
    for (let i = 0; i < contextSize; i++) {
      const offset = context[i] * embedDim;
      for (let j = 0; j < embedDim; j++) x[i * embedDim + j] = this.embed[offset + j];
    }
    const hidden = new Float64Array(hiddenDim);
    for (let h = 0; h < hiddenDim; h++) {
      let sum = this.b1[h];
      for (let i = 0; i < x.length; i++) sum += x[i] * this.w1[i * hiddenDim + h];
      hidden[h] = Math.tanh(sum);
    }
    const logits = new Float64Array(vocabSize);
    for (let v = 0; v < vocabSize; v++) {
      let sum = this.b2[v];
      for (let h = 0; h < hiddenDim; h++) sum += hidden[h] * this.w2[h * vocabSize + v];
      logits[v] = sum;
    }
    return { x, hidden, logits };
  }

  /**
   * One SGD update over a batch of examples (summed-gradient, mean loss).
   * Returns the mean cross-entropy loss before the update.
   */
  trainBatch(examples: TrainingExample[], learningRate: number): number {
    const { contextSize, embedDim, hiddenDim, vocabSize } = this.config;
    const gEmbed = new Float64Array(this.embed.length);
    const gW1 = new Float64Array(this.w1.length);
    const gB1 = new Float64Array(this.b1.length);
    const gW2 = new Float64Array(this.w2.length);
    const gB2 = new Float64Array(this.b2.length);
    let totalLoss = 0;

    for (const { context, target } of examples) {
      const { x, hidden, logits } = this.forward(context);
      const logP = logSoftmax(logits);
      totalLoss -= logP[target];

      // dLoss/dLogits = softmax - onehot
      const dLogits = new Float64Array(vocabSize);
      for (let v = 0; v < vocabSize; v++) dLogits[v] = Math.exp(logP[v]);
      dLogits[target] -= 1;

      const dHidden = new Float64Array(hiddenDim);
      for (let v = 0; v < vocabSize; v++) {
        const d = dLogits[v];
        if (d === 0) continue;
        gB2[v] += d;
        for (let h = 0; h < hiddenDim; h++) {
          gW2[h * vocabSize + v] += hidden[h] * d;
          dHidden[h] += this.w2[h * vocabSize + v] * d;
        }
      }
      const dPre = new Float64Array(hiddenDim);
      for (let h = 0; h < hiddenDim; h++) {
        dPre[h] = dHidden[h] * (1 - hidden[h] * hidden[h]);
        gB1[h] += dPre[h];
      }
      const dX = new Float64Array(x.length);
      for (let i = 0; i < x.length; i++) {
        let acc = 0;
        for (let h = 0; h < hiddenDim; h++) {
          gW1[i * hiddenDim + h] += x[i] * dPre[h];
          acc += this.w1[i * hiddenDim + h] * dPre[h];
        }
        dX[i] = acc;
      }
      for (let i = 0; i < contextSize; i++) {
        const offset = context[i] * embedDim;
        for (let j = 0; j < embedDim; j++) {
          gEmbed[offset + j] += dX[i * embedDim + j];
        }
      }
    }

    const scale = learningRate / examples.length;
    applyUpdate(this.embed, gEmbed, scale);
    applyUpdate(this.w1, gW1, scale);
    applyUpdate(this.b1, gB1, scale);
    applyUpdate(this.w2, gW2, scale);
    applyUpdate(this.b2, gB2, scale);
    return totalLoss / examples.length;
  }

  toJSON(): SerializedModel {
    return {
      config: this.config,
      weights: {
        embed: [...this.embed],
        w1: [...this.w1],
        b1: [...this.b1],
        w2: [...this.w2],
        b2: [...this.b2],
      },
    };
  }

  static fromJSON(data: SerializedModel): ContextWindowLM {
    const model = new ContextWindowLM(data.config, 0);
    model.embed = Float64Array.from(data.weights.embed);
    model.w1 = Float64Array.from(data.weights.w1);
    model.b1 = Float64Array.from(data.weights.b1);
    model.w2 = Float64Array.from(data.weights.w2);
    model.b2 = Float64Array.from(data.weights.b2);
    return model;
  }

  clone(): ContextWindowLM {
    return ContextWindowLM.fromJSON(this.toJSON());
  }
}

function applyUpdate(param: Float64Array, grad: Float64Array, scale: number) {
  for (let i = 0; i < param.length; i++) param[i] -= grad[i] * scale;
}

function logSoftmax(logits: Float64Array): Float64Array {
  let max = -Infinity;
  for (const v of logits) if (v > max) max = v;
  let sum = 0;
  for (const v of logits) sum += Math.exp(v - max);
  const logZ = max + Math.log(sum);
  const out = new Float64Array(logits.length);
  for (let i = 0; i < logits.length; i++) out[i] = logits[i] - logZ;
  return out;
}

export interface DecodeResult {
  ids: number[];
  logLikelihood: number;
  stopReason: "eos" | "cap";
}

/** Greedy decoding: always the arg-max token, until EOS or the cap. */
export function greedyDecode(
  model: ContextWindowLM,
  prefix: number[],
  eosId: number,
  bosId: number,
  maxTokens: number
): DecodeResult {
  const { contextSize } = model.config;
  const history = [...prefix];
  const ids: number[] = [];
  let logLikelihood = 0;
  while (ids.length < maxTokens) {
    const padded = [
      ...Array(Math.max(0, contextSize - history.length)).fill(bosId),
      ...history.slice(-contextSize),
    ];
    const logP = model.logProbs(padded);
    let best = 0;
    for (let v = 1; v < logP.length; v++) if (logP[v] > logP[best]) best = v;
    logLikelihood += logP[best];
    if (best === eosId) return { ids, logLikelihood, stopReason: "eos" };
    ids.push(best);
    history.push(best);
  }
  return { ids, logLikelihood, stopReason: "cap" };
}
