/**
 * Learning-rate schedulers. Each maps a 0-based step index to a rate; the
 * training loop records the realized trace so runs are auditable.
 */

export type SchedulerName = "C-LR" | "ISQ-LR" | "ST-LR" | "PD-LR";

export const SCHEDULERS: SchedulerName[] = ["C-LR", "ISQ-LR", "ST-LR", "PD-LR"];

export interface Scheduler {
  name: SchedulerName;
  rate(step: number): number;
}

/**
 * Build a scheduler:
 * - C-LR: constant.
 * - ISQ-LR: inverse square root with a warmup floor.
 * - ST-LR: slanted triangular (linear up for the first 10% of steps, then
 *   linear down to zero).
 * - PD-LR: polynomial (quadratic) decay to zero over the budget.
 */
export function makeScheduler(
  name: SchedulerName,
  baseRate: number,
  totalSteps: number,
  warmupSteps = Math.max(1, Math.round(totalSteps * 0.1))
): Scheduler {
  if (baseRate <= 0) throw new Error(`base rate must be positive, got ${baseRate}`);
  if (totalSteps <= 0) throw new Error(`step budget must be positive, got ${totalSteps}`);
  switch (name) {
    case "C-LR":
      return { name, rate: () => baseRate };
    case "ISQ-LR":
      return {
        name,
        rate: (step) => baseRate / Math.sqrt(Math.max(step + 1, warmupSteps) / warmupSteps),
      };
    case "ST-LR":
      return {
        name,
        rate: (step) => {
          const cut = warmupSteps;
          if (step < cut) return (baseRate * (step + 1)) / cut;
          const remaining = Math.max(totalSteps - cut, 1);
          return baseRate * Math.max(0, 1 - (step + 1 - cut) / remaining);
        },
      };
    case "PD-LR":
      return {
        name,
        rate: (step) => baseRate * Math.pow(Math.max(0, 1 - step / totalSteps), 2),
      };
    default: {
      const exhaustive: never = name;
      throw new Error(`unknown scheduler ${exhaustive}`);
    }
  }
}
