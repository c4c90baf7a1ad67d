/** Pure reset-gating logic: resets are legal only every `period` generations. */

export const PERIOD = 92;

export function resetEnabled(generation: number, force = false, period = PERIOD): boolean {
  return force || generation % period === 0;
}

export function nextResetGeneration(generation: number, period = PERIOD): number {
  return generation + ((period - (generation % period)) % period);
}
