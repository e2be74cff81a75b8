// Per-view request bookkeeping: a monotone token discards stale responses
// (at most one in-flight request is honored per view), and results are
// marked stale the moment any input feeding them changes.

export interface ViewState<T> {
  token: number;
  inFlight: boolean;
  result: T | null;
  stale: boolean;
  error: string | null;
}

export function initialViewState<T>(): ViewState<T> {
  return { token: 0, inFlight: false, result: null, stale: false, error: null };
}

/** Start a request; returns the token the response must present. */
export function beginRequest<T>(state: ViewState<T>): number {
  state.token += 1;
  state.inFlight = true;
  state.error = null;
  return state.token;
}

/** Accept a response only if it matches the newest token. */
export function acceptResult<T>(state: ViewState<T>, token: number, result: T): boolean {
  if (token !== state.token) return false;
  state.inFlight = false;
  state.result = result;
  state.stale = false;
  return true;
}

export function acceptError<T>(state: ViewState<T>, token: number, message: string): boolean {
  if (token !== state.token) return false;
  state.inFlight = false;
  state.error = message;
  return true;
}

/** Inputs changed: any displayed result no longer reflects them. */
export function markStale<T>(state: ViewState<T>): void {
  if (state.result !== null) state.stale = true;
}
