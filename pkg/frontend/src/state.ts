/**
 * UI state container and the latest-wins request guard.
 *
 * The store is a plain observable value object: handlers mutate through
 * update() and every subscriber re-renders from the full state. No
 * similarity math happens here; all numbers come from service responses.
 */

import type { EvaluationReport, Recommendation } from './api.js';

export interface UiState {
  userId: number | null;
  catalog: string[];
  incidence: number[];
  k: number;
  limit: number;
  recommendations: Recommendation[] | null;
  /** snapshot version the recommendation list was computed against */
  recommendationsVersion: number | null;
  report: EvaluationReport | null;
  /** highest snapshot version seen in any response header */
  latestVersion: number;
  coldStart: boolean;
  banner: string | null;
  datasetRows: number | null;
}

export function initialState(): UiState {
  return {
    userId: null,
    catalog: [],
    incidence: [],
    k: 2,
    limit: 10,
    recommendations: null,
    recommendationsVersion: null,
    report: null,
    latestVersion: 0,
    coldStart: false,
    banner: null,
    datasetRows: null,
  };
}

/** The rendered recommendation list lags behind the newest known snapshot. */
export function isStale(state: UiState): boolean {
  return (
    state.recommendations !== null &&
    state.recommendationsVersion !== null &&
    state.latestVersion > state.recommendationsVersion
  );
}

export class Store {
  private state: UiState = initialState();
  private listeners: Array<(state: UiState) => void> = [];

  get current(): UiState {
    return this.state;
  }

  subscribe(listener: (state: UiState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  update(patch: Partial<UiState>): UiState {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) {
      listener(this.state);
    }
    return this.state;
  }
}

/**
 * Latest-wins guard: when the user changes inputs before a response lands,
 * the superseded response is dropped instead of clobbering newer state.
 */
export class LatestWins {
  private sequence = 0;

  /** Run an async producer; resolve undefined if a newer run started since. */
  async run<T>(producer: () => Promise<T>): Promise<T | undefined> {
    const token = ++this.sequence;
    const result = await producer();
    return token === this.sequence ? result : undefined;
  }

  /** Invalidate all in-flight runs without starting a new one. */
  supersede(): void {
    this.sequence++;
  }
}
