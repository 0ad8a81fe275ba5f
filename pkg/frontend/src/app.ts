/**
 * DOM application: user picking, book toggling, K tuning, recommendation
 * exploration, and the accuracy-versus-K evaluation panel.
 *
 * The whole view re-renders from the store on every change; events are
 * delegated from the root element so re-rendering never drops handlers.
 * Displayed scores, distances, and accuracies are service values verbatim.
 */

import { ApiClient, ApiError } from './api.js';
import type { Recommendation } from './api.js';
import { isStale, LatestWins, Store } from './state.js';
import { renderChartSvg } from './chart.js';

const MAX_K = 20;
const MAX_LIMIT = 50;

interface EvalInputs {
  kmin: number;
  kmax: number;
}

export class App {
  readonly store = new Store();
  readonly client: ApiClient;
  private readonly recGuard = new LatestWins();
  private evalInputs: EvalInputs = { kmin: 2, kmax: 5 };
  private evalMessage: string | null = null;
  private users: number[] = [];
  private retryAction: (() => Promise<void>) | null = null;

  constructor(
    private readonly root: HTMLElement,
    baseUrl: string,
  ) {
    this.client = new ApiClient(baseUrl, (version) => {
      if (version > this.store.current.latestVersion) {
        this.store.update({ latestVersion: version });
      }
    });
    this.store.subscribe(() => this.render());
    this.bindEvents();
  }

  async init(): Promise<void> {
    try {
      const [health, catalog, users] = await Promise.all([
        this.client.health(),
        this.client.books(),
        this.client.users(),
      ]);
      this.users = users.users;
      this.store.update({ catalog, datasetRows: health.dataset_rows, banner: null });
    } catch (err) {
      this.fail(err, () => this.init());
    }
  }

  async selectUser(userId: number): Promise<void> {
    try {
      const profile = await this.client.getUser(userId);
      this.store.update({
        userId,
        incidence: profile.incidence,
        recommendations: null,
        recommendationsVersion: null,
        coldStart: false,
        banner: null,
      });
      await this.refreshRecommendations();
    } catch (err) {
      this.fail(err, () => this.selectUser(userId));
    }
  }

  async createUser(): Promise<void> {
    try {
      const profile = await this.client.createUser();
      this.users = [...this.users, profile.user];
      this.store.update({
        userId: profile.user,
        incidence: profile.incidence,
        recommendations: null,
        recommendationsVersion: null,
        coldStart: true,
        banner: null,
      });
    } catch (err) {
      this.fail(err, () => this.createUser());
    }
  }

  async toggleBook(book: string): Promise<void> {
    const { userId, catalog, incidence } = this.store.current;
    if (userId === null) return;
    const index = catalog.indexOf(book);
    if (index < 0) return;
    const action = incidence[index] > 0 ? 'remove' : 'add';
    try {
      const profile = await this.client.toggleBook(userId, book, action);
      this.store.update({ incidence: profile.incidence, banner: null });
      await this.refreshRecommendations();
    } catch (err) {
      this.fail(err, () => this.toggleBook(book));
    }
  }

  async setK(k: number): Promise<void> {
    if (!Number.isInteger(k) || k < 1 || k > MAX_K) return; // rejected client-side
    this.store.update({ k });
    await this.refreshRecommendations();
  }

  async setLimit(limit: number): Promise<void> {
    if (!Number.isInteger(limit) || limit < 1 || limit > MAX_LIMIT) return;
    this.store.update({ limit });
    await this.refreshRecommendations();
  }

  async refreshRecommendations(): Promise<void> {
    const { userId, k, limit } = this.store.current;
    if (userId === null) return;
    const outcome = await this.recGuard.run<
      { items: Recommendation[]; version: number } | { cold: true } | { error: unknown }
    >(async () => {
      try {
        const items = await this.client.recommendations(userId, k, limit);
        return { items, version: this.store.current.latestVersion };
      } catch (err) {
        if (err instanceof ApiError && err.status === 422) return { cold: true };
        return { error: err };
      }
    });
    if (outcome === undefined) return; // superseded by a newer request
    if ('cold' in outcome) {
      this.store.update({ coldStart: true, recommendations: null, recommendationsVersion: null });
    } else if ('error' in outcome) {
      this.fail(outcome.error, () => this.refreshRecommendations());
    } else {
      this.store.update({
        coldStart: false,
        recommendations: outcome.items,
        recommendationsVersion: outcome.version,
        banner: null,
      });
    }
  }

  async runEvaluation(): Promise<void> {
    const { kmin, kmax } = this.evalInputs;
    if (!Number.isInteger(kmin) || !Number.isInteger(kmax) || kmin < 1 || kmin > kmax) {
      this.evalMessage = `invalid range: kmin=${kmin}, kmax=${kmax}`;
      this.store.update({});
      return;
    }
    this.evalMessage = null;
    try {
      const report = await this.client.evaluation(kmin, kmax);
      this.store.update({ report, banner: null });
    } catch (err) {
      this.fail(err, () => this.runEvaluation());
    }
  }

  async retry(): Promise<void> {
    const action = this.retryAction;
    this.retryAction = null;
    this.store.update({ banner: null });
    if (action) await action();
  }

  private fail(err: unknown, retryAction: () => Promise<void>): void {
    const message =
      err instanceof ApiError ? `${err.status || 'network'}: ${err.message}` : String(err);
    this.retryAction = retryAction;
    this.store.update({ banner: message });
  }

  private bindEvents(): void {
    this.root.addEventListener('click', (event) => {
      const target = (event.target as HTMLElement).closest('[data-action]');
      if (!(target instanceof HTMLElement)) return;
      switch (target.dataset.action) {
        case 'new-user':
          void this.createUser();
          break;
        case 'toggle-book':
          void this.toggleBook(target.dataset.book ?? '');
          break;
        case 'refetch':
          void this.refreshRecommendations();
          break;
        case 'run-eval':
          void this.runEvaluation();
          break;
        case 'retry':
          void this.retry();
          break;
      }
    });
    this.root.addEventListener('change', (event) => {
      const target = event.target as HTMLElement;
      if (target.id === 'user-select') {
        const value = (target as HTMLSelectElement).value;
        if (value !== '') void this.selectUser(Number(value));
      } else if (target.id === 'kmin-input') {
        this.evalInputs = { ...this.evalInputs, kmin: Number((target as HTMLInputElement).value) };
      } else if (target.id === 'kmax-input') {
        this.evalInputs = { ...this.evalInputs, kmax: Number((target as HTMLInputElement).value) };
      } else if (target.id === 'limit-input') {
        void this.setLimit(Number((target as HTMLInputElement).value));
      }
    });
    this.root.addEventListener('input', (event) => {
      const target = event.target as HTMLElement;
      if (target.id === 'k-slider') {
        void this.setK(Number((target as HTMLInputElement).value));
      }
    });
  }

  render(): void {
    const state = this.store.current;
    const stale = isStale(state);
    this.root.innerHTML = `
      <header>
        <h1>friendrec</h1>
        <span id="health-info">${
          state.datasetRows === null ? 'connecting...' : `${state.datasetRows} edges loaded`
        }</span>
      </header>
      ${
        state.banner
          ? `<div id="banner" role="alert">${escapeHtml(state.banner)}
               <button data-action="retry" id="retry-btn">retry</button></div>`
          : ''
      }
      <section class="panel" id="user-panel">
        <label for="user-select">user</label>
        <select id="user-select">
          <option value="">choose...</option>
          ${this.users
            .map(
              (uid) =>
                `<option value="${uid}" ${uid === state.userId ? 'selected' : ''}>${uid}</option>`,
            )
            .join('')}
        </select>
        <button data-action="new-user" id="new-user-btn">new user</button>
      </section>
      <section class="panel" id="books-panel" ${state.userId === null ? 'hidden' : ''}>
        <h2>books read</h2>
        <div id="book-grid">
          ${state.catalog
            .map((label, i) => {
              const count = state.incidence[i] ?? 0;
              return `<button class="book-chip ${count > 0 ? 'on' : ''}"
                        data-action="toggle-book" data-book="${label}">
                        ${label}${count > 1 ? `<span class="count">x${count}</span>` : ''}
                      </button>`;
            })
            .join('')}
        </div>
      </section>
      <section class="panel" id="controls-panel" ${state.userId === null ? 'hidden' : ''}>
        <label for="k-slider">k = <span id="k-value">${state.k}</span></label>
        <input type="range" id="k-slider" min="1" max="${MAX_K}" value="${state.k}" />
        <label for="limit-input">limit</label>
        <input type="number" id="limit-input" min="1" max="${MAX_LIMIT}" value="${state.limit}" />
      </section>
      <section class="panel" id="recs-panel" ${state.userId === null ? 'hidden' : ''}>
        <h2>recommendations</h2>
        ${
          stale
            ? `<div id="stale-badge">snapshot changed
                 <button data-action="refetch" id="refetch-btn">refetch</button></div>`
            : ''
        }
        ${renderRecommendations(state.coldStart, state.recommendations)}
      </section>
      <section class="panel" id="eval-panel">
        <h2>accuracy vs K</h2>
        <div class="eval-controls">
          <label for="kmin-input">kmin</label>
          <input type="number" id="kmin-input" min="1" value="${this.evalInputs.kmin}" />
          <label for="kmax-input">kmax</label>
          <input type="number" id="kmax-input" min="1" value="${this.evalInputs.kmax}" />
          <button data-action="run-eval" id="eval-run-btn">evaluate</button>
        </div>
        ${this.evalMessage ? `<div id="eval-message">${escapeHtml(this.evalMessage)}</div>` : ''}
        ${renderEvaluation(state.report)}
      </section>
    `;
  }
}

function renderRecommendations(cold: boolean, items: Recommendation[] | null): string {
  if (cold) {
    return `<p id="rec-empty">this user has no books read yet; toggle some books to get recommendations</p>`;
  }
  if (items === null) {
    return `<p id="rec-empty">no recommendations requested yet</p>`;
  }
  if (items.length === 0) {
    return `<p id="rec-empty">no candidates available</p>`;
  }
  const rows = items
    .map(
      (r) => `<tr class="rec-row" data-candidate="${r.candidate}">
        <td class="candidate">${r.candidate}</td>
        <td class="score">${r.score}</td>
        <td class="distance">${r.distance}</td>
        <td class="shared">${r.shared_books.join(', ') || '-'}</td>
      </tr>`,
    )
    .join('');
  return `<table id="rec-table">
    <thead><tr><th>user</th><th>score</th><th>distance</th><th>shared books</th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

function renderEvaluation(report: import('./api.js').EvaluationReport | null): string {
  if (report === null) return `<div id="eval-empty">run an evaluation to see the chart</div>`;
  const rows = report.entries
    .map(
      (e) => `<tr class="eval-row ${e.k === report.chosen_k ? 'chosen' : ''}" data-k="${e.k}">
        <td class="k">${e.k}</td>
        <td class="accuracy">${e.accuracy}</td>
        <td class="error-rate">${e.error_rate}</td>
      </tr>`,
    )
    .join('');
  return `
    <div id="eval-chart">${renderChartSvg(report)}</div>
    <table id="eval-table">
      <thead><tr><th>K</th><th>accuracy %</th><th>error %</th></tr></thead>
      <tbody>${rows}</tbody>
    </table>
    <p id="eval-chosen">chosen K = <strong>${report.chosen_k}</strong></p>
  `;
}

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}
