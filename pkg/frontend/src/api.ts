/**
 * Typed client for the friendrec JSON API.
 *
 * Every response's X-Snapshot-Version header is forwarded to the caller so
 * the UI can detect when a rendered view is stale. Non-2xx responses raise
 * ApiError carrying the service's {error, detail} body.
 */

export interface HealthBody {
  status: string;
  dataset_rows: number;
  trained: boolean;
}

export interface ProfileBody {
  user: number;
  incidence: number[];
  books: string[];
}

export interface Recommendation {
  candidate: number;
  score: number;
  distance: number;
  shared_books: string[];
}

export interface EvaluationEntry {
  k: number;
  correct: number;
  total: number;
  accuracy: number;
  error_rate: number;
}

export interface EvaluationReport {
  version: number;
  seed: number;
  split_ratio: number;
  chosen_k: number;
  entries: EvaluationEntry[];
}

export interface TrainResult {
  k_used: number;
  train_rows: number;
  test_rows: number;
}

export type BookAction = 'add' | 'remove';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    detail: string,
  ) {
    super(detail);
    this.name = 'ApiError';
  }
}

export const VERSION_HEADER = 'X-Snapshot-Version';

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly onVersion?: (version: number) => void,
  ) {}

  private url(path: string): string {
    return `${this.baseUrl.replace(/\/$/, '')}${path}`;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    let response: Response;
    try {
      response = await fetch(this.url(path), {
        method,
        headers: body === undefined ? {} : { 'Content-Type': 'application/json' },
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new ApiError(0, 'unreachable', `service unreachable: ${String(err)}`);
    }
    const version = Number(response.headers.get(VERSION_HEADER));
    if (Number.isFinite(version) && version > 0 && this.onVersion) {
      this.onVersion(version);
    }
    const payload = await response.json().catch(() => null);
    if (!response.ok) {
      const code = payload?.error ?? 'error';
      const detail = payload?.detail ?? response.statusText;
      throw new ApiError(response.status, code, detail);
    }
    return payload as T;
  }

  health(): Promise<HealthBody> {
    return this.request('GET', '/api/health');
  }

  books(): Promise<string[]> {
    return this.request('GET', '/api/books');
  }

  users(): Promise<{ users: number[]; count: number }> {
    return this.request('GET', '/api/users');
  }

  createUser(): Promise<ProfileBody> {
    return this.request('POST', '/api/users');
  }

  getUser(userId: number): Promise<ProfileBody> {
    return this.request('GET', `/api/users/${userId}`);
  }

  toggleBook(userId: number, book: string, action: BookAction): Promise<ProfileBody> {
    return this.request('POST', `/api/users/${userId}/books`, { book, action });
  }

  recommendations(userId: number, k: number, limit: number): Promise<Recommendation[]> {
    const params = new URLSearchParams({ k: String(k), limit: String(limit) });
    return this.request('GET', `/api/users/${userId}/recommendations?${params}`);
  }

  train(k?: number): Promise<TrainResult> {
    return this.request('POST', '/api/train', k === undefined ? {} : { k });
  }

  evaluation(kmin: number, kmax: number): Promise<EvaluationReport> {
    const params = new URLSearchParams({ kmin: String(kmin), kmax: String(kmax) });
    return this.request('GET', `/api/evaluation?${params}`);
  }
}
