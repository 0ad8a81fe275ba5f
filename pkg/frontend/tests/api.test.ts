import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError, VERSION_HEADER } from '../src/api.js';

function jsonResponse(payload: unknown, status = 200, version = '1'): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { 'Content-Type': 'application/json', [VERSION_HEADER]: version },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('ApiClient', () => {
  it('builds recommendation URLs with query params', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse([]));
    vi.stubGlobal('fetch', fetchMock);
    const client = new ApiClient('http://svc:9999');
    await client.recommendations(7, 3, 5);
    expect(fetchMock).toHaveBeenCalledWith(
      'http://svc:9999/api/users/7/recommendations?k=3&limit=5',
      expect.objectContaining({ method: 'GET' }),
    );
  });

  it('strips a trailing slash from the base url', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse(['B0']));
    vi.stubGlobal('fetch', fetchMock);
    await new ApiClient('http://svc:9999/').books();
    expect(fetchMock).toHaveBeenCalledWith('http://svc:9999/api/books', expect.anything());
  });

  it('posts toggle bodies as JSON', async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ user: 1, incidence: [1], books: ['B0'] }));
    vi.stubGlobal('fetch', fetchMock);
    await new ApiClient('http://svc').toggleBook(1, 'B0', 'add');
    const [, options] = fetchMock.mock.calls[0];
    expect(options.method).toBe('POST');
    expect(JSON.parse(options.body)).toEqual({ book: 'B0', action: 'add' });
  });

  it('reports snapshot versions from response headers', async () => {
    const fetchMock = vi.fn().mockResolvedValue(jsonResponse([], 200, '17'));
    vi.stubGlobal('fetch', fetchMock);
    const seen: number[] = [];
    await new ApiClient('http://svc', (v) => seen.push(v)).books();
    expect(seen).toEqual([17]);
  });

  it('maps service error bodies to ApiError', async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ error: 'cold_start', detail: 'user 9 has no books read' }, 422));
    vi.stubGlobal('fetch', fetchMock);
    const failure = await new ApiClient('http://svc')
      .recommendations(9, 2, 10)
      .catch((err) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(422);
    expect(failure.code).toBe('cold_start');
    expect(failure.message).toContain('no books read');
  });

  it('wraps network failures as status 0', async () => {
    vi.stubGlobal('fetch', vi.fn().mockRejectedValue(new TypeError('ECONNREFUSED')));
    const failure = await new ApiClient('http://down').health().catch((err) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect(failure.status).toBe(0);
    expect(failure.code).toBe('unreachable');
  });

  it('sends train with and without k', async () => {
    const fetchMock = vi
      .fn()
      .mockResolvedValue(jsonResponse({ k_used: 2, train_rows: 19, test_rows: 9 }));
    vi.stubGlobal('fetch', fetchMock);
    const client = new ApiClient('http://svc');
    await client.train();
    expect(JSON.parse(fetchMock.mock.calls[0][1].body)).toEqual({});
    await client.train(5);
    expect(JSON.parse(fetchMock.mock.calls[1][1].body)).toEqual({ k: 5 });
  });
});
