import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiError, createClient } from '../src/api.js';

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe('api client', () => {
  it('fetches and unwraps the instance list', async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ instances: [{ airport: 'SFO', record_count: 1 }], disclaimer: 'x' }),
    );
    vi.stubGlobal('fetch', fetchMock);
    const got = await createClient('http://api').listInstances();
    expect(fetchMock).toHaveBeenCalledWith('http://api/instances');
    expect(got).toEqual([{ airport: 'SFO', record_count: 1 }]);
  });

  it('posts the query text as JSON', async () => {
    const fetchMock = vi.fn(async () =>
      jsonResponse({ bullets: [], narrative: null, sources: [], answer_mode: 'deterministic',
                     disclaimer: 'x' }),
    );
    vi.stubGlobal('fetch', fetchMock);
    await createClient().query('SFO', 'highest max delay');
    const [url, init] = fetchMock.mock.calls[0] as [string, RequestInit];
    expect(url).toBe('/instances/SFO/query');
    expect(init.method).toBe('POST');
    expect(JSON.parse(init.body as string)).toEqual({ text: 'highest max delay' });
  });

  it('surfaces the server detail on errors', async () => {
    vi.stubGlobal('fetch', vi.fn(async () =>
      jsonResponse({ detail: "unknown instance 'ZZZ'", disclaimer: 'x' }, 404),
    ));
    await expect(createClient().query('ZZZ', 'q')).rejects.toThrowError(
      expect.objectContaining({ status: 404, message: "unknown instance 'ZZZ'" }),
    );
  });

  it('falls back to a generic message on non-JSON error bodies', async () => {
    vi.stubGlobal('fetch', vi.fn(async () => new Response('boom', { status: 502 })));
    try {
      await createClient().advisory('abc');
      expect.unreachable();
    } catch (error) {
      expect(error).toBeInstanceOf(ApiError);
      expect((error as ApiError).status).toBe(502);
      expect((error as ApiError).message).toContain('502');
    }
  });
});
