import { afterEach, describe, expect, it, vi } from 'vitest';

import { ApiClient, ApiError } from '../src/api.js';

function stubFetch(status: number, body: unknown) {
  const calls: { url: string; init?: RequestInit }[] = [];
  vi.stubGlobal('fetch', async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return {
      ok: status < 400,
      status,
      json: async () => body,
    } as Response;
  });
  return calls;
}

afterEach(() => vi.unstubAllGlobals());

describe('api client', () => {
  it('hits the documented routes with the documented bodies', async () => {
    const calls = stubFetch(200, { ok: true });
    const api = new ApiClient('http://x');
    await api.challengeMap('st01');
    await api.answerQuest('q1', 'st01', 2);
    await api.startActivity('t1', 'c1', 'heating');
    await api.advanceActivity('act-000001', 't1');
    await api.unlockLabkit('t1', 'c1');
    await api.submitSnapshot('st01', 'note', 'r01');
    await api.dashboard('school', 's1');
    await api.summary('b1');

    expect(calls.map((c) => c.url)).toEqual([
      'http://x/api/v1/challenge/map?student=st01',
      'http://x/api/v1/challenge/quests/q1/answer',
      'http://x/api/v1/challenge/class-activities',
      'http://x/api/v1/challenge/class-activities/act-000001/advance',
      'http://x/api/v1/challenge/labkit/unlock',
      'http://x/api/v1/challenge/snapshots',
      'http://x/api/v1/challenge/dashboard?scope=school&school_id=s1',
      'http://x/api/v1/buildings/b1/summary',
    ]);
    expect(JSON.parse(calls[1].init!.body as string)).toEqual({ student: 'st01', answer: 2 });
    expect(JSON.parse(calls[2].init!.body as string)).toEqual({
      teacher: 't1', class_id: 'c1', topic: 'heating',
    });
    expect(JSON.parse(calls[5].init!.body as string)).toEqual({
      student: 'st01', text: 'note', room_id: 'r01',
    });
  });

  it('turns error envelopes into typed ApiError', async () => {
    stubFetch(409, { error: { code: 'gate_locked', message: 'not open' } });
    const api = new ApiClient('http://x');
    const err = await api.answerQuest('q1', 'st01', 0).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(err.code).toBe('gate_locked');
  });
});
