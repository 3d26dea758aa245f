// Typed client for the documented /api/v1 routes. All state shown in the UI
// comes from these calls; nothing is computed locally.

import type {
  Activity,
  AnswerResult,
  Building,
  BuildingSummary,
  ChallengeMap,
  Dashboard,
  Snapshot,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private base: string = '') {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(`${this.base}/api/v1${path}`, init);
    if (!res.ok) {
      let code = 'http_error';
      let message = `${res.status}`;
      try {
        const body = await res.json();
        code = body.error.code;
        message = body.error.message;
      } catch {
        // non-envelope error body; keep the defaults
      }
      throw new ApiError(res.status, code, message);
    }
    return res.json() as Promise<T>;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(payload),
    });
  }

  buildings(): Promise<{ buildings: Building[] }> {
    return this.request('/buildings');
  }

  summary(buildingId: string): Promise<BuildingSummary> {
    return this.request(`/buildings/${encodeURIComponent(buildingId)}/summary`);
  }

  challengeMap(student: string): Promise<ChallengeMap> {
    return this.request(`/challenge/map?student=${encodeURIComponent(student)}`);
  }

  answerQuest(questId: string, student: string, answer: number | string): Promise<AnswerResult> {
    return this.post(`/challenge/quests/${encodeURIComponent(questId)}/answer`, {
      student,
      answer,
    });
  }

  dashboard(scope: 'global' | 'school', schoolId?: string): Promise<Dashboard> {
    const qs = schoolId ? `?scope=${scope}&school_id=${encodeURIComponent(schoolId)}` : `?scope=${scope}`;
    return this.request(`/challenge/dashboard${qs}`);
  }

  startActivity(teacher: string, classId: string, topic: string): Promise<Activity> {
    return this.post('/challenge/class-activities', {
      teacher,
      class_id: classId,
      topic,
    });
  }

  advanceActivity(activityId: string, teacher: string): Promise<Activity> {
    return this.post(`/challenge/class-activities/${encodeURIComponent(activityId)}/advance`, {
      teacher,
    });
  }

  unlockLabkit(teacher: string, classId: string): Promise<{ class_id: string; unlocked: boolean }> {
    return this.post('/challenge/labkit/unlock', { teacher, class_id: classId });
  }

  submitSnapshot(student: string, text: string, roomId?: string): Promise<Snapshot> {
    return this.post('/challenge/snapshots', {
      student,
      text,
      ...(roomId ? { room_id: roomId } : {}),
    });
  }

  classSnapshots(classId: string): Promise<{ class_id: string; snapshots: Snapshot[] }> {
    return this.request(`/challenge/classes/${encodeURIComponent(classId)}/snapshots`);
  }
}
