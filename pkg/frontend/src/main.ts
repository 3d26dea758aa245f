// App shell: tab routing, 5 s polling, and event delegation over the HTML the
// view functions produce. Reloading reproduces everything from the API alone.

import { ApiClient, ApiError } from './api.js';
import { applyAnswerResult, sessionFromQuery } from './state.js';
import type { Activity, ChallengeMap, QuestEntry, Session } from './types.js';
import {
  renderBuilding,
  renderDashboard,
  renderError,
  renderIdentityPicker,
  renderQuestMap,
  renderQuestPanel,
  renderTeacherPanel,
} from './views.js';

const POLL_MS = 5000;

type Tab = 'map' | 'dashboard' | 'building' | 'teacher';

interface App {
  api: ApiClient;
  session: Session;
  tab: Tab;
  map: ChallengeMap | null;
  openQuest: QuestEntry | null;
  feedback: string | null;
  activity: Activity | null; // this session's started activity (no listing route)
  unlocked: boolean;
  buildingId: string | null;
  error: string | null;
}

const root = () => document.getElementById('app')!;

async function refresh(app: App): Promise<void> {
  try {
    switch (app.tab) {
      case 'map': {
        if (app.session.kind === 'student') {
          app.map = await app.api.challengeMap(app.session.id);
        }
        break;
      }
      case 'dashboard':
        break; // rendered from a fresh fetch below
      case 'building': {
        if (app.buildingId === null) {
          const { buildings } = await app.api.buildings();
          app.buildingId = buildings[0]?.id ?? null;
        }
        break;
      }
      case 'teacher':
        break;
    }
    app.error = null;
  } catch (err) {
    app.error = err instanceof Error ? err.message : String(err);
  }
  await render(app);
}

async function render(app: App): Promise<void> {
  const el = root();
  const header =
    `<nav>` +
    (['map', 'dashboard', 'building', 'teacher'] as Tab[])
      .filter((tab) => tab !== 'teacher' || app.session.kind === 'teacher')
      .filter((tab) => tab !== 'map' || app.session.kind === 'student')
      .map(
        (tab) =>
          `<button data-tab="${tab}" class="${tab === app.tab ? 'active' : ''}">${tab}</button>`,
      )
      .join('') +
    `<span class="who">${app.session.kind} ${app.session.id}</span></nav>`;
  let body = '';
  try {
    if (app.error) {
      body = renderError(app.error);
      if (app.tab === 'map' && app.map) body += renderQuestMap(app.map);
    } else if (app.tab === 'map' && app.session.kind === 'student') {
      body = app.map ? renderQuestMap(app.map) : '<p>loading…</p>';
      if (app.openQuest) body += renderQuestPanel(app.openQuest, app.feedback);
    } else if (app.tab === 'dashboard') {
      const dashboard = await app.api.dashboard('global');
      body = renderDashboard(dashboard, app.session);
    } else if (app.tab === 'building') {
      if (app.buildingId === null) {
        const { buildings } = await app.api.buildings();
        app.buildingId = buildings[0]?.id ?? null;
      }
      body = app.buildingId
        ? renderBuilding(await app.api.summary(app.buildingId))
        : '<p>no buildings</p>';
    } else if (app.tab === 'teacher') {
      body = renderTeacherPanel(app.session, app.activity, app.unlocked);
    }
  } catch (err) {
    body = renderError(err instanceof Error ? err.message : String(err));
  }
  el.innerHTML = header + body;
}

async function answer(app: App, value: number | string): Promise<void> {
  if (!app.openQuest || app.session.kind !== 'student') return;
  try {
    const result = await app.api.answerQuest(app.openQuest.id, app.session.id, value);
    if (result.correct) {
      if (app.map) app.map = applyAnswerResult(app.map, result);
      app.feedback = `correct! +${result.points_awarded} points`;
      app.openQuest = null;
    } else {
      app.feedback = 'not quite — try again';
    }
  } catch (err) {
    if (err instanceof ApiError && err.code === 'gate_locked') {
      // the gate closed under us; the next map fetch shows it locked again
      app.openQuest = null;
      app.feedback = null;
      app.error = `quest locked: ${err.message}`;
    } else if (err instanceof ApiError && err.code === 'unresolvable') {
      app.feedback = 'no live data right now — try again in a moment';
    } else {
      app.error = err instanceof Error ? err.message : String(err);
    }
  }
  await render(app);
}

function wireEvents(app: App): void {
  root().addEventListener('click', (event) => {
    const target = event.target as HTMLElement;
    const tab = target.dataset.tab as Tab | undefined;
    if (tab) {
      app.tab = tab;
      void refresh(app);
      return;
    }
    if (target.dataset.retry) {
      app.error = null;
      void refresh(app);
      return;
    }
    const questId = target.closest<HTMLElement>('[data-quest-id]')?.dataset.questId;
    if (questId && app.map) {
      app.openQuest = app.map.quests.find((q) => q.id === questId) ?? null;
      app.feedback = null;
      void render(app);
      return;
    }
    if (target.dataset.answerIndex !== undefined) {
      void answer(app, Number(target.dataset.answerIndex));
      return;
    }
    if (target.dataset.liveSubmit) {
      const input = document.getElementById('live-answer') as HTMLInputElement | null;
      if (input && input.value.trim()) void answer(app, input.value.trim());
      return;
    }
    if (target.dataset.closeQuest) {
      app.openQuest = null;
      app.feedback = null;
      void render(app);
      return;
    }
    const advanceId = target.dataset.advanceActivity;
    if (advanceId && app.session.kind === 'teacher') {
      void app.api
        .advanceActivity(advanceId, app.session.id)
        .then((activity) => {
          app.activity = activity;
          return render(app);
        })
        .catch((err) => {
          app.error = String(err);
          return render(app);
        });
      return;
    }
    if (target.id === 'unlock-labkit' && app.session.kind === 'teacher') {
      void app.api
        .unlockLabkit(app.session.id, app.session.classId)
        .then(() => {
          app.unlocked = true;
          return render(app);
        })
        .catch((err) => {
          app.error = String(err);
          return render(app);
        });
    }
  });

  root().addEventListener('submit', (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    if (form.id === 'snapshot-form' && app.session.kind === 'student') {
      const text = (document.getElementById('snapshot-text') as HTMLInputElement).value;
      const room = (document.getElementById('snapshot-room') as HTMLInputElement).value;
      if (!text.trim()) return;
      void app.api
        .submitSnapshot(app.session.id, text.trim(), room.trim() || undefined)
        .then(() => render(app))
        .catch((err) => {
          app.error = String(err);
          return render(app);
        });
    }
    if (form.id === 'activity-form' && app.session.kind === 'teacher') {
      const topic = (document.getElementById('activity-topic') as HTMLInputElement).value;
      if (!topic.trim()) return;
      void app.api
        .startActivity(app.session.id, app.session.classId, topic.trim())
        .then((activity) => {
          app.activity = activity;
          return render(app);
        })
        .catch((err) => {
          app.error = String(err);
          return render(app);
        });
    }
    if (form.id === 'teacher-login') {
      const id = (document.getElementById('teacher-id') as HTMLInputElement).value.trim();
      const cls = (document.getElementById('teacher-class') as HTMLInputElement).value.trim();
      if (id && cls) {
        window.location.search = `?teacher=${encodeURIComponent(id)}&class_id=${encodeURIComponent(cls)}`;
      }
    }
  });
}

async function showPicker(api: ApiClient): Promise<void> {
  try {
    const dashboard = await api.dashboard('global');
    root().innerHTML = renderIdentityPicker(dashboard);
  } catch (err) {
    root().innerHTML = renderError(err instanceof Error ? err.message : String(err));
  }
  root().addEventListener('submit', (event) => {
    event.preventDefault();
    const form = event.target as HTMLFormElement;
    if (form.id === 'teacher-login') {
      const id = (document.getElementById('teacher-id') as HTMLInputElement).value.trim();
      const cls = (document.getElementById('teacher-class') as HTMLInputElement).value.trim();
      if (id && cls) {
        window.location.search = `?teacher=${encodeURIComponent(id)}&class_id=${encodeURIComponent(cls)}`;
      }
    }
  });
}

export async function boot(): Promise<void> {
  const api = new ApiClient('');
  const session = sessionFromQuery(window.location.search);
  if (!session) {
    await showPicker(api);
    return;
  }
  if (session.kind === 'student' && !session.classId) {
    // class id comes from the map response; fill it in after the first fetch
    const map = await api.challengeMap(session.id);
    session.classId = map.class_id;
  }
  const app: App = {
    api,
    session,
    tab: session.kind === 'teacher' ? 'teacher' : 'map',
    map: null,
    openQuest: null,
    feedback: null,
    activity: null,
    unlocked: false,
    buildingId: null,
    error: null,
  };
  wireEvents(app);
  await refresh(app);
  setInterval(() => void refresh(app), POLL_MS);
}

if (typeof document !== 'undefined' && document.getElementById('app')) {
  void boot();
}
