// Pure view functions: API data in, HTML string out. Interaction is wired by
// event delegation in main.ts via data-* attributes, so everything here is
// testable without a browser.

import type {
  Activity,
  BuildingSummary,
  ChallengeMap,
  Dashboard,
  QuestEntry,
  Session,
} from './types.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

const AREA_TITLES: Record<number, string> = {
  1: 'Area 1 · Energy basics',
  2: 'Area 2 · Lighting',
  3: 'Area 3 · Heating',
  4: 'Area 4 · Comfort',
  5: 'Area 5 · Devices',
};

function questNode(quest: QuestEntry): string {
  const classes = ['quest', quest.status, quest.kind];
  const points =
    quest.status === 'answered'
      ? `<span class="points">+${quest.points_awarded ?? quest.points}</span>`
      : `<span class="points">${quest.points} pts</span>`;
  const clickable = quest.status === 'available' ? ` data-quest-id="${escapeHtml(quest.id)}"` : '';
  const badge =
    quest.kind === 'bonus' || quest.kind === 'labkit'
      ? `<span class="badge">${quest.kind}</span>`
      : quest.kind === 'live_data'
        ? '<span class="badge">live</span>'
        : '';
  return (
    `<div class="${classes.join(' ')}"${clickable}>` +
    `<span class="quest-id">${escapeHtml(quest.id)}</span>${badge}${points}` +
    `</div>`
  );
}

/** Quest map: areas grouped top-to-bottom, bonus and lab-kit set apart. */
export function renderQuestMap(map: ChallengeMap): string {
  const main = map.quests.filter((q) => q.kind !== 'bonus' && q.kind !== 'labkit');
  const bonus = map.quests.filter((q) => q.kind === 'bonus');
  const labkit = map.quests.filter((q) => q.kind === 'labkit');

  const areas: string[] = [];
  for (let area = 1; area <= 5; area++) {
    const quests = main.filter((q) => q.area === area);
    if (!quests.length) continue;
    areas.push(
      `<section class="area"><h3>${AREA_TITLES[area]}</h3>` +
        quests.map(questNode).join('') +
        `</section>`,
    );
  }
  const side = (title: string, quests: QuestEntry[]) =>
    quests.length
      ? `<section class="area gated"><h3>${title}</h3>` +
        quests.map(questNode).join('') +
        `</section>`
      : '';
  return (
    `<div class="scores">score <b id="student-score">${map.score}</b>` +
    ` · class <b id="class-score">${map.class_score}</b></div>` +
    `<div class="quest-map">${areas.join('')}` +
    side('Bonus · class activities', bonus) +
    side('Lab kit · educator unlock', labkit) +
    `</div>`
  );
}

/** The open quest: quiz choices or a live-data room answer. */
export function renderQuestPanel(
  quest: QuestEntry,
  feedback: string | null = null,
): string {
  let body: string;
  if (quest.payload && 'quiz' in quest.payload) {
    const { question, choices } = quest.payload.quiz;
    body =
      `<p>${escapeHtml(question)}</p>` +
      choices
        .map(
          (choice, i) =>
            `<button class="choice" data-answer-index="${i}">${escapeHtml(choice)}</button>`,
        )
        .join('');
  } else if (quest.payload && 'live_data' in quest.payload) {
    const live = quest.payload.live_data;
    body =
      `<p>Check the live building data: which room is the ` +
      `${live.reduce === 'argmax_room' ? 'highest' : 'lowest'} on ` +
      `<b>${escapeHtml(live.metric)}</b> right now?</p>` +
      `<input id="live-answer" placeholder="room id, e.g. r01">` +
      `<button data-live-submit="1">answer</button>`;
  } else {
    body = '<p>This quest has no payload.</p>';
  }
  return (
    `<div class="quest-panel" data-open-quest="${escapeHtml(quest.id)}">` +
    `<h3>${escapeHtml(quest.id)} · ${quest.points} pts</h3>` +
    body +
    (feedback ? `<p class="feedback">${escapeHtml(feedback)}</p>` : '') +
    `<button data-close-quest="1">close</button></div>`
  );
}

export function renderDashboard(dashboard: Dashboard, session: Session): string {
  const rows = dashboard.classes
    .map((cls, rank) => {
      const students = cls.students
        .map((s) => `<li>${escapeHtml(s.name)} (${escapeHtml(s.student_id)}) — ${s.points}</li>`)
        .join('');
      const snapshots = cls.snapshots
        .map(
          (snap) =>
            `<li class="snapshot">${escapeHtml(snap.text)}` +
            `<span class="meta">${escapeHtml(snap.student_id)}` +
            `${snap.room_id ? ' · ' + escapeHtml(snap.room_id) : ''}</span></li>`,
        )
        .join('');
      return (
        `<details class="class-row" ${cls.class_id === session.classId ? 'open' : ''}>` +
        `<summary>#${rank + 1} ${escapeHtml(cls.name)} ` +
        `<b class="class-points" data-class-id="${escapeHtml(cls.class_id)}">${cls.score}</b></summary>` +
        `<div class="drill"><h4>students</h4><ol>${students}</ol>` +
        `<h4>recent snapshots</h4><ul>${snapshots || '<li>none yet</li>'}</ul></div>` +
        `</details>`
      );
    })
    .join('');
  const snapshotForm =
    session.kind === 'student'
      ? `<form id="snapshot-form"><input id="snapshot-text" maxlength="500" ` +
        `placeholder="share an observation"><input id="snapshot-room" placeholder="room (optional)">` +
        `<button>post snapshot</button></form>`
      : '';
  return `<div class="dashboard">${rows}</div>${snapshotForm}`;
}

function dialBar(level: number, n: number): string {
  return (
    `<span class="dial-bar">` +
    Array.from({ length: n }, (_, i) => `<i class="${i < level ? 'lit' : ''}"></i>`).join('') +
    `</span>`
  );
}

/** Live building panel: room comfort tiles plus the three ring dials. */
export function renderBuilding(summary: BuildingSummary): string {
  const tiles = summary.rooms
    .map((room) => {
      const cls = room.led ?? 'nodata';
      const temp = room.temperature === null ? '–' : `${room.temperature.toFixed(1)}°C`;
      const hum = room.humidity === null ? '–' : `${room.humidity.toFixed(0)}%`;
      const comfort = room.comfort ? `${room.comfort.thermal} / ${room.comfort.hygric}` : 'no data';
      return (
        `<div class="room-tile ${cls}" data-room-id="${escapeHtml(room.room_id)}">` +
        `<b>${escapeHtml(room.room_id)}</b><span>${temp} ${hum}</span>` +
        `<span class="comfort">${escapeHtml(comfort)}</span></div>`
      );
    })
    .join('');
  const n = summary.ring_leds;
  const dials = (['power', 'temperature', 'humidity'] as const)
    .map((name) => {
      const dial = summary.dials[name];
      const value =
        dial.value === null
          ? 'no data'
          : name === 'power'
            ? `${dial.value.toFixed(0)} W`
            : dial.value.toFixed(1);
      return (
        `<div class="dial" data-dial="${name}"><label>${name}</label>` +
        dialBar(dial.level, n) +
        `<span class="dial-value">${value} (${dial.level}/${n})</span></div>`
      );
    })
    .join('');
  const total =
    summary.power && summary.power.total !== null
      ? `<p class="total-power">total power: <b>${summary.power.total.toFixed(0)} W</b></p>`
      : '<p class="total-power">no power meter data</p>';
  return `<div class="building"><div class="room-grid">${tiles}</div>${total}<div class="dials">${dials}</div></div>`;
}

export function renderTeacherPanel(
  session: Session,
  activity: Activity | null,
  unlocked: boolean,
): string {
  if (session.kind !== 'teacher') return '';
  const activityCard = activity
    ? `<div class="activity-card" data-activity-id="${escapeHtml(activity.id)}">` +
      `<b>${escapeHtml(activity.topic)}</b> — state: <i class="activity-state">${activity.state}</i> ` +
      (activity.state === 'complete'
        ? '<span class="done">done</span>'
        : `<button data-advance-activity="${escapeHtml(activity.id)}">advance</button>`) +
      `</div>`
    : `<form id="activity-form"><input id="activity-topic" placeholder="activity topic">` +
      `<button>start class activity</button></form>`;
  return (
    `<div class="teacher-panel"><h3>teacher panel · class ${escapeHtml(session.classId)}</h3>` +
    activityCard +
    `<button id="unlock-labkit" ${unlocked ? 'disabled' : ''}>` +
    (unlocked ? 'lab-kit quests unlocked' : 'unlock lab-kit quests') +
    `</button></div>`
  );
}

export function renderError(message: string): string {
  return `<div class="banner error">${escapeHtml(message)} <button data-retry="1">retry</button></div>`;
}

export function renderIdentityPicker(dashboard: Dashboard): string {
  const students = dashboard.classes
    .flatMap((cls) => cls.students.map((s) => ({ cls, s })))
    .map(
      ({ cls, s }) =>
        `<a class="identity" href="?student=${encodeURIComponent(s.student_id)}">` +
        `${escapeHtml(s.name)} <span>(${escapeHtml(cls.name)})</span></a>`,
    )
    .join('');
  return (
    `<div class="picker"><h3>choose a student</h3>${students}` +
    `<h3>or sign in as a teacher</h3>` +
    `<form id="teacher-login"><input id="teacher-id" placeholder="teacher id, e.g. t1">` +
    `<input id="teacher-class" placeholder="class id, e.g. c1">` +
    `<button>open teacher view</button></form></div>`
  );
}
