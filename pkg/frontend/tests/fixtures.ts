import type { BuildingSummary, ChallengeMap, Dashboard } from '../src/types.js';

export function freshMap(): ChallengeMap {
  return {
    student_id: 'st01',
    class_id: 'c1',
    score: 0,
    class_score: 0,
    quests: [
      { id: 'q_energy_1', area: 1, points: 10, kind: 'quiz', prerequisites: [],
        status: 'available',
        payload: { quiz: { question: 'Which unit?', choices: ['V', 'kWh'] } },
        points_awarded: null },
      { id: 'q_energy_2', area: 1, points: 10, kind: 'quiz', prerequisites: ['q_energy_1'],
        status: 'locked', payload: null, points_awarded: null },
      { id: 'q_light_1', area: 2, points: 10, kind: 'quiz', prerequisites: ['q_energy_1'],
        status: 'locked', payload: null, points_awarded: null },
      { id: 'q_live', area: 4, points: 20, kind: 'live_data', prerequisites: ['q_energy_1'],
        status: 'locked', payload: null, points_awarded: null },
      { id: 'q_bonus', area: 3, points: 15, kind: 'bonus', prerequisites: [],
        status: 'locked', payload: null, points_awarded: null },
      { id: 'q_kit', area: 5, points: 10, kind: 'labkit', prerequisites: [],
        status: 'locked', payload: null, points_awarded: null },
    ],
  };
}

export function dashboard(): Dashboard {
  return {
    scope: 'global',
    classes: [
      { class_id: 'c1', name: '5A', school_id: 's1', score: 30, reached_ts: 100,
        students: [
          { student_id: 'st01', name: 'Anna', points: 20 },
          { student_id: 'st02', name: 'Boris', points: 10 },
        ],
        snapshots: [
          { id: 'snap-1', student_id: 'st01', class_id: 'c1', ts: 99,
            text: 'lights on in empty room', room_id: 'r02' },
        ] },
      { class_id: 'c2', name: '5B', school_id: 's1', score: 10, reached_ts: 50,
        students: [{ student_id: 'st06', name: 'Filip', points: 10 }],
        snapshots: [] },
    ],
  };
}

export function summary(overrides: Partial<BuildingSummary> = {}): BuildingSummary {
  return {
    building_id: 'b1',
    as_of: 1000,
    ring_leds: 12,
    rooms: [
      { room_id: 'r01', name: 'Room 01', no_data: false, temperature: 22.4, humidity: 51,
        ts: 990, comfort: { thermal: 'comfortable', hygric: 'ok' }, led: 'green' },
      { room_id: 'r02', name: 'Room 02', no_data: false, temperature: 25.6, humidity: 48,
        ts: 990, comfort: { thermal: 'comfortable', hygric: 'ok' }, led: 'red' },
      { room_id: 'r03', name: 'Room 03', no_data: true, temperature: null, humidity: null,
        ts: null, comfort: null, led: null },
    ],
    power: {
      power_phase_a: 460, power_phase_b: 403, power_phase_c: 288, total: 1151, ts: 990,
      ring: { power_phase_a: 2, power_phase_b: 2, power_phase_c: 1, total: 5 },
    },
    dials: {
      power: { value: 1151, level: 5 },
      temperature: { value: 24.0, level: 7 },
      humidity: { value: 49.5, level: 6 },
    },
    ...overrides,
  };
}
