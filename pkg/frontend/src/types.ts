// Response shapes of the /api/v1 routes this client consumes.
// They mirror docs/api_schemas.json in the backend repo.

export type QuestStatus = 'locked' | 'available' | 'answered';
export type QuestKind = 'quiz' | 'sequence_member' | 'live_data' | 'bonus' | 'labkit';

export interface QuizPayload {
  quiz: { question: string; choices: string[] };
}

export interface LivePayload {
  live_data: { target: string; metric: string; reduce: string };
}

export interface QuestEntry {
  id: string;
  area: number;
  points: number;
  kind: QuestKind;
  prerequisites: string[];
  status: QuestStatus;
  payload: QuizPayload | LivePayload | null;
  points_awarded: number | null;
}

export interface ChallengeMap {
  student_id: string;
  class_id: string;
  score: number;
  class_score: number;
  quests: QuestEntry[];
}

export interface AnswerResult {
  quest_id: string;
  correct: boolean;
  points_awarded: number;
  student_score: number;
  class_score: number;
}

export interface Activity {
  id: string;
  class_id: string;
  teacher_id: string;
  topic: string;
  state: 'part_a' | 'part_b' | 'part_c' | 'complete';
  started_ts: number;
}

export interface Snapshot {
  id: string;
  student_id: string;
  class_id: string;
  ts: number;
  text: string;
  room_id: string | null;
}

export interface DashboardClass {
  class_id: string;
  name: string;
  school_id: string;
  score: number;
  reached_ts: number | null;
  students: { student_id: string; name: string; points: number }[];
  snapshots: Snapshot[];
}

export interface Dashboard {
  scope: string;
  classes: DashboardClass[];
}

export interface RoomSummary {
  room_id: string;
  name: string;
  orientation?: string;
  no_data: boolean;
  temperature: number | null;
  humidity: number | null;
  ts: number | null;
  comfort: { thermal: string; hygric: string } | null;
  led: 'green' | 'red' | null;
}

export interface DialReading {
  value: number | null;
  level: number;
}

export interface BuildingSummary {
  building_id: string;
  as_of: number;
  rooms: RoomSummary[];
  power: {
    power_phase_a: number | null;
    power_phase_b: number | null;
    power_phase_c: number | null;
    total: number | null;
    ts: number | null;
    ring: Record<string, number> | null;
  } | null;
  dials: { power: DialReading; temperature: DialReading; humidity: DialReading };
  ring_leds: number;
}

export interface Building {
  id: string;
  name: string;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}

export type Session =
  | { kind: 'student'; id: string; classId: string }
  | { kind: 'teacher'; id: string; classId: string };
