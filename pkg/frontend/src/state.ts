// Session parsing and the small pure state transitions the UI applies between
// polls. The server stays authoritative: these only splice fresh API results
// into the rendered view without waiting for the next poll.

import type { AnswerResult, ChallengeMap, Session } from './types.js';

export function sessionFromQuery(query: string): Session | null {
  const params = new URLSearchParams(query);
  const student = params.get('student');
  if (student) {
    return { kind: 'student', id: student, classId: params.get('class_id') ?? '' };
  }
  const teacher = params.get('teacher');
  const classId = params.get('class_id');
  if (teacher && classId) {
    return { kind: 'teacher', id: teacher, classId };
  }
  return null;
}

/** Fold an answer result into the cached map; the next poll reconciles. */
export function applyAnswerResult(map: ChallengeMap, result: AnswerResult): ChallengeMap {
  const quests = map.quests.map((quest) => {
    if (quest.id !== result.quest_id || !result.correct) return quest;
    return {
      ...quest,
      status: 'answered' as const,
      points_awarded: quest.points_awarded ?? result.points_awarded,
    };
  });
  return {
    ...map,
    quests,
    score: result.student_score,
    class_score: result.class_score,
  };
}

/** Fresh students must see exactly the prerequisite-free main-path quests. */
export function availableQuestIds(map: ChallengeMap): string[] {
  return map.quests
    .filter((quest) => quest.status === 'available')
    .map((quest) => quest.id)
    .sort();
}
