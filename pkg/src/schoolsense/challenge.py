"""The challenge engine: quest traversal, grading, class activities,
bonus/lab-kit gating, scoring, dashboard and snapshots.

State changes are journaled to an append-only JSONL event log and replayed on
open, mirroring the telemetry store's durability style. Award insertion is
atomic per (student, quest): a student can never bank a quest's points twice.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from .errors import (
    AuthzError,
    GateError,
    NotFoundError,
    StateError,
    UnresolvableError,
    ValidationError,
)
from .questmap import KIND_LIVE, REDUCE_ARGMAX, QuestMap, QuestNode
from .roster import Roster

SNAPSHOT_TEXT_LIMIT = 500
DASHBOARD_SNAPSHOTS = 20

ACTIVITY_STATES = ("part_a", "part_b", "part_c", "complete")

# Returns {room_id: value} of each room's latest value for a metric, for
# grading live-data quests against the store at answer time.
LiveResolver = Callable[[str, str], dict[str, float]]


@dataclass
class ClassActivity:
    id: str
    class_id: str
    teacher_id: str
    topic: str
    state: str
    started_ts: int

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "class_id": self.class_id,
            "teacher_id": self.teacher_id,
            "topic": self.topic,
            "state": self.state,
            "started_ts": self.started_ts,
        }


@dataclass(frozen=True)
class AwardEntry:
    student_id: str
    quest_id: str
    points: int
    ts: int


@dataclass(frozen=True)
class Snapshot:
    id: str
    student_id: str
    class_id: str
    ts: int
    text: str
    room_id: str | None = None

    def to_json_dict(self) -> dict:
        return {
            "id": self.id,
            "student_id": self.student_id,
            "class_id": self.class_id,
            "ts": self.ts,
            "text": self.text,
            "room_id": self.room_id,
        }


class ChallengeEngine:
    def __init__(
        self,
        quest_map: QuestMap,
        roster: Roster,
        events_path: str | Path,
        live_resolver: LiveResolver | None = None,
        fsync: bool = True,
    ):
        self.quest_map = quest_map
        self.roster = roster
        self.live_resolver = live_resolver
        self.fsync = fsync
        self._lock = threading.RLock()
        self._awards: dict[tuple[str, str], AwardEntry] = {}
        self._class_score: dict[str, int] = {c: 0 for c in roster.classes}
        self._class_last_award: dict[str, int] = {}
        self._activities: dict[str, ClassActivity] = {}
        self._participating: set[str] = set()  # class ids with >= 1 started activity
        self._unlocked: set[str] = set()       # class ids with lab-kit quests open
        self._snapshots: dict[str, list[Snapshot]] = {c: [] for c in roster.classes}
        self._activity_counter = 0
        self._snapshot_counter = 0
        self._events_path = Path(events_path)
        self._events_path.parent.mkdir(parents=True, exist_ok=True)
        self._replay()
        self._log = open(self._events_path, "ab")

    # -- event journal -------------------------------------------------------

    def _replay(self) -> None:
        if not self._events_path.exists():
            return
        data = self._events_path.read_bytes()
        offset = 0
        truncate_at: int | None = None
        while offset < len(data):
            newline = data.find(b"\n", offset)
            line_end = newline if newline != -1 else len(data)
            try:
                event = json.loads(data[offset:line_end].decode("utf-8"))
                if newline == -1:
                    raise ValueError("event missing newline terminator")
                self._apply(event)
            except (ValueError, KeyError):
                # Torn tail from a crash mid-append; drop it.
                truncate_at = offset
                break
            offset = line_end + 1
        if truncate_at is not None:
            with open(self._events_path, "r+b") as fh:
                fh.truncate(truncate_at)

    def _append(self, event: dict) -> None:
        self._log.write(json.dumps(event, separators=(",", ":")).encode("utf-8") + b"\n")
        self._log.flush()
        if self.fsync:
            os.fsync(self._log.fileno())

    def _apply(self, event: dict) -> None:
        kind = event["type"]
        if kind == "award":
            entry = AwardEntry(
                student_id=event["student_id"],
                quest_id=event["quest_id"],
                points=int(event["points"]),
                ts=int(event["ts"]),
            )
            key = (entry.student_id, entry.quest_id)
            if key in self._awards:
                return
            self._awards[key] = entry
            class_id = self.roster.class_of_student(entry.student_id)
            self._class_score[class_id] += entry.points
            self._class_last_award[class_id] = entry.ts
        elif kind == "activity_started":
            activity = ClassActivity(
                id=event["activity_id"],
                class_id=event["class_id"],
                teacher_id=event["teacher_id"],
                topic=event["topic"],
                state="part_a",
                started_ts=int(event["ts"]),
            )
            self._activities[activity.id] = activity
            self._participating.add(activity.class_id)
            num = int(activity.id.rsplit("-", 1)[1])
            self._activity_counter = max(self._activity_counter, num)
        elif kind == "activity_advanced":
            self._activities[event["activity_id"]].state = event["state"]
        elif kind == "labkit_unlocked":
            self._unlocked.add(event["class_id"])
        elif kind == "snapshot":
            snap = Snapshot(
                id=event["snapshot_id"],
                student_id=event["student_id"],
                class_id=event["class_id"],
                ts=int(event["ts"]),
                text=event["text"],
                room_id=event.get("room_id"),
            )
            self._snapshots.setdefault(snap.class_id, []).append(snap)
            num = int(snap.id.rsplit("-", 1)[1])
            self._snapshot_counter = max(self._snapshot_counter, num)
        else:
            raise ValueError(f"unknown event type {kind!r}")

    # -- quest visibility and answering ---------------------------------------

    def _quest(self, quest_id: str) -> QuestNode:
        quest = self.quest_map.quests.get(quest_id)
        if quest is None:
            raise NotFoundError(f"quest {quest_id}")
        return quest

    def _visible(self, quest: QuestNode, student_id: str, class_id: str) -> bool:
        if quest.id in self.quest_map.bonus_area and class_id not in self._participating:
            return False
        if quest.id in self.quest_map.labkit_area and class_id not in self._unlocked:
            return False
        return all(
            (student_id, pre) in self._awards for pre in quest.prerequisites
        )

    def visible_quests(self, student_id: str) -> list[str]:
        """Quest ids the student may currently play (or has answered)."""
        class_id = self.roster.class_of_student(student_id)
        with self._lock:
            return sorted(
                qid
                for qid, quest in self.quest_map.quests.items()
                if self._visible(quest, student_id, class_id)
            )

    def quest_status(self, student_id: str) -> dict[str, str]:
        """Per-quest state for the map view: locked, available, or answered."""
        class_id = self.roster.class_of_student(student_id)
        with self._lock:
            status = {}
            for qid, quest in self.quest_map.quests.items():
                if (student_id, qid) in self._awards:
                    status[qid] = "answered"
                elif self._visible(quest, student_id, class_id):
                    status[qid] = "available"
                else:
                    status[qid] = "locked"
            return status

    def resolve_live_answer(self, quest: QuestNode) -> str:
        """Canonical answer of a live-data quest right now: a room id."""
        if quest.kind != KIND_LIVE or quest.live is None:
            raise ValidationError(f"quest {quest.id} is not a live-data quest")
        if self.live_resolver is None:
            raise UnresolvableError("no live data source configured")
        per_room = self.live_resolver(quest.live.target, quest.live.metric)
        if not per_room:
            raise UnresolvableError(
                f"no room of {quest.live.target} has {quest.live.metric} data"
            )
        if quest.live.reduce == REDUCE_ARGMAX:
            pick = max(per_room.values())
        else:
            pick = min(per_room.values())
        return min(room for room, value in per_room.items() if value == pick)

    def answer_quest(self, student_id: str, quest_id: str, answer, now: int) -> dict:
        """Grade an answer; points are banked at most once per (student, quest)."""
        class_id = self.roster.class_of_student(student_id)
        quest = self._quest(quest_id)
        with self._lock:
            if not self._visible(quest, student_id, class_id):
                raise GateError(f"quest {quest_id} is not open for {student_id}")
            if quest.kind == KIND_LIVE:
                canonical = self.resolve_live_answer(quest)
                correct = isinstance(answer, str) and answer == canonical
            else:
                if not isinstance(answer, int) or isinstance(answer, bool):
                    raise ValidationError("quiz answer must be a choice index")
                correct = answer == quest.quiz.correct_index
            if not correct:
                return {"correct": False, "points_awarded": 0}
            key = (student_id, quest_id)
            if key in self._awards:
                return {"correct": True, "points_awarded": 0}
            self._append(
                {
                    "type": "award",
                    "student_id": student_id,
                    "quest_id": quest_id,
                    "points": quest.points,
                    "ts": int(now),
                }
            )
            entry = AwardEntry(student_id, quest_id, quest.points, int(now))
            self._awards[key] = entry
            self._class_score[class_id] += quest.points
            self._class_last_award[class_id] = int(now)
            return {"correct": True, "points_awarded": quest.points}

    # -- class activities ------------------------------------------------------

    def start_class_activity(
        self, teacher_id: str, class_id: str, topic: str, now: int
    ) -> ClassActivity:
        self.roster.school_class(class_id)
        if not self.roster.teacher_bound(teacher_id, class_id):
            raise AuthzError(f"teacher {teacher_id} is not bound to class {class_id}")
        with self._lock:
            self._activity_counter += 1
            activity = ClassActivity(
                id=f"act-{self._activity_counter:06d}",
                class_id=class_id,
                teacher_id=teacher_id,
                topic=topic,
                state="part_a",
                started_ts=int(now),
            )
            self._append(
                {
                    "type": "activity_started",
                    "activity_id": activity.id,
                    "class_id": class_id,
                    "teacher_id": teacher_id,
                    "topic": topic,
                    "ts": int(now),
                }
            )
            self._activities[activity.id] = activity
            self._participating.add(class_id)
            return activity

    def advance_class_activity(self, activity_id: str, teacher_id: str) -> ClassActivity:
        with self._lock:
            activity = self._activities.get(activity_id)
            if activity is None:
                raise NotFoundError(f"activity {activity_id}")
            if activity.teacher_id != teacher_id:
                raise AuthzError(
                    f"activity {activity_id} belongs to {activity.teacher_id}"
                )
            idx = ACTIVITY_STATES.index(activity.state)
            if activity.state == "complete":
                raise StateError(f"activity {activity_id} is already complete")
            new_state = ACTIVITY_STATES[idx + 1]
            self._append(
                {
                    "type": "activity_advanced",
                    "activity_id": activity_id,
                    "state": new_state,
                    "ts": activity.started_ts,
                }
            )
            activity.state = new_state
            return activity

    def get_activity(self, activity_id: str) -> ClassActivity:
        with self._lock:
            activity = self._activities.get(activity_id)
            if activity is None:
                raise NotFoundError(f"activity {activity_id}")
            return activity

    def unlock_labkit_quests(self, teacher_id: str, class_id: str, now: int) -> None:
        """Open the lab-kit quests for a class; safe to call repeatedly."""
        self.roster.school_class(class_id)
        if not self.roster.teacher_bound(teacher_id, class_id):
            raise AuthzError(f"teacher {teacher_id} is not bound to class {class_id}")
        with self._lock:
            if class_id in self._unlocked:
                return
            self._append(
                {
                    "type": "labkit_unlocked",
                    "class_id": class_id,
                    "teacher_id": teacher_id,
                    "ts": int(now),
                }
            )
            self._unlocked.add(class_id)

    def labkit_unlocked(self, class_id: str) -> bool:
        return class_id in self._unlocked

    # -- scoring, dashboard, snapshots ----------------------------------------

    def student_score(self, student_id: str) -> int:
        self.roster.student(student_id)
        with self._lock:
            return sum(
                e.points for (sid, _), e in self._awards.items() if sid == student_id
            )

    def class_score(self, class_id: str) -> int:
        self.roster.school_class(class_id)
        with self._lock:
            return self._class_score[class_id]

    def awards(self) -> list[AwardEntry]:
        with self._lock:
            return list(self._awards.values())

    def submit_snapshot(
        self, student_id: str, text: str, now: int, room_id: str | None = None
    ) -> Snapshot:
        student = self.roster.student(student_id)
        if len(text) > SNAPSHOT_TEXT_LIMIT:
            raise ValidationError(
                f"snapshot text of {len(text)} chars exceeds {SNAPSHOT_TEXT_LIMIT}"
            )
        with self._lock:
            self._snapshot_counter += 1
            snap = Snapshot(
                id=f"snap-{self._snapshot_counter:06d}",
                student_id=student_id,
                class_id=student.class_id,
                ts=int(now),
                text=text,
                room_id=room_id,
            )
            self._append(
                {
                    "type": "snapshot",
                    "snapshot_id": snap.id,
                    "student_id": snap.student_id,
                    "class_id": snap.class_id,
                    "ts": snap.ts,
                    "text": snap.text,
                    "room_id": snap.room_id,
                }
            )
            self._snapshots[snap.class_id].append(snap)
            return snap

    def class_snapshots(self, class_id: str, limit: int | None = None) -> list[Snapshot]:
        """Newest-first snapshots for a class."""
        self.roster.school_class(class_id)
        with self._lock:
            snaps = list(reversed(self._snapshots.get(class_id, [])))
        return snaps[:limit] if limit is not None else snaps

    def dashboard(self, scope: str, school_id: str | None = None) -> list[dict]:
        """Ranked classes: score desc, then first-reached ts, then class id."""
        if scope == "school":
            if school_id is None:
                raise ValidationError("school scope needs a school id")
            classes = self.roster.classes_of_school(school_id)
        elif scope == "global":
            classes = sorted(self.roster.classes.values(), key=lambda c: c.id)
        else:
            raise ValidationError(f"unknown dashboard scope {scope!r}")
        with self._lock:
            rows = []
            for cls in classes:
                students = [
                    {
                        "student_id": s.id,
                        "name": s.name,
                        "points": sum(
                            e.points
                            for (sid, _), e in self._awards.items()
                            if sid == s.id
                        ),
                    }
                    for s in self.roster.students_of_class(cls.id)
                ]
                students.sort(key=lambda s: (-s["points"], s["student_id"]))
                rows.append(
                    {
                        "class_id": cls.id,
                        "name": cls.name,
                        "school_id": cls.school_id,
                        "score": self._class_score[cls.id],
                        "reached_ts": self._class_last_award.get(cls.id),
                        "students": students,
                        "snapshots": [
                            s.to_json_dict()
                            for s in self.class_snapshots(cls.id, DASHBOARD_SNAPSHOTS)
                        ],
                    }
                )
        rows.sort(
            key=lambda r: (
                -r["score"],
                r["reached_ts"] if r["reached_ts"] is not None else float("inf"),
                r["class_id"],
            )
        )
        return rows

    def close(self) -> None:
        with self._lock:
            if self._log is not None:
                self._log.close()
                self._log = None
