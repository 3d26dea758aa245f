"""Quest map definitions: a DAG of quests grouped into five subject areas,
with bonus and lab-kit areas behind participation/unlock gates.

Maps are data, not code; they load from a JSON file and are validated as a
whole, reporting every violation at once.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import MapValidationError
from .metrics import METRICS_BY_NAME

KIND_QUIZ = "quiz"
KIND_SEQUENCE = "sequence_member"
KIND_LIVE = "live_data"
KIND_BONUS = "bonus"
KIND_LABKIT = "labkit"
QUEST_KINDS = (KIND_QUIZ, KIND_SEQUENCE, KIND_LIVE, KIND_BONUS, KIND_LABKIT)

AREA_MIN, AREA_MAX = 1, 5

REDUCE_ARGMAX = "argmax_room"
REDUCE_ARGMIN = "argmin_room"


@dataclass(frozen=True)
class QuizPayload:
    question: str
    choices: tuple[str, ...]
    correct_index: int


@dataclass(frozen=True)
class LivePayload:
    target: str          # building id
    metric: str          # metric name
    reduce: str          # argmax_room | argmin_room


@dataclass(frozen=True)
class QuestNode:
    id: str
    area: int
    points: int
    kind: str
    prerequisites: frozenset[str]
    quiz: QuizPayload | None = None
    live: LivePayload | None = None


@dataclass
class QuestMap:
    quests: dict[str, QuestNode]
    sequences: list[list[str]] = field(default_factory=list)
    bonus_area: frozenset[str] = frozenset()
    labkit_area: frozenset[str] = frozenset()

    def topological_order(self) -> list[str]:
        """Kahn's algorithm; raises MapValidationError when a cycle remains."""
        indegree = {qid: len(q.prerequisites) for qid, q in self.quests.items()}
        ready = sorted(qid for qid, d in indegree.items() if d == 0)
        dependents: dict[str, list[str]] = {qid: [] for qid in self.quests}
        for qid, q in self.quests.items():
            for pre in q.prerequisites:
                if pre in dependents:
                    dependents[pre].append(qid)
        order: list[str] = []
        while ready:
            qid = ready.pop(0)
            order.append(qid)
            for dep in sorted(dependents[qid]):
                indegree[dep] -= 1
                if indegree[dep] == 0:
                    ready.append(dep)
        if len(order) != len(self.quests):
            stuck = sorted(qid for qid, d in indegree.items() if d > 0)
            raise MapValidationError([f"cycle through quests {', '.join(stuck)}"])
        return order


def _validate(quest_map: QuestMap) -> list[str]:
    problems: list[str] = []
    quests = quest_map.quests
    for qid, q in quests.items():
        if not AREA_MIN <= q.area <= AREA_MAX:
            problems.append(f"quest {qid}: area {q.area} outside {AREA_MIN}..{AREA_MAX}")
        if q.points < 0:
            problems.append(f"quest {qid}: negative points")
        if q.kind not in QUEST_KINDS:
            problems.append(f"quest {qid}: unknown kind {q.kind!r}")
        for pre in q.prerequisites:
            if pre not in quests:
                problems.append(f"quest {qid}: dangling prerequisite {pre}")
        if qid in q.prerequisites:
            problems.append(f"quest {qid}: depends on itself")
        if q.kind == KIND_LIVE:
            if q.live is None:
                problems.append(f"quest {qid}: live_data quest without live payload")
            else:
                if q.live.reduce not in (REDUCE_ARGMAX, REDUCE_ARGMIN):
                    problems.append(f"quest {qid}: unknown reduce {q.live.reduce!r}")
                if q.live.metric not in METRICS_BY_NAME:
                    problems.append(f"quest {qid}: unknown metric {q.live.metric!r}")
        else:
            if q.quiz is None:
                problems.append(f"quest {qid}: missing quiz payload")
            else:
                if len(q.quiz.choices) < 2:
                    problems.append(f"quest {qid}: needs at least two choices")
                if not 0 <= q.quiz.correct_index < len(q.quiz.choices):
                    problems.append(f"quest {qid}: correct_index outside choices")

    for label, area in (("bonus", quest_map.bonus_area), ("labkit", quest_map.labkit_area)):
        for qid in area:
            if qid not in quests:
                problems.append(f"{label} area lists unknown quest {qid}")
    overlap = quest_map.bonus_area & quest_map.labkit_area
    if overlap:
        problems.append(f"quests in both bonus and labkit areas: {', '.join(sorted(overlap))}")
    for qid, q in quests.items():
        if q.kind == KIND_BONUS and qid not in quest_map.bonus_area:
            problems.append(f"quest {qid}: kind bonus but not listed in bonus_area")
        if qid in quest_map.bonus_area and q.kind != KIND_BONUS:
            problems.append(f"quest {qid}: in bonus_area but kind {q.kind}")
        if q.kind == KIND_LABKIT and qid not in quest_map.labkit_area:
            problems.append(f"quest {qid}: kind labkit but not listed in labkit_area")
        if qid in quest_map.labkit_area and q.kind != KIND_LABKIT:
            problems.append(f"quest {qid}: in labkit_area but kind {q.kind}")

    for i, seq in enumerate(quest_map.sequences):
        for qid in seq:
            if qid not in quests:
                problems.append(f"sequence {i}: unknown quest {qid}")
                continue
            if quests[qid].kind != KIND_SEQUENCE:
                problems.append(f"sequence {i}: quest {qid} is not a sequence_member")
        for prev, cur in zip(seq, seq[1:]):
            if cur in quests and prev not in quests[cur].prerequisites:
                problems.append(
                    f"sequence {i}: {cur} does not list {prev} as a prerequisite"
                )

    gated = quest_map.bonus_area | quest_map.labkit_area
    main = {qid: q for qid, q in quests.items() if qid not in gated}
    if main and not any(not q.prerequisites for q in main.values()):
        problems.append("no start quest: every main-path quest has prerequisites")
    depended_on = {pre for q in quests.values() for pre in q.prerequisites}
    if main and not any(qid not in depended_on for qid in main):
        problems.append("no finish quest: every main-path quest has dependents")

    if not problems:
        try:
            quest_map.topological_order()
        except MapValidationError as exc:
            problems.extend(exc.problems)
    return problems


def quest_map_from_dict(d: dict) -> QuestMap:
    problems: list[str] = []
    quests: dict[str, QuestNode] = {}
    for entry in d.get("quests", []):
        qid = str(entry.get("id", ""))
        if not qid:
            problems.append("quest without id")
            continue
        if qid in quests:
            problems.append(f"duplicate quest id {qid}")
            continue
        quiz = None
        live = None
        if "quiz" in entry:
            qz = entry["quiz"]
            quiz = QuizPayload(
                question=str(qz.get("question", "")),
                choices=tuple(str(c) for c in qz.get("choices", [])),
                correct_index=int(qz.get("correct_index", -1)),
            )
        if "live_data" in entry:
            lv = entry["live_data"]
            live = LivePayload(
                target=str(lv.get("target", "")),
                metric=str(lv.get("metric", "")),
                reduce=str(lv.get("reduce", "")),
            )
        quests[qid] = QuestNode(
            id=qid,
            area=int(entry.get("area", 0)),
            points=int(entry.get("points", 0)),
            kind=str(entry.get("kind", "")),
            prerequisites=frozenset(str(p) for p in entry.get("prerequisites", [])),
            quiz=quiz,
            live=live,
        )
    quest_map = QuestMap(
        quests=quests,
        sequences=[[str(q) for q in seq] for seq in d.get("sequences", [])],
        bonus_area=frozenset(str(q) for q in d.get("bonus_area", [])),
        labkit_area=frozenset(str(q) for q in d.get("labkit_area", [])),
    )
    problems.extend(_validate(quest_map))
    if problems:
        raise MapValidationError(problems)
    return quest_map


def load_quest_map(path: str | Path) -> QuestMap:
    """Load and validate a quest map definition file."""
    with open(path, encoding="utf-8") as fh:
        return quest_map_from_dict(json.load(fh))
