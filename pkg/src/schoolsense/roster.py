"""School/class/student roster and teacher-class bindings."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError, NotFoundError


@dataclass(frozen=True)
class School:
    id: str
    name: str


@dataclass(frozen=True)
class SchoolClass:
    id: str
    school_id: str
    name: str


@dataclass(frozen=True)
class Student:
    id: str
    class_id: str
    name: str


@dataclass(frozen=True)
class Teacher:
    id: str
    name: str
    class_ids: frozenset[str]


class Roster:
    def __init__(
        self,
        schools: list[School],
        classes: list[SchoolClass],
        students: list[Student],
        teachers: list[Teacher],
    ):
        for kind, items in (
            ("school", schools),
            ("class", classes),
            ("student", students),
            ("teacher", teachers),
        ):
            ids = [x.id for x in items]
            if len(set(ids)) != len(ids):
                raise ConfigError(f"duplicate {kind} ids in roster")
        school_ids = {s.id for s in schools}
        class_ids = {c.id for c in classes}
        for c in classes:
            if c.school_id not in school_ids:
                raise ConfigError(f"class {c.id} references unknown school {c.school_id}")
        for s in students:
            if s.class_id not in class_ids:
                raise ConfigError(f"student {s.id} references unknown class {s.class_id}")
        for t in teachers:
            for cid in t.class_ids:
                if cid not in class_ids:
                    raise ConfigError(f"teacher {t.id} bound to unknown class {cid}")
        self.schools = {s.id: s for s in schools}
        self.classes = {c.id: c for c in classes}
        self.students = {s.id: s for s in students}
        self.teachers = {t.id: t for t in teachers}

    def student(self, student_id: str) -> Student:
        try:
            return self.students[student_id]
        except KeyError:
            raise NotFoundError(f"student {student_id}") from None

    def school_class(self, class_id: str) -> SchoolClass:
        try:
            return self.classes[class_id]
        except KeyError:
            raise NotFoundError(f"class {class_id}") from None

    def teacher(self, teacher_id: str) -> Teacher:
        try:
            return self.teachers[teacher_id]
        except KeyError:
            raise NotFoundError(f"teacher {teacher_id}") from None

    def class_of_student(self, student_id: str) -> str:
        return self.student(student_id).class_id

    def students_of_class(self, class_id: str) -> list[Student]:
        self.school_class(class_id)
        return sorted(
            (s for s in self.students.values() if s.class_id == class_id),
            key=lambda s: s.id,
        )

    def classes_of_school(self, school_id: str) -> list[SchoolClass]:
        if school_id not in self.schools:
            raise NotFoundError(f"school {school_id}")
        return sorted(
            (c for c in self.classes.values() if c.school_id == school_id),
            key=lambda c: c.id,
        )

    def teacher_bound(self, teacher_id: str, class_id: str) -> bool:
        return class_id in self.teacher(teacher_id).class_ids


def roster_from_dict(d: dict) -> Roster:
    return Roster(
        schools=[School(s["id"], s.get("name", s["id"])) for s in d.get("schools", [])],
        classes=[
            SchoolClass(c["id"], c["school_id"], c.get("name", c["id"]))
            for c in d.get("classes", [])
        ],
        students=[
            Student(s["id"], s["class_id"], s.get("name", s["id"]))
            for s in d.get("students", [])
        ],
        teachers=[
            Teacher(t["id"], t.get("name", t["id"]), frozenset(t.get("class_ids", [])))
            for t in d.get("teachers", [])
        ],
    )


def load_roster(path: str | Path) -> Roster:
    with open(path, encoding="utf-8") as fh:
        return roster_from_dict(json.load(fh))
