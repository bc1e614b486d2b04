"""Gamification engine: mission packs, progress, levels and the leaderboard.

A pack is an ordered list of quiz and action missions grouped into
contiguous levels. Completing every mission of the levels below you sets
your level; quizzes of locked levels cannot be answered and interaction
events for locked levels are ignored, so progress is a monotone fold of
unlocked-level inputs. Level-ups go on the chain as achievement
transactions, which is what the leaderboard is computed from.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

from ..errors import ApiError
from ..ledger import ChainState, KeyPair, Transaction, TxKind, sign_transaction


class ActionEvent(enum.Enum):
    POSTED_MESSAGE = "posted_message"
    VIEWED_TRANSACTION = "viewed_transaction"
    VIEWED_BLOCK = "viewed_block"
    VIEWED_PEERS = "viewed_peers"
    MANUAL_NONCE_FOUND = "manual_nonce_found"


class QuizOutcome(enum.Enum):
    CORRECT = "correct"
    INCORRECT = "incorrect"
    ALREADY_DONE = "already_done"


@dataclass(frozen=True)
class Quiz:
    choices: tuple[str, ...]
    correct_index: int


@dataclass(frozen=True)
class Mission:
    id: str
    level: int
    kind: str  # "quiz" | "action"
    prompt: str
    quiz: Quiz | None = None
    action_event: ActionEvent | None = None


@dataclass(frozen=True)
class MissionPack:
    title: str
    missions: tuple[Mission, ...]

    def by_id(self, mission_id: str) -> Mission | None:
        for mission in self.missions:
            if mission.id == mission_id:
                return mission
        return None

    def levels(self) -> list[int]:
        return sorted({m.level for m in self.missions})

    def of_level(self, level: int) -> list[Mission]:
        return [m for m in self.missions if m.level == level]


@dataclass(frozen=True)
class Progress:
    completed: frozenset[str] = frozenset()
    attempts: Mapping[str, int] = field(default_factory=dict)
    level: int = 1


class PackValidationError(ValueError):
    """A mission pack document that violates the schema."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


def compute_level(pack: MissionPack, completed: frozenset[str]) -> int:
    """1 plus the number of fully completed levels, counted from level 1 up."""
    level = 1
    for lvl in pack.levels():
        if lvl != level:
            break
        if all(m.id in completed for m in pack.of_level(lvl)):
            level += 1
        else:
            break
    return level


def answer_quiz(
    pack: MissionPack, progress: Progress, mission_id: str, answer_index: int
) -> tuple[Progress, QuizOutcome]:
    """Grade one quiz answer. Completion is idempotent; wrong answers count attempts."""
    mission = pack.by_id(mission_id)
    if mission is None:
        raise ApiError("unknown-mission", f"no mission with id {mission_id!r}")
    if mission.kind != "quiz" or mission.quiz is None:
        raise ApiError("not-a-quiz", f"mission {mission_id!r} is not a quiz")
    if mission.level > progress.level:
        raise ApiError("locked-mission", f"mission {mission_id!r} is still locked")
    if mission.id in progress.completed:
        return progress, QuizOutcome.ALREADY_DONE
    attempts = dict(progress.attempts)
    attempts[mission.id] = attempts.get(mission.id, 0) + 1
    if answer_index != mission.quiz.correct_index:
        return Progress(progress.completed, attempts, progress.level), QuizOutcome.INCORRECT
    completed = progress.completed | {mission.id}
    return (
        Progress(completed, attempts, compute_level(pack, completed)),
        QuizOutcome.CORRECT,
    )


def record_event(
    pack: MissionPack, progress: Progress, event: ActionEvent
) -> tuple[Progress, list[str]]:
    """Complete every open, unlocked action mission matching the event.

    Events aimed at locked levels are dropped rather than buffered; repeating
    an event is a no-op once its missions are done.
    """
    matches = [
        m
        for m in pack.missions
        if m.kind == "action"
        and m.action_event == event
        and m.level <= progress.level
        and m.id not in progress.completed
    ]
    if not matches:
        return progress, []
    completed = progress.completed | {m.id for m in matches}
    new_progress = Progress(completed, dict(progress.attempts), compute_level(pack, completed))
    return new_progress, [m.id for m in matches]


# -- pack documents ---------------------------------------------------------

PACK_VERSION = 1


def load_mission_pack(document: str | dict) -> MissionPack:
    """Parse and validate a pack document; raises PackValidationError listing
    every violation with enough context to find it."""
    if isinstance(document, str):
        try:
            obj = json.loads(document)
        except json.JSONDecodeError as exc:
            raise PackValidationError(
                [f"not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"]
            ) from exc
    else:
        obj = document

    violations: list[str] = []
    if not isinstance(obj, dict):
        raise PackValidationError(["top-level value must be an object"])
    if obj.get("version") != PACK_VERSION:
        violations.append(f"version must be {PACK_VERSION}")
    title = obj.get("title", "")
    raw_missions = obj.get("missions")
    if not isinstance(raw_missions, list) or not raw_missions:
        violations.append("missions must be a non-empty list")
        raise PackValidationError(violations)

    missions: list[Mission] = []
    seen_ids: set[str] = set()
    for i, raw in enumerate(raw_missions):
        where = f"missions[{i}]"
        if not isinstance(raw, dict):
            violations.append(f"{where}: must be an object")
            continue
        mission_id = raw.get("id")
        if not isinstance(mission_id, str) or not mission_id:
            violations.append(f"{where}: missing id")
            mission_id = f"<missing-{i}>"
        elif mission_id in seen_ids:
            violations.append(f"{where} (id {mission_id!r}): duplicate id")
        seen_ids.add(mission_id)
        where = f"{where} (id {mission_id!r})"

        level = raw.get("level")
        if not isinstance(level, int) or level < 1:
            violations.append(f"{where}: level must be an integer >= 1")
            level = 1
        kind = raw.get("kind")
        if kind not in ("quiz", "action"):
            violations.append(f"{where}: kind must be 'quiz' or 'action'")
            continue
        prompt = raw.get("prompt")
        if not isinstance(prompt, str) or not prompt:
            violations.append(f"{where}: missing prompt")
            prompt = ""

        quiz = None
        action_event = None
        if kind == "quiz":
            if raw.get("action_event") is not None:
                violations.append(f"{where}: quiz mission must not define action_event")
            quiz = _parse_quiz(raw.get("quiz"), where, violations)
        else:
            if raw.get("quiz") is not None:
                violations.append(f"{where}: action mission must not define quiz")
            action_event = _parse_action(raw.get("action_event"), where, violations)
        missions.append(
            Mission(mission_id, level, kind, prompt, quiz=quiz, action_event=action_event)
        )

    levels = sorted({m.level for m in missions})
    if levels and levels != list(range(1, len(levels) + 1)):
        violations.append(f"levels must be contiguous from 1, got {levels}")

    if violations:
        raise PackValidationError(violations)
    return MissionPack(title=str(title), missions=tuple(missions))


def _parse_quiz(raw, where: str, violations: list[str]) -> Quiz | None:
    if not isinstance(raw, dict):
        violations.append(f"{where}: quiz mission must define quiz")
        return None
    choices = raw.get("choices")
    correct = raw.get("correct_index")
    if not isinstance(choices, list) or not 2 <= len(choices) <= 6:
        violations.append(f"{where}: quiz needs 2 to 6 choices")
        return None
    if not all(isinstance(c, str) and c for c in choices):
        violations.append(f"{where}: quiz choices must be non-empty strings")
        return None
    if not isinstance(correct, int) or not 0 <= correct < len(choices):
        violations.append(f"{where}: correct_index out of range")
        return None
    return Quiz(tuple(choices), correct)


def _parse_action(raw, where: str, violations: list[str]) -> ActionEvent | None:
    if not isinstance(raw, str):
        violations.append(f"{where}: action mission must define action_event")
        return None
    try:
        return ActionEvent(raw)
    except ValueError:
        allowed = ", ".join(e.value for e in ActionEvent)
        violations.append(f"{where}: unknown action_event {raw!r} (allowed: {allowed})")
        return None


def load_default_pack() -> MissionPack:
    text = resources.files(__package__).joinpath("default_pack.json").read_text("utf-8")
    return load_mission_pack(text)


# -- achievements and the leaderboard ----------------------------------------

def build_achievement_transaction(
    keypair: KeyPair, nickname: str, level: int, timestamp: int
) -> Transaction:
    payload = json.dumps({"nickname": nickname, "level": level}).encode("utf-8")
    return sign_transaction(keypair, TxKind.ACHIEVEMENT, nickname, payload, timestamp)


def leaderboard(chain: ChainState) -> list[tuple[str, int]]:
    """Fold chain and mempool achievements into nickname -> highest level,
    sorted by level descending, then nickname."""
    best: dict[str, int] = {}
    for tx in _achievements(chain):
        try:
            obj = json.loads(tx.payload.decode("utf-8"))
            level = int(obj["level"])
        except (ValueError, KeyError, UnicodeDecodeError):
            continue
        nick = tx.author_nick
        if level > best.get(nick, 0):
            best[nick] = level
    return sorted(best.items(), key=lambda kv: (-kv[1], kv[0]))


def _achievements(chain: ChainState) -> Iterable[Transaction]:
    for block in chain.blocks:
        for tx in block.transactions:
            if tx.kind == TxKind.ACHIEVEMENT:
                yield tx
    for tx in chain.mempool.values():
        if tx.kind == TxKind.ACHIEVEMENT:
            yield tx
