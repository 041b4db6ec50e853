"""Scripted-dialogue replay: golden tests over recorded conversations.

A script is a JSON array of turns `{"user": "...", "expect": {...}}` where
expect may check context pointers, the outcome kind, the fired rule, and
answer substrings. Turns run through one continuing session; a turn may set
`"new_session": true` to reset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .context import new_context
from .engine import Engine

POINTER_KEYS = ("curr_prod", "curr_prod_indiv", "curr_inode", "curr_leaf", "message_index")


class ReplayError(Exception):
    pass


@dataclass
class Check:
    key: str
    expected: object
    actual: object
    ok: bool


@dataclass
class TurnResult:
    index: int
    user: str
    answer: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)


@dataclass
class ReplayReport:
    turns: list[TurnResult] = field(default_factory=list)

    @property
    def total(self) -> int:
        return len(self.turns)

    @property
    def passed(self) -> int:
        return sum(1 for t in self.turns if t.passed)

    @property
    def failed(self) -> int:
        return self.total - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def summary_lines(self) -> list[str]:
        lines = []
        for turn in self.turns:
            status = "ok" if turn.passed else "FAIL"
            lines.append(f"[{status}] turn {turn.index}: {turn.user}")
            for check in turn.checks:
                if not check.ok:
                    lines.append(
                        f"       {check.key}: expected {check.expected!r}, got {check.actual!r}"
                    )
        lines.append(f"{self.passed}/{self.total} turns passed")
        return lines


def load_script(source: str | Path | list) -> list[dict]:
    if isinstance(source, list):
        script = source
    else:
        try:
            script = json.loads(Path(source).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ReplayError(f"invalid script JSON: {exc}") from exc
    if not isinstance(script, list):
        raise ReplayError("script must be a JSON array of turns")
    for i, turn in enumerate(script):
        if not isinstance(turn, dict) or "user" not in turn:
            raise ReplayError(f"turn {i}: needs a 'user' field")
    return script


def replay_script(engine: Engine, source: str | Path | list) -> ReplayReport:
    script = load_script(source)
    report = ReplayReport()
    ctx = new_context()
    for i, turn in enumerate(script):
        if turn.get("new_session"):
            ctx = new_context()
        envelope, ctx, _ = engine.respond(ctx, turn["user"])
        result = TurnResult(index=i, user=turn["user"], answer=envelope.text)
        expect = turn.get("expect", {})
        state = envelope.state
        for key in POINTER_KEYS:
            if key in expect:
                result.checks.append(
                    Check(key, expect[key], state[key], state[key] == expect[key])
                )
        if "outcome_kind" in expect:
            result.checks.append(
                Check(
                    "outcome_kind",
                    expect["outcome_kind"],
                    envelope.outcome.kind,
                    envelope.outcome.kind == expect["outcome_kind"],
                )
            )
        if "fired_rule" in expect:
            result.checks.append(
                Check(
                    "fired_rule",
                    expect["fired_rule"],
                    envelope.outcome.fired_rule,
                    envelope.outcome.fired_rule == expect["fired_rule"],
                )
            )
        if "answer_contains" in expect:
            needles = expect["answer_contains"]
            if isinstance(needles, str):
                needles = [needles]
            for needle in needles:
                result.checks.append(
                    Check("answer_contains", needle, envelope.text, needle in envelope.text)
                )
        if "answer_not_contains" in expect:
            needles = expect["answer_not_contains"]
            if isinstance(needles, str):
                needles = [needles]
            for needle in needles:
                result.checks.append(
                    Check("answer_not_contains", needle, envelope.text, needle not in envelope.text)
                )
        if "options_include" in expect:
            options = _collect_options(envelope.outcome)
            for node in expect["options_include"]:
                result.checks.append(Check("options_include", node, options, node in options))
        if "options_exclude" in expect:
            options = _collect_options(envelope.outcome)
            for node in expect["options_exclude"]:
                result.checks.append(Check("options_exclude", node, options, node not in options))
        report.turns.append(result)
    return report


def _collect_options(outcome) -> list[str]:
    options = list(outcome.payload.get("options", []))
    for sub in outcome.sub_outcomes:
        options.extend(_collect_options(sub))
    return options
