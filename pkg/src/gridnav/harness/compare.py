"""Tick-count ordering checks across the a-h scenario suite."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

# (earlier, later, strict) in travel-time order
ORDER = (
    ("a", "c", False),
    ("a", "d", False),
    ("c", "b", True),
    ("d", "b", True),
    ("b", "e", False),
    ("e", "g", True),
    ("g", "f", False),
    ("f", "h", False),
)
SUITE = "abcdefgh"


class MissingScenario(LookupError):
    pass


@dataclass(frozen=True)
class Check:
    lo: str
    hi: str
    strict: bool
    ticks_lo: int
    ticks_hi: int
    # False when either run never reached its target
    complete: bool = True

    @property
    def ok(self) -> bool:
        if not self.complete:
            return False
        return self.ticks_lo < self.ticks_hi if self.strict else self.ticks_lo <= self.ticks_hi

    def line(self) -> str:
        op = "<" if self.strict else "<="
        tag = "PASS" if self.ok else "FAIL"
        note = "" if self.complete else " (unfinished run)"
        return f"{tag} ticks({self.lo}) {op} ticks({self.hi}): {self.ticks_lo} {op} {self.ticks_hi}{note}"


def closure() -> dict[tuple[str, str], bool]:
    """Every implied pair (x, y) with x before y, mapped to whether it is strict."""
    rel: dict[tuple[str, str], bool] = {(a, b): s for a, b, s in ORDER}
    changed = True
    while changed:
        changed = False
        for (a, b), s1 in list(rel.items()):
            for (c, d), s2 in list(rel.items()):
                if b != c or a == d:
                    continue
                s = s1 or s2
                if (a, d) not in rel or (s and not rel[(a, d)]):
                    rel[(a, d)] = s
                    changed = True
    return rel


def _label(m: dict) -> Optional[str]:
    return m.get("scenario") or (m.get("name") if m.get("name") in tuple(SUITE) else None)


def compare_suite(metrics: Sequence[dict], required: Iterable[str] = ()) -> list[Check]:
    """Pass/fail for each ordering implied between the scenarios present.

    Runs that did not reach the target count as failures of every check they
    take part in. Raises MissingScenario with fewer than two labelled runs or
    when a ``required`` label is absent.
    """
    ticks: dict[str, int] = {}
    for m in metrics:
        lab = _label(m)
        if lab is None:
            continue
        t = m.get("ticks_to_target")
        ticks[lab] = t if t is not None else -1  # unfinished
    missing = [s for s in required if s not in ticks]
    if missing:
        raise MissingScenario(f"no metrics for scenario(s) {', '.join(missing)}")
    if len(ticks) < 2:
        raise MissingScenario("need metrics for at least two suite scenarios")
    checks = []
    for (a, b), strict in sorted(closure().items()):
        if a in ticks and b in ticks:
            ta, tb = ticks[a], ticks[b]
            checks.append(Check(a, b, strict, ta, tb, ta >= 0 and tb >= 0))
    return checks


def load_metrics(paths: Sequence[str | Path]) -> list[dict]:
    return [json.loads(Path(p).read_text(encoding="utf-8")) for p in paths]
