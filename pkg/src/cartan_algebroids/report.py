"""Check reports: ordered pass/fail records with exact residuals."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .kernel import Polynomial, rational_to_str

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"


def serialize_value(value: Any) -> Any:
    """Exact JSON-ready form of residuals: polynomials, rationals, nested tuples."""
    if isinstance(value, Polynomial):
        return value.to_json()
    if isinstance(value, Fraction):
        return rational_to_str(value)
    if isinstance(value, bool) or value is None or isinstance(value, str):
        return value
    if isinstance(value, int):
        return value
    if isinstance(value, dict):
        return {str(k): serialize_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [serialize_value(v) for v in value]
    raise TypeError(f"cannot serialize {type(value).__name__}")


def render_value(value: Any) -> str:
    if isinstance(value, (Polynomial, Fraction)):
        return str(value) if isinstance(value, Polynomial) else rational_to_str(value)
    if isinstance(value, (list, tuple)):
        return "(" + ", ".join(render_value(v) for v in value) + ")"
    return str(value)


@dataclass(frozen=True)
class CheckItem:
    id: str
    status: str
    residual: Any = None
    witness: Any = None
    mode: str | None = None
    note: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def to_dict(self) -> dict:
        out: dict[str, Any] = {"id": self.id, "status": self.status}
        if self.residual is not None:
            out["residual"] = serialize_value(self.residual)
        if self.witness is not None:
            out["witness"] = serialize_value(self.witness)
        if self.mode is not None:
            out["mode"] = self.mode
        if self.note is not None:
            out["note"] = self.note
        return out


@dataclass(frozen=True)
class Report:
    suite: str
    items: tuple[CheckItem, ...] = ()
    mode: str = "symbolic"
    grid: int | None = None
    data: dict = field(default_factory=dict, compare=False)

    @property
    def passed(self) -> bool:
        return all(item.status != FAIL for item in self.items)

    def item(self, item_id: str) -> CheckItem:
        for it in self.items:
            if it.id == item_id:
                return it
        raise KeyError(item_id)

    def failed_ids(self) -> list[str]:
        return [it.id for it in self.items if it.status == FAIL]

    def to_dict(self) -> dict:
        out: dict[str, Any] = {
            "suite": self.suite,
            "mode": self.mode,
            "status": PASS if self.passed else FAIL,
            "items": [it.to_dict() for it in self.items],
        }
        if self.grid is not None:
            out["grid"] = self.grid
        if self.data:
            out["data"] = serialize_value(self.data)
        return out

    def render(self) -> str:
        lines = [f"[{'PASS' if self.passed else 'FAIL'}] {self.suite} (mode: {self.mode})"]
        for it in self.items:
            line = f"  {it.status:7s} {it.id}"
            if it.witness is not None:
                line += f"  witness={render_value(it.witness)}"
            if it.status == FAIL and it.residual is not None:
                line += f"  residual={render_value(it.residual)}"
            if it.note:
                line += f"  ({it.note})"
            lines.append(line)
        for key, value in self.data.items():
            lines.append(f"  {key}: {render_value(value)}")
        return "\n".join(lines)


def check(item_id: str, ok: bool, residual=None, witness=None, mode=None, note=None) -> CheckItem:
    """Build a pass/fail item; residual and witness are kept only on failure."""
    if ok:
        return CheckItem(item_id, PASS, mode=mode, note=note)
    return CheckItem(item_id, FAIL, residual=residual, witness=witness, mode=mode, note=note)
