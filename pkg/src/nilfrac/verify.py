"""Cross-check of every preset against its reference values."""

from __future__ import annotations

import io
import csv
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .blowup import separatrix_leading
from .boxdim import (EstimatorConfig, estimate_dim_boxcount, estimate_dim_sausage,
                     estimate_increment_exponent)
from .classify import classify_nilpotent
from .errors import InputError, NilfracError
from .presets import PRESETS, Preset, PresetKind, get_preset, preset_orbit
from .saddledual import dual_box_dimension
from .sweep import _classify_point, find_singularities


@dataclass(frozen=True)
class Row:
    preset: str
    quantity: str
    expected: str
    estimated: str
    tol: float | None
    passed: bool | None
    note: str = ""

    def to_json(self) -> dict:
        return {"preset": self.preset, "quantity": self.quantity, "expected": self.expected,
                "estimated": self.estimated, "tol": self.tol, "passed": self.passed,
                "note": self.note}


@dataclass
class VerifyReport:
    rows: list[Row]

    @property
    def ok(self) -> bool:
        return all(r.passed is not False for r in self.rows)

    def failures(self) -> list[Row]:
        return [r for r in self.rows if r.passed is False]

    def to_json(self) -> dict:
        return {"ok": self.ok, "rows": [r.to_json() for r in self.rows]}

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["preset", "quantity", "expected", "estimated", "tol", "result", "note"])
        for r in self.rows:
            w.writerow([r.preset, r.quantity, r.expected, r.estimated,
                        "" if r.tol is None else r.tol, _result(r), r.note])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        for r in self.rows:
            tol = "exact" if r.tol is None else f"+-{r.tol}"
            lines.append(f"{_result(r):10s} {r.preset:22s} {r.quantity:14s} "
                         f"expected {r.expected:>14s} got {r.estimated:>14s} ({tol}) {r.note}")
        return "\n".join(lines)


def _result(r: Row) -> str:
    return "annotation" if r.passed is None else ("pass" if r.passed else "FAIL")


def _num(v) -> str:
    return f"{v:.6f}" if isinstance(v, float) else str(v)


def _check(p: Preset, q: str, got, note: str = "", key: str | None = None) -> Row:
    e = p.expected[key or q]
    if e.annotation:
        return Row(p.name, q, str(e.value), "not estimated", None, None, e.citation)
    if e.tol is None:
        ok = got == e.value
    else:
        ok = abs(float(got) - float(e.value)) <= e.tol
    return Row(p.name, q, str(e.value), _num(got), e.tol, bool(ok), note)


def _error_rows(p: Preset, exc: Exception) -> list[Row]:
    return [Row(p.name, q, str(e.value), "error", e.tol, None if e.annotation else False,
                f"{type(exc).__name__}: {exc}") for q, e in p.expected.items()]


def evaluate_preset(name: str, cfg: EstimatorConfig = EstimatorConfig()) -> list[Row]:
    p = get_preset(name)
    try:
        return _evaluate(p, cfg)
    except NilfracError as exc:
        return _error_rows(p, exc)


def _evaluate(p: Preset, cfg: EstimatorConfig) -> list[Row]:
    rows: list[Row] = []
    if p.kind is PresetKind.SEPARATRIX:
        model = p.field
        rep = classify_nilpotent(model.to_field())
        rows.append(_check(p, "kind", rep.kind.value, rep.label))
        br = separatrix_leading(model)[p.params["branch"]]
        rows.append(_check(p, "gamma", br.gamma))
        rows.append(_check(p, "c0", br.c0))
        po = preset_orbit(p)
        alpha = estimate_increment_exponent(po.orbit.x)[0]
        rows.append(_check(p, "alpha", alpha, po.note))
        rows.append(_check(p, "dim_boxcount",
                           estimate_dim_boxcount(po.orbit.points, cfg, tail=po.tail).value))
        rows.append(_check(p, "dim_sausage",
                           estimate_dim_sausage(po.orbit.points, cfg, tail=po.tail).value))
    elif p.kind is PresetKind.UNFOLDING:
        if p.expected["dim"].annotation:
            return [_check(p, "dim", None)]
        pts = find_singularities(p.field)
        u, b1, b2 = p.params["unfolding"], p.params["b1"], p.params["b2"]
        sp = _classify_point(u, b1, b2, *pts[0], estimate=False, max_iter=0)
        rows.append(_check(p, "kind", sp.kind))
        po = preset_orbit(p)
        rows.append(_check(p, "dim", estimate_dim_boxcount(po.orbit.points, cfg,
                                                           tail=po.tail).value, po.note))
        rows.append(_check(p, "dim_sausage", estimate_dim_sausage(po.orbit.points, cfg,
                                                                  tail=po.tail).value, key="dim"))
    elif p.kind is PresetKind.INFINITY:
        po = preset_orbit(p)
        rows.append(_check(p, "dim_boxcount",
                           estimate_dim_boxcount(po.orbit.points, cfg, tail=po.tail).value, po.note))
        rows.append(_check(p, "dim_sausage",
                           estimate_dim_sausage(po.orbit.points, cfg, tail=po.tail).value))
    else:
        k = p.params["k"]
        po = preset_orbit(p)
        v = po.orbit.y
        tail = po.tail[:, 1] if len(po.tail) else None
        rows.append(_check(p, "dim_boxcount", estimate_dim_boxcount(v, cfg, tail=tail).value))
        rows.append(_check(p, "dim_sausage", estimate_dim_sausage(v, cfg, tail=tail).value,
                           key="dim_boxcount"))
        rows.append(_check(p, "alpha", estimate_increment_exponent(np.asarray(v))[0]))
        rows.append(_check(p, "dual_dim", dual_box_dimension(k).dual_dim))
    return rows


def _select(preset_filter) -> list[str]:
    if preset_filter is None or preset_filter == "all" or preset_filter == ["all"]:
        return list(PRESETS)
    names = [preset_filter] if isinstance(preset_filter, str) else list(preset_filter)
    for n in names:
        get_preset(n)
    return names


def run_verify(preset_filter=None, cfg: EstimatorConfig = EstimatorConfig(),
               workers: int = 1) -> VerifyReport:
    """Evaluate the selected presets; rows come back in preset order whatever the worker count."""
    names = _select(preset_filter)
    if workers > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(evaluate_preset, names, [cfg] * len(names)))
    else:
        parts = [evaluate_preset(n, cfg) for n in names]
    return VerifyReport([r for part in parts for r in part])
