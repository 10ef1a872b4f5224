"""Seeded fuzz campaigns: generate, solve, re-check, dump anomalies, report."""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
import time

import numpy as np

from . import caseio
from .casegen import CaseKind, CaseRecipe, derive_seed, generate, make_rng
from .ldp import Status, ldp_solve
from .oracle import DimensionTooLarge, rational_feasible
from .problem import ToleranceConfig
from .verify import verify_feasible

__all__ = [
    "DEFAULT_MIX",
    "Dims",
    "CampaignReport",
    "parse_mix",
    "parse_dims",
    "plan_case",
    "run_campaign",
]

LABELS = ("consistent", "transformed", "interior", "infeasible")
DEFAULT_MIX = {"consistent": 40.0, "transformed": 20.0, "interior": 20.0, "infeasible": 20.0}
DEFAULT_MARGIN_FACTOR = 10.0  # margin C ~ (0, 10 * scale_g]
DEFAULT_SHIFT = 10.0
P_NO_ZERO_COLUMN = 0.25


@dataclass(frozen=True)
class Dims:
    m_lo: int = 1
    m_hi: int = 12
    n_lo: int = 1
    n_hi: int = 6

    def __post_init__(self):
        if not (1 <= self.m_lo <= self.m_hi and 1 <= self.n_lo <= self.n_hi):
            raise ValueError(f"invalid dimension ranges {self}")

    def spec(self) -> str:
        return f"m={self.m_lo}:{self.m_hi},n={self.n_lo}:{self.n_hi}"


def parse_mix(text: str) -> dict[str, float]:
    """``"consistent=40,interior=60"`` -> weights; unknown labels are an error."""
    mix = {}
    for part in text.split(","):
        label, _, weight = part.strip().partition("=")
        label = label.strip()
        if label not in LABELS:
            raise ValueError(f"unknown case kind {label!r}; choose from {', '.join(LABELS)}")
        try:
            w = float(weight)
        except ValueError:
            raise ValueError(f"bad weight in {part!r}") from None
        if w < 0:
            raise ValueError(f"negative weight in {part!r}")
        mix[label] = w
    if sum(mix.values()) <= 0:
        raise ValueError("mix weights must not all be zero")
    return mix


def parse_dims(text: str) -> Dims:
    """``"m=1:12,n=1:6"``; a single number fixes the dimension."""
    ranges = {"m": (1, 12), "n": (1, 6)}
    for part in text.split(","):
        key, _, rng = part.strip().partition("=")
        if key not in ranges:
            raise ValueError(f"unknown dimension {key!r} in {text!r}")
        lo, _, hi = rng.partition(":")
        try:
            ranges[key] = (int(lo), int(hi or lo))
        except ValueError:
            raise ValueError(f"bad range {rng!r}") from None
    return Dims(*ranges["m"], *ranges["n"])


def plan_case(master: int, index: int, mix=None, dims: Dims | None = None) -> tuple[str, CaseRecipe]:
    """Pick kind, shape and seed for case ``index``; depends only on its arguments."""
    mix = mix or DEFAULT_MIX
    dims = dims or Dims()
    rng = make_rng(derive_seed(master, index))
    labels = [k for k in LABELS if mix.get(k, 0) > 0]
    weights = np.array([mix[k] for k in labels], dtype=float)
    label = labels[int(np.searchsorted(np.cumsum(weights) / weights.sum(), rng.random(), side="right"))]
    m = int(rng.integers(dims.m_lo, dims.m_hi + 1))
    n = int(rng.integers(dims.n_lo, dims.n_hi + 1))
    if n == 1 or rng.random() < P_NO_ZERO_COLUMN:
        zero_cols = 0
    else:
        zero_cols = int(rng.integers(1, n))
    l = int(rng.integers(dims.m_lo, dims.m_hi + 1))
    transform_interior = bool(rng.random() < 0.5)
    seed = int(rng.integers(0, 2**63))
    base = dict(m=m, n=n, zero_cols=zero_cols, seed=seed)
    if label == "consistent":
        recipe = CaseRecipe(**base)
    elif label == "transformed":
        recipe = CaseRecipe(**base, l=l, use_transform=True)
    elif label == "interior":
        recipe = CaseRecipe(
            **base, l=l, use_transform=transform_interior,
            margin=DEFAULT_MARGIN_FACTOR * CaseRecipe(m, n).scale_g,
        )
    else:
        recipe = CaseRecipe(**base, shift=DEFAULT_SHIFT)
    return label, recipe


@dataclass
class CampaignReport:
    master_seed: int
    mix: str = ""
    dims: str = ""
    cases: int = 0
    per_kind: Counter = field(default_factory=Counter)
    per_status: Counter = field(default_factory=Counter)
    per_kind_status: Counter = field(default_factory=Counter)
    guard_interventions: int = 0
    max_rejected_violation: float | None = None
    silent_violations: int = 0
    witness_contradictions: int = 0
    oracle_checked: int = 0
    oracle_mismatches: int = 0
    dumped: list[str] = field(default_factory=list)
    wall_time: float = 0.0

    def merge(self, other: "CampaignReport") -> "CampaignReport":
        self.cases += other.cases
        self.per_kind.update(other.per_kind)
        self.per_status.update(other.per_status)
        self.per_kind_status.update(other.per_kind_status)
        self.guard_interventions += other.guard_interventions
        if other.max_rejected_violation is not None:
            self.max_rejected_violation = max(
                other.max_rejected_violation,
                self.max_rejected_violation if self.max_rejected_violation is not None else -np.inf,
            )
        self.silent_violations += other.silent_violations
        self.witness_contradictions += other.witness_contradictions
        self.oracle_checked += other.oracle_checked
        self.oracle_mismatches += other.oracle_mismatches
        self.dumped = sorted(self.dumped + other.dumped)
        return self

    @property
    def clean(self) -> bool:
        """No silent violation, no contradiction of a construction witness, no oracle mismatch."""
        return self.silent_violations == 0 and self.witness_contradictions == 0 and self.oracle_mismatches == 0

    @property
    def anomalies(self) -> int:
        return (
            self.per_status.get(str(Status.VERIFICATION_FAILED), 0)
            + self.per_status.get(str(Status.ITERATION_LIMIT), 0)
            + self.silent_violations
            + self.witness_contradictions
            + self.oracle_mismatches
        )

    def items(self, include_time: bool = True) -> list[tuple[str, str]]:
        """Flat key/value pairs in a fixed order."""
        kv = [
            ("master_seed", str(self.master_seed)),
            ("mix", self.mix),
            ("dims", self.dims),
            ("cases", str(self.cases)),
        ]
        kv += [(f"kind.{k}", str(self.per_kind.get(k, 0))) for k in LABELS]
        kv += [(f"status.{s}", str(self.per_status.get(str(s), 0))) for s in Status]
        kv += [(f"kind_status.{k}", str(v)) for k, v in sorted(self.per_kind_status.items())]
        mrv = self.max_rejected_violation
        kv += [
            ("guard_interventions", str(self.guard_interventions)),
            ("max_rejected_violation", "none" if mrv is None else "%.17g" % mrv),
            ("silent_violations", str(self.silent_violations)),
            ("witness_contradictions", str(self.witness_contradictions)),
            ("oracle_checked", str(self.oracle_checked)),
            ("oracle_mismatches", str(self.oracle_mismatches)),
            ("dumped", str(len(self.dumped))),
        ]
        kv += [(f"dump.{i}", p) for i, p in enumerate(self.dumped)]
        if include_time:
            kv.append(("wall_time_s", f"{self.wall_time:.3f}"))
        return kv

    def render_kv(self, include_time: bool = True) -> str:
        return "".join(f"{k}={v}\n" for k, v in self.items(include_time))

    def render_text(self) -> str:
        lines = [
            f"campaign: {self.cases} cases, master seed {self.master_seed}, {self.wall_time:.1f} s",
            f"  mix {self.mix}; dims {self.dims}",
            "  cases per kind: " + ", ".join(f"{k} {self.per_kind.get(k, 0)}" for k in LABELS),
            "  outcomes: " + ", ".join(f"{s} {self.per_status.get(str(s), 0)}" for s in Status),
            f"  guard interventions (candidate rejected by verification): {self.guard_interventions}",
        ]
        if self.max_rejected_violation is not None:
            lines.append(f"  largest violation among rejected candidates: {self.max_rejected_violation:.6g}")
        lines += [
            f"  silent violations: {self.silent_violations}",
            f"  infeasible verdicts on consistent-by-construction cases: {self.witness_contradictions}",
        ]
        if self.oracle_checked:
            lines.append(f"  exact-oracle cross-checks: {self.oracle_checked}, mismatches {self.oracle_mismatches}")
        if self.dumped:
            lines.append(f"  dumped {len(self.dumped)} case(s):")
            lines += [f"    {p}" for p in self.dumped]
        return "\n".join(lines) + "\n"


def _run_range(master, indices, mix, dims, dump_dir, cfg, oracle) -> CampaignReport:
    report = CampaignReport(master)
    for index in indices:
        label, recipe = plan_case(master, index, mix, dims)
        record = generate(recipe)
        outcome = ldp_solve(record.problem, cfg)
        status = outcome.status
        report.cases += 1
        report.per_kind[label] += 1
        report.per_status[str(status)] += 1
        report.per_kind_status[f"{label}.{status}"] += 1

        anomaly = status in (Status.VERIFICATION_FAILED, Status.ITERATION_LIMIT)
        if status is Status.VERIFICATION_FAILED:
            report.guard_interventions += 1
            v = outcome.report.max_violation
            if report.max_rejected_violation is None or v > report.max_rejected_violation:
                report.max_rejected_violation = v
        if status is Status.SOLVED and not verify_feasible(record.problem, outcome.x, cfg).passed:
            report.silent_violations += 1
            anomaly = True
        if status is Status.INFEASIBLE and record.kind is not CaseKind.LIKELY_INFEASIBLE:
            report.witness_contradictions += 1
            anomaly = True
        if oracle and status in (Status.SOLVED, Status.INFEASIBLE):
            try:
                feasible = rational_feasible(record.problem).feasible
            except DimensionTooLarge:
                pass
            else:
                report.oracle_checked += 1
                if feasible != (status is Status.SOLVED):
                    report.oracle_mismatches += 1
                    anomaly = True
        if anomaly and dump_dir is not None:
            path = Path(dump_dir) / f"case-s{master}-i{index:07d}.ldp"
            meta = {
                "master_seed": master,
                "index": index,
                "case_seed": recipe.seed,
                "label": label,
                "kind": record.kind,
                "status": status,
            }
            caseio.dump(path, record.problem, record.witness, meta)
            report.dumped.append(str(path))
    return report


def _run_chunk(args):
    return _run_range(*args)


def run_campaign(
    cases: int,
    seed: int,
    mix=None,
    dims: Dims | None = None,
    dump_dir=None,
    cfg: ToleranceConfig | None = None,
    workers: int = 1,
    oracle: bool = False,
) -> CampaignReport:
    """Run ``cases`` seeded cases. The report (wall time aside) does not
    depend on ``workers``."""
    if cases < 1:
        raise ValueError("cases must be at least 1")
    mix = mix or DEFAULT_MIX
    dims = dims or Dims()
    cfg = cfg or ToleranceConfig()
    if dump_dir is not None:
        Path(dump_dir).mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    report = CampaignReport(seed)
    if workers <= 1:
        report.merge(_run_range(seed, range(cases), mix, dims, dump_dir, cfg, oracle))
    else:
        bounds = np.linspace(0, cases, 4 * workers + 1).astype(int)
        chunks = [
            (seed, range(lo, hi), mix, dims, dump_dir, cfg, oracle)
            for lo, hi in zip(bounds[:-1], bounds[1:]) if hi > lo
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_run_chunk, chunks):
                report.merge(part)
    report.mix = ",".join(f"{k}={mix[k]:g}" for k in LABELS if k in mix)
    report.dims = dims.spec()
    report.wall_time = time.perf_counter() - start
    return report
