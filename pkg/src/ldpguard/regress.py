"""Regression suite over three small ill-conditioned fixtures.

Each fixture has 4 constraints in 2 unknowns with a zero column. A legacy
double-precision LDP routine reported a solution for each of them; the
vectors it returned are kept here as known-bad candidates. The exact
rational verdicts are: case1 feasible on a tiny interval, case2 and case3
inconsistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import hashlib
from importlib import resources
from pathlib import Path

import numpy as np

from .caseio import CaseFormatError, loads
from .ldp import Status, ldp_solve
from .oracle import rational_feasible
from .problem import ToleranceConfig
from .verify import verify_feasible

__all__ = ["FIXTURES", "Check", "run_regression", "fixture_path"]

X1_REL_TOL = 1e-6
BAD_VIOLATION_FLOOR = 1e3


@dataclass(frozen=True)
class Fixture:
    name: str
    sha256: str
    expect: Status
    known_bad: tuple[str, str]


FIXTURES = (
    Fixture(
        "case1",
        "69a2f1a4d6e49ca2b8b87b75288590da9e27000f60c404c35bd939833a1814e6",
        Status.SOLVED,
        ("-.3750000000000000", ".0000000000000000"),
    ),
    Fixture(
        "case2",
        "e704a0749813e07a2d5c6b64d066ef6fb3c78b474cce08500466e9e8d8ab49de",
        Status.INFEASIBLE,
        (".6074218750000000", ".0000000000000000"),
    ),
    Fixture(
        "case3",
        "ca1548eb591d3745c0b63bff09b5f5eae3b6896d3be488ea706477198c347e52",
        Status.INFEASIBLE,
        (".4570312500000000", ".0000000000000000"),
    ),
)


@dataclass(frozen=True)
class Check:
    fixture: str
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.fixture:<6} {self.name:<9} {self.detail}"


def fixture_path(name: str, fixture_dir=None) -> Path:
    if fixture_dir is not None:
        return Path(fixture_dir) / f"{name}.ldp"
    return Path(str(resources.files("ldpguard") / "fixtures" / f"{name}.ldp"))


def _check_fixture(fx: Fixture, data: bytes, cfg: ToleranceConfig) -> list[Check]:
    case = loads(data.decode("utf-8"))
    prob = case.problem
    out = []

    outcome = ldp_solve(prob, cfg)
    out.append(Check(fx.name, "status", outcome.status is fx.expect,
                     f"got {outcome.status}, expected {fx.expect}"))

    bad = np.array([float(v) for v in fx.known_bad])
    report = verify_feasible(prob, bad, cfg)
    rejected = not report.passed and report.max_violation > BAD_VIOLATION_FLOOR
    out.append(Check(fx.name, "rejection", rejected,
                     f"x = ({', '.join(fx.known_bad)}) max violation "
                     f"{report.max_violation:.6g} at row {report.worst_row + 1}"))

    verdict = rational_feasible(prob)
    if fx.expect is Status.SOLVED:
        ok = verdict.feasible and outcome.x is not None
        detail = f"exact verdict feasible={verdict.feasible}"
        if ok:
            bound = verdict.witness[0]
            rel = abs(Fraction(float(outcome.x[0])) - bound) / abs(bound)
            ok = rel <= X1_REL_TOL and outcome.x[1] == 0.0
            detail = f"x1 = {outcome.x[0]:.17g}, exact bound {float(bound):.17g}, rel err {float(rel):.2e}"
    else:
        ok = not verdict.feasible and outcome.status is Status.INFEASIBLE
        detail = f"exact verdict feasible={verdict.feasible}, solver {outcome.status}"
    out.append(Check(fx.name, "oracle", ok, detail))
    return out


def run_regression(fixture_dir=None, cfg: ToleranceConfig | None = None) -> list[Check]:
    """Run the nine regression assertions; a damaged fixture fails all three of its own."""
    cfg = cfg or ToleranceConfig()
    checks = []
    for fx in FIXTURES:
        path = fixture_path(fx.name, fixture_dir)
        try:
            data = path.read_bytes()
        except OSError as exc:
            problem = f"fixture {path} unreadable: {exc.strerror}"
        else:
            digest = hashlib.sha256(data).hexdigest()
            if digest == fx.sha256:
                try:
                    checks.extend(_check_fixture(fx, data, cfg))
                    continue
                except (CaseFormatError, ValueError) as exc:
                    problem = f"fixture {path} does not parse: {exc}"
            else:
                problem = f"fixture {path} is corrupted (sha256 {digest[:12]}...)"
        checks.extend(Check(fx.name, name, False, problem) for name in ("status", "rejection", "oracle"))
    return checks
