"""Random LDP test cases with known consistency by construction.

A case starts from a random ``G`` and ``X0`` and sets ``h`` from ``G @ X0``
so that ``X0`` is always feasible. Optional steps:

* transform: ``G' = A G B`` with random ``A`` (l x m) and invertible ``B``;
  the witness becomes ``B^{-1} X0``;
* interior margin: ``h - C`` with ``C > 0`` makes the witness strictly feasible;
* shift: ``h + D`` with large ``D > 0`` usually makes the system inconsistent.

Right-hand sides of consistent cases are rounded toward minus infinity from
the exact rational value of ``G @ witness``, so the witness satisfies the
emitted double-precision system exactly, not just up to rounding.

Randomness: every case owns a ``numpy.random.Generator`` backed by PCG64,
seeded with a 64-bit value. Campaigns derive the per-case seed from
``(master seed, case index)`` with :func:`derive_seed` (SplitMix64 mixing),
so any case can be regenerated alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import enum

import numpy as np

from .dense import is_invertible, lu_solve, mat_mat, mat_vec, mat_vec_floor
from .problem import LdpProblem

__all__ = [
    "CaseKind",
    "CaseRecipe",
    "CaseRecord",
    "RegenerationLimit",
    "derive_seed",
    "make_rng",
    "gen_consistent",
    "gen_transformed",
    "gen_interior",
    "gen_likely_infeasible",
    "generate",
]

MASK64 = (1 << 64) - 1
MAX_B_DRAWS = 100
B_TOL = 1e-12


class RegenerationLimit(RuntimeError):
    pass


class CaseKind(enum.Enum):
    CONSISTENT_WITNESS = "ConsistentWitness"
    CONSISTENT_INTERIOR = "ConsistentInterior"
    LIKELY_INFEASIBLE = "LikelyInfeasible"

    def __str__(self):
        return self.value


def _splitmix64(z: int) -> int:
    z = (z + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master: int, index: int) -> int:
    """64-bit per-case seed: SplitMix64 of the master seed, mixed with the index."""
    return _splitmix64(_splitmix64(master & MASK64) ^ (index & MASK64))


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & MASK64))


@dataclass(frozen=True)
class CaseRecipe:
    """Shape and scale knobs for one case.

    ``margin`` is the upper end of the uniform draw ``C ~ (0, margin]``.
    ``shift`` sets ``D_i = shift * max(1, ||h||_inf) * (1 + U[0, 1))``.
    At most one of them may be given. ``l`` defaults to ``m``.
    """

    m: int
    n: int
    l: int | None = None
    scale_g: float = 100.0
    scale_x0: float = 1000.0
    zero_cols: int = 0
    margin: float | None = None
    shift: float | None = None
    use_transform: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be at least 1")
        if not 0 <= self.zero_cols < self.n:
            raise ValueError(f"zero_cols must lie in [0, n), got {self.zero_cols}")
        if self.margin is not None and self.shift is not None:
            raise ValueError("margin and shift are mutually exclusive")
        if self.margin is not None and not self.margin > 0:
            raise ValueError("margin must be positive")
        if self.shift is not None and not self.shift > 0:
            raise ValueError("shift must be positive")
        if self.l is not None and self.l < 1:
            raise ValueError("l must be at least 1")
        if self.scale_g <= 0 or self.scale_x0 < 0:
            raise ValueError("scales must be positive")

    @property
    def rows(self) -> int:
        """Number of rows of the emitted problem."""
        if self.use_transform:
            return self.l if self.l is not None else self.m
        return self.m


@dataclass(frozen=True, eq=False)
class CaseRecord:
    problem: LdpProblem
    recipe: CaseRecipe
    kind: CaseKind
    witness: np.ndarray | None
    raw: dict = field(repr=False, default_factory=dict)


def _draw_base(recipe: CaseRecipe, rng, G=None, x0=None):
    m, n = recipe.m, recipe.n
    G_drawn = rng.uniform(-recipe.scale_g, recipe.scale_g, size=(m, n))
    zero = np.sort(rng.choice(n, size=recipe.zero_cols, replace=False))
    G_drawn[:, zero] = 0.0
    x0_drawn = rng.uniform(-recipe.scale_x0, recipe.scale_x0, size=n)
    if G is not None:
        G_drawn = np.array(G, dtype=np.float64)
        if G_drawn.shape != (m, n):
            raise ValueError(f"G override must be {m}x{n}")
    if x0 is not None:
        x0_drawn = np.array(x0, dtype=np.float64)
        if x0_drawn.shape != (n,):
            raise ValueError(f"x0 override must have {n} entries")
    return G_drawn, zero, x0_drawn


def _draw_transform(recipe: CaseRecipe, rng, A=None, B=None):
    l, m, n = recipe.rows, recipe.m, recipe.n
    A_drawn = rng.uniform(-recipe.scale_g, recipe.scale_g, size=(l, m))
    if A is not None:
        A_drawn = np.array(A, dtype=np.float64)
        if A_drawn.shape != (l, m):
            raise ValueError(f"A override must be {l}x{m}")
    if B is not None:
        B = np.array(B, dtype=np.float64)
        if B.shape != (n, n) or not is_invertible(B, B_TOL):
            raise ValueError("B override must be an invertible n x n matrix")
        return A_drawn, B, 0
    for draws in range(1, MAX_B_DRAWS + 1):
        B_drawn = rng.uniform(-recipe.scale_g, recipe.scale_g, size=(n, n))
        if is_invertible(B_drawn, B_TOL):
            return A_drawn, B_drawn, draws
    raise RegenerationLimit(f"{MAX_B_DRAWS} consecutive singular B draws")


def _build(recipe: CaseRecipe, rng, *, G=None, x0=None, A=None, B=None, offset_kind=None, offset=None):
    G, zero, x0 = _draw_base(recipe, rng, G, x0)
    raw = {"G": G, "x0": x0, "zero_cols": zero}
    if recipe.use_transform:
        A, B, draws = _draw_transform(recipe, rng, A, B)
        Gp = mat_mat(mat_mat(A, G), B)
        witness = lu_solve(B, x0)
        raw.update(A=A, B=B, b_draws=draws, h_nominal=mat_vec(A, mat_vec(G, x0)))
    else:
        Gp, witness = G, x0
    h = mat_vec_floor(Gp, witness)
    rows = Gp.shape[0]

    if offset_kind == "margin":
        C = offset
        if C is None:
            C = recipe.margin * (1.0 - rng.random(rows))
        C = np.array(C, dtype=np.float64)
        if C.shape != (rows,) or not np.all(C > 0):
            raise ValueError("margin C must be a positive vector with one entry per row")
        h = mat_vec_floor(Gp, witness, -C)
        raw["C"] = C
    elif offset_kind == "shift":
        D = offset
        if D is None:
            size = max(1.0, float(np.max(np.abs(h))))
            D = recipe.shift * size * (1.0 + rng.random(rows))
        D = np.array(D, dtype=np.float64)
        if D.shape != (rows,) or not np.all(D > 0):
            raise ValueError("shift D must be a positive vector with one entry per row")
        h = h + D
        raw["D"] = D
    return LdpProblem(Gp, h), witness, raw


def gen_consistent(recipe: CaseRecipe, *, G=None, x0=None) -> CaseRecord:
    """Case with ``h = G X0`` (rounded down); ``X0`` is the witness."""
    if recipe.use_transform or recipe.margin is not None or recipe.shift is not None:
        raise ValueError("gen_consistent takes a plain recipe (no transform, margin or shift)")
    prob, witness, raw = _build(recipe, make_rng(recipe.seed), G=G, x0=x0)
    return CaseRecord(prob, recipe, CaseKind.CONSISTENT_WITNESS, witness, raw)


def gen_transformed(recipe: CaseRecipe, *, G=None, x0=None, A=None, B=None) -> CaseRecord:
    """Case ``G' = A G B``, ``h' = G' B^{-1} X0`` (rounded down); witness ``B^{-1} X0``.

    Raises :class:`RegenerationLimit` if ``B`` is singular for 100 draws in a row.
    """
    if not recipe.use_transform:
        raise ValueError("gen_transformed needs recipe.use_transform")
    if recipe.margin is not None or recipe.shift is not None:
        raise ValueError("use gen_interior / gen_likely_infeasible for margin or shift")
    prob, witness, raw = _build(recipe, make_rng(recipe.seed), G=G, x0=x0, A=A, B=B)
    return CaseRecord(prob, recipe, CaseKind.CONSISTENT_WITNESS, witness, raw)


def gen_interior(recipe: CaseRecipe, *, C=None, G=None, x0=None, A=None, B=None) -> CaseRecord:
    """Consistent case with ``h - C``, leaving the witness strictly inside."""
    if recipe.margin is None and C is None:
        raise ValueError("gen_interior needs recipe.margin or an explicit C")
    if recipe.shift is not None:
        raise ValueError("gen_interior recipe must not carry a shift")
    prob, witness, raw = _build(
        recipe, make_rng(recipe.seed), G=G, x0=x0, A=A, B=B, offset_kind="margin", offset=C
    )
    return CaseRecord(prob, recipe, CaseKind.CONSISTENT_INTERIOR, witness, raw)


def gen_likely_infeasible(recipe: CaseRecipe, *, D=None, G=None, x0=None, A=None, B=None) -> CaseRecord:
    """Case with ``h + D``. Usually, but not provably, inconsistent; no witness."""
    if recipe.shift is None and D is None:
        raise ValueError("gen_likely_infeasible needs recipe.shift or an explicit D")
    if recipe.margin is not None:
        raise ValueError("gen_likely_infeasible recipe must not carry a margin")
    prob, _, raw = _build(
        recipe, make_rng(recipe.seed), G=G, x0=x0, A=A, B=B, offset_kind="shift", offset=D
    )
    return CaseRecord(prob, recipe, CaseKind.LIKELY_INFEASIBLE, None, raw)


def generate(recipe: CaseRecipe) -> CaseRecord:
    """Dispatch on the recipe: shift, margin, transform or plain."""
    if recipe.shift is not None:
        return gen_likely_infeasible(recipe)
    if recipe.margin is not None:
        return gen_interior(recipe)
    if recipe.use_transform:
        return gen_transformed(recipe)
    return gen_consistent(recipe)
