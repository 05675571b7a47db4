"""Planted-instance generators.

Random and structured frustrated-loop construction, loop-atom primitives,
decomposition of long loops into atoms, and the uniform-weight MAX-2-SAT
mode. All generators build the instance in the gauged frame (planted state
all +1), certify the ground energy by construction, then move the ground
state onto a random spin assignment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import RbmInstance, SpinState, plant
from .convert import Max2SatInstance, rbm_to_max2sat

__all__ = [
    "LoopAtom",
    "GenParams",
    "SaturationError",
    "alpha_from_f",
    "f_from_alpha",
    "random_loop_instance",
    "structured_loop_instance",
    "uniform_sat_instance",
    "generate_instance",
    "decompose_loop",
    "atoms_to_matrix",
    "block_sums",
    "b1b4_state",
]

MODES = ("random", "structured", "uniform-sat")


class SaturationError(RuntimeError):
    """Raised when loop placement cannot find a legal position."""


def alpha_from_f(f: float) -> float:
    """Negative-edge magnitude alpha = 3f/(1-f) realizing frustration f.

    The admissible range is f in [0, 0.25]; beyond that alpha would exceed
    1 and the planted state would stop being a global minimum.
    """
    if not 0.0 <= f <= 0.25:
        raise ValueError(f"f={f} outside [0, 0.25]")
    return 3.0 * f / (1.0 - f)


def f_from_alpha(alpha: float) -> float:
    """Inverse of alpha_from_f: f = alpha/(3+alpha) for alpha in [0, 1]."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    return alpha / (3.0 + alpha)


@dataclass(frozen=True)
class LoopAtom:
    """A length-4 frustrated cycle: -alpha at (i1, j1), +1 at the other
    three corners (i1, j2), (i2, j1), (i2, j2)."""

    i1: int
    i2: int
    j1: int
    j2: int
    alpha: float = 1.0

    def __post_init__(self):
        if self.i1 == self.i2 or self.j1 == self.j2:
            raise ValueError("loop atom rows and columns must be distinct")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")

    @property
    def cells(self):
        """((row, col, weight) for the four corners)."""
        return (
            (self.i1, self.j1, -self.alpha),
            (self.i1, self.j2, 1.0),
            (self.i2, self.j1, 1.0),
            (self.i2, self.j2, 1.0),
        )

    def add_to(self, W: np.ndarray) -> None:
        for i, j, w in self.cells:
            W[i, j] += w


@dataclass(frozen=True)
class GenParams:
    n: int
    m: int
    f: float
    rho: float
    seed: int
    mode: str = "random"
    d: float = 0.5
    loop_mix: tuple | None = None
    allow_constructive: bool = True
    jitter: float = 0.0

    def __post_init__(self):
        if self.n < 2 or self.m < 2:
            raise ValueError("need n >= 2 and m >= 2 to place loops")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.rho < 0:
            raise ValueError("rho must be non-negative")
        if not 0.0 < self.d <= 1.0:
            raise ValueError("d must lie in (0, 1]")
        if self.jitter < 0:
            raise ValueError("jitter must be non-negative")
        alpha_from_f(self.f)  # range check
        if self.loop_mix is not None:
            mix = tuple(int(x) for x in self.loop_mix)
            if len(mix) != 3 or any(x < 0 for x in mix):
                raise ValueError("loop_mix must be three non-negative counts")
            if sum(mix) != self.num_loops:
                raise ValueError(
                    f"loop_mix {mix} must sum to N = round(rho*n) = {self.num_loops}"
                )
            object.__setattr__(self, "loop_mix", mix)

    @property
    def alpha(self) -> float:
        return alpha_from_f(self.f)

    @property
    def num_loops(self) -> int:
        # banker's rounding; rho = N/n is defined up to this convention
        return round(self.rho * self.n)


# placement retry budget per loop; the algorithms give no termination rule
_ATTEMPT_FACTOR = 100


def _place_atom(W, rng, alpha, row_pools, col_pools, strict_empty, budget):
    """Rejection-sample one loop atom.

    row_pools/col_pools are ((i1 choices), (i2 choices)) and likewise for
    columns; the negative edge lands at (i1, j1). An entry may be reused
    only with matching sign (strict_empty forbids any reuse).
    """
    rows1, rows2 = row_pools
    cols1, cols2 = col_pools
    for _ in range(budget):
        i1 = rows1[rng.integers(len(rows1))]
        i2 = rows2[rng.integers(len(rows2))]
        if i1 == i2:
            continue
        j1 = cols1[rng.integers(len(cols1))]
        j2 = cols2[rng.integers(len(cols2))]
        if j1 == j2:
            continue
        if strict_empty:
            ok = (
                W[i1, j1] == 0.0
                and W[i1, j2] == 0.0
                and W[i2, j1] == 0.0
                and W[i2, j2] == 0.0
            )
        else:
            ok = (
                W[i1, j1] <= 0.0
                and W[i1, j2] >= 0.0
                and W[i2, j1] >= 0.0
                and W[i2, j2] >= 0.0
            )
        if ok:
            atom = LoopAtom(i1, i2, j1, j2, alpha)
            atom.add_to(W)
            return atom
    raise SaturationError(
        f"no legal loop position found in {budget} attempts (graph saturated)"
    )


def _finish(W, p: GenParams, rng, extra_meta):
    """Jitter, certify, and plant a gauged weight matrix."""
    n, m = p.n, p.m
    N = p.num_loops
    alpha = p.alpha
    ground = -N * (3.0 - alpha)
    meta = {
        "algorithm": p.mode,
        "f": p.f,
        "alpha": alpha,
        "rho": p.rho,
        "seed": p.seed,
        "jitter": p.jitter,
        "certified": True,
    }
    meta.update(extra_meta)
    if p.jitter > 0.0:
        # noisy edge magnitudes break the exact certificate; keep the
        # planted state only if a brute-force check (feasible sizes) or
        # a local-minimum sanity check confirms it
        noise = rng.normal(0.0, p.jitter, size=(n, m))
        W = np.where(W != 0.0, W + noise, W)
        meta["certified"] = False
        ground = None
    planted = SpinState.random(n, m, rng)
    gauged = RbmInstance(W=W, planted=SpinState.all_plus(n, m), ground_energy=ground, meta=meta)
    return plant(gauged, planted)


def random_loop_instance(p: GenParams) -> RbmInstance:
    """Drop N = round(rho*n) loop atoms at uniform random positions.

    The negative edge may only land on a currently non-positive entry and
    the positive edges on non-negative entries, so contributions never
    cancel: the frustration index stays exactly f = alpha/(3+alpha) and the
    ground energy is -N(3-alpha), attained by the planted state.
    """
    if p.mode not in ("random", "uniform-sat"):
        raise ValueError("random_loop_instance expects mode=random")
    rng = np.random.default_rng(p.seed)
    n, m = p.n, p.m
    W = np.zeros((n, m))
    all_rows = np.arange(n)
    all_cols = np.arange(m)
    budget = _ATTEMPT_FACTOR * n * m
    strict = p.mode == "uniform-sat" or not p.allow_constructive
    alpha = 1.0 if p.mode == "uniform-sat" else p.alpha
    for _ in range(p.num_loops):
        _place_atom(W, rng, alpha, (all_rows, all_rows), (all_cols, all_cols), strict, budget)
    return _finish(W, p, rng, {})


def structured_loop_instance(p: GenParams) -> RbmInstance:
    """Blocked loop placement concentrating all negative weights in the
    top-left block B1.

    Rows split at n1 = ceil((n-1)d) into top/bottom, columns at
    m1 = ceil((m-1)d) into left/right. Left loops live in rows (top,
    bottom) x left columns, upper loops in top rows x (left, right)
    columns, center loops straddle all four blocks. The negative edge is
    always the B1 corner (i1, j1). Sign constraints are those of the
    random algorithm, so the certificate is identical.
    """
    if p.mode != "structured":
        raise ValueError("structured_loop_instance expects mode=structured")
    rng = np.random.default_rng(p.seed)
    n, m = p.n, p.m
    n1 = math.ceil((n - 1) * p.d)
    m1 = math.ceil((m - 1) * p.d)
    N = p.num_loops
    if p.loop_mix is not None:
        N1, N2, N3 = p.loop_mix
    else:
        # center-heavy default: center loops feed the metastable cluster
        N1 = N2 = N // 4
        N3 = N - N1 - N2
    top = np.arange(n1)
    bottom = np.arange(n1, n)
    left = np.arange(m1)
    right = np.arange(m1, m)
    if N1 > 0 and len(left) < 2:
        raise SaturationError(f"left loops need two left columns (m1={m1})")
    if N2 > 0 and len(top) < 2:
        raise SaturationError(f"upper loops need two top rows (n1={n1})")
    W = np.zeros((n, m))
    budget = _ATTEMPT_FACTOR * n * m
    strict = not p.allow_constructive
    for _ in range(N1):  # left: i1 top, i2 bottom, both columns left
        _place_atom(W, rng, p.alpha, (top, bottom), (left, left), strict, budget)
    for _ in range(N2):  # upper: both rows top, j1 left, j2 right
        _place_atom(W, rng, p.alpha, (top, top), (left, right), strict, budget)
    for _ in range(N3):  # center: i1 top, i2 bottom, j1 left, j2 right
        _place_atom(W, rng, p.alpha, (top, bottom), (left, right), strict, budget)
    extra = {"d": p.d, "n1": n1, "m1": m1, "N1": N1, "N2": N2, "N3": N3}
    return _finish(W, p, rng, extra)


def uniform_sat_instance(p: GenParams) -> Max2SatInstance:
    """Uniform-weight MAX-2-SAT: non-intersecting loops at alpha = 1.

    Every bond has magnitude 1, so all 8N clauses carry weight 2; the
    clause density is 8N/(nm). The planted assignment violates exactly one
    clause per loop.
    """
    q = GenParams(
        n=p.n, m=p.m, f=f_from_alpha(1.0), rho=p.rho, seed=p.seed,
        mode="uniform-sat", allow_constructive=False,
    )
    inst = random_loop_instance(q)
    sat = rbm_to_max2sat(inst)
    sat.meta["algorithm"] = "uniform-sat"
    sat.meta["rho"] = p.rho
    sat.meta["seed"] = p.seed
    return sat


def generate_instance(p: GenParams):
    if p.mode == "random":
        return random_loop_instance(p)
    if p.mode == "structured":
        return structured_loop_instance(p)
    return uniform_sat_instance(p)


# ---------------------------------------------------------------------------
# loop decomposition


def decompose_loop(cycle, alpha: float = 1.0, neg_edge: int = 0):
    """Decompose a length-2l frustrated loop into l-1 loop atoms.

    `cycle` is the alternating vertex sequence [i1, j1, i2, j2, ..., il, jl]
    (rows and columns in separate index spaces); its edges, in order, are
    (i1,j1), (i2,j1), (i2,j2), (i3,j2), ..., (il,jl), (i1,jl). `neg_edge`
    selects which of the 2l edges carries the weight -alpha; all others are
    +1. The atoms' chord contributions on (i1, j_t) cancel pairwise, so the
    summed matrix equals the loop exactly.
    """
    cycle = list(cycle)
    if len(cycle) < 4 or len(cycle) % 2:
        raise ValueError("cycle must list i1, j1, ..., il, jl with l >= 2")
    rows = cycle[0::2]
    cols = cycle[1::2]
    l = len(rows)
    if len(set(rows)) != l or len(set(cols)) != l:
        raise ValueError("cycle has repeated vertices")
    if not 0 <= neg_edge < 2 * l:
        raise ValueError(f"neg_edge must index one of the {2 * l} edges")

    # relabel so the negative edge becomes the closing edge (i1, jl):
    # an odd edge index (i_{k+1}, j_k) is reached by rotating k steps, an
    # even index (i_k, j_k) by reversing the traversal direction first
    if neg_edge % 2:
        k = (neg_edge + 1) // 2
        rows = rows[k % l:] + rows[:k % l]
        cols = cols[k % l:] + cols[:k % l]
    else:
        k = neg_edge // 2
        rows = [rows[k]] + rows[:k][::-1] + rows[k + 1:][::-1]
        cols = cols[:k][::-1] + cols[k:][::-1]

    atoms = []
    for t in range(1, l):
        a_t = alpha if t == l - 1 else 1.0
        atoms.append(LoopAtom(i1=rows[0], i2=rows[t], j1=cols[t], j2=cols[t - 1], alpha=a_t))
    return atoms


def atoms_to_matrix(atoms, n: int, m: int) -> np.ndarray:
    W = np.zeros((n, m))
    for atom in atoms:
        atom.add_to(W)
    return W


# ---------------------------------------------------------------------------
# structured-instance helpers


def _structured_meta(inst: RbmInstance):
    meta = inst.meta
    if meta.get("algorithm") != "structured":
        raise ValueError("instance was not produced by the structured generator")
    return meta["n1"], meta["m1"]


def block_sums(inst: RbmInstance):
    """Weight sums over the four blocks of the gauged matrix, as
    (B1, B2, B3, B4) = (top-left, top-right, bottom-left, bottom-right)."""
    n1, m1 = _structured_meta(inst)
    s0 = inst.planted
    W = inst.W * np.outer(s0.v, s0.h) if s0 is not None else inst.W
    return (
        float(W[:n1, :m1].sum()),
        float(W[:n1, m1:].sum()),
        float(W[n1:, :m1].sum()),
        float(W[n1:, m1:].sum()),
    )


def b1b4_state(inst: RbmInstance) -> SpinState:
    """The state whose switching subset from the planted state is B1 union
    B4: top rows and right columns flipped.

    At alpha = 1 its energy equals the ground energy (two-fold degeneracy);
    at alpha = 1 - eps it sits above by 2*eps*N.
    """
    n1, m1 = _structured_meta(inst)
    s0 = inst.planted
    if s0 is None:
        raise ValueError("instance carries no planted state")
    return s0.flip(visible=range(n1), hidden=range(m1, inst.m))
