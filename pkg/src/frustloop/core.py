"""Bipartite Ising problems in RBM form.

Representation of instances and spin states, energy evaluation, vertex
switching (local gauge transformations), the switching-subset pseudometric,
frustration index, local-minimum checks, and an exact enumeration oracle
for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpinState",
    "RbmInstance",
    "SwitchingSubset",
    "energy",
    "switching_mask",
    "switching_subset",
    "energy_gap",
    "vertex_switch",
    "gauge_fix",
    "plant",
    "distance",
    "frustration_index",
    "is_local_minimum",
    "local_fields",
    "extended_weights",
    "brute_force_ground_state",
    "is_gauged",
]

# Weights of generated instances are integer combinations of 1 and alpha, so
# equality after gauge arithmetic is checked with a small absolute tolerance.
CERT_TOL = 1e-9


def _spin_vector(x, name: str) -> np.ndarray:
    arr = np.asarray(x)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-d array")
    arr = arr.astype(np.int8)
    if not np.all(np.abs(arr) == 1):
        raise ValueError(f"{name} entries must be exactly -1 or +1")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SpinState:
    """A +/-1 assignment of the n visible and m hidden spins."""

    v: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", _spin_vector(self.v, "v"))
        object.__setattr__(self, "h", _spin_vector(self.h, "h"))

    @property
    def n(self) -> int:
        return self.v.size

    @property
    def m(self) -> int:
        return self.h.size

    @staticmethod
    def all_plus(n: int, m: int) -> "SpinState":
        return SpinState(np.ones(n, dtype=np.int8), np.ones(m, dtype=np.int8))

    @staticmethod
    def random(n: int, m: int, rng: np.random.Generator) -> "SpinState":
        v = rng.integers(0, 2, n).astype(np.int8) * 2 - 1
        h = rng.integers(0, 2, m).astype(np.int8) * 2 - 1
        return SpinState(v, h)

    def flip(self, visible=(), hidden=()) -> "SpinState":
        """Return a copy with the given visible / hidden indices flipped."""
        v = self.v.copy()
        h = self.h.copy()
        v[list(visible)] *= -1
        h[list(hidden)] *= -1
        return SpinState(v, h)

    def global_flip(self) -> "SpinState":
        return SpinState(-self.v, -self.h)

    def same_as(self, other: "SpinState") -> bool:
        return (
            self.n == other.n
            and self.m == other.m
            and bool(np.array_equal(self.v, other.v) and np.array_equal(self.h, other.h))
        )


@dataclass(frozen=True, eq=False)
class RbmInstance:
    """A bipartite Ising instance: couplings W (n x m), biases a, b.

    E(v, h) = -(sum_ij W_ij v_i h_j + sum_i a_i v_i + sum_j b_j h_j)

    `planted` and `ground_energy`, when present, certify a known global
    minimum. `meta` records generator provenance (algorithm, f, alpha, rho,
    d, N1/N2/N3, seed).
    """

    W: np.ndarray
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    planted: SpinState | None = None
    ground_energy: float | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        W = np.asarray(self.W, dtype=np.float64)
        if W.ndim != 2 or W.shape[0] < 1 or W.shape[1] < 1:
            raise ValueError("W must be a non-empty 2-d matrix")
        W = W.copy()
        W.flags.writeable = False
        object.__setattr__(self, "W", W)
        n, m = W.shape
        a = np.zeros(n) if self.a is None else np.asarray(self.a, dtype=np.float64).copy()
        b = np.zeros(m) if self.b is None else np.asarray(self.b, dtype=np.float64).copy()
        if a.shape != (n,) or b.shape != (m,):
            raise ValueError("bias dimensions inconsistent with W")
        a.flags.writeable = False
        b.flags.writeable = False
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if self.planted is not None:
            if self.planted.n != n or self.planted.m != m:
                raise ValueError("planted state dimensions inconsistent with W")
            if self.ground_energy is not None:
                e = energy(self, self.planted)
                if abs(e - self.ground_energy) > CERT_TOL:
                    raise ValueError(
                        f"planted state energy {e} does not match certified "
                        f"ground energy {self.ground_energy}"
                    )

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[1]

    @property
    def unbiased(self) -> bool:
        return not (np.any(self.a) or np.any(self.b))


@dataclass(frozen=True)
class SwitchingSubset:
    """The set of matrix positions (i, j) whose coupling sign flips between
    two states; cardinality is n'm + nm' - 2n'm'."""

    members: frozenset

    def __len__(self) -> int:
        return len(self.members)


def _check_dims(inst: RbmInstance, s: SpinState):
    if s.n != inst.n or s.m != inst.m:
        raise ValueError("state dimensions do not match instance")


def _check_same(s: SpinState, s2: SpinState):
    if s.n != s2.n or s.m != s2.m:
        raise ValueError("state dimensions do not match")


def energy(inst: RbmInstance, s: SpinState) -> float:
    """RBM energy E(v, h) = -(v.W.h + a.v + b.h)."""
    _check_dims(inst, s)
    return float(-(s.v @ inst.W @ s.h + inst.a @ s.v + inst.b @ s.h))


def local_fields(inst: RbmInstance, s: SpinState):
    """Local fields theta = W h + a (visible) and phi = W^T v + b (hidden)."""
    _check_dims(inst, s)
    theta = inst.W @ s.h + inst.a
    phi = inst.W.T @ s.v + inst.b
    return theta, phi


def switching_mask(s: SpinState, s2: SpinState) -> np.ndarray:
    """Boolean n x m mask of the switching subset from s to s2."""
    _check_same(s, s2)
    dv = s.v != s2.v
    dh = s.h != s2.h
    return dv[:, None] ^ dh[None, :]


def switching_subset(s: SpinState, s2: SpinState) -> SwitchingSubset:
    """Positions (i, j) with v2_i h2_j = -v_i h_j (0-based indices)."""
    mask = switching_mask(s, s2)
    ii, jj = np.nonzero(mask)
    return SwitchingSubset(frozenset(zip(ii.tolist(), jj.tolist())))


def extended_weights(inst: RbmInstance) -> np.ndarray:
    """(n+1) x (m+1) ghost-spin matrix: biases become border couplings.

    With the two extra spins pinned to +1 the extended unbiased energy
    reproduces the original one (corner entry is zero).
    """
    n, m = inst.n, inst.m
    We = np.zeros((n + 1, m + 1))
    We[:n, :m] = inst.W
    We[:n, m] = inst.a
    We[n, :m] = inst.b
    return We


def _extend_state(s: SpinState) -> SpinState:
    return SpinState(np.append(s.v, 1), np.append(s.h, 1))


def energy_gap(inst: RbmInstance, s: SpinState, s2: SpinState) -> float:
    """Energy difference E(s2) - E(s) = 2 * sum over the switching subset
    of W_ij v_i h_j.

    Biased instances are routed through the ghost-spin extension (the pinned
    border spins never flip, so bias terms enter the subset correctly).
    """
    _check_dims(inst, s)
    _check_same(s, s2)
    if inst.unbiased:
        W, sa, sb = inst.W, s, s2
    else:
        W, sa, sb = extended_weights(inst), _extend_state(s), _extend_state(s2)
    mask = switching_mask(sa, sb)
    contrib = W * np.outer(sa.v, sa.h)
    return float(2.0 * contrib[mask].sum())


def vertex_switch(W: np.ndarray, s: SpinState, s2: SpinState) -> np.ndarray:
    """Negate W on the switching subset of (s, s2); W_ij v2_i h2_j = W'_ij v_i h_j."""
    W = np.asarray(W, dtype=np.float64)
    if W.shape != (s.n, s.m):
        raise ValueError("matrix dimensions do not match states")
    mask = switching_mask(s, s2)
    return np.where(mask, -W, W)


def gauge_fix(inst: RbmInstance, s0: SpinState) -> RbmInstance:
    """Apply the gauge transformation G_{s0,1}.

    If s0 is the ground state of `inst`, the result is gauged (ground state
    all +1). The operation is an involution, so it also serves as `plant`:
    applied to a gauged instance it moves the ground state onto s0. Biases
    transform as ghost-spin couplings: a_i -> a_i v0_i, b_j -> b_j h0_j.
    """
    _check_dims(inst, s0)
    W = inst.W * np.outer(s0.v, s0.h)
    a = inst.a * s0.v
    b = inst.b * s0.h
    planted = None
    if inst.planted is not None:
        planted = SpinState(inst.planted.v * s0.v, inst.planted.h * s0.h)
    return RbmInstance(
        W=W, a=a, b=b, planted=planted, ground_energy=inst.ground_energy, meta=dict(inst.meta)
    )


# Same transformation by the Z2 gauge-group symmetry.
plant = gauge_fix


def distance(s: SpinState, s2: SpinState) -> float:
    """Switching-subset pseudometric |F| / nm = n'/n + m'/m - 2n'm'/nm.

    Zero iff the states are equal or globally flipped.
    """
    _check_same(s, s2)
    np_ = int(np.count_nonzero(s.v != s2.v))
    mp = int(np.count_nonzero(s.h != s2.h))
    n, m = s.n, s.m
    return (np_ * m + n * mp - 2 * np_ * mp) / (n * m)


def frustration_index(inst: RbmInstance, ground_state: SpinState | None = None) -> float:
    """Negative-weight magnitude fraction of a gauged instance; in [0, 0.5].

    If `ground_state` is given (or the instance carries a planted state),
    the instance is gauged onto it first. Biased instances are rejected:
    the index is defined on couplings only.
    """
    if not inst.unbiased:
        raise ValueError("frustration index is defined for unbiased instances only")
    if ground_state is None:
        ground_state = inst.planted
    W = inst.W
    if ground_state is not None:
        W = W * np.outer(ground_state.v, ground_state.h)
    total = np.abs(W).sum()
    if total == 0.0:
        raise ValueError("frustration index undefined for an all-zero matrix")
    return float(-W[W < 0].sum() / total)


def is_local_minimum(inst: RbmInstance, s: SpinState) -> bool:
    """True iff no single-spin flip strictly lowers the energy.

    Flipping v_i changes the energy by 2 v_i theta_i, so the (non-strict)
    condition is v_i theta_i >= 0 for all i, and likewise for hidden spins.
    """
    theta, phi = local_fields(inst, s)
    return bool(np.all(s.v * theta >= 0.0) and np.all(s.h * phi >= 0.0))


def brute_force_ground_state(inst: RbmInstance, max_visible: int = 24):
    """Exact ground state by enumerating all 2^n visible configurations.

    For fixed v the optimal hidden layer is separable per column:
    h_j = sign((W^T v + b)_j) with sign(0) := +1. Returns (state, energy).
    """
    n, m = inst.n, inst.m
    if n > max_visible:
        raise ValueError(f"n={n} exceeds the enumeration budget ({max_visible})")
    best_e = np.inf
    best_code = 0
    total = 1 << n
    chunk = 1 << min(n, 14)
    bits = np.arange(n, dtype=np.uint32)
    for start in range(0, total, chunk):
        codes = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        V = (((codes[:, None] >> bits) & 1).astype(np.float64) * 2.0) - 1.0
        Phi = V @ inst.W + inst.b
        E = -(np.abs(Phi).sum(axis=1) + V @ inst.a)
        k = int(np.argmin(E))
        if E[k] < best_e:
            best_e = float(E[k])
            best_code = int(codes[k])
    v = (((best_code >> bits) & 1).astype(np.int8) * 2) - 1
    phi = inst.W.T @ v + inst.b
    h = np.where(phi >= 0, 1, -1).astype(np.int8)
    return SpinState(v, h), best_e


def is_gauged(inst: RbmInstance, tol: float = CERT_TOL) -> bool:
    """Exhaustively check the positive-sum condition: all +1 attains the
    global minimum (small instances only)."""
    _, e_min = brute_force_ground_state(inst)
    e_plus = energy(inst, SpinState.all_plus(inst.n, inst.m))
    return e_plus <= e_min + tol
