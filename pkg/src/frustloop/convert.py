"""Conversion chain between problem representations and file I/O.

MAX-2-SAT <-> QUBO <-> bipartite QUBO <-> +/-1 spin (RBM) form, ghost-spin
bias absorption, clause-density accounting, DIMACS wcnf export/import and
the canonical JSON instance format.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .core import RbmInstance, SpinState, extended_weights

__all__ = [
    "WeightedClause",
    "Max2SatInstance",
    "QuboInstance",
    "BipartiteQubo",
    "max2sat_to_qubo",
    "qubo_to_bipartite",
    "binary_to_ising",
    "absorb_biases",
    "rbm_to_max2sat",
    "satisfied_weight",
    "clause_density",
    "loop_clause_density",
    "wcnf_dumps",
    "write_wcnf",
    "read_wcnf",
    "instance_to_dict",
    "instance_from_dict",
    "save_instance",
    "load_instance",
    "max2sat_to_dict",
    "max2sat_from_dict",
]


@dataclass(frozen=True)
class WeightedClause:
    """A 1- or 2-literal clause; negative literal index means negation."""

    lit1: int
    lit2: int | None = None
    weight: float = 1.0

    def __post_init__(self):
        if self.lit1 == 0 or self.lit2 == 0:
            raise ValueError("literals are non-zero signed variable indices")
        if self.lit2 is not None and abs(self.lit1) == abs(self.lit2):
            raise ValueError("a clause may not repeat a variable")
        if self.weight < 0:
            raise ValueError("clause weight must be non-negative")

    @property
    def literals(self):
        return (self.lit1,) if self.lit2 is None else (self.lit1, self.lit2)

    def satisfied(self, assignment) -> bool:
        """`assignment` maps variable index (1-based) to truth via +/-1."""
        for lit in self.literals:
            val = assignment[abs(lit) - 1] > 0
            if val == (lit > 0):
                return True
        return False


@dataclass(frozen=True)
class Max2SatInstance:
    num_vars: int
    clauses: tuple
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            for lit in c.literals:
                if abs(lit) > self.num_vars:
                    raise ValueError(f"literal {lit} out of range (num_vars={self.num_vars})")

    @property
    def total_weight(self) -> float:
        return float(sum(c.weight for c in self.clauses))


@dataclass(frozen=True)
class QuboInstance:
    """Maximize sum_i B_i x_i + sum_{i<j} Q_ij x_i x_j over x in {0,1}^n."""

    n: int
    B: np.ndarray
    Q: dict
    offset: float = 0.0

    def __post_init__(self):
        B = np.asarray(self.B, dtype=np.float64)
        if B.shape != (self.n,):
            raise ValueError("B must have length n")
        object.__setattr__(self, "B", B)
        for (i, j) in self.Q:
            if not (0 <= i < j < self.n):
                raise ValueError("Q must be strictly upper triangular (i < j)")

    def value(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        val = float(self.B @ x)
        for (i, j), q in self.Q.items():
            val += q * x[i] * x[j]
        return val


@dataclass(frozen=True)
class BipartiteQubo:
    """Maximize a.v + b.h + v.W.h over binary v (n) and h (m)."""

    a: np.ndarray
    b: np.ndarray
    W: np.ndarray
    offset: float = 0.0

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[1]

    def value(self, v, h) -> float:
        v = np.asarray(v, dtype=np.float64)
        h = np.asarray(h, dtype=np.float64)
        return float(self.a @ v + self.b @ h + v @ self.W @ h)


def max2sat_to_qubo(sat: Max2SatInstance) -> QuboInstance:
    """Sum the per-clause QUBO translations, weighted by clause weight.

    (x_i v x_j)   -> x_i + x_j - x_i x_j
    (!x_i v x_j)  -> 1 - x_i + x_i x_j
    (x_i v !x_j)  -> 1 - x_j + x_i x_j
    (!x_i v !x_j) -> 1 - x_i x_j
    Unit clauses: (x_i) -> x_i and (!x_i) -> 1 - x_i.
    """
    n = sat.num_vars
    B = np.zeros(n)
    Q: dict = {}
    offset = 0.0

    def addq(i, j, val):
        key = (i, j) if i < j else (j, i)
        Q[key] = Q.get(key, 0.0) + val

    for c in sat.clauses:
        w = c.weight
        if c.lit2 is None:
            i = abs(c.lit1) - 1
            if c.lit1 > 0:
                B[i] += w
            else:
                offset += w
                B[i] -= w
            continue
        i, j = abs(c.lit1) - 1, abs(c.lit2) - 1
        p1, p2 = c.lit1 > 0, c.lit2 > 0
        if p1 and p2:
            B[i] += w
            B[j] += w
            addq(i, j, -w)
        elif not p1 and p2:
            offset += w
            B[i] -= w
            addq(i, j, w)
        elif p1 and not p2:
            offset += w
            B[j] -= w
            addq(i, j, w)
        else:
            offset += w
            addq(i, j, -w)
    Q = {k: v for k, v in Q.items() if v != 0.0}
    return QuboInstance(n=n, B=B, Q=Q, offset=offset)


def qubo_to_bipartite(q: QuboInstance) -> BipartiteQubo:
    """Duplicate the variable set into an n x n bipartite QUBO whose maximum
    enforces v = h and reproduces the original maximizer.

    The agreement penalty is -g * sum_i (v_i + h_i - 2 v_i h_i) with
    g = 2c + 1 and c = sum|B| + sum|Q|: it vanishes on v = h and costs g per
    mismatched coordinate, which exceeds the largest possible gain 2c from
    relaxing the agreement condition, so the constraint is strict even for
    an all-zero polynomial.
    """
    c = float(np.abs(q.B).sum() + sum(abs(v) for v in q.Q.values()))
    g = 2.0 * c + 1.0
    n = q.n
    a = q.B - g
    b = np.full(n, -g)
    W = np.zeros((n, n))
    np.fill_diagonal(W, 2.0 * g)
    for (i, j), val in q.Q.items():
        W[i, j] += val
    return BipartiteQubo(a=a, b=b, W=W, offset=q.offset)


def binary_to_ising(bq: BipartiteQubo):
    """Convert a bipartite {0,1} QUBO into +/-1 spin (RBM) form.

    Returns (inst, const) with the polynomial value at binary (v, h)
    equal to -E(s) + const for the spin state s = 2(v, h) - 1. The bipartite
    offset is folded into const for round-trip accounting.
    """
    # expanding x = (s+1)/2 gives spin-linear coefficients a/2 + (W 1)/4;
    # the coupling row-sum enters with weight 1/4, not 1/2
    a = 0.5 * bq.a + 0.25 * bq.W.sum(axis=1)
    b = 0.5 * bq.b + 0.25 * bq.W.sum(axis=0)
    W = bq.W / 4.0
    const = float(bq.a.sum() / 2 + bq.b.sum() / 2 + bq.W.sum() / 4 + bq.offset)
    return RbmInstance(W=W, a=a, b=b), const


def absorb_biases(inst: RbmInstance) -> RbmInstance:
    """Unbiased (n+1) x (m+1) instance with biases as ghost-spin couplings.

    Pinning the border spins to +1 reproduces the original energies.
    """
    meta = dict(inst.meta)
    meta["ghost_spins"] = True
    return RbmInstance(W=extended_weights(inst), meta=meta)


def _bond_clauses(i_lit: int, j_lit: int, w: float):
    # W_ij v_i h_j -> two clauses of weight 2|W_ij|; a violated bond leaves
    # exactly one of them unsatisfied.
    if w >= 0:
        return [
            WeightedClause(i_lit, -j_lit, 2.0 * w),
            WeightedClause(-i_lit, j_lit, 2.0 * w),
        ]
    return [
        WeightedClause(i_lit, j_lit, -2.0 * w),
        WeightedClause(-i_lit, -j_lit, -2.0 * w),
    ]


def rbm_to_max2sat(inst: RbmInstance) -> Max2SatInstance:
    """Break each coupling into two clauses (sign-dependent table).

    Visible spins map to variables 1..n, hidden to n+1..n+m; +1 is true.
    Biases become bonds to a pinned-true ghost literal and simplify to unit
    clauses; the always-satisfied partner clause weight is accumulated in
    meta["pinned_offset"].
    """
    n, m = inst.n, inst.m
    clauses = []
    pinned_offset = 0.0
    for i in range(n):
        for j in range(m):
            w = inst.W[i, j]
            if w != 0.0:
                clauses.extend(_bond_clauses(i + 1, n + j + 1, w))
    for i in range(n):
        w = inst.a[i]
        if w != 0.0:
            # bond to ghost hidden spin pinned true: one clause is always
            # satisfied (dropped), the other loses its ghost literal.
            clauses.append(WeightedClause(i + 1 if w > 0 else -(i + 1), None, 2.0 * abs(w)))
            pinned_offset += 2.0 * abs(w)
    for j in range(m):
        w = inst.b[j]
        if w != 0.0:
            lit = n + j + 1
            clauses.append(WeightedClause(lit if w > 0 else -lit, None, 2.0 * abs(w)))
            pinned_offset += 2.0 * abs(w)
    meta = dict(inst.meta)
    meta["pinned_offset"] = pinned_offset
    if inst.planted is not None:
        meta["planted"] = np.concatenate([inst.planted.v, inst.planted.h]).tolist()
    if inst.ground_energy is not None:
        meta["ground_energy"] = inst.ground_energy
    meta.setdefault("n", n)
    meta.setdefault("m", m)
    return Max2SatInstance(num_vars=n + m, clauses=clauses, meta=meta)


def satisfied_weight(sat: Max2SatInstance, assignment) -> float:
    """Total weight of satisfied clauses; assignment is a +/-1 vector."""
    return float(sum(c.weight for c in sat.clauses if c.satisfied(assignment)))


def clause_density(inst) -> float:
    """Clause density: clauses per variable.

    For an RBM instance each nonzero coupling is a bond yielding 2 clauses,
    so the density is 2*nnz/(n+m) (fully dense: 2nm/(n+m)).
    """
    if isinstance(inst, RbmInstance):
        nnz = int(np.count_nonzero(inst.W))
        return 2.0 * nnz / (inst.n + inst.m)
    if isinstance(inst, Max2SatInstance):
        return len(inst.clauses) / inst.num_vars
    raise TypeError("expected RbmInstance or Max2SatInstance")


def loop_clause_density(n: int, m: int, num_loops: int) -> float:
    """Density 8N/(nm) of the uniform-weight MAX-2-SAT form of N
    non-intersecting loop atoms."""
    return 8.0 * num_loops / (n * m)


# ---------------------------------------------------------------------------
# DIMACS wcnf


def wcnf_dumps(sat: Max2SatInstance, scale: int = 10**6) -> str:
    """Serialize to DIMACS wcnf with integer weights round(weight * scale).

    Refuses to emit a file in which a nonzero clause weight rounds to zero.
    """
    if scale < 1:
        raise ValueError("scale must be a positive integer")
    int_weights = []
    for c in sat.clauses:
        w = round(c.weight * scale)
        if w == 0 and c.weight != 0.0:
            raise ValueError(
                f"clause weight {c.weight} rounds to zero at scale {scale} (lossy)"
            )
        int_weights.append(w)
    top = 1 + sum(int_weights)
    lines = []
    meta = sat.meta
    for key in ("algorithm", "f", "rho", "seed", "n", "m"):
        if key in meta:
            lines.append(f"c {key} {meta[key]}")
    lines.append(f"c scale {scale}")
    if "planted" in meta:
        lines.append("c planted " + " ".join(str(int(x)) for x in meta["planted"]))
    if "ground_energy" in meta:
        lines.append(f"c ground-energy {meta['ground_energy']!r}")
    lines.append(f"p wcnf {sat.num_vars} {len(sat.clauses)} {top}")
    for c, w in zip(sat.clauses, int_weights):
        lines.append(f"{w} " + " ".join(str(lit) for lit in c.literals) + " 0")
    return "\n".join(lines) + "\n"


def write_wcnf(sat: Max2SatInstance, path, scale: int = 10**6) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(wcnf_dumps(sat, scale))


def read_wcnf(path, scale: int | None = None) -> Max2SatInstance:
    """Parse a wcnf file; weights are divided by the scale (from the
    `c scale` comment when present, else the argument, else 1)."""
    meta: dict = {}
    clauses = []
    num_vars = None
    declared = None
    file_scale = None
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "c":
                if len(fields) >= 3 and fields[1] == "scale":
                    file_scale = int(fields[2])
                elif len(fields) >= 3 and fields[1] == "planted":
                    meta["planted"] = [int(x) for x in fields[2:]]
                elif len(fields) == 3 and fields[1] == "ground-energy":
                    meta["ground_energy"] = float(fields[2])
                elif len(fields) == 3:
                    meta[fields[1]] = fields[2]
                continue
            if fields[0] == "p":
                if len(fields) != 5 or fields[1] != "wcnf":
                    raise ValueError(f"malformed problem line at {path}:{lineno}")
                num_vars = int(fields[2])
                declared = int(fields[3])
                continue
            if num_vars is None:
                raise ValueError(f"clause before problem line at {path}:{lineno}")
            if fields[-1] != "0":
                raise ValueError(f"clause not 0-terminated at {path}:{lineno}")
            w = int(fields[0])
            lits = [int(x) for x in fields[1:-1]]
            if len(lits) not in (1, 2):
                raise ValueError(f"only 1- or 2-literal clauses supported ({path}:{lineno})")
            clauses.append((w, lits))
    if num_vars is None:
        raise ValueError(f"missing problem line in {path}")
    if declared is not None and declared != len(clauses):
        raise ValueError(f"declared {declared} clauses, found {len(clauses)} in {path}")
    eff_scale = file_scale if file_scale is not None else (scale if scale is not None else 1)
    built = [
        WeightedClause(lits[0], lits[1] if len(lits) == 2 else None, w / eff_scale)
        for w, lits in clauses
    ]
    for key in ("f", "rho", "ground_energy"):
        if key in meta and isinstance(meta[key], str):
            meta[key] = float(meta[key])
    for key in ("seed", "n", "m"):
        if key in meta and isinstance(meta[key], str):
            meta[key] = int(meta[key])
    meta["scale"] = eff_scale
    return Max2SatInstance(num_vars=num_vars, clauses=built, meta=meta)


# ---------------------------------------------------------------------------
# JSON instance format


def _fmt(x: float) -> float:
    # 17 significant digits round-trip doubles exactly.
    return float(f"{x:.17g}")


def instance_to_dict(inst: RbmInstance) -> dict:
    d = {
        "n": inst.n,
        "m": inst.m,
        "W": [_fmt(x) for x in inst.W.ravel(order="C")],
        "a": [_fmt(x) for x in inst.a],
        "b": [_fmt(x) for x in inst.b],
        "planted": None,
        "ground_energy": None if inst.ground_energy is None else _fmt(inst.ground_energy),
        "meta": inst.meta,
    }
    if inst.planted is not None:
        d["planted"] = {"v": inst.planted.v.tolist(), "h": inst.planted.h.tolist()}
    return d


def instance_from_dict(d: dict) -> RbmInstance:
    n, m = d["n"], d["m"]
    W = np.asarray(d["W"], dtype=np.float64).reshape(n, m)
    planted = None
    if d.get("planted"):
        planted = SpinState(np.asarray(d["planted"]["v"]), np.asarray(d["planted"]["h"]))
    return RbmInstance(
        W=W,
        a=np.asarray(d["a"], dtype=np.float64),
        b=np.asarray(d["b"], dtype=np.float64),
        planted=planted,
        ground_energy=d.get("ground_energy"),
        meta=d.get("meta", {}),
    )


def save_instance(inst: RbmInstance, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(instance_to_dict(inst), fh)
        fh.write("\n")


def load_instance(path) -> RbmInstance:
    with open(path, "r", encoding="ascii") as fh:
        return instance_from_dict(json.load(fh))


def max2sat_to_dict(sat: Max2SatInstance) -> dict:
    return {
        "type": "max2sat",
        "num_vars": sat.num_vars,
        "clauses": [[c.lit1, c.lit2, _fmt(c.weight)] for c in sat.clauses],
        "meta": sat.meta,
    }


def max2sat_from_dict(d: dict) -> Max2SatInstance:
    clauses = [WeightedClause(l1, l2, w) for l1, l2, w in d["clauses"]]
    return Max2SatInstance(num_vars=d["num_vars"], clauses=clauses, meta=d.get("meta", {}))
