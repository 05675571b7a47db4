import numpy as np
import pytest

from frustloop.convert import satisfied_weight
from frustloop.core import (
    RbmInstance,
    SpinState,
    brute_force_ground_state,
    energy,
    frustration_index,
    is_local_minimum,
)
from frustloop.generate import (
    GenParams,
    LoopAtom,
    SaturationError,
    alpha_from_f,
    atoms_to_matrix,
    b1b4_state,
    block_sums,
    decompose_loop,
    f_from_alpha,
    random_loop_instance,
    structured_loop_instance,
    uniform_sat_instance,
)


class TestAlphaF:
    def test_endpoints(self):
        assert alpha_from_f(0.0) == 0.0
        assert alpha_from_f(0.25) == pytest.approx(1.0)
        assert f_from_alpha(1.0) == 0.25

    def test_tenth(self):
        assert alpha_from_f(0.1) == pytest.approx(1.0 / 3.0)

    def test_inverse_pair(self):
        for f in np.linspace(0.0, 0.25, 26):
            assert f_from_alpha(alpha_from_f(f)) == pytest.approx(f, abs=1e-14)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            alpha_from_f(0.26)
        with pytest.raises(ValueError):
            alpha_from_f(-0.01)
        with pytest.raises(ValueError):
            f_from_alpha(1.5)


class TestLoopAtom:
    def test_cells(self):
        atom = LoopAtom(0, 1, 0, 1, alpha=0.5)
        W = atoms_to_matrix([atom], 2, 2)
        assert np.array_equal(W, [[-0.5, 1.0], [1.0, 1.0]])

    def test_validation(self):
        with pytest.raises(ValueError):
            LoopAtom(0, 0, 0, 1)
        with pytest.raises(ValueError):
            LoopAtom(0, 1, 0, 1, alpha=1.5)


class TestRandomLoops:
    def test_single_loop_2x2(self):
        p = GenParams(n=2, m=2, f=0.25, rho=0.5, seed=0)
        inst = random_loop_instance(p)
        assert inst.ground_energy == pytest.approx(-2.0)
        assert frustration_index(inst) == pytest.approx(0.25)

    def test_certified_ground_energy_formula(self):
        p = GenParams(n=10, m=10, f=0.1, rho=1.0, seed=1)
        inst = random_loop_instance(p)
        assert inst.ground_energy == pytest.approx(-10 * (3 - 1 / 3))

    def test_brute_force_confirms_certificate(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            p = GenParams(
                n=int(rng.integers(4, 11)), m=int(rng.integers(4, 11)),
                f=float(rng.choice([0.05, 0.15, 0.24])),
                rho=float(rng.choice([0.2, 0.5, 1.0])),
                seed=int(rng.integers(2**32)),
            )
            inst = random_loop_instance(p)
            _, e = brute_force_ground_state(inst)
            assert e == pytest.approx(inst.ground_energy, abs=1e-9)
            assert energy(inst, inst.planted) == pytest.approx(e, abs=1e-9)

    def test_frustration_exact(self):
        for f in [0.05, 0.1, 0.2, 0.24]:
            p = GenParams(n=12, m=12, f=f, rho=1.0, seed=7)
            inst = random_loop_instance(p)
            assert abs(frustration_index(inst) - f) < 1e-12

    def test_deterministic(self):
        p = GenParams(n=8, m=8, f=0.1, rho=0.5, seed=99)
        a = random_loop_instance(p)
        b = random_loop_instance(p)
        assert np.array_equal(a.W, b.W)
        assert a.planted.same_as(b.planted)

    def test_saturation(self):
        # strictly non-intersecting placement caps out near nm/4 loops
        p = GenParams(n=4, m=4, f=0.25, rho=3.0, seed=0,
                      allow_constructive=False)
        with pytest.raises(SaturationError):
            random_loop_instance(p)

    def test_jitter_downgrades_certificate(self):
        p = GenParams(n=6, m=6, f=0.1, rho=0.5, seed=5, jitter=0.05)
        inst = random_loop_instance(p)
        assert inst.ground_energy is None
        assert inst.meta["certified"] is False
        # planted state should still be a local optimum at small noise
        assert is_local_minimum(inst, inst.planted)


class TestStructuredLoops:
    def make(self, seed=0, f=0.25, n=10, m=10, d=0.5, mix=None, rho=0.5):
        p = GenParams(n=n, m=m, f=f, rho=rho, seed=seed, mode="structured",
                      d=d, loop_mix=mix)
        return structured_loop_instance(p)

    def test_block_sums(self):
        inst = self.make(mix=(1, 1, 3))
        N1, N2, N3 = 1, 1, 3
        alpha = 1.0
        b1, b2, b3, b4 = block_sums(inst)
        assert b1 == pytest.approx((N1 + N2) - alpha * (N1 + N2 + N3))
        assert b2 == pytest.approx(2 * N2 + N3)
        assert b3 == pytest.approx(2 * N1 + N3)
        assert b4 == pytest.approx(N3)

    def test_block_sums_general(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            f = float(rng.uniform(0.01, 0.25))
            n = int(rng.integers(8, 13))
            N = round(0.5 * n)
            N1 = int(rng.integers(0, N + 1))
            N2 = int(rng.integers(0, N - N1 + 1))
            mix = (N1, N2, N - N1 - N2)
            inst = self.make(seed=int(rng.integers(2**32)), f=f, n=n, m=n,
                             mix=mix)
            alpha = alpha_from_f(f)
            b1, b2, b3, b4 = block_sums(inst)
            assert b1 == pytest.approx((N1 + N2) - alpha * N, abs=1e-9)
            assert b2 == pytest.approx(2 * N2 + mix[2], abs=1e-9)
            assert b3 == pytest.approx(2 * N1 + mix[2], abs=1e-9)
            assert b4 == pytest.approx(mix[2], abs=1e-9)

    def test_degenerate_at_alpha_one(self):
        inst = self.make(seed=11, f=0.25)
        other = b1b4_state(inst)
        assert energy(inst, other) == pytest.approx(inst.ground_energy, abs=1e-9)

    def test_gap_below_alpha_one(self):
        eps = 1e-3
        f = f_from_alpha(1.0 - eps)
        inst = self.make(seed=12, f=f)
        N = sum(inst.meta[k] for k in ("N1", "N2", "N3"))
        gap = energy(inst, b1b4_state(inst)) - inst.ground_energy
        assert gap == pytest.approx(2 * eps * N, abs=1e-9)

    def test_certificate(self):
        rng = np.random.default_rng(4)
        for _ in range(10):
            inst = self.make(seed=int(rng.integers(2**32)), f=0.2, n=9, m=9,
                             d=float(rng.choice([0.3, 0.5, 0.9])))
            _, e = brute_force_ground_state(inst)
            assert e == pytest.approx(inst.ground_energy, abs=1e-9)

    def test_negative_weights_confined_to_b1(self):
        inst = self.make(seed=13, f=0.2, d=0.3)
        n1, m1 = inst.meta["n1"], inst.meta["m1"]
        s0 = inst.planted
        W = inst.W * np.outer(s0.v, s0.h)
        assert np.all(W[n1:, :] >= 0)
        assert np.all(W[:, m1:] >= 0)

    def test_center_local_minimum_state(self):
        # with only center loops the flipped-block state is a local
        # minimum even below alpha = 1
        p = GenParams(n=10, m=10, f=0.2, rho=0.5, seed=21, mode="structured",
                      d=0.5, loop_mix=(0, 0, 5))
        inst = structured_loop_instance(p)
        assert is_local_minimum(inst, b1b4_state(inst))

    def test_infeasible_mix_raises(self):
        # d small enough that the left column block has a single column
        p = GenParams(n=6, m=6, f=0.2, rho=0.5, seed=0, mode="structured",
                      d=0.2, loop_mix=(3, 0, 0))
        with pytest.raises(SaturationError):
            structured_loop_instance(p)


class TestDecomposeLoop:
    def loop_matrix(self, rows, cols, alpha, neg_edge, n, m):
        W = np.zeros((n, m))
        l = len(rows)
        edges = []
        for t in range(l):
            edges.append((rows[t], cols[t]))
            edges.append((rows[(t + 1) % l], cols[t]))
        # edge list in traversal order: (i1,j1),(i2,j1),(i2,j2),...
        order = []
        for t in range(l):
            order.append((rows[t], cols[t]))
            order.append((rows[(t + 1) % l], cols[t]))
        for idx, (i, j) in enumerate(order):
            W[i, j] += -alpha if idx == neg_edge else 1.0
        return W

    def test_l2_single_atom(self):
        atoms = decompose_loop([0, 0, 1, 1], alpha=0.5, neg_edge=0)
        assert len(atoms) == 1
        W = atoms_to_matrix(atoms, 2, 2)
        assert W[0, 0] == -0.5
        assert W.sum() == pytest.approx(3 - 0.5)

    def test_l3_two_atoms(self):
        atoms = decompose_loop([0, 0, 1, 1, 2, 2], alpha=0.7, neg_edge=0)
        assert len(atoms) == 2
        W = atoms_to_matrix(atoms, 3, 3)
        assert np.count_nonzero(W) == 6
        assert np.isclose(W, -0.7).sum() == 1
        assert np.isclose(W, 1.0).sum() == 5

    def test_matrix_sum_equality(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            l = int(rng.integers(2, 7))
            rows = rng.permutation(8)[:l].tolist()
            cols = rng.permutation(8)[:l].tolist()
            alpha = float(rng.uniform(0.05, 1.0))
            neg_edge = int(rng.integers(0, 2 * l))
            cycle = [x for rc in zip(rows, cols) for x in rc]
            atoms = decompose_loop(cycle, alpha=alpha, neg_edge=neg_edge)
            assert len(atoms) == l - 1
            got = atoms_to_matrix(atoms, 8, 8)
            want = self.loop_matrix(rows, cols, alpha, neg_edge, 8, 8)
            assert np.allclose(got, want)

    def test_repeated_vertex_rejected(self):
        with pytest.raises(ValueError):
            decompose_loop([0, 0, 0, 1])


class TestUniformSat:
    def test_clause_count_and_weights(self):
        p = GenParams(n=8, m=8, f=0.25, rho=0.5, seed=6, mode="uniform-sat")
        sat = uniform_sat_instance(p)
        N = 4
        assert len(sat.clauses) == 8 * N
        assert all(c.weight == 2.0 for c in sat.clauses)

    def test_zero_loops(self):
        p = GenParams(n=4, m=4, f=0.25, rho=0.0, seed=0, mode="uniform-sat")
        assert uniform_sat_instance(p).clauses == ()

    def test_planted_violates_one_clause_per_loop(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            n = int(rng.integers(6, 11))
            p = GenParams(n=n, m=n, f=0.25, rho=0.4, seed=int(rng.integers(2**32)),
                          mode="uniform-sat")
            sat = uniform_sat_instance(p)
            N = round(0.4 * n)
            planted = np.array(sat.meta["planted"])
            sat_weight = satisfied_weight(sat, planted)
            # each loop's negative bond leaves exactly one weight-2 clause
            # unsatisfied; everything else holds
            assert sat.total_weight - sat_weight == pytest.approx(2 * N)
            violated = sum(1 for c in sat.clauses if not c.satisfied(planted))
            assert violated == N
