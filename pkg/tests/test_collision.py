import math

import numpy as np
import pytest

from scorepic.collision import (build_cell_index, collision_force,
                                collision_push)
from scorepic.pic import Grid
from scorepic.state import ParticleEnsemble

from oracles import brute_collision_force, symmetrized_weak_form


def random_ensemble(rng, n, dv, L=4 * math.pi):
    x = rng.uniform(0, L, n)
    v = rng.normal(size=(n, dv))
    w = np.full(n, L / n)
    return ParticleEnsemble(x=x, v=v, w=w)


class TestCellIndex:
    def test_all_in_one_cell(self):
        grid = Grid(8, 0.5)
        p = ParticleEnsemble(x=np.full(20, 0.1), v=np.zeros((20, 2)),
                             w=np.full(20, 0.2))
        ci = build_cell_index(p, grid)
        assert ci.bins[0].size == 20
        assert all(ci.bins[c].size == 0 for c in range(1, 8))

    def test_boundary_floor_convention(self):
        grid = Grid(8, 0.5)
        p = ParticleEnsemble(x=np.array([0.5]), v=np.zeros((1, 2)),
                             w=np.array([1.0]))
        ci = build_cell_index(p, grid)
        assert ci.bins[1].size == 1

    def test_partition(self):
        rng = np.random.default_rng(0)
        grid = Grid(13, 4 * math.pi / 13)
        p = random_ensemble(rng, 500, 2)
        ci = build_cell_index(p, grid)
        seen = np.concatenate(ci.bins)
        assert np.array_equal(np.sort(seen), np.arange(500))
        for c, b in enumerate(ci.bins):
            assert np.all(np.floor(p.x[b] / grid.eta).astype(int) == c)

    def test_tiny_grids_deduplicate_stencil(self):
        for M in (1, 2):
            grid = Grid(M, 4 * math.pi / M)
            p = ParticleEnsemble(x=np.linspace(0, grid.L, 10, endpoint=False),
                                 v=np.zeros((10, 2)), w=np.full(10, grid.L / 10))
            ci = build_cell_index(p, grid)
            nbr = ci.neighbors(0)
            assert nbr.size == np.unique(nbr).size  # no double counting


class TestCollisionForce:
    def test_constant_scores_vanish(self):
        rng = np.random.default_rng(1)
        grid = Grid(10, 4 * math.pi / 10)
        p = random_ensemble(rng, 200, 3)
        scores = np.tile([0.3, -1.2, 0.7], (200, 1))
        ci = build_cell_index(p, grid)
        U = collision_force(p, scores, ci, grid, gamma=-3.0)
        assert np.allclose(U, 0.0, atol=1e-14)

    def test_two_particle_hand_example(self):
        # co-located in x, dv(1,0,0), ds(0,1,0): A(e1) = diag(0,1,1) so
        # U1 = (0, psi(0)*w, 0) and U2 = -U1
        grid = Grid(4, 1.0)
        x = np.array([0.5, 0.5])
        v = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        s = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 0.0]])
        p = ParticleEnsemble(x=x, v=v, w=np.array([1.0, 1.0]))
        ci = build_cell_index(p, grid)
        U = collision_force(p, s, ci, grid, gamma=-3.0)
        psi0 = 1.0 / grid.eta
        assert np.allclose(U[0], [0.0, psi0, 0.0], atol=1e-14)
        assert np.allclose(U[1], -U[0], atol=1e-14)

    @pytest.mark.parametrize("dv", [2, 3])
    def test_binned_equals_brute_force(self, dv):
        rng = np.random.default_rng(2)
        for trial in range(5):
            n = int(rng.integers(10, 51))
            M = int(rng.integers(1, 9))
            L = float(rng.uniform(2.0, 10.0))
            grid = Grid(M, L / M)
            p = random_ensemble(rng, n, dv, L=L)
            s = rng.normal(size=(n, dv))
            ci = build_cell_index(p, grid)
            U = collision_force(p, s, ci, grid, gamma=-float(dv))
            U_ref = brute_collision_force(p.x, p.v, p.w, s, grid.eta, L,
                                          -float(dv))
            scale = max(1.0, np.max(np.abs(U_ref)))
            assert np.max(np.abs(U - U_ref)) <= 1e-13 * scale

    def test_non_finite_scores_rejected(self):
        grid = Grid(4, 1.0)
        p = random_ensemble(np.random.default_rng(3), 10, 2, L=4.0)
        s = np.zeros((10, 2))
        s[3, 1] = np.nan
        ci = build_cell_index(p, grid)
        with pytest.raises(ValueError, match="invalid score input"):
            collision_force(p, s, ci, grid, gamma=-2.0)

    @pytest.mark.parametrize("dv", [2, 3])
    def test_conservation_for_random_scores(self, dv):
        rng = np.random.default_rng(4)
        for n in (100, 1000):
            grid = Grid(8, 4 * math.pi / 8)
            p = random_ensemble(rng, n, dv)
            s = rng.normal(size=(n, dv)) * 3.0
            ci = build_cell_index(p, grid)
            U = collision_force(p, s, ci, grid, gamma=-float(dv))
            wU = p.w[:, None] * U
            mom_scale = max(np.max(np.abs(wU)), 1e-300) * n
            assert np.max(np.abs(wU.sum(axis=0))) <= 1e-10 * mom_scale
            energy = abs(float(np.sum(p.w * np.einsum("ij,ij->i", p.v, U))))
            e_scale = float(np.sum(p.w * np.linalg.norm(p.v, axis=1)
                                   * np.linalg.norm(U, axis=1)))
            assert energy <= 1e-10 * max(e_scale, 1e-300)

    def test_entropy_sign_with_consistent_scores(self):
        rng = np.random.default_rng(5)
        for dv in (2, 3):
            grid = Grid(6, 4 * math.pi / 6)
            p = random_ensemble(rng, 400, dv)
            s = rng.normal(size=(400, dv))
            ci = build_cell_index(p, grid)
            U = collision_force(p, s, ci, grid, gamma=-float(dv))
            h_dot = float(np.sum(p.w * np.einsum("ij,ij->i", s, U)))
            scale = float(np.sum(p.w * np.linalg.norm(s, axis=1)
                                 * np.linalg.norm(U, axis=1)))
            assert h_dot >= -1e-10 * max(scale, 1e-300)

    def test_symmetrized_weak_form_equivalence(self):
        rng = np.random.default_rng(6)
        for dv in (2, 3):
            n, L = 40, 6.0
            grid = Grid(5, L / 5)
            p = random_ensemble(rng, n, dv, L=L)
            s = rng.normal(size=(n, dv))
            phi = rng.normal(size=(n, dv))
            ci = build_cell_index(p, grid)
            U = collision_force(p, s, ci, grid, gamma=-float(dv))
            direct = float(np.sum(p.w * np.einsum("ij,ij->i", phi, U)))
            sym = symmetrized_weak_form(p.x, p.v, p.w, s, phi, grid.eta, L,
                                        -float(dv))
            assert direct == pytest.approx(sym, abs=1e-12 * max(1.0, abs(sym)))


class TestCollisionPush:
    def test_nu_zero_is_identity(self):
        p = ParticleEnsemble(x=np.zeros(3), v=np.ones((3, 2)), w=np.ones(3))
        collision_push(p, np.ones((3, 2)), 0.0, 0.1)
        assert np.allclose(p.v, 1.0)

    def test_zero_force_is_identity(self):
        p = ParticleEnsemble(x=np.zeros(3), v=np.ones((3, 2)), w=np.ones(3))
        collision_push(p, np.zeros((3, 2)), 0.7, 0.1)
        assert np.allclose(p.v, 1.0)

    def test_single_particle_arithmetic(self):
        p = ParticleEnsemble(x=np.zeros(1), v=np.zeros((1, 3)), w=np.ones(1))
        U = np.array([[1.0, 2.0, 0.0]])
        collision_push(p, U, 0.4, 0.02)
        assert np.allclose(p.v, [[-0.008, -0.016, 0.0]], atol=1e-15)
