"""Hamiltonian assembly, sector structure, and the rotated frame."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.linalg import eigvalsh

from finitejc.hamiltonians import (
    beam_splitter_frame,
    bosonic_mode_model,
    build_bosonic_hamiltonian,
    build_excitation_operator,
    build_finite_hamiltonian,
    dressed_states,
    elimination_angle,
    finite_mode_model,
    model_submatrix,
    sector_block,
    sector_matrix,
)
from finitejc.states import (
    ModelParams,
    flat_index,
    sector_basis,
    sector_decomposition,
)
from finitejc.su2 import build_spin_rep

SIGMA_Z = np.diag([-1.0, 1.0])
SIGMA_MINUS = np.array([[0.0, 1.0], [0.0, 0.0]])


def params_for(j, **kw):
    base = dict(j=j, omega_x=1.0, omega_y=1.0, omega_a=1.0, g_x=1.0, g_y=1.0)
    base.update(kw)
    return ModelParams(**base)


FIG4 = dict(omega_x=1.0, omega_y=0.9, omega_a=0.1, g_x=0.6, g_y=0.5)


def kron_oracle(params):
    """Independent dense construction straight from the su(2) matrices.

    Operators act as atom (x) mode-x (x) mode-y, matching the flat index
    atom*D^2 + n_x*D + n_y.
    """
    rep = build_spin_rep(params.j)
    d = rep.dim
    eye_mode = np.eye(d)
    eye_atom = np.eye(2)
    two_j = 2.0 * params.j

    def field(op_x, op_y):
        return np.kron(eye_atom, np.kron(op_x, op_y))

    ladder_fall = rep.Jplus @ rep.Jminus
    h_free = (
        (params.omega_x / two_j) * field(ladder_fall, eye_mode)
        + (params.omega_y / two_j) * field(eye_mode, ladder_fall)
        + 0.5 * params.omega_a * np.kron(SIGMA_Z, np.eye(d * d))
    )
    raise_x = np.kron(SIGMA_MINUS, np.kron(rep.Jplus, eye_mode))
    raise_y = np.kron(SIGMA_MINUS, np.kron(eye_mode, rep.Jplus))
    v_int = (params.g_x / np.sqrt(two_j)) * (raise_x + raise_x.conj().T) + (
        params.g_y / np.sqrt(two_j)
    ) * (raise_y + raise_y.conj().T)

    number = np.diag(np.arange(d, dtype=float))
    n_op = (
        field(number, eye_mode)
        + field(eye_mode, number)
        + np.kron(np.diag([0.0, 1.0]), np.eye(d * d))
    )
    return h_free, v_int, n_op


class TestFiniteAssembly:
    @pytest.mark.parametrize("j", [1, 2, 3])
    def test_matches_kron_oracle(self, j):
        rng = np.random.default_rng(7 + j)
        params = params_for(
            j,
            omega_x=rng.uniform(0.2, 2.0),
            omega_y=rng.uniform(0.2, 2.0),
            omega_a=rng.uniform(0.0, 2.0),
            g_x=rng.uniform(0.0, 1.5),
            g_y=rng.uniform(0.0, 1.5),
        )
        hset = build_finite_hamiltonian(params)
        h_free, v_int, n_op = kron_oracle(params)
        assert_allclose(hset.dense("free"), h_free, atol=1e-14)
        assert_allclose(hset.dense("interaction"), v_int, atol=1e-14)
        assert_allclose(hset.dense("excitation"), n_op, atol=1e-14)
        assert_allclose(hset.dense("total"), h_free + v_int, atol=1e-14)

    def test_free_diagonal_entry(self):
        params = params_for(1, omega_a=0.0, g_x=0.0, g_y=0.0)
        hset = build_finite_hamiltonian(params)
        dense = hset.dense("total")
        assert np.count_nonzero(dense - np.diag(np.diag(dense))) == 0
        # |n_x=1, n_y=0>: (omega/2j) * n * (2j - n + 1) = (1/2)*1*2 = 1
        idx = flat_index(1, 1, 0, "g")
        assert dense[idx, idx] == 1.0

    def test_hermitian(self):
        hset = build_finite_hamiltonian(params_for(3, **FIG4))
        for part in ("total", "free", "interaction", "excitation"):
            m = hset.dense(part)
            assert np.max(np.abs(m - m.conj().T)) < 1e-12

    def test_total_is_sum(self):
        hset = build_finite_hamiltonian(params_for(2, **FIG4))
        diff = hset.H_total - (hset.H_free + hset.V_int)
        assert np.max(np.abs(diff.toarray())) == 0.0

    def test_uncoupled_commutes_exactly(self):
        params = params_for(2, g_x=0.0, g_y=0.0)
        hset = build_finite_hamiltonian(params)
        comm = hset.H_total @ hset.N_op - hset.N_op @ hset.H_total
        assert comm.nnz == 0 or np.max(np.abs(comm.toarray())) == 0.0
        # diagonal H also commutes with each mode number separately
        dense = hset.dense("total")
        assert np.count_nonzero(dense - np.diag(np.diag(dense))) == 0

    def test_dense_guard(self):
        hset = build_finite_hamiltonian(params_for(40))
        with pytest.raises(ValueError):
            hset.dense("total")


class TestExcitationOperator:
    def test_diagonal_values(self):
        n_op = build_excitation_operator(2).toarray().real
        assert n_op[flat_index(2, 0, 0, "g"), flat_index(2, 0, 0, "g")] == 0
        for n_x, n_y in [(0, 0), (1, 2), (3, 1)]:
            idx = flat_index(2, n_x, n_y, "e")
            assert n_op[idx, idx] == n_x + n_y + 1

    def test_spectrum_multiset_matches_sector_sizes(self):
        diag = build_excitation_operator(1).diagonal().real.astype(int)
        counts = np.bincount(diag)
        sizes = [len(s) for s in sector_decomposition(1)]
        assert counts.tolist() == sizes

    def test_rejects_bad_label(self):
        with pytest.raises(ValueError):
            build_excitation_operator(0)


class TestBosonicAssembly:
    def test_free_diagonal(self):
        params = params_for(1, omega_x=1.3, omega_y=0.7, omega_a=0.4, g_x=0.0, g_y=0.0)
        hset = build_bosonic_hamiltonian(params, cutoff=4)
        dense = hset.dense("total")
        assert np.count_nonzero(dense - np.diag(np.diag(dense))) == 0
        for atom, sign in (("g", -1.0), ("e", 1.0)):
            for n_x in range(4):
                for n_y in range(4):
                    idx = (0 if atom == "g" else 16) + n_x * 4 + n_y
                    expected = 1.3 * n_x + 0.7 * n_y + sign * 0.2
                    assert abs(dense[idx, idx] - expected) < 1e-14

    def test_hermitian(self):
        hset = build_bosonic_hamiltonian(params_for(1, **FIG4), cutoff=6)
        m = hset.dense("total")
        assert np.max(np.abs(m - m.conj().T)) < 1e-12

    def test_ground_sector_energy(self):
        hset = build_bosonic_hamiltonian(params_for(5), cutoff=40)
        vacuum = sector_basis(None, 0, mode_dim=40)
        block = sector_block(hset, vacuum)
        assert block.shape == (1, 1)
        assert abs(block[0, 0] - (-0.5)) < 1e-14

    def test_bad_cutoff(self):
        with pytest.raises(ValueError):
            build_bosonic_hamiltonian(params_for(1), cutoff=1)


class TestSectorStructure:
    def test_off_sector_elements_structurally_zero(self):
        hset = build_finite_hamiltonian(params_for(3, **FIG4))
        labels = hset.N_op.diagonal().real
        coo = hset.H_total.tocoo()
        assert np.all(labels[coo.row] == labels[coo.col])

    def test_j1_first_sector_is_3x3(self):
        hset = build_finite_hamiltonian(params_for(1))
        block = sector_block(hset, sector_basis(1, 1))
        assert block.shape == (3, 3)

    def test_uncoupled_block_diagonal(self):
        hset = build_finite_hamiltonian(params_for(2, g_x=0.0, g_y=0.0))
        block = sector_block(hset, sector_basis(2, 3))
        assert np.count_nonzero(block - np.diag(np.diag(block))) == 0

    def test_block_spectra_reproduce_dense_spectrum(self):
        hset = build_finite_hamiltonian(params_for(2, **FIG4))
        pieces = [
            eigvalsh(sector_block(hset, s)) for s in sector_decomposition(2)
        ]
        assert_allclose(
            np.sort(np.concatenate(pieces)),
            eigvalsh(hset.dense("total")),
            atol=1e-8,
        )

    def test_sector_matrix_equals_sector_block(self):
        params = params_for(3, **FIG4)
        hset = build_finite_hamiltonian(params)
        model = finite_mode_model(params)
        for sector in sector_decomposition(3):
            assert_allclose(
                sector_matrix(model, sector),
                sector_block(hset, sector),
                atol=1e-14,
            )

    def test_index_mismatch_rejected(self):
        hset = build_finite_hamiltonian(params_for(1))
        big_sector = sector_basis(3, 2)
        with pytest.raises(ValueError):
            sector_block(hset, big_sector)

    def test_randomized_conservation(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            j = int(rng.choice([1, 2, 5, 10]))
            params = params_for(
                j,
                omega_x=rng.uniform(0.2, 2.0),
                omega_y=rng.uniform(0.2, 2.0),
                omega_a=rng.uniform(0.0, 2.0),
                g_x=rng.uniform(0.0, 1.5),
                g_y=rng.uniform(0.0, 1.5),
            )
            hset = build_finite_hamiltonian(params)
            comm = hset.H_total @ hset.N_op - hset.N_op @ hset.H_total
            worst = 0.0 if comm.nnz == 0 else np.max(np.abs(comm.data))
            assert worst < 1e-10


class TestDressedStates:
    def test_vacuum_sector(self):
        hset = build_finite_hamiltonian(params_for(2, **FIG4))
        values, vectors = dressed_states(hset, sector_basis(2, 0))
        assert values.shape == (1,)
        assert abs(values[0] - (-0.05)) < 1e-14
        assert abs(np.linalg.norm(vectors[:, 0]) - 1.0) < 1e-12

    def test_resonant_sector_symmetric_about_center(self):
        hset = build_finite_hamiltonian(params_for(1, g_x=0.3, g_y=0.3))
        values, _ = dressed_states(hset, sector_basis(1, 1))
        center = 0.5  # shared free energy of the three sector states
        assert abs(values[1] - center) < 1e-12
        assert abs((values[0] + values[2]) - 2 * center) < 1e-12
        assert values[0] < center < values[2]

    @pytest.mark.parametrize("total", [0, 1, 3, 5])
    def test_eigenpair_residuals(self, total):
        hset = build_finite_hamiltonian(params_for(2, **FIG4))
        values, vectors = dressed_states(hset, sector_basis(2, total))
        assert np.all(np.diff(values) >= 0)
        residual = hset.H_total @ vectors - vectors * values[None, :]
        assert np.max(np.abs(residual)) < 1e-10
        gram = vectors.conj().T @ vectors
        assert_allclose(gram, np.eye(len(values)), atol=1e-12)


class TestModelConvergence:
    def test_elementwise_rate_toward_bosonic(self):
        members = [
            (n_x, n_y, atom)
            for atom in ("g", "e")
            for n_x in range(6)
            for n_y in range(6)
        ]
        base = dict(omega_x=1.0, omega_y=0.9, omega_a=0.1, g_x=0.6, g_y=0.5)
        reference = model_submatrix(
            bosonic_mode_model(params_for(1, **base), cutoff=8), members
        )
        sizes = np.array([50, 200, 800])
        errors = []
        for j in sizes:
            sub = model_submatrix(finite_mode_model(params_for(j, **base)), members)
            errors.append(np.max(np.abs(sub - reference)))
        errors = np.array(errors)
        assert np.all(np.diff(errors) < 0)
        slope = np.polyfit(np.log(sizes), np.log(errors), 1)[0]
        assert -slope >= 0.9

    def test_submatrix_rejects_duplicates_and_bad_range(self):
        model = finite_mode_model(params_for(1))
        with pytest.raises(ValueError):
            model_submatrix(model, [(0, 0, "g"), (0, 0, "g")])
        with pytest.raises(ValueError):
            model_submatrix(model, [(5, 0, "g")])


class TestBeamSplitterFrame:
    def test_zero_angle_identity(self):
        params = params_for(1, **FIG4)
        frame = beam_splitter_frame(params, 0.0, cutoff=5)
        hset = build_bosonic_hamiltonian(params, cutoff=5)
        assert np.array_equal(frame.H_rotated, hset.dense("total"))
        assert frame.analytic_mismatch < 1e-12

    def test_quarter_turn_swaps_frequencies(self):
        params = params_for(1, omega_x=1.0, omega_y=0.7, omega_a=0.3, g_x=0.0, g_y=0.0)
        frame = beam_splitter_frame(params, math.pi / 2, cutoff=7)
        assert abs(frame.omega_bar_x - 0.7) < 1e-12
        assert abs(frame.omega_bar_y - 1.0) < 1e-12
        assert frame.analytic_mismatch < 1e-8

    @pytest.mark.parametrize("theta", np.linspace(-1.2, 1.2, 7).tolist())
    def test_spectrum_preserved_and_analytic_matches(self, theta):
        params = params_for(1, **FIG4)
        frame = beam_splitter_frame(params, theta, cutoff=9)
        hset = build_bosonic_hamiltonian(params, cutoff=9)
        assert_allclose(
            eigvalsh(frame.H_rotated), eigvalsh(hset.dense("total")), atol=1e-8
        )
        assert frame.analytic_mismatch < 1e-8

    def test_rotated_coefficients_follow_mode_rotation(self):
        params = params_for(1, **FIG4)
        theta = 0.37
        frame = beam_splitter_frame(params, theta, cutoff=6)
        c, s = math.cos(theta), math.sin(theta)
        assert abs(frame.g_bar_x - (0.6 * c + 0.5 * s)) < 1e-15
        assert abs(frame.g_bar_y - (0.5 * c - 0.6 * s)) < 1e-15
        assert abs(frame.g_bar_cross - (0.9 - 1.0) * c * s) < 1e-15

    def test_cutoff_guards(self):
        params = params_for(1, **FIG4)
        with pytest.raises(ValueError):
            beam_splitter_frame(params, 0.1, cutoff=1)
        with pytest.raises(ValueError):
            beam_splitter_frame(params, 0.1, cutoff=80)


class TestEliminationAngle:
    def test_trivial_and_symmetric(self):
        assert elimination_angle(0.8, 0.0) == 0.0
        assert abs(elimination_angle(0.5, 0.5) - math.pi / 4) < 1e-15

    def test_both_zero_rejected(self):
        with pytest.raises(ValueError):
            elimination_angle(0.0, 0.0)

    def test_eliminates_y_coupling(self):
        params = params_for(1, **FIG4)
        theta = elimination_angle(params.g_x, params.g_y)
        frame = beam_splitter_frame(params, theta, cutoff=10)
        assert frame.y_coupling_norm < 1e-10
        assert abs(frame.g_bar_y) < 1e-15
        assert abs(frame.g_bar_x - math.sqrt(0.61)) < 1e-10
        assert frame.analytic_mismatch < 1e-8

    def test_pure_y_coupling(self):
        theta = elimination_angle(0.0, 0.4)
        assert abs(theta - math.pi / 2) < 1e-15
        params = params_for(1, omega_x=1.0, omega_y=0.9, omega_a=0.1, g_x=0.0, g_y=0.4)
        frame = beam_splitter_frame(params, theta, cutoff=8)
        assert frame.y_coupling_norm < 1e-10
        assert abs(frame.g_bar_x - 0.4) < 1e-12
