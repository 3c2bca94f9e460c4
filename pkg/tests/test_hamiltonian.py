"""Construction and symmetrization of the boundary-coupled tridiagonal well.

Oracles used here:

* hand-expanded band entries for small sizes (exact in floating point,
  asserted with ``==``),
* dense reconstruction through plain numpy similarity transforms,
* Gershgorin interval arithmetic recomputed inline.
"""

import json

import numpy as np
import pytest

from cptwell.errors import NotSymmetrizable, ValidationError
from cptwell.hamiltonian import (
    CouplingPair,
    DiscreteHamiltonian,
    SymmetrizedForm,
    build,
    dense,
    dense_dict,
    symmetrize,
    tridiagonal_dict,
)


def well(n, lam, mu=None):
    return build(n, CouplingPair(lam, lam if mu is None else mu))


def sym_dense(s):
    a = np.diag(s.s_diag)
    idx = np.arange(s.n - 1)
    a[idx, idx + 1] = s.s_off
    a[idx + 1, idx] = s.s_off
    return a


class TestBuild:
    def test_zero_coupling_gives_the_dirichlet_laplacian_bands(self):
        h = well(3, 0.0)
        assert np.array_equal(h.diag, [2.0, 2.0, 2.0])
        assert np.array_equal(h.super, [-1.0, -1.0])
        assert np.array_equal(h.sub, [-1.0, -1.0])

    def test_equal_couplings_skew_both_end_bonds_the_same_way(self):
        h = well(4, 0.5)
        assert np.array_equal(h.super, [-1.5, -1.0, -1.5])
        assert np.array_equal(h.sub, [-0.5, -1.0, -0.5])
        assert np.array_equal(h.diag, [2.0, 2.0, 2.0, 2.0])

    def test_opposite_couplings_skew_the_end_bonds_oppositely(self):
        h = well(5, 0.3, -0.3)
        assert np.array_equal(h.super, [-1.3, -1.0, -1.0, -0.7])
        assert np.array_equal(h.sub, [-0.7, -1.0, -1.0, -1.3])

    def test_two_site_well_loads_both_couplings_on_the_single_bond(self):
        h = well(2, 0.2, 0.7)
        assert h.super[0] == -1.0 - 0.2
        assert h.sub[0] == -1.0 + 0.7
        assert abs(h.super[0] + 1.2) <= 1e-15
        assert abs(h.sub[0] + 0.3) <= 1e-15

    def test_interior_bonds_stay_unperturbed(self):
        h = well(9, 0.8, -0.4)
        assert np.array_equal(h.super[1:-1], -np.ones(6))
        assert np.array_equal(h.sub[1:-1], -np.ones(6))

    def test_dimension_below_two_is_rejected(self):
        with pytest.raises(ValidationError):
            well(1, 0.0)
        with pytest.raises(ValidationError):
            well(0, 0.5)

    def test_non_finite_couplings_are_rejected(self):
        with pytest.raises(ValidationError):
            CouplingPair(float("nan"), 0.0)
        with pytest.raises(ValidationError):
            CouplingPair(0.0, float("inf"))

    def test_plain_pair_is_accepted_in_place_of_the_dataclass(self):
        h = build(4, (0.5, 0.5))
        assert (h.couplings.lam, h.couplings.mu) == (0.5, 0.5)
        assert h.super[0] == -1.5

    def test_first_corner_pair_sums_to_minus_two_and_differs_by_twice_lambda(self):
        for lam in (-0.9, -0.3, 0.1, 0.45, 0.97, 1.3):
            h = well(6, lam, -0.2)
            assert abs(h.super[0] + h.sub[0] + 2.0) <= 4e-16
            assert abs(h.super[0] - h.sub[0] + 2.0 * lam) <= 4e-16 * (1.0 + abs(lam))

    def test_last_corner_pair_sums_to_minus_two_and_differs_by_twice_mu(self):
        for mu in (-1.1, -0.6, 0.2, 0.8):
            h = well(6, 0.3, mu)
            assert abs(h.super[-1] + h.sub[-1] + 2.0) <= 4e-16
            assert abs(h.super[-1] - h.sub[-1] + 2.0 * mu) <= 4e-16 * (1.0 + abs(mu))

    def test_bonds_are_the_entrywise_band_products(self):
        h = well(5, 0.4, -0.7)
        assert np.array_equal(h.bonds, h.super * h.sub)

    def test_exchange_flip_conjugates_to_the_transpose_exactly(self):
        # J H J == H^T entrywise when mu = lambda, also outside |lambda| < 1.
        for n, lam in ((2, 0.5), (3, 0.5), (6, -0.8), (7, 1.3), (12, 0.05)):
            a = dense(well(n, lam))
            j = np.fliplr(np.eye(n))
            assert np.array_equal(j @ a @ j, a.T)

    def test_gershgorin_radius_encloses_every_numpy_eigenvalue(self):
        for n, lam, mu in ((4, 0.9, -0.6), (8, 1.4, 1.4), (5, -1.2, 0.3)):
            h = well(n, lam, mu)
            r = h.gershgorin_radius()
            ev = np.linalg.eigvals(dense(h))
            assert np.all(np.abs(ev - 2.0) <= r + 1e-12)

    def test_band_arrays_are_read_only(self):
        h = well(4, 0.2)
        with pytest.raises(ValueError):
            h.diag[0] = 99.0


class TestSymmetrize:
    def test_zero_coupling_is_already_symmetric_with_unit_weights(self):
        s = symmetrize(well(4, 0.0))
        assert np.array_equal(s.d, np.ones(4))
        assert np.array_equal(s.s_diag, np.full(4, 2.0))
        assert np.array_equal(s.s_off, -np.ones(3))

    def test_three_site_example_has_geometric_weights_and_sqrt_bond_offdiagonal(self):
        s = symmetrize(well(3, 0.5))
        root3 = np.sqrt(3.0)
        assert abs(s.s_off[0] + root3 / 2.0) <= 1e-15
        assert abs(s.s_off[1] + root3 / 2.0) <= 1e-15
        assert abs(s.d[0] - 1.0) <= 0.0
        assert abs(s.d[1] - 1.0 / root3) <= 1e-15
        assert abs(s.d[2] - 1.0 / 3.0) <= 1e-15

    def test_sign_indefinite_bond_is_rejected_with_location_and_product(self):
        with pytest.raises(NotSymmetrizable) as info:
            symmetrize(well(2, 2.0))
        assert info.value.bond_index == 0
        assert info.value.product <= 0.0

    def test_unit_coupling_kills_a_bond_and_is_rejected(self):
        with pytest.raises(NotSymmetrizable):
            symmetrize(well(5, 1.0))

    def test_similarity_reconstruction_matches_the_symmetric_bands(self):
        for n, lam, mu in ((2, 0.5, 0.5), (5, -0.7, 0.2), (9, 0.9, -0.9), (6, 0.3, 0.8)):
            h = well(n, lam, mu)
            s = symmetrize(h)
            rebuilt = np.diag(1.0 / s.d) @ dense(h) @ np.diag(s.d)
            assert np.max(np.abs(rebuilt - sym_dense(s))) <= 1e-14

    def test_symmetrized_spectrum_matches_the_general_eigenvalues(self):
        for n, lam, mu in ((6, 0.6, -0.6), (11, -0.85, 0.1)):
            h = well(n, lam, mu)
            s = symmetrize(h)
            a = np.sort(np.linalg.eigvalsh(sym_dense(s)))
            b = np.sort(np.linalg.eigvals(dense(h)).real)
            assert np.max(np.abs(a - b)) <= 1e-12

    def test_gershgorin_bounds_bracket_the_symmetric_spectrum(self):
        s = symmetrize(well(7, 0.8, -0.5))
        lo, hi = s.gershgorin_bounds()
        ev = np.linalg.eigvalsh(sym_dense(s))
        assert lo <= ev[0] and ev[-1] <= hi


class TestSerialization:
    def test_tridiagonal_dict_carries_the_bands_and_couplings(self):
        h = well(3, 0.25, -0.5)
        d = tridiagonal_dict(h)
        assert d["n"] == 3
        assert d["lambda"] == 0.25
        assert d["mu"] == -0.5
        assert d["diag"] == [2.0, 2.0, 2.0]
        assert d["super"] == [-1.25, -0.5]
        assert d["sub"] == [-0.75, -1.5]
        json.dumps(d)

    def test_dense_dict_rows_match_the_dense_matrix(self):
        h = well(4, 0.6)
        d = dense_dict(h)
        assert d["n"] == 4
        assert np.array_equal(np.asarray(d["rows"]), dense(h))
        json.dumps(d)

    def test_dense_places_bands_and_zeros_elsewhere(self):
        h = well(5, 0.3, -0.8)
        a = dense(h)
        assert np.array_equal(np.diag(a), h.diag)
        assert np.array_equal(np.diag(a, 1), h.super)
        assert np.array_equal(np.diag(a, -1), h.sub)
        off = a - np.diag(np.diag(a)) - np.diag(np.diag(a, 1), 1) - np.diag(np.diag(a, -1), -1)
        assert np.count_nonzero(off) == 0
