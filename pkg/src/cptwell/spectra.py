"""Eigenvalues, eigenvectors, and reality-domain scans.

Two solver branches cover the whole coupling plane:

* real branch (`eigen_real`): when the matrix symmetrizes, all eigenvalues come
  from Sturm-count bisection on the symmetric form, and eigenvectors from
  inverse iteration; everything is real by construction.
* general branch (`eigen_general`): elsewhere, the eigenvalues are the roots of
  the characteristic-polynomial recurrence, found by Newton iteration with
  Maehly deflation and deterministic restarts.

Classification is shared: a spectrum counts as all-real when every |Im| lies at
or below ``reality_tol`` = 1e-9 * max(1, Gershgorin radius) (overridable), and
``min_gap`` is the smallest pairwise distance between the sorted values.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ConvergenceError, NumericalError
from .hamiltonian import SymmetrizedForm, build, symmetrize

REALITY_TOL_FACTOR = 1e-9
DEGENERACY_THRESHOLD = 1e-10

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Ordered eigenvalue list with reality classification.

    ``values`` holds all n eigenvalues (multiplicity included) sorted by real
    part, then imaginary part.
    """

    values: np.ndarray
    all_real: bool
    min_gap: float

    @property
    def n(self):
        return self.values.shape[0]

    def to_dict(self):
        return {
            "values": [{"re": float(z.real), "im": float(z.imag)} for z in self.values],
            "all_real": bool(self.all_real),
            "min_gap": float(self.min_gap),
        }


@dataclass(frozen=True, eq=False)
class DomainScan:
    """Per-cell reality classification over a coupling grid.

    Parallel arrays, one entry per scanned cell in row-major (lambda, mu)
    order.  ``complex_pairs`` is -1 for a cell whose solve failed; the failure
    message is kept in ``diagnostics`` and the scan continues.
    """

    lam: np.ndarray
    mu: np.ndarray
    all_real: np.ndarray
    complex_pairs: np.ndarray
    min_gap: np.ndarray
    diagnostics: list = field(default_factory=list)

    def rows(self):
        for i in range(self.lam.shape[0]):
            yield (
                float(self.lam[i]),
                float(self.mu[i]),
                bool(self.all_real[i]),
                int(self.complex_pairs[i]),
                float(self.min_gap[i]),
            )


def reality_tolerance(h, override=None):
    """Scale-aware threshold on |Im| below which a value counts as real."""
    if override is not None:
        return float(override)
    return REALITY_TOL_FACTOR * max(1.0, h.gershgorin_radius())


def _min_gap(values):
    n = values.shape[0]
    if n < 2:
        return float("inf")
    dist = np.abs(values[:, None] - values[None, :])
    dist[np.diag_indices(n)] = np.inf
    return float(dist.min())


def _sorted_values(values):
    order = np.lexsort((values.imag, values.real))
    return values[order]


def _classify(values, tol):
    values = _sorted_values(values)
    all_real = bool(np.abs(values.imag).max(initial=0.0) <= tol)
    return Spectrum(values, all_real, _min_gap(values))


def eigen_real(s, want_vectors=False):
    """All eigenvalues (ascending) of the symmetric form; optional vectors.

    Eigenvalues come from simultaneous Sturm-count bisection, eigenvectors from
    inverse iteration at the converged shifts, orthonormalized inside close
    clusters.  With vectors requested, returns (Spectrum, W) with W[:, k] the
    unit eigenvector of the k-th ascending eigenvalue, its first significant
    component made positive.
    """
    if not isinstance(s, SymmetrizedForm):
        raise TypeError("eigen_real expects a SymmetrizedForm")
    sd = np.ascontiguousarray(s.s_diag)
    so = np.ascontiguousarray(s.s_off)
    so2 = so * so
    lo, hi = s.gershgorin_bounds()
    span = max(hi - lo, 1.0)
    tiny = 2.3e-290 * max(1.0, float(so2.max(initial=0.0)))
    evals = kernels.bisect_spectrum(sd, so2, lo - 1e-12 * span, hi + 1e-12 * span, 62, tiny)
    values = evals.astype(complex)
    spec = Spectrum(values, True, _min_gap(values))
    if not want_vectors:
        return spec
    w = _inverse_iteration_vectors(sd, so, evals)
    return spec, w


def _fill_noise(out, state):
    for i in range(out.shape[0]):
        state = (1103515245 * state + 12345) % 2147483648
        out[i] = state / 2147483648.0 - 0.5
    out /= np.linalg.norm(out)
    return state


def _inverse_iteration_vectors(sd, so, evals):
    n = sd.shape[0]
    norm_s = float(np.abs(sd).max() + 2.0 * np.abs(so).max(initial=0.0))
    tiny = _EPS * max(1.0, norm_s)
    cluster_gap = 1e-6 * max(1.0, norm_s)
    w = np.empty((n, n))
    state = 1234567
    for k in range(n):
        vec = np.empty(n)
        state = _fill_noise(vec, state)
        shifts_tried = []
        ok = False
        for _ in range(6):
            shift = evals[k]
            shifts_tried.append(shift)
            vec = kernels.tridiag_solve_shifted(sd, so, shift, vec, tiny)
            nv = np.linalg.norm(vec)
            if not np.isfinite(nv) or nv == 0.0:
                vec = np.empty(n)
                state = _fill_noise(vec, state)
                continue
            vec = vec / nv
            # orthogonalize against already-accepted vectors of a close cluster
            for j in range(k - 1, -1, -1):
                if abs(evals[k] - evals[j]) > cluster_gap:
                    break
                vec -= (vec @ w[:, j]) * w[:, j]
            nv = np.linalg.norm(vec)
            if nv < 1e-3:
                # the cluster projection ate the iterate; restart from noise
                vec = np.empty(n)
                state = _fill_noise(vec, state)
                continue
            vec = vec / nv
            if _tridiag_residual(sd, so, evals[k], vec) <= 1e-10 * max(1.0, norm_s):
                ok = True
                break
        if not ok:
            raise ConvergenceError(
                f"inverse iteration stalled on eigenvalue index {k}",
                history=shifts_tried,
            )
        i0 = int(np.argmax(np.abs(vec) > 1e-12 * np.abs(vec).max()))
        if vec[i0] < 0.0:
            vec = -vec
        w[:, k] = vec
    return w


def _tridiag_residual(sd, so, e, v):
    r = (sd - e) * v
    r[:-1] += so * v[1:]
    r[1:] += so * v[:-1]
    return float(np.linalg.norm(r))


def char_poly(h, e):
    """det(H - e*I) via the three-term recurrence (complex-capable).

    For one site the determinant is just diag[0] - e; the recurrence handles
    that edge because the bond loop is empty.
    """
    diag = np.ascontiguousarray(h.diag)
    bonds = np.ascontiguousarray(h.bonds)
    p, _, _, nscale = kernels.charpoly_terms(diag, bonds, complex(e))
    if nscale:
        p = p * (2.0 ** (512.0 * nscale))
    return complex(p)


def _general_guesses(h):
    """Newton start points: the real spectrum at clamped couplings, nudged off axis."""
    lam = min(max(h.couplings.lam, -0.999), 0.999)
    mu = min(max(h.couplings.mu, -0.999), 0.999)
    clamped = build(h.n, (lam, mu))
    base = eigen_real(symmetrize(clamped)).values.real
    g = 0.02 * max(1.0, h.gershgorin_radius())
    guesses = base.astype(complex)
    signs = np.where(np.arange(h.n) % 2 == 0, 1.0, -1.0)
    guesses = guesses + 1j * g * signs
    return np.ascontiguousarray(guesses)


def _enforce_conjugate_pairs(values, tol):
    """Pair complex values with their conjugates and make the pairing exact.

    Real-coefficient determinants have exactly conjugate root pairs; the
    independently-converged iterates match to solver accuracy, and averaging
    the members removes the residual asymmetry.
    """
    values = values.copy()
    complex_idx = [i for i in range(values.shape[0]) if abs(values[i].imag) > tol]
    unpaired = set(complex_idx)
    for i in complex_idx:
        if i not in unpaired:
            continue
        target = np.conj(values[i])
        best_j = -1
        best_d = np.inf
        for j in unpaired:
            if j == i or values[j].imag * values[i].imag > 0:
                continue
            d = abs(values[j] - target)
            if d < best_d:
                best_d = d
                best_j = j
        scale = 1.0 + abs(values[i])
        if best_j < 0 or best_d > 1e-7 * scale:
            raise NumericalError(
                f"complex root {complex(values[i])} has no conjugate partner "
                f"(closest mismatch {float(best_d):.3e})"
            )
        re = 0.5 * (values[i].real + values[best_j].real)
        im = 0.5 * (abs(values[i].imag) + abs(values[best_j].imag))
        s = 1.0 if values[i].imag > 0 else -1.0
        values[i] = complex(re, s * im)
        values[best_j] = complex(re, -s * im)
        unpaired.discard(i)
        unpaired.discard(best_j)
    return values


def eigen_general(h, reality_tol=None):
    """All n complex eigenvalues of H for arbitrary couplings."""
    diag = np.ascontiguousarray(h.diag)
    bonds = np.ascontiguousarray(h.bonds)
    guesses = _general_guesses(h)
    rad = h.gershgorin_radius()
    roots, ok, info = kernels.newton_roots(
        diag, bonds, guesses, -rad, rad, rad, 120, 30, 20230817
    )
    if not ok.all():
        bad = int(np.nonzero(~ok)[0][0])
        raise ConvergenceError(
            f"root search failed on index {bad}: "
            f"|p|={float(info[bad, 0]):.3e} after {int(info[bad, 1])} iterations, "
            f"{int(info[bad, 2])} attempts",
            history=[complex(roots[bad])],
        )
    tol = reality_tolerance(h, reality_tol)
    values = _enforce_conjugate_pairs(roots, tol)
    return _classify(values, tol)


def spectrum_of(h, reality_tol=None):
    """Route to the right branch: real where symmetrizable, general otherwise."""
    try:
        s = symmetrize(h)
    except NumericalError:
        return eigen_general(h, reality_tol=reality_tol)
    return eigen_real(s)


def _count_complex_pairs(spec, tol):
    return int(np.count_nonzero(np.abs(spec.values.imag) > tol) // 2)


def scan_domain(n, lambda_grid, mu_grid, reality_tol=None):
    """Classify every (lambda, mu) cell of the product grid.

    Solver failures in single cells are recorded in ``diagnostics`` (with
    complex_pairs = -1 and min_gap = nan) and do not abort the scan.
    """
    lambda_grid = np.atleast_1d(np.asarray(lambda_grid, dtype=float))
    mu_grid = np.atleast_1d(np.asarray(mu_grid, dtype=float))
    if lambda_grid.size == 0 or mu_grid.size == 0:
        raise ValueError("scan grids must be non-empty")
    pairs = [(lam, mu) for lam in lambda_grid for mu in mu_grid]
    return _scan_pairs(n, pairs, reality_tol)


def scan_line(n, grid, sign, reality_tol=None):
    """Classify along the line mu = sign*lambda for lambda in ``grid``."""
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise ValueError("scan grid must be non-empty")
    pairs = [(lam, sign * lam) for lam in grid]
    return _scan_pairs(n, pairs, reality_tol)


def _scan_pairs(n, pairs, reality_tol):
    m = len(pairs)
    lam = np.empty(m)
    mu = np.empty(m)
    all_real = np.zeros(m, dtype=bool)
    complex_pairs = np.zeros(m, dtype=np.int64)
    min_gap = np.full(m, np.nan)
    diagnostics = []
    for i, (la, m_) in enumerate(pairs):
        lam[i] = la
        mu[i] = m_
        h = build(n, (la, m_))
        tol = reality_tolerance(h, reality_tol)
        try:
            spec = spectrum_of(h, reality_tol=tol)
        except NumericalError as exc:
            diagnostics.append((i, la, m_, str(exc)))
            complex_pairs[i] = -1
            continue
        all_real[i] = spec.all_real
        complex_pairs[i] = _count_complex_pairs(spec, tol)
        min_gap[i] = spec.min_gap
    return DomainScan(lam, mu, all_real, complex_pairs, min_gap, diagnostics)
