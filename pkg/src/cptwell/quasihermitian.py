"""Biorthogonal spectral machinery: metric Theta, charge C, hermitizing Omega.

A non-symmetric H with real simple spectrum carries a biorthogonal pair of
eigenbases: right vectors H r_k = E_k r_k and left vectors H^T l_k = E_k l_k
with l_j^T r_k = mu_k delta_jk.  Both families come from one symmetric
eigenproblem through the diagonal similarity S = D^-1 H D of the symmetrized
form: r_k = D w_k and l_k = D^-1 w_k, so left and right vectors agree up to
the componentwise weight D^-2.

On top of that basis the module assembles the operator pair fixing the
physical inner product of the well:

* charge C = sum_n omega_n r_n l_n^T with omega_n = eps_n / mu_n, the unique
  involution (C^2 = I) commuting with H whose sign pattern eps makes every
  kappa_n^2 = omega_n / (mu_n nu_n) positive, where nu expands the inverse
  pseudometric P^-1 = sum_m nu_m r_m r_m^T;
* metric Theta = P C, symmetric positive definite inside the open coupling
  square, in which H is self-adjoint;
* hermitizer Omega with Omega^T Omega = Theta, mapping H to the explicitly
  symmetric Omega H Omega^-1.

Closed forms on the mu = +lambda line use alpha = (1 - lambda)/(1 + lambda):
P = J, C antidiagonal with corners 1/alpha and alpha (square roots of those
corners at n = 2, where the two boundary weights merge), and Theta = P C
diagonal.  Everything degenerates at |lambda| = 1, the exceptional point.

Conventions: eigenvectors unit Euclidean norm with first significant
component positive; matrix norms are max-abs-entry; order Theta = P times C.
"""

from dataclasses import dataclass

import numpy as np

from .dieudonne import PseudometricBasis
from .errors import (
    DegenerateSpectrum,
    FactorizationError,
    InadmissiblePseudometric,
    NotDyadRepresentable,
    NumericalError,
    ValidationError,
)
from .hamiltonian import CouplingPair, DiscreteHamiltonian, build, dense, symmetrize
from .spectra import DEGENERACY_THRESHOLD, eigen_real

CONSTRUCTION_TOL = 1e-12
IDENTITY_TOL = 1e-10
ASSEMBLY_TOL = 1e-9
OVERLAP_FLOOR = 1e-12


def _entry_norm(a):
    return float(np.abs(a).max(initial=0.0))


@dataclass(frozen=True, eq=False)
class BiorthogonalSystem:
    """Paired right/left eigenbases r_k, l_k with overlaps mu_k = l_k^T r_k.

    Columns of ``right`` and ``left`` are unit-norm and eigenvalue-ordered
    (ascending); ``values`` holds the shared eigenvalues.  With the sign
    convention both transported from one symmetric eigenvector, every overlap
    is positive.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    overlaps: np.ndarray

    @property
    def n(self):
        return self.values.shape[0]

    def projector(self, k):
        """Oblique spectral projector r_k l_k^T / mu_k onto the k-th mode."""
        return np.outer(self.right[:, k], self.left[:, k]) / self.overlaps[k]

    def to_dict(self):
        return {
            "values": [float(v) for v in self.values],
            "overlaps": [float(m) for m in self.overlaps],
            "right": [[float(v) for v in row] for row in self.right],
            "left": [[float(v) for v in row] for row in self.left],
        }


@dataclass(frozen=True, eq=False)
class ChargeAssembly:
    """Spectral charge C = sum_n omega_n r_n l_n^T and its coefficient set.

    ``nu`` expands the inverse pseudometric over right dyads, ``signs`` is
    eps = sign(nu), ``omega`` = eps/mu, and ``kappa_sq`` = omega/(mu nu) > 0
    are the metric weights; the two coefficient identities
    omega = mu nu kappa_sq and mu omega^2 = 1/mu hold by construction.
    """

    nu: np.ndarray
    omega: np.ndarray
    kappa_sq: np.ndarray
    signs: np.ndarray
    c: np.ndarray

    def to_dict(self):
        return {
            "nu": [float(v) for v in self.nu],
            "omega": [float(v) for v in self.omega],
            "kappa_sq": [float(v) for v in self.kappa_sq],
            "signs": [int(s) for s in self.signs],
            "c": [[float(v) for v in row] for row in self.c],
        }


@dataclass(frozen=True, eq=False)
class OperatorTriple:
    """Pseudometric P, charge C and metric Theta = P C for one Hamiltonian.

    ``residual_dieudonne_theta`` is max|H^T Theta - Theta H|,
    ``residual_involution`` is max|C^2 - I| and ``positivity`` the smallest
    eigenvalue of Theta (positive exactly when the metric is admissible).
    """

    p: np.ndarray
    c: np.ndarray
    theta: np.ndarray
    residual_dieudonne_theta: float
    residual_involution: float
    positivity: float

    def to_dict(self):
        return {
            "p": [[float(v) for v in row] for row in self.p],
            "c": [[float(v) for v in row] for row in self.c],
            "theta": [[float(v) for v in row] for row in self.theta],
            "residual_dieudonne_theta": float(self.residual_dieudonne_theta),
            "residual_involution": float(self.residual_involution),
            "positivity": float(self.positivity),
        }


@dataclass(frozen=True, eq=False)
class AnsatzMetric:
    """Candidate metric from a coefficient vector over a pseudometric basis.

    ``positive`` certifies positive definiteness (Cholesky success, seconded
    by the smallest eigenvalue); an indefinite result is a property of the
    chosen coefficients and is reported here rather than raised.
    ``residual_bound`` bounds the intertwining defect by linearity when the
    basis carries per-element residuals.
    """

    theta: np.ndarray
    positive: bool
    smallest_eigenvalue: float
    residual_bound: float

    def to_dict(self):
        return {
            "theta": [[float(v) for v in row] for row in self.theta],
            "positive": bool(self.positive),
            "smallest_eigenvalue": float(self.smallest_eigenvalue),
            "residual_bound": float(self.residual_bound),
        }


@dataclass(frozen=True, eq=False)
class SymmetryReport:
    """Residual record of the full symmetry algebra for one (H, P, C, Theta).

    All norms are max-abs-entry; nonzero values report broken identities
    without judging them (a pseudometric of the wrong coupling line simply
    shows its mismatch here).
    """

    residual_p: float
    residual_theta: float
    residual_commutator: float
    residual_involution: float
    theta_min_eig: float

    def to_dict(self):
        return {
            "residual_p": float(self.residual_p),
            "residual_theta": float(self.residual_theta),
            "residual_commutator": float(self.residual_commutator),
            "residual_involution": float(self.residual_involution),
            "theta_min_eig": float(self.theta_min_eig),
        }


def biorthogonalize(h):
    """Right and left eigenbases of h with their biorthogonal overlaps.

    Both families are transported from the symmetrized form S = D^-1 H D:
    if S w = E w then H (D w) = E (D w) and H^T (D^-1 w) = E (D^-1 w).
    Requires couplings inside the open unit square (real spectrum branch)
    and a simple spectrum.
    """
    if not isinstance(h, DiscreteHamiltonian):
        raise ValidationError("biorthogonalize expects a DiscreteHamiltonian")
    sym = symmetrize(h)
    spec, w = eigen_real(sym, want_vectors=True)
    scale = max(1.0, h.gershgorin_radius())
    if spec.min_gap <= DEGENERACY_THRESHOLD * scale:
        raise DegenerateSpectrum(
            f"minimum eigenvalue gap {spec.min_gap:.3e} at n={h.n}, "
            f"lambda={h.couplings.lam}, mu={h.couplings.mu}; biorthogonal "
            "pairing is ill-defined"
        )
    values = spec.values.real.copy()
    right = w * sym.d[:, None]
    left = w / sym.d[:, None]
    right = right / np.linalg.norm(right, axis=0)
    left = left / np.linalg.norm(left, axis=0)
    overlaps = np.einsum("ik,ik->k", left, right)
    hd = dense(h)
    res_r = _entry_norm(hd @ right - right * values[None, :])
    res_l = _entry_norm(hd.T @ left - left * values[None, :])
    bound = IDENTITY_TOL * scale
    if max(res_r, res_l) > bound:
        raise NumericalError(
            f"eigenvector residual {max(res_r, res_l):.3e} exceeds {bound:.3e}"
        )
    cross = left.T @ right
    off = _entry_norm(cross - np.diag(np.diag(cross)))
    if off > IDENTITY_TOL:
        raise NumericalError(f"biorthogonality defect {off:.3e} exceeds {IDENTITY_TOL}")
    if np.abs(overlaps).min() <= OVERLAP_FLOOR:
        raise NumericalError(
            f"vanishing overlap {overlaps[np.abs(overlaps).argmin()]:.3e}; "
            "too close to an exceptional point"
        )
    return BiorthogonalSystem(values, right, left, overlaps)


def decompose_inverse_pseudometric(p, system):
    """Coefficients nu of P^-1 = sum_m nu_m r_m r_m^T, eigenvalue-ordered.

    Only pseudometrics compatible with the eigenbasis of H admit such a
    rank-one expansion; an irreducible reconstruction defect raises
    NotDyadRepresentable.
    """
    if not isinstance(system, BiorthogonalSystem):
        raise ValidationError("expected a BiorthogonalSystem")
    n = system.n
    p = np.asarray(p, dtype=float)
    if p.shape != (n, n):
        raise ValidationError(f"pseudometric shape {p.shape} does not match n={n}")
    try:
        p_inv = np.linalg.inv(p)
    except np.linalg.LinAlgError as exc:
        raise ValidationError(f"pseudometric is singular: {exc}") from None
    nu = np.einsum("ik,ij,jk->k", system.left, p_inv, system.left)
    nu = nu / system.overlaps**2
    recon = (system.right * nu[None, :]) @ system.right.T
    defect = _entry_norm(p_inv - recon)
    scale = max(_entry_norm(p_inv), 1e-300)
    if defect > ASSEMBLY_TOL * scale:
        raise NotDyadRepresentable(
            f"inverse pseudometric is not a right-dyad combination "
            f"(relative defect {defect / scale:.3e})"
        )
    return nu


def assemble_charge_spectral(system, nu):
    """Charge C = sum_n omega_n r_n l_n^T from the nu-expansion of P^-1.

    The sign vector eps = sign(nu) is the unique choice making every metric
    weight kappa_n^2 = omega_n/(mu_n nu_n) positive, with omega_n = eps_n/mu_n
    forced by the involution constraint C^2 = I.
    """
    if not isinstance(system, BiorthogonalSystem):
        raise ValidationError("expected a BiorthogonalSystem")
    nu = np.asarray(nu, dtype=float)
    if nu.shape != (system.n,):
        raise ValidationError(f"nu length {nu.shape} does not match n={system.n}")
    floor = OVERLAP_FLOOR * max(1.0, float(np.abs(nu).max()))
    if float(np.abs(nu).min()) <= floor:
        raise InadmissiblePseudometric(
            f"vanishing dyad coefficient nu_min={float(np.abs(nu).min()):.3e}; "
            "this pseudometric cannot support an involutive charge"
        )
    signs = np.sign(nu)
    omega = signs / system.overlaps
    kappa_sq = omega / (system.overlaps * nu)
    if kappa_sq.min() <= 0.0:
        raise NumericalError("metric weights kappa^2 are not all positive")
    defect_omega = float(np.abs(omega - system.overlaps * nu * kappa_sq).max())
    defect_inv = float(
        np.abs(system.overlaps * omega**2 - 1.0 / system.overlaps).max()
    )
    if max(defect_omega, defect_inv) > IDENTITY_TOL:
        raise NumericalError(
            f"coefficient identities violated ({defect_omega:.3e}, {defect_inv:.3e})"
        )
    c = (system.right * omega[None, :]) @ system.left.T
    involution = _entry_norm(c @ c - np.eye(system.n))
    if involution > IDENTITY_TOL:
        raise NumericalError(f"charge involution defect {involution:.3e}")
    return ChargeAssembly(nu, omega, kappa_sq, signs, c)


def metric_from_ansatz(basis, coeffs):
    """Candidate metric Theta = sum_k coeffs_k X_k with positivity certificate.

    ``basis`` is a PseudometricBasis or any sequence of symmetric intertwining
    matrices (e.g. spectral dyads).  Positivity of the result depends on the
    coefficients alone and is reported, never raised.
    """
    if isinstance(basis, PseudometricBasis):
        mats = basis.basis
        residuals = np.asarray(basis.residuals, dtype=float)
    else:
        mats = [np.asarray(x, dtype=float) for x in basis]
        residuals = np.zeros(len(mats))
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (len(mats),):
        raise ValidationError(
            f"expected {len(mats)} coefficients, got shape {coeffs.shape}"
        )
    if len(mats) == 0:
        raise ValidationError("empty basis")
    theta = np.zeros_like(mats[0])
    for c, x in zip(coeffs, mats):
        theta = theta + c * x
    sym_theta = 0.5 * (theta + theta.T)
    smallest = float(np.linalg.eigvalsh(sym_theta)[0])
    try:
        np.linalg.cholesky(sym_theta)
        positive = True
    except np.linalg.LinAlgError:
        positive = smallest > CONSTRUCTION_TOL * max(1.0, _entry_norm(theta))
    residual_bound = float(np.abs(coeffs) @ residuals)
    return AnsatzMetric(theta, positive, smallest, residual_bound)


def closed_form_operators(n, lam):
    """Exact antidiagonal triple (P, C, Theta) for H(lam, lam).

    P = J; C is antidiagonal with corners (1+lam)/(1-lam) top-right and
    alpha = (1-lam)/(1+lam) bottom-left and ones between, so Theta = P C =
    diag(alpha, 1, ..., 1, 1/alpha).  At n = 2 the two boundary weights merge
    and the corners become the square roots of those values.  The construction
    is singular at |lam| = 1 where the corners vanish or diverge.
    """
    n = int(n)
    if n < 2:
        raise ValidationError(f"size must be at least 2, got {n}")
    lam = float(lam)
    if not np.isfinite(lam):
        raise ValidationError(f"coupling must be finite, got {lam}")
    if lam == 1.0 or lam == -1.0:
        raise ValidationError(
            f"closed forms are singular at the exceptional point lambda={lam}"
        )
    alpha = (1.0 - lam) / (1.0 + lam)
    beta = (1.0 + lam) / (1.0 - lam)
    if n == 2:
        if alpha <= 0.0:
            raise ValidationError(
                "no real closed form at n=2 outside |lambda| < 1 "
                f"(alpha={alpha:.3e} is not positive)"
            )
        low, high = np.sqrt(alpha), np.sqrt(beta)
    else:
        low, high = alpha, beta
    p = np.fliplr(np.eye(n))
    c = np.fliplr(np.eye(n))
    c[0, n - 1] = high
    c[n - 1, 0] = low
    theta = p @ c
    h = build(n, CouplingPair(lam, lam))
    hd = dense(h)
    res_theta = _entry_norm(hd.T @ theta - theta @ hd)
    res_inv = _entry_norm(c @ c - np.eye(n))
    positivity = float(np.diag(theta).min())
    return OperatorTriple(p, c, theta, res_theta, res_inv, positivity)


def omega_factorize(h, theta):
    """Hermitizer Omega with Omega^T Omega = Theta, plus Omega H Omega^-1.

    Uses the upper Cholesky factor, which reduces to the entrywise square
    root for diagonal metrics; for the closed-form Theta the hermitized
    matrix coincides with the symmetrized form of h.
    """
    if not isinstance(h, DiscreteHamiltonian):
        raise ValidationError("omega_factorize expects a DiscreteHamiltonian")
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (h.n, h.n):
        raise ValidationError(
            f"metric shape {theta.shape} does not match operator size {h.n}"
        )
    if _entry_norm(theta - theta.T) > CONSTRUCTION_TOL * max(1.0, _entry_norm(theta)):
        raise FactorizationError("metric is not symmetric")
    try:
        lower = np.linalg.cholesky(theta)
    except np.linalg.LinAlgError:
        raise FactorizationError(
            "metric is not positive definite; no real hermitizer exists"
        ) from None
    omega = lower.T
    hd = dense(h)
    hermitized = np.linalg.solve(lower, (omega @ hd).T).T
    return omega, hermitized


def symmetry_report(h, triple):
    """Residuals of all defining identities of a triple against one h."""
    if not isinstance(h, DiscreteHamiltonian):
        raise ValidationError("symmetry_report expects a DiscreteHamiltonian")
    if not isinstance(triple, OperatorTriple):
        raise ValidationError("symmetry_report expects an OperatorTriple")
    if triple.p.shape != (h.n, h.n):
        raise ValidationError(
            f"triple size {triple.p.shape} does not match operator size {h.n}"
        )
    hd = dense(h)
    p, c, theta = triple.p, triple.c, triple.theta
    sym_theta = 0.5 * (theta + theta.T)
    return SymmetryReport(
        residual_p=_entry_norm(hd.T @ p - p @ hd),
        residual_theta=_entry_norm(hd.T @ theta - theta @ hd),
        residual_commutator=_entry_norm(c @ hd - hd @ c),
        residual_involution=_entry_norm(c @ c - np.eye(h.n)),
        theta_min_eig=float(np.linalg.eigvalsh(sym_theta)[0]),
    )


def theta_adjoint(theta, psi):
    """Metric-adjoint row vector of a ket: conj(psi)^T Theta."""
    theta = np.asarray(theta)
    psi = np.asarray(psi)
    if psi.shape != (theta.shape[0],):
        raise ValidationError(
            f"vector shape {psi.shape} does not match metric {theta.shape}"
        )
    return np.conj(psi) @ theta
