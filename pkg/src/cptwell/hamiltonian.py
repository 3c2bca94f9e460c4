"""Tridiagonal square-well Hamiltonians with boundary couplings.

The family is the n x n real tridiagonal matrix

    H(lambda, mu) = [ 2      -1-lambda                              ]
                    [ -1+lambda   2    -1                           ]
                    [        -1   2    ...                          ]
                    [             ...   2      -1-mu                ]
                    [                  -1+mu    2                   ]

i.e. the discrete Dirichlet Laplacian (diagonal 2, off-diagonals -1) with the
two boundary bonds made asymmetric: the first bond carries super = -1-lambda /
sub = -1+lambda and the last bond super = -1-mu / sub = -1+mu.  For n = 2 the
single bond carries super = -1-lambda and sub = -1+mu, which reduces to the
n >= 3 pattern whenever mu = lambda and keeps the two-parameter family total.

H is not symmetric, but whenever every bond product super[i]*sub[i] is positive
(equivalent to |lambda| < 1 and |mu| < 1) it is diagonally similar to the
symmetric tridiagonal S = D^-1 H D with positive weights D = diag(d), which is
what makes the spectrum real there.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotSymmetrizable, ValidationError


@dataclass(frozen=True, eq=False)
class CouplingPair:
    """Boundary couplings (lam, mu); dimensionless, any finite real values."""

    lam: float
    mu: float

    def __post_init__(self):
        lam = float(self.lam)
        mu = float(self.mu)
        if not (np.isfinite(lam) and np.isfinite(mu)):
            raise ValidationError(f"couplings must be finite, got ({self.lam}, {self.mu})")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "mu", mu)


@dataclass(frozen=True, eq=False)
class DiscreteHamiltonian:
    """The matrix H(lambda, mu) stored as three bands (never dense)."""

    n: int
    couplings: CouplingPair
    diag: np.ndarray
    super: np.ndarray
    sub: np.ndarray

    @property
    def bonds(self):
        """Bond products super[i]*sub[i]; the spectrum depends only on these."""
        return self.super * self.sub

    def gershgorin_radius(self):
        """Upper bound on the spectral radius from row sums."""
        n = self.n
        r = np.abs(self.diag).astype(float)
        r[:-1] += np.abs(self.super)
        r[1:] += np.abs(self.sub)
        return float(r.max())


@dataclass(frozen=True, eq=False)
class SymmetrizedForm:
    """Symmetric tridiagonal S = D^-1 H D plus the weights d (d[0] = 1)."""

    s_diag: np.ndarray
    s_off: np.ndarray
    d: np.ndarray

    @property
    def n(self):
        return self.s_diag.shape[0]

    def gershgorin_bounds(self):
        """(lo, hi) bracketing the whole spectrum."""
        n = self.n
        r = np.zeros(n)
        r[:-1] += np.abs(self.s_off)
        r[1:] += np.abs(self.s_off)
        return float((self.s_diag - r).min()), float((self.s_diag + r).max())


def _freeze(a):
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


def build(n, couplings):
    """Construct H(lambda, mu) of dimension n >= 2."""
    if not isinstance(couplings, CouplingPair):
        couplings = CouplingPair(*couplings)
    n = int(n)
    if n < 2:
        raise ValidationError(f"dimension must be >= 2, got {n}")
    lam, mu = couplings.lam, couplings.mu
    diag = np.full(n, 2.0)
    sup = np.full(n - 1, -1.0)
    sub = np.full(n - 1, -1.0)
    sup[0] = -1.0 - lam
    sub[n - 2] = -1.0 + mu
    if n > 2:
        sub[0] = -1.0 + lam
        sup[n - 2] = -1.0 - mu
    return DiscreteHamiltonian(n, couplings, _freeze(diag), _freeze(sup), _freeze(sub))


def symmetrize(h):
    """Diagonal similarity S = D^-1 H D making H symmetric.

    Requires every bond product super[i]*sub[i] > 0.  The weights follow
    d[i+1] = d[i]*sqrt(sub[i]/super[i]) with d[0] = 1, which gives the
    symmetric off-diagonal s_off[i] = -sqrt(super[i]*sub[i]).  Right
    eigenvectors of H are D w and left eigenvectors (of H^T) are D^-1 w for w
    an eigenvector of S.
    """
    products = h.bonds
    bad = np.nonzero(products <= 0.0)[0]
    if bad.size:
        raise NotSymmetrizable(bad[0], products[bad[0]])
    d = np.empty(h.n)
    d[0] = 1.0
    ratios = np.sqrt(h.sub / h.super)
    np.cumprod(ratios, out=d[1:])
    s_off = -np.sqrt(products)
    return SymmetrizedForm(_freeze(h.diag.copy()), _freeze(s_off), _freeze(d))


def dense(h):
    """Materialize H as a dense array (for the intertwining-equation solver)."""
    m = np.diag(h.diag.copy())
    idx = np.arange(h.n - 1)
    m[idx, idx + 1] = h.super
    m[idx + 1, idx] = h.sub
    return m


def tridiagonal_dict(h):
    """JSON-ready band form: {"n", "diag", "super", "sub", "lambda", "mu"}."""
    return {
        "n": h.n,
        "diag": h.diag.tolist(),
        "super": h.super.tolist(),
        "sub": h.sub.tolist(),
        "lambda": h.couplings.lam,
        "mu": h.couplings.mu,
    }


def dense_dict(h):
    """JSON-ready dense form: {"n", "rows"}."""
    return {"n": h.n, "rows": dense(h).tolist()}
