"""Continuum limit of the discrete well: scaled levels and convergence order.

With box length 1 an n-site lattice has spacing h = 1/(n+1), and the discrete
eigenvalues scale as E_k ~ h^2 pi^2 k^2 for the low levels.  The scaled level
(n+1)^2 E_k / pi^2 therefore tends, at zero coupling, exactly to the
particle-in-a-box value k^2 with the O(h^2) error of the three-point second
difference; the closed form is (n+1)^2 (2 - 2 cos(k pi/(n+1))) / pi^2.

For nonzero boundary coupling the coupling is held fixed while n grows (no
n-scaling is imposed), and the study reports the Cauchy differences of the
scaled levels together with Richardson order estimates, without asserting
which continuum boundary interaction is approached.

The order estimate for a consecutive size triple compares successive
differences D_i = L(h_{i+1}) - L(h_i):

    p = log(D_i / D_{i+1}) / log(rho),   rho = sqrt(h_i / h_{i+2}),

the geometric mean of the two step ratios, exact for power-law error h^p on
geometric ladders.  The per-level headline estimate comes from the finest
triple.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .hamiltonian import CouplingPair, build, symmetrize
from .spectra import eigen_real

PI_SQ = float(np.pi) ** 2


@dataclass(frozen=True, eq=False)
class ConvergenceStudy:
    """Scaled levels over a size ladder with Richardson order estimates.

    ``scaled_levels[i]`` holds the K lowest scaled levels at ``sizes[i]``;
    ``differences[k]`` the successive differences of level k over the ladder;
    ``orders[k]`` the per-triple order estimates (NaN where the differences
    change sign or vanish); ``estimated_order[k]`` the finest-triple estimate.
    """

    sizes: tuple
    lam: float
    scaled_levels: list
    differences: list
    orders: list
    estimated_order: np.ndarray

    @property
    def levels(self):
        return int(self.estimated_order.shape[0])

    def rows(self):
        """CSV rows (n, k, scaled_energy, richardson_order-or-None)."""
        for i, n in enumerate(self.sizes):
            for k in range(self.levels):
                order = self.orders[k][i - 2] if i >= 2 else float("nan")
                yield (
                    int(n),
                    k + 1,
                    float(self.scaled_levels[i][k]),
                    None if np.isnan(order) else float(order),
                )

    def to_dict(self):
        def clean(seq):
            return [None if np.isnan(v) else float(v) for v in seq]

        return {
            "sizes": [int(n) for n in self.sizes],
            "lambda": float(self.lam),
            "scaled_levels": [[float(v) for v in row] for row in self.scaled_levels],
            "differences": [[float(v) for v in row] for row in self.differences],
            "orders": [clean(row) for row in self.orders],
            "estimated_order": clean(self.estimated_order),
        }


def scaled_spectrum(n, lam, levels):
    """The K lowest levels of H(lam, lam) scaled by (n+1)^2 / pi^2."""
    n = int(n)
    levels = int(levels)
    lam = float(lam)
    if not -1.0 < lam < 1.0:
        raise ValidationError(
            f"coupling {lam} is outside the open interval (-1, 1); the scaled "
            "levels are defined on the real branch only"
        )
    if not 1 <= levels <= n:
        raise ValidationError(f"levels must be in 1..{n}, got {levels}")
    h = build(n, CouplingPair(lam, lam))
    spec = eigen_real(symmetrize(h))
    return (n + 1) ** 2 * spec.values.real[:levels] / PI_SQ


def convergence_study(sizes, lam, levels=1):
    """Scaled-level convergence over a strictly increasing size ladder."""
    sizes = tuple(int(n) for n in sizes)
    if len(sizes) < 3:
        raise ValidationError(
            f"a study needs at least 3 sizes for one order estimate, got {len(sizes)}"
        )
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError(f"sizes must be strictly increasing, got {sizes}")
    levels = int(levels)
    if levels > min(sizes):
        raise ValidationError(
            f"levels {levels} exceeds the smallest ladder size {min(sizes)}"
        )
    scaled = [scaled_spectrum(n, lam, levels) for n in sizes]
    steps = np.array([1.0 / (n + 1) for n in sizes])
    differences = []
    orders = []
    for k in range(levels):
        level = np.array([scaled[i][k] for i in range(len(sizes))])
        diff = level[1:] - level[:-1]
        differences.append(diff)
        est = np.full(len(sizes) - 2, np.nan)
        for i in range(len(sizes) - 2):
            if diff[i + 1] == 0.0:
                continue
            ratio = diff[i] / diff[i + 1]
            if ratio <= 0.0 or not np.isfinite(ratio):
                continue
            rho = np.sqrt(steps[i] / steps[i + 2])
            est[i] = np.log(ratio) / np.log(rho)
        orders.append(est)
    estimated = np.array([orders[k][-1] for k in range(levels)])
    return ConvergenceStudy(sizes, float(lam), scaled, differences, orders, estimated)
