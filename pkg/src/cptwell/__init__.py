"""CPT-symmetric discrete square well: spectra, pseudometrics, metric and charge.

The model is the n-site Dirichlet lattice Laplacian with one non-Hermitian
boundary coupling pair (lambda at the left edge, mu at the right): a real
tridiagonal matrix whose spectrum is entirely real inside the open coupling
square and complexifies through exceptional points outside.  The package
constructs the operators that turn the non-symmetric H into a unitary quantum
model: all pseudometrics X solving H^T X = X H, the involutive charge C, the
positive metric Theta = P C, and the hermitizing map Omega with
Omega^T Omega = Theta, together with continuum-limit convergence checks and a
deterministic command-line interface.
"""

from .continuum import ConvergenceStudy, convergence_study, scaled_spectrum
from .dieudonne import (
    ClosedFormPseudometric,
    PseudometricBasis,
    closed_form,
    kernel_basis,
    residual,
    span_residual,
    spectral_dyads,
)
from .errors import (
    ConvergenceError,
    CptwellError,
    DegenerateSpectrum,
    FactorizationError,
    InadmissiblePseudometric,
    NotDyadRepresentable,
    NotSymmetrizable,
    NumericalError,
    ValidationError,
)
from .hamiltonian import (
    CouplingPair,
    DiscreteHamiltonian,
    SymmetrizedForm,
    build,
    dense,
    symmetrize,
)
from .quasihermitian import (
    AnsatzMetric,
    BiorthogonalSystem,
    ChargeAssembly,
    OperatorTriple,
    SymmetryReport,
    assemble_charge_spectral,
    biorthogonalize,
    closed_form_operators,
    decompose_inverse_pseudometric,
    metric_from_ansatz,
    omega_factorize,
    symmetry_report,
    theta_adjoint,
)
from .spectra import (
    DomainScan,
    Spectrum,
    char_poly,
    eigen_general,
    eigen_real,
    reality_tolerance,
    scan_domain,
    scan_line,
    spectrum_of,
)

__version__ = "0.1.0"

__all__ = [
    "AnsatzMetric",
    "BiorthogonalSystem",
    "ChargeAssembly",
    "ClosedFormPseudometric",
    "ConvergenceError",
    "ConvergenceStudy",
    "CouplingPair",
    "CptwellError",
    "DegenerateSpectrum",
    "DiscreteHamiltonian",
    "DomainScan",
    "FactorizationError",
    "InadmissiblePseudometric",
    "NotDyadRepresentable",
    "NotSymmetrizable",
    "NumericalError",
    "OperatorTriple",
    "PseudometricBasis",
    "Spectrum",
    "SymmetrizedForm",
    "SymmetryReport",
    "ValidationError",
    "assemble_charge_spectral",
    "biorthogonalize",
    "build",
    "char_poly",
    "closed_form",
    "closed_form_operators",
    "convergence_study",
    "decompose_inverse_pseudometric",
    "dense",
    "eigen_general",
    "eigen_real",
    "kernel_basis",
    "metric_from_ansatz",
    "omega_factorize",
    "reality_tolerance",
    "residual",
    "scaled_spectrum",
    "scan_domain",
    "scan_line",
    "span_residual",
    "spectral_dyads",
    "spectrum_of",
    "symmetrize",
    "symmetry_report",
    "theta_adjoint",
    "__version__",
]
