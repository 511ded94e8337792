"""Spectral-algebraic toolkit for Z^d-periodic graph operators.

Exact symbolic cores (Floquet matrix, dispersion polynomial, flat-band
and factorization identities over the Gaussian rationals) combined with
numerical torus sweeps (band grids, density of states, Fermi curves,
critical points and spectral-edge audits).
"""

__version__ = "0.1.0"

from .exact import GaussianRational
from .laurent import (
    LaurentMatrix,
    LaurentPoly,
    arith,
    composite_rewrite,
    lambda_coefficient_gcd,
)
from .graphs import (
    EdgeRecord,
    OperatorSpec,
    PeriodicGraph,
    SpecError,
    ab_composite_variable,
    build_multilayer,
    builtin,
    make_direct_spec,
    make_graph_spec,
    parse_spec,
)
from .floquet import (
    FloquetModeResult,
    QuasiPeriodicMode,
    RealSpaceWindow,
    apply_operator,
    dispersion,
    floquet_matrix,
    floquet_mode,
)
from .spectrum import (
    BandGrid,
    DensityOfStates,
    ResolventMarginError,
    SpectralReport,
    band_grid,
    density_of_states,
    eigenvalue_test,
    flat_band_energies,
    resolvent_apply,
    resolvent_residual,
    spectral_report,
)
from .fermi import (
    CertificateError,
    FactorizationCertificate,
    FermiSection,
    certify,
    composite_factorize,
    fermi_section,
    multilayer_factorize,
    symmetry_factorize,
)
from .critical import (
    CriticalPoint,
    EdgeAudit,
    Face,
    NewtonPolytope,
    cpe_system,
    facial_form,
    find_critical_points,
    newton_polytope,
    spectral_edge_report,
    vertical_faces,
)

__all__ = [
    "GaussianRational",
    "LaurentPoly",
    "LaurentMatrix",
    "arith",
    "composite_rewrite",
    "lambda_coefficient_gcd",
    "EdgeRecord",
    "PeriodicGraph",
    "OperatorSpec",
    "SpecError",
    "parse_spec",
    "builtin",
    "build_multilayer",
    "make_graph_spec",
    "make_direct_spec",
    "ab_composite_variable",
    "floquet_matrix",
    "dispersion",
    "apply_operator",
    "floquet_mode",
    "FloquetModeResult",
    "QuasiPeriodicMode",
    "RealSpaceWindow",
    "BandGrid",
    "band_grid",
    "SpectralReport",
    "spectral_report",
    "eigenvalue_test",
    "flat_band_energies",
    "DensityOfStates",
    "density_of_states",
    "resolvent_apply",
    "resolvent_residual",
    "ResolventMarginError",
    "FermiSection",
    "fermi_section",
    "FactorizationCertificate",
    "CertificateError",
    "certify",
    "multilayer_factorize",
    "symmetry_factorize",
    "composite_factorize",
    "NewtonPolytope",
    "Face",
    "newton_polytope",
    "facial_form",
    "vertical_faces",
    "cpe_system",
    "CriticalPoint",
    "find_critical_points",
    "EdgeAudit",
    "spectral_edge_report",
]
