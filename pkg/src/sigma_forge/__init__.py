"""sigma-forge: contact metric geometry, Poisson structures and Hamiltonian
flows for second-order ODEs y'' = f(x, y, y').

Given the right-hand side f, the package builds the associated Riemannian
3-manifold in an adapted orthonormal coframe, classifies its contact metric
structure (Sasakian exactly when f is independent of y), constructs the
canonical Poisson structure and its compatible bi-Hamiltonian partners,
computes the curvature of the contact distribution's normal bundle, and
integrates the Hamiltonian and solution flows with invariant monitoring.
"""

from .expr import (
    EvalDomainError,
    Expr,
    ParseError,
    Point,
    diff,
    evaluate,
    is_zero,
    parse,
    simplify,
    to_string,
)
from .geometry import (
    ETA,
    FrameVector,
    KForm,
    OdeSurface,
    XI,
    cross,
    directional_derivative,
    exterior_derivative,
    flat,
    frame_vector,
    gradient,
    interior_product,
    lie_bracket,
    make_surface,
    metric_coordinate_matrix,
    one_form,
    sharp,
    volume_form,
    wedge,
)
from .connection import (
    ChernVerdict,
    ConnectionForms,
    chern_trivial,
    connection_forms,
    covariant_derivative,
    normal_connection,
    verify_first_structure,
)
from .contact import Classification, classify, h_tensor, lie_derivative_metric, phi, phi_apply
from .hamiltonian import (
    BiVector,
    HamiltonianSystem,
    PreconditionError,
    bihamiltonian_pair,
    hamiltonian_field,
    jacobi_residual,
    omega1,
    omega2,
    omega2_poisson_check,
    poisson_one_form,
    reeb_bihamiltonian,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    conservation_report,
    geodesic_residual,
    integrate_2graph,
    integrate_hamiltonian,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # expressions
    "Expr",
    "Point",
    "ParseError",
    "EvalDomainError",
    "parse",
    "to_string",
    "simplify",
    "diff",
    "evaluate",
    "is_zero",
    # geometry
    "OdeSurface",
    "FrameVector",
    "KForm",
    "XI",
    "ETA",
    "make_surface",
    "frame_vector",
    "one_form",
    "volume_form",
    "wedge",
    "exterior_derivative",
    "interior_product",
    "sharp",
    "flat",
    "cross",
    "gradient",
    "lie_bracket",
    "directional_derivative",
    "metric_coordinate_matrix",
    # connection
    "ConnectionForms",
    "ChernVerdict",
    "connection_forms",
    "covariant_derivative",
    "verify_first_structure",
    "normal_connection",
    "chern_trivial",
    # contact
    "Classification",
    "classify",
    "phi",
    "phi_apply",
    "h_tensor",
    "lie_derivative_metric",
    # hamiltonian
    "BiVector",
    "HamiltonianSystem",
    "PreconditionError",
    "omega1",
    "omega2",
    "poisson_one_form",
    "jacobi_residual",
    "hamiltonian_field",
    "omega2_poisson_check",
    "bihamiltonian_pair",
    "reeb_bihamiltonian",
    # dynamics
    "IntegratorConfig",
    "Trajectory",
    "integrate_hamiltonian",
    "integrate_2graph",
    "geodesic_residual",
    "conservation_report",
]
