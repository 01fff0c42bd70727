"""Numerics for the dynamics of the complex exponential map.

Forward iteration with overflow-safe bookkeeping, hyperbolic metrics on the
model domains, logarithm-branch pullbacks, constructive chaos witnesses
(escaping points, transitivity, repelling periodic points, sensitive
dependence), and deterministic escape-time rendering.
"""

from .dynamics import (
    Classification,
    LogPolarPoint,
    OrbitLabel,
    OrbitRecord,
    classify_orbit,
    exp_map,
    iterate,
    multiplier_along,
    on_positive_axis,
)
from .hyperbolic import (
    Domain,
    Iso,
    density,
    domain_contains,
    expansion_slit_neg,
    expansion_slit_pos,
    hyp_derivative,
    iso,
    iso_deriv,
    iso_domains,
    mobius,
)
from .logbranch import BranchSpec, DiscBranch, disc_branch, windowed_log
from .pullback import (
    AnnulusSpec,
    InverseSquareBranch,
    PullbackChain,
    annulus_of_square,
    build_pullback,
    inverse_f2_branch,
    rho_for_compact,
    rho_for_target,
)
from .render import (
    CLASS_COLORS,
    GridSpec,
    RenderParams,
    render_density_map,
    render_escape_map,
)
from .witnesses import (
    Disc,
    PeriodicPointResult,
    WitnessReport,
    find_escaping_point,
    find_periodic,
    sensitivity_witness,
    transitivity_witness,
    verify_report,
)

__version__ = "0.1.0"

__all__ = [
    "AnnulusSpec",
    "BranchSpec",
    "CLASS_COLORS",
    "Classification",
    "Disc",
    "DiscBranch",
    "Domain",
    "GridSpec",
    "InverseSquareBranch",
    "Iso",
    "LogPolarPoint",
    "OrbitLabel",
    "OrbitRecord",
    "PeriodicPointResult",
    "PullbackChain",
    "RenderParams",
    "WitnessReport",
    "annulus_of_square",
    "build_pullback",
    "classify_orbit",
    "density",
    "disc_branch",
    "domain_contains",
    "exp_map",
    "expansion_slit_neg",
    "expansion_slit_pos",
    "find_escaping_point",
    "find_periodic",
    "hyp_derivative",
    "inverse_f2_branch",
    "iso",
    "iso_deriv",
    "iso_domains",
    "iterate",
    "mobius",
    "multiplier_along",
    "on_positive_axis",
    "render_density_map",
    "render_escape_map",
    "rho_for_compact",
    "rho_for_target",
    "sensitivity_witness",
    "transitivity_witness",
    "verify_report",
    "windowed_log",
]
