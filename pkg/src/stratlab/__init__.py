"""stratlab: desk-scale numerical verification for model singular spaces.

Model families (cones, suspensions, round spheres, and a tube-modified
3-sphere) come with exact distances, reproducible sampling, strata data, and
analytic curvature bounds.  On top of them sit a kernel-graph Laplacian,
a comparison-check suite, and a synthetic-curvature classifier.
"""

from .links import Circle, LinkSpace, RoundSphere, Suspension, link_distance, link_diameter
from .cones import (
    ConePoint,
    PolygonalCurve,
    comparison_angle,
    cone_distance,
    geodesic_hits_apex,
    perturb_curve_off_singular,
    quadruple_comparison,
    suspension_distance,
    unfold_flat_cone,
)
from .spaces import (
    EuclideanCone,
    FermiSphere,
    MetricSample,
    RoundSphereSpace,
    StratifiedModel,
    Stratum,
    SuspensionSpace,
    fermi_chart_limit,
    fermi_embedding,
    fermi_expansion_fit,
    fermi_metric,
    fermi_theta_component,
    model_from_dict,
    model_from_json,
    model_to_json,
    tangent_sphere,
)
from .montecarlo import (
    BallRegion,
    SampleCloud,
    SuspensionCap,
    ahlfors_check,
    ball_volume_mc,
    doubling_check,
    minkowski_content,
    minkowski_profile,
    model_ball_volume,
    sample_points,
    total_volume_mc,
    tubular_volume,
)
from .spectral import (
    DiscreteGraph,
    SpectralData,
    build_graph,
    kernel_mass,
    lichnerowicz_check,
    sphere_eigenvalues,
    spindle_eigenvalues,
    spectrum,
    weyl_ratio,
)
from .checks import (
    apex_hit_fraction,
    bishop_gromov_check,
    bochner_check,
    contract_toward,
    cutoff_family,
    cutoff_ladder_check,
    cutoff_rho,
    fermi_hit_profile,
    laplacian_comparison_check,
    levy_gromov_bound,
    levy_gromov_check,
    mcp_density_check,
    run_checks,
    space_form_ball_volume,
)
from .classify import (
    CatalogEntry,
    CurvatureVerdict,
    alexandrov_classify,
    catalog,
    catalog_verdicts,
    classify,
    consistency_check,
)
from .report import (
    CheckReport,
    FidelityRangeError,
    MetricConsistencyError,
    NumericalError,
    ResolutionError,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
