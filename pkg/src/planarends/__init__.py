"""planarends: certificates for minimal surfaces in R^4 with planar ends.

Subpackages/modules, roughly bottom-up:

- ``algebra``: exact Gaussian-rational scalars, polynomials, local series.
- ``curve``: hyperelliptic curves, points, function field, differentials.
- ``weierstrass``: surface data, conformality/end certificates, Gauss maps.
- ``constructions``: the concrete families (catenoid, graphs, multi-end).
- ``torus``: Weierstrass elliptic evaluators and square-torus 1-forms.
- ``numerics``: periods, immersion evaluation, curvature, end asymptotics.
- ``meshio``: immersed meshes, OBJ/PLY export, verification reports.
- ``cli``: the ``planar-ends`` command line tool.
"""

from .algebra import (
    AlgebraError,
    ExtensionSquareRootError,
    PrecisionCapError,
    GaussianRational,
    Poly,
    RationalFunction,
    ExtScalar,
    LocalSeries,
    as_gaussian,
    poly_gcd,
    resultant,
    series_sqrt,
    gaussian_roots,
)
from .curve import CurvePoint, Differential, FieldElement, HyperellipticCurve
from .weierstrass import (
    EndData,
    ProjectiveFunction,
    WeierstrassData,
    check_conformal,
    end_reports,
    gauss_degrees,
)
from .constructions import (
    GFormCoefficients,
    IJSelection,
    SearchError,
    bracket_resultant,
    catenoid,
    gform_assemble,
    hoffman_osserman,
    involution_check,
    lambda_search,
    phi_ij,
    three_end_genus0,
)
from .torus import PoleError, TorusLattice, torus_eta
from .numerics import (
    CurvePath,
    NumericsError,
    end_asymptotics,
    immersion_eval,
    integrate_1form,
    real_periods_zero,
    self_intersection_scan,
    total_curvature,
)
from .meshio import (
    Mesh,
    MeshError,
    build_verification_report,
    export_obj,
    export_ply,
    import_obj,
    import_ply,
    sample_mesh,
    write_report,
)

__version__ = "0.1.0"
