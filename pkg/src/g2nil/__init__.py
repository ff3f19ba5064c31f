"""Exterior algebra, Chevalley-Eilenberg calculus and (purely) coclosed
G2-structures on 7-dimensional 2-step nilpotent Lie algebras.

The package is organized bottom-up:

* :mod:`g2nil.exterior` -- multilinear algebra: k-forms, wedge, interior
  product, metric inner products, Hodge star.
* :mod:`g2nil.liealg` -- Lie algebras from structure constants, the
  Chevalley-Eilenberg differential, Ricci curvature and nilsolitons.
* :mod:`g2nil.g2su3` -- G2-structures from coframes, torsion reports,
  SU(3)-reductions and calibration checks.
* :mod:`g2nil.structure` -- existence criteria for (purely) coclosed
  G2-structures on 2-step nilpotent algebras with dim n' in {1, 2, 3}.
* :mod:`g2nil.construct` -- constructive witnesses: adapted coframes
  realizing the structures the criteria predict.
* :mod:`g2nil.catalog` -- the built-in catalog of the sixteen algebras,
  their metric families, pinned fixtures and the regression table.
* :mod:`g2nil.cli` -- the ``g2nil`` command-line tool.
"""

from .exterior import (
    DegenerateError,
    ExactnessError,
    G2nilError,
    KForm,
    Mode,
    ModeMismatchError,
    close,
    form_inner,
    forms_close,
    hodge,
    interior,
    resolve_tolerance,
    top_wedge_coeff,
    volume_form,
    wedge,
)
from .liealg import (
    LieAlgebra,
    Metric,
    NilsolitonReport,
    ce_diff,
    is_nilsoliton,
    jz_matrix,
    ricci,
    ricci_operator,
)
from .g2su3 import (
    G2Structure,
    SU3Structure,
    TorsionReport,
    calibrates,
    induced_metric,
    is_half_flat,
    is_special_half_flat,
    nondegenerate,
    phi_from_coframe,
    phi_standard,
    starphi_standard,
    su3_reduce,
    torsion_class,
)
from .structure import (
    CriterionReport,
    MetricDecomposition,
    UnsupportedAlgebraError,
    coclosed_always,
    coclosed_exists,
    decompose,
    m_matrix,
    purely_coclosed_exists,
    sd_basis_forms,
    sd_gram,
    symmetrize_M,
)
from .construct import (
    Construction,
    construct,
    construct_case1,
    construct_case2,
    construct_case3,
    construct_coclosed,
)
from . import catalog
from .catalog import UnknownAlgebraError

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # exterior
    "DegenerateError", "ExactnessError", "G2nilError", "KForm", "Mode",
    "ModeMismatchError", "close", "form_inner", "forms_close", "hodge",
    "interior", "resolve_tolerance", "top_wedge_coeff", "volume_form", "wedge",
    # liealg
    "LieAlgebra", "Metric", "NilsolitonReport", "ce_diff", "is_nilsoliton",
    "jz_matrix", "ricci", "ricci_operator",
    # g2su3
    "G2Structure", "SU3Structure", "TorsionReport", "calibrates",
    "induced_metric", "is_half_flat", "is_special_half_flat", "nondegenerate",
    "phi_from_coframe", "phi_standard", "starphi_standard", "su3_reduce",
    "torsion_class",
    # structure
    "CriterionReport", "MetricDecomposition", "UnsupportedAlgebraError",
    "coclosed_always", "coclosed_exists", "decompose", "m_matrix",
    "purely_coclosed_exists", "sd_basis_forms", "sd_gram", "symmetrize_M",
    # construct
    "Construction", "construct", "construct_case1", "construct_case2",
    "construct_case3", "construct_coclosed",
    # catalog
    "catalog", "UnknownAlgebraError",
]
