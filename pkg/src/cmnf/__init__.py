"""Normal forms and invariants of real hypersurface germs in C^2."""

from . import fixtures
from .config import JobConfig, VerifyConfig
from .hypersurface import (
    Biholomorphism,
    GraphConditionError,
    Hypersurface,
    NotRealError,
    TangentField,
    is_tangent,
    levi,
    pushforward,
    recenter,
)
from .invariants import (
    InsufficientTruncation,
    InvariantSet,
    WrongBranch,
    cartan_curvature,
    chern_moser_invariants,
    equivalent,
    invariants_of,
    polynomial_symmetries,
    syzygy_residual,
)
from .normalform import (
    Classification,
    DegenerateLevi,
    NormalForm,
    PartialNF,
    classify,
    full_normal_form,
    partial_normal_form,
    verify_transform,
)
from .scalar import FloatModeRequired, ModeMismatch, Scalar
from .series import HoloSeries2, Series3, SeriesParseError, SingularLinearPart, invert_map

__all__ = [
    "Biholomorphism",
    "Classification",
    "DegenerateLevi",
    "FloatModeRequired",
    "GraphConditionError",
    "HoloSeries2",
    "Hypersurface",
    "InsufficientTruncation",
    "InvariantSet",
    "JobConfig",
    "ModeMismatch",
    "NormalForm",
    "NotRealError",
    "PartialNF",
    "Scalar",
    "Series3",
    "SeriesParseError",
    "SingularLinearPart",
    "TangentField",
    "VerifyConfig",
    "WrongBranch",
    "cartan_curvature",
    "chern_moser_invariants",
    "classify",
    "equivalent",
    "fixtures",
    "full_normal_form",
    "invariants_of",
    "invert_map",
    "is_tangent",
    "levi",
    "partial_normal_form",
    "polynomial_symmetries",
    "pushforward",
    "recenter",
    "syzygy_residual",
    "verify_transform",
]
