"""posinorm: exact certificates and float falsifiers for positivity classes
of factorable matrices and weighted shifts on l2."""

from .sequences import (
    DeclaredBounds,
    FamilyError,
    HypothesisViolation,
    SequenceFamily,
    WeightSequence,
    family_from_json,
    fibonacci,
    list_catalog,
    make_family,
    make_shift,
    resolve_family,
    rho,
)
from .matrixcore import (
    DiagonalOperator,
    TruncatedOperator,
    adjoint,
    build_factorable,
    build_shift,
    multiply,
    sandwich,
)
from .interrupters import (
    IdentityReport,
    InterrupterPair,
    equal_interrupter_verdict,
    factorable_pair,
    gram_matrix,
    shift_pair,
    shifted_identity_report,
    verify_factorable_identity,
    verify_shift_identity,
)
from .certificates import (
    Certificate,
    CertificateError,
    DeltaInterval,
    delta_search,
    pair_certify,
    sandwich_window_certify,
    shift_posinormal_conditions,
)
from .shifts import ShiftClassification, classify_shift, kernel_witness
from .numerics import (
    GammaEstimate,
    TailBound,
    check_normal_sandwich,
    commutator_compression,
    gamma_estimate,
    psd_check,
)
from .dominance import DominanceReport, dominance_quantity

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
