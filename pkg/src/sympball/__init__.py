"""
sympball - projections of symplectic balls

Symplectic spectra, Williamson normal forms, orthogonal projections of
ellipsoids and the symplectic balls they contain, with a command-line
verification harness.
"""

__version__ = "1.0.0"
__author__ = "sympball developers"

from .exceptions import (
    SympballError,
    ConfigurationError,
    ValidationError,
    DimensionMismatch,
    MatrixFileError,
    NotSymmetric,
    EigFailed,
    NotPositiveDefinite,
    PivotNotPD,
    Singular,
    PairingFailed,
    DegenerateClusterFailure,
    NotSymplectic,
    NotComplex,
    RankDeficient,
    GramSchmidtBreakdown,
)
from .config import Config
from .matcore import Tolerance, DEFAULT_TOLERANCE
from .symplectic import (
    SymplecticForm,
    SymplecticSpectrum,
    WilliamsonDecomposition,
    ComplexSubspace,
    symplectic_spectrum,
    williamson,
    lemma1_check,
    random_symplectic,
)
from .projection import BlockPartition, PartitionedMatrix, Ellipsoid, Side
from .balls import ProjectionAnalysis, Verdict, analyze_split, analyze_subspace

__all__ = [
    "__version__",
    "SympballError",
    "ConfigurationError",
    "ValidationError",
    "DimensionMismatch",
    "MatrixFileError",
    "NotSymmetric",
    "EigFailed",
    "NotPositiveDefinite",
    "PivotNotPD",
    "Singular",
    "PairingFailed",
    "DegenerateClusterFailure",
    "NotSymplectic",
    "NotComplex",
    "RankDeficient",
    "GramSchmidtBreakdown",
    "Config",
    "Tolerance",
    "DEFAULT_TOLERANCE",
    "SymplecticForm",
    "SymplecticSpectrum",
    "WilliamsonDecomposition",
    "ComplexSubspace",
    "symplectic_spectrum",
    "williamson",
    "lemma1_check",
    "random_symplectic",
    "BlockPartition",
    "PartitionedMatrix",
    "Ellipsoid",
    "Side",
    "ProjectionAnalysis",
    "Verdict",
    "analyze_split",
    "analyze_subspace",
]
