"""Exact lambda-bracket computations for vertex superalgebras."""

from .scalars import LevelScalar, Rat, K, ScalarError, PoleError, field_op, parse_scalar
from .engine import (
    EngineError,
    ExpPairingError,
    GeneratorSpec,
    LambdaPoly,
    ParseError,
    Presentation,
    State,
    UnknownGeneratorError,
    bracket,
    derive,
    jacobi_defect,
    normalize,
    nprod,
    nth_product,
    parse,
    parse_state,
    quasi_comm_defect,
    skew_expected,
    to_text,
    zero_mode,
)

__all__ = [name for name in dir() if not name.startswith("_")]
