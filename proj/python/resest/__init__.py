"""Resilient state estimation for LTV systems under sparse attacks."""

from ._resest import (  # noqa: F401
    InvalidArgument,
    IoError,
    LtvSystem,
    UnsupportedOperation,
    benchmark_system,
    certify,
    draw_trial,
    estimate,
    load_system,
    nu_brute,
    relative_error,
    simulate,
)
