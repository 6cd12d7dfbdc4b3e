"""Constructive tools for Krohn-Rhodes complexity 1 on finite semigroups."""

from smgkit.core import (
    EnumeratedSemigroup,
    GreenData,
    Group,
    PointPartition,
    RowMonomial,
    SemigroupError,
    enumerate_semigroup,
    green_data,
    is_aperiodic,
    minimal_injective_congruence,
    zero_minimal_ideal,
)

__version__ = "0.1.0"

__all__ = [
    "EnumeratedSemigroup",
    "GreenData",
    "Group",
    "PointPartition",
    "RowMonomial",
    "SemigroupError",
    "enumerate_semigroup",
    "green_data",
    "is_aperiodic",
    "minimal_injective_congruence",
    "zero_minimal_ideal",
]
