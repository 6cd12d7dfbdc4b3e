from smgkit.core.congruence import (
    PointPartition,
    brute_force_minimal_injective_congruence,
    is_injective_congruence,
    minimal_injective_congruence,
)
from smgkit.core.green import (
    GreenData,
    IdealNotUniqueError,
    NoZeroError,
    ZeroMinimalIdeal,
    green_data,
    group_of_units,
    is_aperiodic,
    is_aperiodic_by_powers,
    zero_minimal_ideal,
)
from smgkit.core.group import Group, GroupError
from smgkit.core.rowmonomial import RowMonomial, compose_codes
from smgkit.core.semigroup import (
    CapExceeded,
    EnumeratedSemigroup,
    SemigroupError,
    enumerate_semigroup,
    induced_subsemigroup,
    subsemigroup,
)

__all__ = [
    "CapExceeded", "EnumeratedSemigroup", "GreenData", "Group", "GroupError", "IdealNotUniqueError",
    "NoZeroError", "PointPartition", "RowMonomial", "SemigroupError", "ZeroMinimalIdeal",
    "brute_force_minimal_injective_congruence", "compose_codes", "enumerate_semigroup", "green_data",
    "group_of_units", "induced_subsemigroup", "is_aperiodic", "is_aperiodic_by_powers",
    "is_injective_congruence", "minimal_injective_congruence", "subsemigroup", "zero_minimal_ideal",
]
