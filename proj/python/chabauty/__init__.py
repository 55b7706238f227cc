"""p-adic Chabauty limits of Cartan subgroups."""

from ._core import (
    ChabautyError,
    Padic,
    classify,
    conjugacy,
    count_power_classes,
    cross_ratio_class,
    limit_family,
    limit_preset,
    orbit_dimension,
    preset_names,
    translation_length,
    verify_table,
)

__all__ = [
    "ChabautyError",
    "Padic",
    "classify",
    "conjugacy",
    "count_power_classes",
    "cross_ratio_class",
    "limit_family",
    "limit_preset",
    "orbit_dimension",
    "preset_names",
    "translation_length",
    "verify_table",
]
