"""q-valued function representation: tuples, sheeted fields, symmetry and norms."""

from .field import Grid, SheetedField, extrapolate_axis
from .fileio import read_field, write_field
from .norms import NormReport, holder_seminorm, sup_norm
from .ops import (
    average_free_decompose,
    difference_quotient,
    gluing_defect,
    kfold_action,
    kfold_symmetry_defect,
    sheet_shift,
    symmetrize,
)
from .qtuple import QTuple, metric_G

__all__ = [
    "Grid",
    "SheetedField",
    "extrapolate_axis",
    "read_field",
    "write_field",
    "NormReport",
    "holder_seminorm",
    "sup_norm",
    "average_free_decompose",
    "difference_quotient",
    "gluing_defect",
    "kfold_action",
    "kfold_symmetry_defect",
    "sheet_shift",
    "symmetrize",
    "QTuple",
    "metric_G",
]
