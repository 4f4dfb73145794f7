"""Data models for tabular datasets.

Defines the column-typed table that every module consumes and produces,
together with the scaling and label-encoding records needed to move
between raw and normalized representations.
"""

from dataclasses import dataclass, field, replace
from typing import Literal

import numpy as np

from imputation_lab.utils.errors import DataError

# Kinds of columns a dataset may hold
ColumnKind = Literal["continuous", "discrete", "categorical", "binary_target"]

NUMERIC_KINDS: frozenset[str] = frozenset({"continuous", "discrete"})

_INTEGER_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Column:
    """A named, typed column.

    Attributes:
        name: Column header.
        kind: Column kind.
        levels: Level texts for categorical columns (cells store indices into this).
    """

    name: str
    kind: ColumnKind
    levels: tuple[str, ...] = ()


@dataclass(frozen=True)
class ScalingParams:
    """Per-column observed bounds used for min-max scaling.

    Attributes:
        bounds: Column name -> (min, max) over the non-missing cells.
    """

    bounds: dict[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for name, (low, high) in self.bounds.items():
            if high < low:
                raise DataError(f"scaling bounds inverted for column {name!r}")

    def is_constant(self, name: str) -> bool:
        """Whether the column had a single observed value."""
        low, high = self.bounds[name]
        return high == low

    @property
    def constant_columns(self) -> list[str]:
        return [name for name in self.bounds if self.is_constant(name)]

    def to_raw(self, name: str, values: np.ndarray) -> np.ndarray:
        """Map scaled values of a column back to raw units."""
        low, high = self.bounds[name]
        return np.asarray(values, dtype=float) * (high - low) + low

    def to_scaled(self, name: str, values: np.ndarray) -> np.ndarray:
        """Map raw values of a column onto the scaled range."""
        low, high = self.bounds[name]
        values = np.asarray(values, dtype=float)
        if high == low:
            return np.where(np.isnan(values), np.nan, 0.0)
        return (values - low) / (high - low)


@dataclass(frozen=True)
class LabelMapping:
    """Assignment of the two target levels to {0, 1}.

    Attributes:
        column: Target column name.
        mapping: Level text -> encoded class.
    """

    column: str
    mapping: dict[str, int]

    def __post_init__(self) -> None:
        if sorted(self.mapping.values()) != [0, 1]:
            raise DataError(
                f"label mapping for {self.column!r} must be bijective onto {{0, 1}}"
            )

    @property
    def positive(self) -> str:
        return next(level for level, code in self.mapping.items() if code == 1)


@dataclass(frozen=True, eq=False)
class Dataset:
    """A column-typed table with per-cell missingness.

    Cells are a read-only float grid; missing cells are NaN and categorical
    cells hold level indices. Instances are immutable, every operation
    returns a new Dataset.

    Attributes:
        name: Dataset name.
        columns: Ordered column descriptors.
        cells: Row-major grid of shape (row_count, col_count).
        scaling: Min-max bounds when the numeric columns are scaled, else None.
    """

    name: str
    columns: tuple[Column, ...]
    cells: np.ndarray
    scaling: ScalingParams | None = None

    def __post_init__(self) -> None:
        cells = np.array(self.cells, dtype=float, copy=True)
        if cells.ndim == 1 and cells.size == 0:
            cells = cells.reshape(0, len(self.columns))
        if cells.ndim != 2 or cells.shape[1] != len(self.columns):
            raise DataError(
                f"grid shape {cells.shape} does not match {len(self.columns)} columns"
            )
        cells.setflags(write=False)
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "cells", cells)
        self._validate()

    def _validate(self) -> None:
        targets = [c.name for c in self.columns if c.kind == "binary_target"]
        if len(targets) > 1:
            raise DataError(f"more than one binary target column: {targets}")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate column names in {self.name!r}")

        for j, column in enumerate(self.columns):
            values = self.cells[:, j]
            present = values[~np.isnan(values)]
            if present.size == 0:
                continue
            if column.kind == "categorical":
                if np.any(present != np.round(present)) or np.any(
                    (present < 0) | (present >= len(column.levels))
                ):
                    raise DataError(
                        f"categorical column {column.name!r} holds invalid level indices",
                        column=column.name,
                    )
            elif column.kind == "binary_target":
                if not np.all(np.isin(present, (0.0, 1.0))):
                    raise DataError(
                        f"binary target {column.name!r} holds values outside {{0, 1}}",
                        column=column.name,
                    )
            elif column.kind == "discrete":
                raw = present
                if self.scaling is not None and column.name in self.scaling.bounds:
                    raw = self.scaling.to_raw(column.name, present)
                if np.any(np.abs(raw - np.round(raw)) > _INTEGER_TOLERANCE):
                    raise DataError(
                        f"discrete column {column.name!r} holds non-integer values",
                        column=column.name,
                    )

    @property
    def row_count(self) -> int:
        return int(self.cells.shape[0])

    @property
    def col_count(self) -> int:
        return int(self.cells.shape[1])

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    @property
    def target_index(self) -> int | None:
        """Index of the binary-target column, or None."""
        for j, column in enumerate(self.columns):
            if column.kind == "binary_target":
                return j
        return None

    @property
    def feature_indices(self) -> list[int]:
        """Indices of every non-target column."""
        return [j for j, c in enumerate(self.columns) if c.kind != "binary_target"]

    @property
    def target(self) -> np.ndarray:
        """Target labels as integers.

        Raises:
            DataError: If the dataset has no binary target.
        """
        j = self.target_index
        if j is None:
            raise DataError(f"dataset {self.name!r} has no binary target column")
        return self.cells[:, j].astype(int)

    def index_of(self, name: str) -> int:
        """Position of a column by name.

        Raises:
            DataError: If the column does not exist.
        """
        for j, column in enumerate(self.columns):
            if column.name == name:
                return j
        raise DataError(f"dataset {self.name!r} has no column {name!r}", column=name)

    def missing_mask(self) -> np.ndarray:
        """Boolean grid, True where a cell is missing."""
        return np.isnan(self.cells)

    def missing_count(self) -> int:
        return int(np.isnan(self.cells).sum())

    def with_cells(self, cells: np.ndarray) -> "Dataset":
        """Same columns and scaling, new grid."""
        return replace(self, cells=cells)

    def take_rows(self, rows: np.ndarray | list[int]) -> "Dataset":
        """Dataset restricted to (and ordered by) the given row indices."""
        return replace(self, cells=self.cells[np.asarray(rows, dtype=int)])

    def select_columns(self, names: list[str]) -> "Dataset":
        """Dataset restricted to the named columns, in the given order."""
        idx = [self.index_of(n) for n in names]
        scaling = self.scaling
        if scaling is not None:
            scaling = ScalingParams(
                {n: b for n, b in scaling.bounds.items() if n in set(names)}
            )
        return replace(
            self,
            columns=tuple(self.columns[j] for j in idx),
            cells=self.cells[:, idx],
            scaling=scaling,
        )

    def equals(self, other: "Dataset") -> bool:
        """Cell-exact comparison (NaN equals NaN) of columns and grid."""
        return self.columns == other.columns and np.array_equal(
            self.cells, other.cells, equal_nan=True
        )
