"""Data model for injected missingness."""

from dataclasses import dataclass

import numpy as np

from imputation_lab.utils.errors import DataError


@dataclass(frozen=True, eq=False)
class AmputationMask:
    """Record of blanked cells and their ground-truth values.

    Coordinates are stored in row-major order.

    Attributes:
        rows: Row index of each blanked cell.
        cols: Column index of each blanked cell.
        originals: Value each cell held before it was blanked.
        rate: Requested missingness rate over eligible cells.
        seed: Seed the cells were drawn with.
    """

    rows: np.ndarray
    cols: np.ndarray
    originals: np.ndarray
    rate: float
    seed: int

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=int).ravel()
        cols = np.asarray(self.cols, dtype=int).ravel()
        originals = np.asarray(self.originals, dtype=float).ravel()
        if not (rows.size == cols.size == originals.size):
            raise DataError("mask coordinate and value arrays differ in length")
        order = np.lexsort((cols, rows))
        rows, cols, originals = rows[order], cols[order], originals[order]
        if rows.size > 1:
            same = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if np.any(same):
                raise DataError("mask coordinates are not unique")
        for name, arr in (("rows", rows), ("cols", cols), ("originals", originals)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return int(self.rows.size)

    @property
    def coordinates(self) -> list[tuple[int, int]]:
        return list(zip(self.rows.tolist(), self.cols.tolist()))

    @classmethod
    def empty(cls, rate: float = 0.0, seed: int = 0) -> "AmputationMask":
        return cls(np.empty(0, int), np.empty(0, int), np.empty(0), rate, seed)
