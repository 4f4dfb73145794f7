"""Tabular core: CSV ingestion, target encoding, scaling, splitting and oversampling.

All functions are pure: they take a Dataset and return new values, never
mutating their inputs.
"""

import logging
from collections.abc import Iterable, Mapping
from pathlib import Path

import numpy as np
import pandas as pd
from imblearn.over_sampling import RandomOverSampler
from pandas.errors import EmptyDataError, ParserError
from sklearn.model_selection import train_test_split

from imputation_lab.models.dataset import (
    NUMERIC_KINDS,
    Column,
    ColumnKind,
    Dataset,
    LabelMapping,
    ScalingParams,
)
from imputation_lab.utils.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

DEFAULT_MISSING_MARKERS: frozenset[str] = frozenset({"", "NA", "?"})

_LOADABLE_KINDS = ("continuous", "discrete", "categorical")


def _half_up(values: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(values, dtype=float) + 0.5)


def _format_number(value: float) -> str:
    return repr(float(value))


def _parse_column(
    name: str,
    raw: pd.Series,
    missing: np.ndarray,
    hint: ColumnKind | None,
) -> tuple[Column, np.ndarray]:
    """Parse one column of raw strings into a typed column and float cells."""
    present = ~missing
    numbers = pd.to_numeric(raw.where(present), errors="coerce").to_numpy(dtype=float)
    unparsed = present & np.isnan(numbers)

    if hint == "categorical" or (
        hint is None and present.any() and unparsed[present].all()
    ):
        levels = tuple(sorted(set(raw[present])))
        lookup = {level: float(i) for i, level in enumerate(levels)}
        cells = np.array(
            [lookup[v] if ok else np.nan for v, ok in zip(raw, present)], dtype=float
        )
        return Column(name, "categorical", levels), cells

    if unparsed.any():
        row = int(np.flatnonzero(unparsed)[0])
        raise DataError(
            f"unparseable value {raw.iloc[row]!r} at row {row}, column {name!r}",
            row=row,
            column=name,
        )

    observed = numbers[present]
    is_integral = bool(np.all(observed == np.round(observed)))
    if hint == "discrete" and not is_integral:
        row = int(np.flatnonzero(present & (numbers != np.round(numbers)))[0])
        raise DataError(
            f"non-integer value {raw.iloc[row]!r} in discrete column {name!r} at row {row}",
            row=row,
            column=name,
        )
    kind: ColumnKind = hint or ("discrete" if is_integral and observed.size else "continuous")
    return Column(name, kind), numbers


def load_csv(
    path: str | Path,
    missing_markers: Iterable[str] = DEFAULT_MISSING_MARKERS,
    type_hints: Mapping[str, ColumnKind] | None = None,
    name: str | None = None,
) -> Dataset:
    """Load a headed CSV file into a Dataset.

    Cells equal to a missing marker (after stripping whitespace) become
    missing. Column kinds come from type_hints when given, otherwise they
    are inferred: all-integer numeric columns are discrete, other numeric
    columns continuous, non-numeric columns categorical.

    Args:
        path: CSV file path.
        missing_markers: Cell texts that denote a missing value.
        type_hints: Optional column name -> kind overrides.
        name: Dataset name, defaults to the file stem.

    Returns:
        Dataset: The parsed dataset.

    Raises:
        DataError: If the file is empty, a row is ragged, or a cell cannot be parsed.
        ConfigError: If a hint names an unknown column or kind.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    try:
        frame = pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            na_filter=False,
            skip_blank_lines=True,
            encoding="utf-8",
        )
    except EmptyDataError as exc:
        raise DataError(f"empty file: {path}") from exc
    except ParserError as exc:
        raise DataError(f"ragged rows in {path}: {exc}") from exc

    # na_filter is off, so NaN only appears where a short row was padded
    padded = frame.isna().any(axis=1).to_numpy()
    if padded.any():
        row = int(np.flatnonzero(padded)[0])
        raise DataError(
            f"ragged row {row} in {path}: expected {frame.shape[1]} fields", row=row
        )

    headers = [
        str(h).strip() if str(h).strip() and not str(h).startswith("Unnamed:") else f"column_{j}"
        for j, h in enumerate(frame.columns)
    ]
    frame.columns = headers
    hints = dict(type_hints or {})
    unknown = set(hints) - set(headers)
    if unknown:
        raise ConfigError(f"type hints name unknown columns: {sorted(unknown)}")
    for col, kind in hints.items():
        if kind not in _LOADABLE_KINDS:
            raise ConfigError(f"column {col!r}: kind {kind!r} cannot be loaded from CSV")

    markers = {m.strip() for m in missing_markers}
    columns: list[Column] = []
    grid = np.empty((frame.shape[0], frame.shape[1]), dtype=float)
    for j, header in enumerate(headers):
        raw = frame[header].str.strip()
        missing = raw.isin(markers).to_numpy()
        column, cells = _parse_column(header, raw, missing, hints.get(header))
        columns.append(column)
        grid[:, j] = cells

    dataset = Dataset(name or path.stem, tuple(columns), grid)
    logger.info(
        "Loaded %s: rows=%d, cols=%d, missing=%d",
        path.name,
        dataset.row_count,
        dataset.col_count,
        dataset.missing_count(),
    )
    return dataset


def write_csv(ds: Dataset, path: str | Path) -> Path:
    """Write a Dataset as CSV so that load_csv reads back identical cells.

    Categorical cells are written as level text, discrete and target cells as
    integers, continuous cells with the shortest round-trip float repr, and
    missing cells as empty strings. Scaled datasets are written in scaled units.

    Args:
        ds: Dataset to write.
        path: Destination path.

    Returns:
        Path: The written path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out: dict[str, list[str]] = {}
    for j, column in enumerate(ds.columns):
        values = ds.cells[:, j]
        texts = []
        for v in values:
            if np.isnan(v):
                texts.append("")
            elif column.kind == "categorical":
                texts.append(column.levels[int(v)])
            elif column.kind == "binary_target" or (
                column.kind == "discrete" and ds.scaling is None
            ):
                texts.append(str(int(v)))
            else:
                texts.append(_format_number(v))
        out[column.name] = texts
    pd.DataFrame(out, columns=ds.column_names).to_csv(path, index=False)
    logger.info("Wrote %s: rows=%d, cols=%d", path, ds.row_count, ds.col_count)
    return path


def encode_target(
    ds: Dataset, column: str, positive: str | None = None
) -> tuple[Dataset, LabelMapping]:
    """Encode a two-level column as the binary target.

    The positive level is mapped to 1. Without an explicit positive level
    the lexicographically later level is positive (M over B, 1 over 0).

    Args:
        ds: Input dataset.
        column: Column to encode.
        positive: Level text designated positive.

    Returns:
        tuple[Dataset, LabelMapping]: Dataset with the column turned into the
            binary target, and the level mapping.

    Raises:
        DataError: If the column has missing cells or not exactly two levels.
    """
    j = ds.index_of(column)
    col = ds.columns[j]
    values = ds.cells[:, j]
    if np.isnan(values).any():
        raise DataError(f"target column {column!r} has missing cells", column=column)

    if col.kind == "categorical":
        texts = [col.levels[int(v)] for v in values]
    else:
        texts = [str(int(v)) if v == np.round(v) else _format_number(v) for v in values]

    levels = sorted(set(texts))
    if len(levels) != 2:
        raise DataError(
            f"target column {column!r} must have exactly two levels, found {levels}",
            column=column,
        )
    if positive is None:
        positive = levels[-1]
    if positive not in levels:
        raise DataError(
            f"positive level {positive!r} not among target levels {levels}",
            column=column,
        )

    mapping = LabelMapping(column, {lvl: int(lvl == positive) for lvl in levels})
    encoded = np.array([mapping.mapping[t] for t in texts], dtype=float)
    cells = np.array(ds.cells, copy=True)
    cells[:, j] = encoded
    columns = list(ds.columns)
    columns[j] = Column(column, "binary_target")
    logger.info("Encoded target %r: positive=%r, mapping=%s", column, positive, mapping.mapping)
    return Dataset(ds.name, tuple(columns), cells, ds.scaling), mapping


def minmax_scale(ds: Dataset) -> tuple[Dataset, ScalingParams]:
    """Scale every non-target numeric column onto [0, 1].

    Bounds come from the non-missing cells; constant columns map to 0 and
    missing cells stay missing.

    Args:
        ds: Input dataset in raw units.

    Returns:
        tuple[Dataset, ScalingParams]: Scaled dataset (carrying its params) and params.
    """
    bounds: dict[str, tuple[float, float]] = {}
    for j, column in enumerate(ds.columns):
        if column.kind not in NUMERIC_KINDS:
            continue
        values = ds.cells[:, j]
        present = values[~np.isnan(values)]
        if present.size == 0:
            continue
        bounds[column.name] = (float(present.min()), float(present.max()))
    params = ScalingParams(bounds)
    if params.constant_columns:
        logger.info("Constant columns scaled to 0: %s", params.constant_columns)
    return apply_minmax(ds, params), params


def apply_minmax(ds: Dataset, params: ScalingParams) -> Dataset:
    """Scale a raw dataset with existing bounds.

    Args:
        ds: Raw dataset whose columns match the params.
        params: Bounds to apply.

    Returns:
        Dataset: Scaled dataset carrying the params.
    """
    cells = np.array(ds.cells, copy=True)
    for name in params.bounds:
        j = ds.index_of(name)
        cells[:, j] = params.to_scaled(name, cells[:, j])
    return Dataset(ds.name, ds.columns, cells, params)


def inverse_minmax(ds: Dataset, params: ScalingParams | None = None) -> Dataset:
    """Map a scaled dataset back to raw units.

    Args:
        ds: Scaled dataset.
        params: Bounds to invert, defaults to the dataset's own.

    Returns:
        Dataset: Dataset in raw units with no scaling attached.
    """
    params = params or ds.scaling
    if params is None:
        return ds
    cells = np.array(ds.cells, copy=True)
    for name in params.bounds:
        j = ds.index_of(name)
        cells[:, j] = params.to_raw(name, cells[:, j])
        if ds.columns[j].kind == "discrete":
            cells[:, j] = np.where(np.isnan(cells[:, j]), np.nan, _half_up(cells[:, j]))
    return Dataset(ds.name, ds.columns, cells, None)


def snap_discrete(ds: Dataset, j: int, values: np.ndarray) -> np.ndarray:
    """Round imputed values of a discrete column to integers in raw units.

    Non-discrete columns are returned unchanged.

    Args:
        ds: Dataset the values belong to (its scaling is honoured).
        j: Column index.
        values: Candidate values in the dataset's units.

    Returns:
        np.ndarray: Values whose raw-unit equivalents are integers.
    """
    column = ds.columns[j]
    values = np.asarray(values, dtype=float)
    if column.kind != "discrete":
        return values
    if ds.scaling is None or column.name not in ds.scaling.bounds:
        return _half_up(values)
    raw = _half_up(ds.scaling.to_raw(column.name, values))
    return ds.scaling.to_scaled(column.name, raw)


def _require_target(ds: Dataset) -> np.ndarray:
    if ds.target_index is None:
        raise DataError(f"dataset {ds.name!r} has no binary target column")
    return ds.target


def stratified_split_indices(
    ds: Dataset, test_fraction: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Stratified train/test row indices.

    Args:
        ds: Dataset with a binary target.
        test_fraction: Share of rows in the test part, in (0, 1).
        seed: Split seed.

    Returns:
        tuple[np.ndarray, np.ndarray]: Sorted train and test row indices.

    Raises:
        DataError: If a class has fewer than 2 rows.
        ConfigError: If test_fraction is outside (0, 1).
    """
    if not 0.0 < test_fraction < 1.0:
        raise ConfigError(f"test_fraction must be in (0, 1), got {test_fraction}")
    y = _require_target(ds)
    classes, counts = np.unique(y, return_counts=True)
    if counts.min(initial=0) < 2 or classes.size < 2:
        sizes = dict(zip(classes.tolist(), counts.tolist()))
        raise DataError(f"every class needs at least 2 rows to stratify, got {sizes}")
    train, test = train_test_split(
        np.arange(ds.row_count),
        test_size=test_fraction,
        random_state=seed,
        stratify=y,
    )
    return np.sort(train), np.sort(test)


def stratified_split(
    ds: Dataset, test_fraction: float, seed: int
) -> tuple[Dataset, Dataset]:
    """Split a dataset into stratified train and test parts.

    Class proportions in the test part are within one row of the stratified
    ideal, and the same seed always gives the same split.

    Args:
        ds: Dataset with a binary target.
        test_fraction: Share of rows in the test part.
        seed: Split seed.

    Returns:
        tuple[Dataset, Dataset]: Train and test datasets.
    """
    train, test = stratified_split_indices(ds, test_fraction, seed)
    return ds.take_rows(train), ds.take_rows(test)


def oversample_minority(ds: Dataset, target_total: int, seed: int) -> Dataset:
    """Duplicate random minority-class rows until the dataset has target_total rows.

    Original rows keep their order; the duplicates are appended after them.
    On a class tie the positive class is treated as the minority.

    Args:
        ds: Dataset with a binary target.
        target_total: Desired row count, at least the current row count.
        seed: Sampling seed.

    Returns:
        Dataset: The oversampled dataset.

    Raises:
        DataError: If target_total is below the current row count.
    """
    y = _require_target(ds)
    if target_total < ds.row_count:
        raise DataError(
            f"target_total={target_total} is below the current row count {ds.row_count}"
        )
    if target_total == ds.row_count:
        return ds

    counts = {label: int((y == label).sum()) for label in (0, 1)}
    minority = 1 if counts[1] <= counts[0] else 0
    if counts[minority] == 0:
        raise DataError(f"class {minority} has no rows to duplicate")

    desired = counts[minority] + (target_total - ds.row_count)
    sampler = RandomOverSampler(sampling_strategy={minority: desired}, random_state=seed)
    sampler.fit_resample(np.arange(ds.row_count).reshape(-1, 1), y)
    rows = np.asarray(sampler.sample_indices_, dtype=int)
    logger.info(
        "Oversampled %s: class %d %d -> %d, rows %d -> %d",
        ds.name,
        minority,
        counts[minority],
        desired,
        ds.row_count,
        rows.size,
    )
    return ds.take_rows(rows)


def align_levels(ds: Dataset, reference: Dataset) -> Dataset:
    """Re-index a dataset's categorical cells onto a reference's level lists.

    Both datasets must have the same column names in the same order.

    Args:
        ds: Dataset to re-index (e.g. an imputed file loaded on its own).
        reference: Dataset whose level lists are authoritative.

    Returns:
        Dataset: ds with reference's columns and remapped categorical indices.

    Raises:
        DataError: If the column names differ or a level is unknown to the reference.
    """
    if ds.column_names != reference.column_names:
        raise DataError(
            f"column mismatch: {ds.column_names} vs reference {reference.column_names}"
        )
    cells = np.array(ds.cells, copy=True)
    for j, (ours, theirs) in enumerate(zip(ds.columns, reference.columns)):
        if ours.kind != "categorical" or theirs.kind != "categorical":
            continue
        lookup = {level: float(i) for i, level in enumerate(theirs.levels)}
        unknown = set(ours.levels) - set(lookup)
        if unknown:
            raise DataError(
                f"column {ours.name!r} has levels {sorted(unknown)} unknown to the reference",
                column=ours.name,
            )
        present = ~np.isnan(cells[:, j])
        cells[present, j] = [lookup[ours.levels[int(v)]] for v in cells[present, j]]
    return Dataset(ds.name, reference.columns, cells, ds.scaling)
