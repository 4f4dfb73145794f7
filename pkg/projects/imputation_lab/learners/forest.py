"""CART decision trees and random forests for regression and classification.

Trees are stored as flat node arrays and grown with an explicit stack.
Split search scores every sampled column of a node in one vectorized
pass: candidates are midpoints between consecutive distinct sorted
values, rows with x <= threshold go left, and ties break toward the
lowest column and then the lowest threshold. Each tree draws from its own
random stream spawned from the forest seed, so results do not depend on
how trees are scheduled.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from imputation_lab.models.params import ForestParams, ForestTask
from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)

_GAIN_TOLERANCE = 1e-12


@dataclass(frozen=True)
class TreeNode:
    """Nested view of one tree node.

    A split node has column, threshold and both children; a leaf has a
    prediction (and class counts for classification).
    """

    n_samples: int
    column: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    prediction: float | None = None
    counts: tuple[int, ...] | None = None

    @property
    def is_leaf(self) -> bool:
        return self.column is None


@dataclass(frozen=True, eq=False)
class Tree:
    """A trained tree as parallel node arrays.

    Attributes:
        task: Regression or classification.
        feature: Split column per node, -1 for leaves.
        threshold: Split threshold per node.
        left: Left child per node, -1 for leaves.
        right: Right child per node, -1 for leaves.
        value: Leaf mean (regression) or class counts (classification) per node.
        n_samples: Training rows reaching each node.
    """

    task: ForestTask
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def node_count(self) -> int:
        return int(self.feature.size)

    @property
    def depth(self) -> int:
        depths = np.zeros(self.node_count, dtype=int)
        for node in range(self.node_count):
            if self.feature[node] >= 0:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def leaf_index(self, rows: np.ndarray) -> np.ndarray:
        """Leaf reached by each row."""
        nodes = np.zeros(rows.shape[0], dtype=int)
        active = self.feature[nodes] >= 0
        while active.any():
            idx = np.flatnonzero(active)
            current = nodes[idx]
            go_left = rows[idx, self.feature[current]] <= self.threshold[current]
            nodes[idx] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[nodes] >= 0
        return nodes

    def predict(self, rows: np.ndarray) -> np.ndarray:
        """Leaf mean (regression) or leaf majority class (classification) per row."""
        leaves = self.leaf_index(np.asarray(rows, dtype=float))
        if self.task == "regression":
            return self.value[leaves]
        return np.argmax(self.value[leaves], axis=1).astype(float)

    def root(self) -> TreeNode:
        """Nested node view of the whole tree."""

        def build(node: int) -> TreeNode:
            n = int(self.n_samples[node])
            if self.feature[node] < 0:
                if self.task == "regression":
                    return TreeNode(n, prediction=float(self.value[node]))
                counts = tuple(int(c) for c in self.value[node])
                return TreeNode(
                    n, prediction=float(np.argmax(self.value[node])), counts=counts
                )
            return TreeNode(
                n,
                column=int(self.feature[node]),
                threshold=float(self.threshold[node]),
                left=build(int(self.left[node])),
                right=build(int(self.right[node])),
            )

        return build(0)


@dataclass(frozen=True, eq=False)
class Forest:
    """An ensemble of trees.

    Attributes:
        trees: Trained trees in seed order.
        task: Regression or classification.
        params: Hyperparameters the forest was trained with.
        n_features: Column count seen in training.
        n_classes: Class count for classification, 0 for regression.
    """

    trees: tuple[Tree, ...]
    task: ForestTask
    params: ForestParams
    n_features: int
    n_classes: int = 0


def node_impurity(y: np.ndarray, task: ForestTask, n_classes: int | None = None) -> float:
    """Variance (regression) or Gini impurity (classification) of a node's responses."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        return 0.0
    if task == "regression":
        return float(np.mean((y - y.mean()) ** 2))
    counts = np.bincount(y.astype(int), minlength=n_classes or 0)
    share = counts / y.size
    return float(1.0 - np.sum(share**2))


def _split_candidates(
    block: np.ndarray,
    y: np.ndarray,
    labels: np.ndarray | None,
    n_classes: int,
    min_leaf: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Best gain and threshold for every column of a node's (rows x columns) block.

    All columns are scored in one pass over the column-wise sort order. A
    column with no valid split gets gain -inf.
    """
    n, m = block.shape
    if n < 2:
        return np.full(m, -np.inf), np.zeros(m)
    order = np.argsort(block, axis=0, kind="stable")
    xs = np.take_along_axis(block, order, axis=0)
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)

    if labels is None:
        ys = (y - y.mean())[order]
        cs = np.cumsum(ys, axis=0)
        cs2 = np.cumsum(ys**2, axis=0)
        total, total2 = cs[-1], cs2[-1]
        sse_left = cs2[:-1] - cs[:-1] ** 2 / n_left
        sse_right = (total2 - cs2[:-1]) - (total - cs[:-1]) ** 2 / n_right
        parent = total2 - total**2 / n
        gain = (parent - sse_left - sse_right) / n
    else:
        left_counts = np.cumsum(np.eye(n_classes)[labels][order], axis=0)[:-1]
        total = np.bincount(labels, minlength=n_classes).astype(float)
        right_counts = total - left_counts
        child = (
            n_left
            - (left_counts**2).sum(axis=2) / n_left
            + n_right
            - (right_counts**2).sum(axis=2) / n_right
        )
        parent = n - float((total**2).sum()) / n
        gain = (parent - child) / n

    gain = np.where(valid, gain, -np.inf)
    best_row = np.argmax(gain, axis=0)
    columns = np.arange(m)
    low = xs[best_row, columns]
    high = xs[best_row + 1, columns]
    threshold = (low + high) / 2.0
    threshold = np.where((low <= threshold) & (threshold < high), threshold, low)
    return gain[best_row, columns], threshold


def _best_split(
    X: np.ndarray,
    rows: np.ndarray,
    y: np.ndarray,
    labels: np.ndarray | None,
    n_classes: int,
    columns: np.ndarray,
    min_leaf: int,
) -> tuple[int, float] | None:
    """Highest-gain split over the given columns, ties to the lowest column."""
    columns = np.sort(columns)
    gains, thresholds = _split_candidates(X[np.ix_(rows, columns)], y, labels, n_classes, min_leaf)
    best: tuple[float, int, float] | None = None
    for gain, col, thr in zip(gains, columns, thresholds):
        if not np.isfinite(gain):
            continue
        if best is None or gain > best[0] + _GAIN_TOLERANCE:
            best = (float(gain), int(col), float(thr))
    return None if best is None else (best[1], best[2])


def _first_split(
    X: np.ndarray,
    rows: np.ndarray,
    y: np.ndarray,
    labels: np.ndarray | None,
    n_classes: int,
    columns: np.ndarray,
    min_leaf: int,
) -> tuple[int, float] | None:
    """Best split of the first column, in the given order, that admits one."""
    gains, thresholds = _split_candidates(X[np.ix_(rows, columns)], y, labels, n_classes, min_leaf)
    splittable = np.flatnonzero(np.isfinite(gains))
    if splittable.size == 0:
        return None
    j = int(splittable[0])
    return int(columns[j]), float(thresholds[j])


def _check_training_data(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2:
        raise DataError(f"feature grid must be 2-D, got shape {X.shape}")
    if X.shape[0] == 0:
        raise DataError("cannot train on an empty training set")
    if X.shape[0] != y.size:
        raise DataError(f"{X.shape[0]} feature rows but {y.size} responses")
    if np.isnan(X).any() or np.isnan(y).any():
        raise DataError("training data must not contain missing cells")
    return X, y


def train_tree(
    X: np.ndarray,
    y: np.ndarray,
    params: ForestParams,
    rng: np.random.Generator,
    task: ForestTask = "regression",
    n_classes: int | None = None,
) -> Tree:
    """Grow one CART tree.

    At each node mtry columns are drawn without replacement; if none of them
    admits a valid split the remaining columns are tried in the same random
    order until one does. Growth stops on a pure node, at max_depth, or when
    the node holds fewer than 2 * min_leaf rows.

    Args:
        X: Complete feature grid.
        y: Responses (class indices for classification).
        params: Forest hyperparameters (bootstrap and n_trees are ignored).
        rng: Random stream for column sampling.
        task: Regression or classification.
        n_classes: Class count, defaults to max(y) + 1.

    Returns:
        Tree: The trained tree.

    Raises:
        DataError: If the training set is empty or malformed.
    """
    X, y = _check_training_data(X, y)
    n_features = X.shape[1]
    min_leaf = params.resolved_min_leaf(task)
    mtry = params.resolved_mtry(task, n_features)
    max_depth = np.inf if params.max_depth is None else params.max_depth

    labels = None
    if task == "classification":
        labels = y.astype(int)
        n_classes = n_classes or int(labels.max()) + 1
    n_classes = n_classes or 0

    feature: list[int] = []
    threshold: list[float] = []
    left: list[int] = []
    right: list[int] = []
    value: list[np.ndarray | float] = []
    n_samples: list[int] = []

    def add_node(rows: np.ndarray) -> int:
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        if labels is None:
            value.append(float(y[rows].mean()))
        else:
            value.append(np.bincount(labels[rows], minlength=n_classes).astype(float))
        n_samples.append(int(rows.size))
        return len(feature) - 1

    stack = [(add_node(np.arange(X.shape[0])), np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        ys = y[rows]
        if (
            depth >= max_depth
            or rows.size < 2 * min_leaf
            or np.all(ys == ys[0])
        ):
            continue
        node_labels = None if labels is None else labels[rows]
        order = rng.permutation(n_features)
        split = _best_split(X, rows, ys, node_labels, n_classes, order[:mtry], min_leaf)
        if split is None and mtry < n_features:
            split = _first_split(X, rows, ys, node_labels, n_classes, order[mtry:], min_leaf)
        if split is None:
            continue

        col, thr = split
        goes_left = X[rows, col] <= thr
        left_rows, right_rows = rows[goes_left], rows[~goes_left]
        feature[node] = col
        threshold[node] = thr
        left[node] = add_node(left_rows)
        right[node] = add_node(right_rows)
        stack.append((right[node], right_rows, depth + 1))
        stack.append((left[node], left_rows, depth + 1))

    return Tree(
        task=task,
        feature=np.asarray(feature, dtype=int),
        threshold=np.asarray(threshold, dtype=float),
        left=np.asarray(left, dtype=int),
        right=np.asarray(right, dtype=int),
        value=np.asarray(value, dtype=float),
        n_samples=np.asarray(n_samples, dtype=int),
    )


def train_forest(
    X: np.ndarray,
    y: np.ndarray,
    params: ForestParams,
    task: ForestTask = "regression",
    n_classes: int | None = None,
) -> Forest:
    """Train n_trees trees on bootstrap resamples (or the full data).

    Args:
        X: Complete feature grid.
        y: Responses (class indices for classification).
        params: Forest hyperparameters; seed fixes every tree's random stream.
        task: Regression or classification.
        n_classes: Class count for classification, defaults to max(y) + 1.

    Returns:
        Forest: The trained forest.
    """
    X, y = _check_training_data(X, y)
    params.resolved_mtry(task, X.shape[1])
    if task == "classification":
        n_classes = n_classes or int(y.astype(int).max()) + 1
    streams = np.random.SeedSequence(params.seed).spawn(params.n_trees)

    def grow(stream: np.random.SeedSequence) -> Tree:
        rng = np.random.default_rng(stream)
        if params.bootstrap:
            rows = rng.integers(0, X.shape[0], size=X.shape[0])
            return train_tree(X[rows], y[rows], params, rng, task, n_classes)
        return train_tree(X, y, params, rng, task, n_classes)

    if params.n_jobs > 1 and params.n_trees > 1:
        with ThreadPoolExecutor(max_workers=params.n_jobs) as pool:
            trees = tuple(pool.map(grow, streams))
    else:
        trees = tuple(grow(s) for s in streams)

    logger.debug(
        "Trained %s forest: trees=%d, rows=%d, cols=%d",
        task,
        len(trees),
        X.shape[0],
        X.shape[1],
    )
    return Forest(trees, task, params, X.shape[1], n_classes or 0)


def _check_rows(forest: Forest, rows: np.ndarray) -> np.ndarray:
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[1] != forest.n_features:
        raise DataError(
            f"forest was trained on {forest.n_features} columns, got shape {rows.shape}"
        )
    if np.isnan(rows).any():
        raise DataError("prediction rows must not contain missing cells")
    return rows


def tree_predictions(forest: Forest, rows: np.ndarray) -> np.ndarray:
    """Per-tree predictions, shape (n_trees, n_rows)."""
    rows = _check_rows(forest, rows)
    return np.vstack([tree.predict(rows) for tree in forest.trees])


def predict(forest: Forest, rows: np.ndarray) -> np.ndarray:
    """Forest predictions.

    Regression averages tree outputs; classification takes the majority
    vote over trees, ties going to the lower class index.

    Args:
        forest: Trained forest.
        rows: Complete rows with the training column count.

    Returns:
        np.ndarray: One prediction per row.

    Raises:
        DataError: If the column count does not match training.
    """
    per_tree = tree_predictions(forest, rows)
    if forest.task == "regression":
        return per_tree.mean(axis=0)
    n_classes = max(forest.n_classes, int(per_tree.max(initial=0)) + 1)
    votes = np.zeros((per_tree.shape[1], n_classes))
    for labels in per_tree.astype(int):
        votes[np.arange(labels.size), labels] += 1
    return np.argmax(votes, axis=1).astype(float)
