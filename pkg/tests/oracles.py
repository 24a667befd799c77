"""Independent brute-force reference implementations for the test suite.

Everything here deliberately takes a different algorithmic route from the
package: eigendecomposition instead of SVD, scalar Python loops instead
of vectorized numpy, insertion sort instead of library sort. Keep these
dumb and obvious; they are the judges, not the contestants.
"""

from __future__ import annotations

import math

import numpy as np


def pca_oracle(centered: np.ndarray, z: int) -> tuple[np.ndarray, np.ndarray]:
    """Project via eigendecomposition of the covariance matrix.

    Returns (projections, explained_variance) with the same divisor
    convention as the package (rows - 1, floored at 1).
    """
    centered = np.asarray(centered, dtype=np.float64)
    rows = centered.shape[0]
    cov = centered.T @ centered
    eigenvalues, eigenvectors = np.linalg.eigh(cov)
    order = np.argsort(eigenvalues)[::-1]
    top = eigenvectors[:, order[:z]]
    variance = np.maximum(eigenvalues[order[:z]], 0.0) / max(rows - 1, 1)
    return centered @ top, variance


def pairwise_oracle(secondary: np.ndarray, primary: np.ndarray) -> np.ndarray:
    """Scalar triple loop over rows, rows, coordinates."""
    m, z = secondary.shape
    n = primary.shape[0]
    out = np.zeros((m, n))
    for j in range(m):
        for k in range(n):
            total = 0.0
            for c in range(z):
                d = secondary[j][c] - primary[k][c]
                total += d * d
            out[j][k] = math.sqrt(total)
    return out


def row_sums_oracle(matrix: np.ndarray) -> list[float]:
    sums = []
    for row in matrix:
        total = 0.0
        for value in row:
            total += value
        sums.append(total)
    return sums


def mean_oracle(values) -> float:
    total = 0.0
    count = 0
    for value in values:
        total += value
        count += 1
    return total / count


def std_oracle(values) -> float:
    """Population standard deviation."""
    mu = mean_oracle(values)
    total = 0.0
    count = 0
    for value in values:
        total += (value - mu) ** 2
        count += 1
    return math.sqrt(total / count)


def sort_permutation_oracle(values) -> list[int]:
    """Stable insertion sort; returns the ascending-order permutation."""
    order: list[int] = []
    for index in range(len(values)):
        position = len(order)
        while position > 0 and values[order[position - 1]] > values[index]:
            position -= 1
        order.insert(position, index)
    return order


def quantile_oracle(values, fraction: float) -> float:
    """Linear interpolation between closest ranks on a sorted copy."""
    ordered = sorted(values)
    if len(ordered) == 1:
        return float(ordered[0])
    position = (len(ordered) - 1) * fraction
    below = math.floor(position)
    above = math.ceil(position)
    if below == above:
        return float(ordered[below])
    weight = position - below
    return float(ordered[below] * (1.0 - weight) + ordered[above] * weight)


def moving_average_oracle(values, window: int) -> list[float]:
    """Centered window, truncated at the edges, plain Python arithmetic."""
    m = len(values)
    left = (window - 1) // 2
    right = window // 2
    out = []
    for i in range(m):
        chunk = [values[j] for j in range(max(0, i - left), min(m, i + right + 1))]
        out.append(sum(chunk) / len(chunk))
    return out


def ods_oracle(predictions, masks, thresholds):
    """Exhaustive pixel-by-pixel sweep.

    predictions/masks are sequences of 2-d arrays of floats in [0, 1].
    Returns (best_threshold, f_score, tp, fp, fn) with ties broken toward
    the smallest threshold and F defined as 0 when tp is 0.
    """
    best = None
    for threshold in sorted(thresholds):
        tp = fp = fn = 0
        for prediction, mask in zip(predictions, masks):
            height, width = np.asarray(prediction).shape
            for y in range(height):
                for x in range(width):
                    predicted = prediction[y][x] >= threshold
                    actual = mask[y][x] > 0.5
                    if predicted and actual:
                        tp += 1
                    elif predicted and not actual:
                        fp += 1
                    elif actual:
                        fn += 1
        if tp == 0:
            f = 0.0
        else:
            precision = tp / (tp + fp)
            recall = tp / (tp + fn)
            f = 2.0 * precision * recall / (precision + recall)
        if best is None or f > best[1]:
            best = (threshold, f, tp, fp, fn)
    return best
