from typing import Sequence, Union

import numpy as np
from scipy import linalg
from scipy.spatial.distance import pdist

from ..core.errors import DegenerateCovariance, EmptyBeatSet, TooFew
from ..core.utils import make_rng
from .features import FeatureVec

RIDGE = 1e-6

Samples = Union[np.ndarray, Sequence[FeatureVec]]


def _as_matrix(samples: Samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        matrix = samples.astype(np.float64)
    elif len(samples):
        matrix = np.stack([np.asarray(f.values, dtype=np.float64) for f in samples])
    else:
        return np.zeros((0, 0))
    return matrix.reshape(len(matrix), -1)


def _psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    values, vectors = linalg.eigh(matrix)
    return (vectors * np.sqrt(np.clip(values, 0.0, None))) @ vectors.T


def frechet_distance(a: Samples, b: Samples) -> float:
    """|mu_a - mu_b|^2 + Tr(S_a + S_b - 2 (S_a S_b)^1/2) with population covariances.

    Both covariances get a 1e-6 ridge; the trace term is the sum of square roots of
    the eigenvalues of S_a^1/2 S_b S_a^1/2.
    """
    a, b = _as_matrix(a), _as_matrix(b)
    if len(a) < 2 or len(b) < 2:
        raise TooFew("Frechet distance needs at least two samples per set")
    if a.shape[1] != b.shape[1]:
        raise DegenerateCovariance(f"feature widths differ: {a.shape[1]} vs {b.shape[1]}")
    ridge = RIDGE * np.eye(a.shape[1])
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    cov_a = np.atleast_2d(np.cov(a, rowvar=False, bias=True)) + ridge
    cov_b = np.atleast_2d(np.cov(b, rowvar=False, bias=True)) + ridge
    try:
        root_a = _psd_sqrt(cov_a)
        product = root_a @ cov_b @ root_a
        eigenvalues = linalg.eigh((product + product.T) / 2.0, eigvals_only=True)
    except (linalg.LinAlgError, ValueError) as exc:
        raise DegenerateCovariance(f"covariance square root failed: {exc}") from exc
    trace_sqrt = np.sqrt(np.clip(eigenvalues, 0.0, None)).sum()
    distance = float(((mu_a - mu_b) ** 2).sum() + np.trace(cov_a) + np.trace(cov_b) - 2.0 * trace_sqrt)
    if not np.isfinite(distance):
        raise DegenerateCovariance("Frechet distance is not finite")
    return max(distance, 0.0)


def diversity(samples: Samples) -> float:
    """Mean Euclidean distance over all unordered pairs."""
    matrix = _as_matrix(samples)
    if len(matrix) < 2:
        raise TooFew("diversity needs at least two feature vectors")
    return float(pdist(matrix).mean())


def beat_align(kinetic_times, music_times, sigma: float = 1.0) -> float:
    """Mean over kinematic beats of exp(-d^2 / 2 sigma^2), d = distance to the nearest music beat (s)."""
    kinetic = np.asarray(kinetic_times, dtype=np.float64).reshape(-1)
    music = np.asarray(music_times, dtype=np.float64).reshape(-1)
    if kinetic.size == 0 or music.size == 0:
        raise EmptyBeatSet("beat alignment needs non-empty kinematic and music beat sets")
    nearest = np.abs(kinetic[:, None] - music[None, :]).min(axis=1)
    return float(np.exp(-(nearest ** 2) / (2.0 * sigma ** 2)).mean())


def shuffled_beat_align(
    kinetic_sets: Sequence, music_sets: Sequence, seed: int = 0, sigma: float = 1.0
) -> float:
    """Beat alignment with every motion re-paired to another clip's music beats."""
    if len(kinetic_sets) != len(music_sets) or len(kinetic_sets) < 2:
        raise TooFew("shuffled beat alignment needs at least two paired clips")
    shift = 1 + int(make_rng("shuffle", seed).integers(len(music_sets) - 1))
    scores = []
    for index, kinetic in enumerate(kinetic_sets):
        music = music_sets[(index + shift) % len(music_sets)]
        if len(kinetic) and len(music):
            scores.append(beat_align(kinetic, music, sigma))
    if not scores:
        raise EmptyBeatSet("no re-paired clip has beats on both sides")
    return float(np.mean(scores))
