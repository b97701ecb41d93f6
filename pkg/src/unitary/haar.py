import numpy as np
from scipy.linalg import qr

from src.errors import ArgumentError
from src.tensor import DenseTensor


def sample_stream(master_seed: int, index: int, *extra: int) -> np.random.Generator:
    """Independent generator for one sample, derived from (master seed, sample index)."""
    return np.random.default_rng([int(master_seed), int(index), *[int(e) for e in extra]])


def haar_sample(N: int, rng: np.random.Generator) -> DenseTensor:
    """
    Draw U from the Haar measure on U(N).

    Ginibre matrix, QR, then the phases of diag(R) are divided out of Q's columns.
    Without the phase fix QR alone is not Haar.
    """
    if N < 1:
        raise ArgumentError(f"dimension must be positive, got {N}")
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / np.sqrt(2.0)
    q, r = qr(z)
    diag = np.diagonal(r)
    phases = diag / np.abs(diag)
    return DenseTensor(q * phases[np.newaxis, :])
