from functools import lru_cache
from typing import Tuple

import numpy as np

from src.errors import ArgumentError
from src.tensor import DenseTensor


def is_hermitian(m: np.ndarray, tol: float = 1e-12) -> bool:
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=tol, rtol=0)


def is_unitary(m: np.ndarray, tol: float = 1e-10) -> bool:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return np.allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=tol, rtol=0)


@lru_cache(maxsize=None)
def hermitian_basis(N: int) -> Tuple[DenseTensor, ...]:
    """
    Generalized Gell-Mann basis of U(N) with the identity appended last.

    Order: symmetric E_jk + E_kj for j < k, antisymmetric -iE_jk + iE_kj for j < k,
    then the N-1 diagonal generators. Traceless members satisfy Tr(G_a G_b) = 2 delta_ab.
    For N = 2 this is (sigma_x, sigma_y, sigma_z, I).
    """
    if N < 2:
        raise ArgumentError(f"generator basis needs N >= 2, got {N}")

    symmetric, antisymmetric, diagonal = [], [], []
    for j in range(N):
        for k in range(j + 1, N):
            s = np.zeros((N, N), dtype=np.complex128)
            s[j, k] = s[k, j] = 1.0
            symmetric.append(s)

            a = np.zeros((N, N), dtype=np.complex128)
            a[j, k] = -1j
            a[k, j] = 1j
            antisymmetric.append(a)

    for l in range(1, N):
        g = np.zeros((N, N), dtype=np.complex128)
        g[np.arange(l), np.arange(l)] = 1.0
        g[l, l] = -l
        diagonal.append(g * np.sqrt(2.0 / (l * (l + 1))))

    return tuple(DenseTensor(g) for g in symmetric + antisymmetric + diagonal + [np.eye(N)])
