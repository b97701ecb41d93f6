import numpy as np
import pytest

from src.errors import ArgumentError, DimensionError
from src.tensor import DenseTensor, contract, identity, reshape, transpose


def test_from_flat_is_row_major():
    t = DenseTensor.from_flat((2, 3), range(6))
    assert t.shape == (2, 3)
    assert t.data[1, 0] == 3


def test_from_flat_rejects_wrong_length():
    with pytest.raises(DimensionError):
        DenseTensor.from_flat((2, 2), [1, 2, 3])


def test_data_is_read_only():
    t = DenseTensor(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        t.data[0, 0] = 1.0


def test_contract_matches_matmul(rng):
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    b = rng.standard_normal((4, 5))
    out = contract(DenseTensor(a), DenseTensor(b), [(1, 0)])
    assert out.shape == (3, 5)
    assert np.allclose(out.data, a @ b)


def test_contract_free_axes_keep_order(rng):
    a = DenseTensor(rng.standard_normal((2, 3, 4)), labels=("x", "k", "y"))
    b = DenseTensor(rng.standard_normal((5, 3)), labels=("z", "k"))
    out = contract(a, b, [(1, 1)])
    assert out.shape == (2, 4, 5)
    assert out.labels == ("x", "y", "z")


def test_contract_rejects_repeated_axis():
    a = DenseTensor(np.ones((2, 2)))
    with pytest.raises(ArgumentError):
        contract(a, a, [(0, 0), (0, 1)])


def test_contract_rejects_length_mismatch():
    with pytest.raises(DimensionError):
        contract(DenseTensor(np.ones((2, 3))), DenseTensor(np.ones((2, 3))), [(1, 0)])


def test_contract_rejects_axis_out_of_range():
    with pytest.raises(ArgumentError):
        contract(DenseTensor(np.ones((2, 2))), DenseTensor(np.ones((2, 2))), [(2, 0)])


def test_transpose_and_reshape():
    t = DenseTensor.from_flat((2, 3), range(6))
    assert transpose(t, (1, 0)).shape == (3, 2)
    assert reshape(t, (3, 2)).data[2, 1] == 5
    with pytest.raises(ArgumentError):
        transpose(t, (0, 0))
    with pytest.raises(DimensionError):
        reshape(t, (4, 2))


def test_identity():
    assert np.array_equal(identity(3).data, np.eye(3))


def _loop_contract(a, b, pairs):
    """Nested-loop reference for contract."""
    paired_a = [p[0] for p in pairs]
    paired_b = [p[1] for p in pairs]
    free_a = [i for i in range(a.ndim) if i not in paired_a]
    free_b = [i for i in range(b.ndim) if i not in paired_b]
    out_shape = tuple(a.shape[i] for i in free_a) + tuple(b.shape[i] for i in free_b)
    summed = tuple(a.shape[i] for i in paired_a)
    out = np.zeros(out_shape, dtype=np.complex128)
    for idx in np.ndindex(*out_shape):
        total = 0.0
        for s in np.ndindex(*summed):
            ia, ib = [0] * a.ndim, [0] * b.ndim
            for axis, v in zip(free_a, idx[: len(free_a)]):
                ia[axis] = v
            for axis, v in zip(free_b, idx[len(free_a):]):
                ib[axis] = v
            for (pa, pb), v in zip(pairs, s):
                ia[pa], ib[pb] = v, v
            total += a[tuple(ia)] * b[tuple(ib)]
        out[idx] = total
    return out


def _complex(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize(
    "shape_a, shape_b, pairs",
    [
        ((2, 3, 2), (3, 2, 2), [(1, 0), (0, 2)]),
        ((2, 2, 3), (3,), [(2, 0)]),
        ((2, 3), (2, 3), [(0, 0), (1, 1)]),
        ((2, 1, 3), (2, 2), []),
        ((3, 2, 2), (2, 3, 2), [(0, 1), (1, 0)]),
    ],
)
def test_contract_matches_nested_loops(rng, shape_a, shape_b, pairs):
    a, b = _complex(rng, shape_a), _complex(rng, shape_b)
    out = contract(DenseTensor(a), DenseTensor(b), pairs)
    assert np.allclose(out.data, _loop_contract(a, b, pairs), atol=1e-12)


def test_contract_is_bilinear(rng):
    a1, a2 = DenseTensor(_complex(rng, (2, 3, 2))), DenseTensor(_complex(rng, (2, 3, 2)))
    b = DenseTensor(_complex(rng, (3, 2)))
    alpha, beta = 0.7 - 1.3j, -2.1 + 0.4j
    pairs = [(1, 0)]
    combined = contract(a1.scaled(alpha) + a2.scaled(beta), b, pairs)
    expected = alpha * contract(a1, b, pairs).data + beta * contract(a2, b, pairs).data
    assert np.allclose(combined.data, expected, atol=1e-12)
    right = contract(b, a1.scaled(alpha) + a2.scaled(beta), [(0, 1)])
    assert np.allclose(right.data, alpha * contract(b, a1, [(0, 1)]).data + beta * contract(b, a2, [(0, 1)]).data)


@pytest.mark.parametrize("perm", [(1, 0, 2), (2, 0, 1), (3, 1, 0, 2)])
def test_transpose_round_trip_is_exact(rng, perm):
    t = DenseTensor(_complex(rng, (2, 3, 4, 5)[: len(perm)]))
    back = transpose(transpose(t, perm), np.argsort(perm))
    assert np.array_equal(back.data, t.data)
