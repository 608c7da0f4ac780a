"""JSON encoding of complex scalars, vectors and matrices.

A complex number is ``[re, im]``; a matrix is a row-major list of rows. On
input a bare real number is accepted wherever a complex scalar is expected.
"""

from numbers import Real

import numpy as np


def encode_complex(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def decode_complex(x) -> complex:
    if isinstance(x, bool):
        raise ValueError(f"not a number: {x!r}")
    if isinstance(x, Real):
        return complex(float(x), 0.0)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(c, Real) and not isinstance(c, bool) for c in x):
        return complex(float(x[0]), float(x[1]))
    raise ValueError(f"expected a real number or [re, im], got {x!r}")


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def decode_vector(data) -> np.ndarray:
    if not isinstance(data, list) or not data:
        raise ValueError("a vector must be a non-empty JSON array")
    return np.array([decode_complex(x) for x in data], dtype=complex)


def encode_matrix(m) -> list:
    return [[encode_complex(z) for z in row] for row in np.asarray(m)]


def decode_matrix(data) -> np.ndarray:
    """Decode a square matrix; raises ValueError on ragged or non-square input."""
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise ValueError("a matrix must be a non-empty array of row arrays")
    n = len(data)
    if any(len(r) != n for r in data):
        raise ValueError(f"matrix is not square: {n} rows with lengths {[len(r) for r in data]}")
    return np.array([[decode_complex(x) for x in row] for row in data], dtype=complex)
