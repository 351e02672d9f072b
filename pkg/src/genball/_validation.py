"""Input validation helpers.

sklearn's ``check_array`` refuses complex input, so the checks here are
written directly against numpy.
"""

import numbers

import numpy as np

from .exceptions import DimensionError


def as_complex_array(a, *, ndim=None, name="array"):
    arr = np.asarray(a)
    if arr.dtype == object:
        raise TypeError(f"{name} must be numeric")
    arr = arr.astype(complex, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise DimensionError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_vector(v, sig, name="vector"):
    v = as_complex_array(v, ndim=1, name=name)
    if v.shape[0] != sig.n:
        raise DimensionError(f"{name} has length {v.shape[0]}, expected {sig.n}")
    return v


def check_nonzero(v, name="vector"):
    if not np.any(v):
        raise ValueError(f"{name} must be nonzero")
    return v


def check_square_matrix(M, sig=None, name="matrix"):
    M = as_complex_array(M, ndim=2, name=name)
    if M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    if sig is not None and M.shape[0] != sig.n:
        raise DimensionError(f"{name} has size {M.shape[0]}, expected p+q={sig.n}")
    return M


def check_frame(Z, sig, name="frame"):
    Z = as_complex_array(Z, name=name)
    if Z.ndim == 1:
        Z = Z[:, None]
    if Z.ndim != 2 or Z.shape[0] != sig.n:
        raise DimensionError(f"{name} must have {sig.n} rows, got shape {Z.shape}")
    return Z


def check_points(X, sig, name="X"):
    """2-D batch of homogeneous coordinates, one point per row."""
    X = as_complex_array(X, name=name)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != sig.n:
        raise DimensionError(f"{name} must have shape (n_points, {sig.n}), got {X.shape}")
    return X


def check_real(M, atol=1e-12, name="matrix"):
    M = np.asarray(M)
    if np.iscomplexobj(M) and np.max(np.abs(M.imag), initial=0.0) > atol:
        raise ValueError(f"{name} must be real (imaginary parts exceed {atol:g})")
    return np.real(M).astype(float)


def check_positive_int(value, name):
    if not isinstance(value, numbers.Integral) or isinstance(value, bool) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)
