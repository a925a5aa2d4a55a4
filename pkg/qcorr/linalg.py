"""
Dense linear algebra for multipartite operators.

Matrices are plain ``numpy`` complex arrays. :class:`DensityMatrix` and :class:`PureState` wrap an array together
with its subsystem dimensions and validate the physical invariants on construction; both are immutable afterwards.
"""
from __future__ import annotations

import logging
from functools import reduce
from typing import Iterable, List, Sequence, Tuple, Union

import numpy as np

from qcorr.exceptions import DimensionError, InvalidStateError, NotHermitianError
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

__all__ = [
    "HERMITIAN_TOL", "TRACE_TOL", "PSD_TOL", "NORM_TOL",
    "DensityMatrix", "PureState",
    "as_matrix", "dagger", "projector", "is_hermitian", "kron",
    "partial_trace", "partial_trace_matrix", "partial_transpose", "partial_transpose_matrix",
    "hermitian_eig", "real_symmetric_embedding", "min_eigenvalue", "singular_values", "trace_norm", "psd_sqrt",
    "expectation", "local_operator", "to_density", "matrix_to_dict", "matrix_from_dict",
]

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
NORM_TOL = 1e-10


def as_matrix(a) -> np.ndarray:
    """
    Coerces the input into a 2-D complex array

    :raises DimensionError: if the input is not two-dimensional
    :raises InvalidStateError: if the input has non-finite entries
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise DimensionError(f"Expected a matrix, got an array with shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidStateError("Matrix has non-finite entries")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(a))


def projector(v) -> np.ndarray:
    """Projector onto the (not necessarily normalized) vector v"""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())


def is_hermitian(a: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) <= tol * scale)


def kron(*mats) -> np.ndarray:
    """
    Kronecker product of one or more matrices (or vectors), left to right
    """
    if not mats:
        raise ValueError("kron requires at least one operand")
    return reduce(np.kron, [np.asarray(m, dtype=complex) for m in mats])


def _check_dims(dims: Sequence[int], size: int) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimensionError(f"Invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != size:
        raise DimensionError(f"Subsystem dimensions {dims} do not multiply to {size}")
    return dims


def _check_index(index: int, n: int) -> int:
    if not 0 <= index < n:
        raise DimensionError(f"Subsystem index {index} out of range for {n} subsystems")
    return index


class DensityMatrix:
    """
    Hermitian, unit-trace, positive semi-definite operator on a multipartite space.

    Eigenvalues in ``[-PSD_TOL, 0)`` are accepted as numerical noise, anything lower is rejected.
    """
    def __init__(self, mat, dims: Sequence[int] = None, validate: bool = True):
        m = as_matrix(mat).copy()
        if m.shape[0] != m.shape[1]:
            raise DimensionError(f"Density matrix must be square, got {m.shape}")
        if dims is None:
            dims = _default_qubit_dims(m.shape[0])
        self._dims = _check_dims(dims, m.shape[0])
        if validate:
            if not is_hermitian(m):
                raise InvalidStateError("Density matrix is not Hermitian")
            tr = np.trace(m).real
            if abs(tr - 1) > TRACE_TOL:
                raise InvalidStateError(f"Density matrix trace is {tr}, expected 1")
            m = (m + dagger(m)) / 2
            w = np.linalg.eigvalsh(m)
            if w[0] < -PSD_TOL:
                raise InvalidStateError(f"Density matrix has negative eigenvalue {w[0]:.3e}")
        m.setflags(write=False)
        self._mat = m

    @classmethod
    def from_pure(cls, psi: PureState) -> DensityMatrix:
        return cls(projector(psi.amp), psi.dims, validate=False)

    @classmethod
    def maximally_mixed(cls, dims: Sequence[int]) -> DensityMatrix:
        d = int(np.prod(dims))
        return cls(np.eye(d) / d, dims, validate=False)

    @classmethod
    def mixture(cls, weights: Sequence[float], states: Sequence[Union[DensityMatrix, PureState]]) -> DensityMatrix:
        """
        Convex combination of states sharing one set of dimensions

        :param weights: Nonnegative weights, summing to 1
        :param states: Density matrices or pure states
        """
        if len(weights) != len(states) or not states:
            raise DimensionError("Mixture needs one weight per state")
        if any(w < 0 for w in weights):
            raise InvalidStateError("Mixture weights must be nonnegative")
        dims = states[0].dims
        total = np.zeros((int(np.prod(dims)),) * 2, dtype=complex)
        for w, s in zip(weights, states):
            if s.dims != dims:
                raise DimensionError(f"Cannot mix states with dims {dims} and {s.dims}")
            total += w * to_density(s).mat
        return cls(total, dims)

    @property
    def mat(self) -> np.ndarray:
        """
        **Read Only**

        The underlying matrix. The array is flagged read-only
        """
        return self._mat

    @property
    def dims(self) -> Tuple[int, ...]:
        """
        **Read Only**

        Ordered subsystem dimensions
        """
        return self._dims

    @property
    def dim(self) -> int:
        return self._mat.shape[0]

    @property
    def n_subsystems(self) -> int:
        return len(self._dims)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self._mat)

    def purity(self) -> float:
        return float(np.real(np.trace(self._mat @ self._mat)))

    def expectation(self, op) -> float:
        """
        Real part of Tr(rho * op). The operator should be Hermitian
        """
        return expectation(self, op)

    def evolve(self, unitary) -> DensityMatrix:
        u = as_matrix(unitary)
        return DensityMatrix(u @ self._mat @ dagger(u), self._dims, validate=False)

    def to_dict(self):
        d = matrix_to_dict(self._mat)
        d["dims"] = list(self._dims)
        return d

    @classmethod
    def from_dict(cls, data) -> DensityMatrix:
        return cls(matrix_from_dict(data), data.get("dims"))

    def __eq__(self, other):
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return self._dims == other._dims and np.allclose(self._mat, other._mat, atol=1e-12)

    def __repr__(self):
        return repr_format(self, dims=self._dims, purity=round(self.purity(), 6))


class PureState:
    """
    Normalized state vector together with its subsystem dimensions
    """
    def __init__(self, amp, dims: Sequence[int] = None, normalize: bool = False):
        v = np.array(amp, dtype=complex).ravel()
        if not np.all(np.isfinite(v)):
            raise InvalidStateError("State vector has non-finite entries")
        norm = np.linalg.norm(v)
        if normalize:
            if norm == 0:
                raise InvalidStateError("Cannot normalize the zero vector")
            v = v / norm
        elif abs(norm ** 2 - 1) > NORM_TOL:
            raise InvalidStateError(f"State vector has squared norm {norm ** 2}, expected 1")
        if dims is None:
            dims = _default_qubit_dims(v.size)
        self._dims = _check_dims(dims, v.size)
        v.setflags(write=False)
        self._amp = v

    @property
    def amp(self) -> np.ndarray:
        """
        **Read Only**

        Amplitudes in the computational basis, subsystem 0 most significant
        """
        return self._amp

    @property
    def dims(self) -> Tuple[int, ...]:
        return self._dims

    @property
    def n_subsystems(self) -> int:
        return len(self._dims)

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix.from_pure(self)

    def expectation(self, op) -> float:
        op = as_matrix(op)
        return float(np.real(np.vdot(self._amp, op @ self._amp)))

    def evolve(self, unitary) -> PureState:
        return PureState(as_matrix(unitary) @ self._amp, self._dims, normalize=True)

    def overlap(self, other: PureState) -> complex:
        return complex(np.vdot(self._amp, other._amp))

    def to_dict(self):
        return {
            "dims": list(self._dims),
            "re": self._amp.real.tolist(),
            "im": self._amp.imag.tolist(),
        }

    @classmethod
    def from_dict(cls, data) -> PureState:
        amp = np.asarray(data["re"], dtype=float) + 1j * np.asarray(data["im"], dtype=float)
        return cls(amp, data.get("dims"))

    def __repr__(self):
        return repr_format(self, dims=self._dims)


def _default_qubit_dims(size: int) -> Tuple[int, ...]:
    n = int(round(np.log2(size))) if size > 0 else 0
    if size < 2 or 2 ** n != size:
        return (size,)
    return (2,) * n


def to_density(state: Union[DensityMatrix, PureState]) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    if isinstance(state, PureState):
        return state.density_matrix()
    raise TypeError(f"Expected a DensityMatrix or PureState, got {type(state).__name__}")


def expectation(state: Union[DensityMatrix, PureState], op) -> float:
    if isinstance(state, PureState):
        return state.expectation(op)
    return float(np.real(np.trace(state.mat @ as_matrix(op))))


def partial_trace_matrix(mat: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """
    Traces out every subsystem not in ``keep``. Kept subsystems stay in their original order
    """
    dims = _check_dims(dims, mat.shape[0])
    n = len(dims)
    keep = sorted(set(keep))
    if not keep:
        raise DimensionError("Partial trace needs at least one kept subsystem")
    for k in keep:
        _check_index(k, n)
    t = np.asarray(mat).reshape(dims + dims)
    current = list(dims)
    for i in sorted(set(range(n)) - set(keep), reverse=True):
        t = np.trace(t, axis1=i, axis2=i + len(current))
        current.pop(i)
    d = int(np.prod(current))
    return t.reshape(d, d)


def partial_trace(rho: DensityMatrix, keep: Iterable[int]) -> DensityMatrix:
    """
    Reduced state on the subsystems listed in ``keep``

    :param rho: The state
    :param keep: Subsystem indices to keep
    :raises DimensionError: for an empty or out-of-range ``keep``
    """
    keep = sorted(set(keep))
    reduced = partial_trace_matrix(rho.mat, rho.dims, keep)
    return DensityMatrix((reduced + dagger(reduced)) / 2, [rho.dims[k] for k in keep], validate=False)


def partial_transpose_matrix(mat: np.ndarray, dims: Sequence[int], parts: Union[int, Iterable[int]]) -> np.ndarray:
    dims = _check_dims(dims, mat.shape[0])
    n = len(dims)
    if isinstance(parts, (int, np.integer)):
        parts = [parts]
    axes = list(range(2 * n))
    for p in parts:
        _check_index(p, n)
        axes[p], axes[p + n] = axes[p + n], axes[p]
    return np.asarray(mat).reshape(dims + dims).transpose(axes).reshape(mat.shape)


def partial_transpose(rho: DensityMatrix, part: Union[int, Iterable[int]]) -> np.ndarray:
    """
    Transpose with respect to one subsystem (or a set of subsystems, to cover cuts like 2|4 read as 2|2x2)

    :param rho: The state
    :param part: Subsystem index or indices to transpose
    :return: The partially transposed matrix; Hermitian with unit trace but possibly indefinite
    """
    return partial_transpose_matrix(rho.mat, rho.dims, part)


def hermitian_eig(h) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix

    :return: ascending eigenvalues and the unitary whose columns are the eigenvectors
    :raises NotHermitianError: if ``h`` is not Hermitian to ``HERMITIAN_TOL``
    """
    m = as_matrix(h)
    if not is_hermitian(m):
        raise NotHermitianError("Eigendecomposition requires a Hermitian matrix")
    return np.linalg.eigh((m + dagger(m)) / 2)


def real_symmetric_embedding(h) -> np.ndarray:
    """
    Maps an n x n Hermitian matrix to the 2n x 2n real symmetric matrix [[Re, -Im], [Im, Re]].
    The spectrum is the original one with every eigenvalue doubled, so PSD-ness is preserved both ways
    """
    m = np.asarray(h, dtype=complex)
    return np.block([[m.real, -m.imag], [m.imag, m.real]])


def min_eigenvalue(h) -> float:
    return float(hermitian_eig(h)[0][0])


def singular_values(a) -> np.ndarray:
    """Singular values in descending order"""
    return np.linalg.svd(as_matrix(a), compute_uv=False)


def trace_norm(a) -> float:
    return float(np.sum(singular_values(a)))


def psd_sqrt(a) -> np.ndarray:
    """
    Principal square root of a positive semi-definite matrix. Eigenvalues down to ``-PSD_TOL`` are clamped to 0

    :raises InvalidStateError: if the matrix is indefinite beyond the tolerance
    """
    w, v = hermitian_eig(a)
    if w[0] < -PSD_TOL:
        raise InvalidStateError(f"Cannot take the square root of an indefinite matrix (min eigenvalue {w[0]:.3e})")
    w = np.sqrt(np.clip(w, 0, None))
    return (v * w) @ dagger(v)


def matrix_to_dict(a) -> dict:
    m = as_matrix(a)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    }


def matrix_from_dict(data) -> np.ndarray:
    rows, cols = int(data["rows"]), int(data["cols"])
    re, im = list(data["re"]), list(data["im"])
    if len(re) != rows * cols or len(im) != rows * cols:
        raise DimensionError(f"Matrix entry count does not match {rows}x{cols}")
    return as_matrix((np.asarray(re, dtype=float) + 1j * np.asarray(im, dtype=float)).reshape(rows, cols))


def local_operator(op, index: int, dims: Sequence[int]) -> np.ndarray:
    """
    Embeds an operator acting on subsystem ``index`` into the full space, identities elsewhere
    """
    dims = tuple(int(d) for d in dims)
    _check_index(index, len(dims))
    op = as_matrix(op)
    if op.shape != (dims[index], dims[index]):
        raise DimensionError(f"Operator of shape {op.shape} does not act on a subsystem of dimension {dims[index]}")
    factors = [np.eye(d) for d in dims]
    factors[index] = op
    return kron(*factors)
