"""
Gate library for qubit registers.

Qubits are indexed from 0 with qubit 0 the most significant tensor factor. Pulse tokens follow the
notation of NMR pulse programs: ``X``, ``Xbar``, ``Y`` and ``Ybar`` are pi/2 rotations with phases
0, pi, pi/2 and -pi/2.
"""
from __future__ import annotations

import logging
import re
from typing import Iterable, Sequence

import numpy as np

from qcorr.exceptions import DimensionError
from qcorr.linalg import as_matrix, dagger, kron
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

UNITARY_TOL = 1e-10

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

PULSE_PHASES = {
    "X": 0.0,
    "Xbar": np.pi,
    "Y": np.pi / 2,
    "Ybar": -np.pi / 2,
}


class Gate:
    """
    A unitary acting on an ``n``-qubit register

    :param unitary: The full 2^n x 2^n matrix
    :param label: Human-readable label, e.g. ``Ybar3`` or ``CNOT12``
    """
    def __init__(self, unitary, label: str = ""):
        u = as_matrix(unitary)
        n = int(round(np.log2(u.shape[0])))
        if u.shape[0] != u.shape[1] or 2 ** n != u.shape[0]:
            raise DimensionError(f"Gate '{label}' must act on qubits, got shape {u.shape}")
        if not np.allclose(u @ dagger(u), np.eye(u.shape[0]), atol=UNITARY_TOL):
            raise ValueError(f"Gate '{label}' is not unitary")
        u.setflags(write=False)
        self._unitary = u
        self.arity = n
        self.label = label

    @property
    def unitary(self) -> np.ndarray:
        """
        **Read Only**

        The full register unitary
        """
        return self._unitary

    def then(self, other: Gate) -> Gate:
        """
        Gate that applies this gate first and ``other`` second
        """
        return Gate(other.unitary @ self._unitary, f"{other.label}.{self.label}")

    def __repr__(self):
        return repr_format(self, label=self.label, arity=self.arity)


def _check_qubit(qubit: int, n: int):
    if n < 1:
        raise DimensionError("Register needs at least one qubit")
    if not 0 <= qubit < n:
        raise DimensionError(f"Qubit index {qubit} out of range for {n} qubits")


def embed(u2, qubit: int, n: int) -> np.ndarray:
    """
    Places a single-qubit operator at ``qubit`` with identities elsewhere
    """
    _check_qubit(qubit, n)
    factors = [np.eye(2)] * n
    factors[qubit] = as_matrix(u2)
    return kron(*factors)


def rotation_matrix(phase: float, angle: float) -> np.ndarray:
    """
    R_phi(theta) = exp(-i theta/2 (cos(phi) X + sin(phi) Y))
    """
    c, s = np.cos(angle / 2), np.sin(angle / 2)
    return np.array([
        [c, -1j * s * np.exp(-1j * phase)],
        [-1j * s * np.exp(1j * phase), c],
    ], dtype=complex)


def rotation(phase: float, angle: float, qubit: int, n: int) -> Gate:
    """
    Transverse rotation of ``qubit`` by ``angle`` about the axis at azimuth ``phase``

    :param phase: Rotation axis azimuth, 0 for x and pi/2 for y
    :param angle: Rotation angle
    :param qubit: Target qubit
    :param n: Register size
    """
    return Gate(embed(rotation_matrix(phase, angle), qubit, n), f"R[{phase:.4g}]({angle:.4g}){qubit + 1}")


def rx(angle: float, qubit: int, n: int) -> Gate:
    return rotation(0.0, angle, qubit, n)


def ry(angle: float, qubit: int, n: int) -> Gate:
    return rotation(np.pi / 2, angle, qubit, n)


def rz(angle: float, qubit: int, n: int) -> Gate:
    u = np.diag([np.exp(-0.5j * angle), np.exp(0.5j * angle)])
    return Gate(embed(u, qubit, n), f"Rz({angle:.4g}){qubit + 1}")


def z_rotation_composite(angle: float, qubit: int, n: int) -> Gate:
    """
    z-rotation built from transverse pulses only: R_x(pi/2) R_y(angle) R_x(-pi/2)
    """
    u = rx(np.pi / 2, qubit, n).unitary @ ry(angle, qubit, n).unitary @ rx(-np.pi / 2, qubit, n).unitary
    return Gate(u, f"Rz*({angle:.4g}){qubit + 1}")


def pulse(name: str, qubit: int, n: int) -> Gate:
    """
    Named pi/2 pulse, one of ``X``, ``Xbar``, ``Y``, ``Ybar``
    """
    if name not in PULSE_PHASES:
        raise ValueError(f"Unknown pulse '{name}'")
    return Gate(embed(rotation_matrix(PULSE_PHASES[name], np.pi / 2), qubit, n), f"{name}{qubit + 1}")


def hadamard(qubit: int, n: int) -> Gate:
    return Gate(embed(HADAMARD, qubit, n), f"H{qubit + 1}")


def _controlled(u2: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    _check_qubit(control, n)
    _check_qubit(target, n)
    if control == target:
        raise DimensionError("Control and target must differ")
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    idle = [np.eye(2)] * n
    idle[control] = p0
    active = [np.eye(2)] * n
    active[control] = p1
    active[target] = u2
    return kron(*idle) + kron(*active)


def cnot(control: int, target: int, n: int) -> Gate:
    return Gate(_controlled(np.array([[0, 1], [1, 0]]), control, target, n), f"CNOT{control + 1}{target + 1}")


def controlled_hadamard(control: int, target: int, n: int) -> Gate:
    return Gate(_controlled(HADAMARD, control, target, n), f"CH{control + 1}{target + 1}")


def swap(a: int, b: int, n: int) -> Gate:
    _check_qubit(a, n)
    _check_qubit(b, n)
    dim = 2 ** n
    u = np.zeros((dim, dim))
    for idx in range(dim):
        bits = [(idx >> (n - 1 - q)) & 1 for q in range(n)]
        bits[a], bits[b] = bits[b], bits[a]
        u[int("".join(map(str, bits)), 2), idx] = 1
    return Gate(u, f"SWAP{a + 1}{b + 1}")


def identity(n: int) -> Gate:
    return Gate(np.eye(2 ** n), "I")


_TOKEN_RE = re.compile(r"^(?:(Xbar|Ybar|X|Y)(\d)|CNOT(\d)(\d)|CNOT|CH(\d)(\d)|I)$")


def parse_token(token: str, n: int) -> Gate:
    """
    Builds a gate from a 1-based token such as ``Ybar3``, ``CNOT12``, ``CH12`` or ``I``.
    A bare ``CNOT`` means qubit 1 controls qubit 2
    """
    m = _TOKEN_RE.match(token)
    if not m:
        raise ValueError(f"Unknown gate token '{token}'")
    if m.group(1):
        return pulse(m.group(1), int(m.group(2)) - 1, n)
    if m.group(3):
        return cnot(int(m.group(3)) - 1, int(m.group(4)) - 1, n)
    if token == "CNOT":
        return cnot(0, 1, n)
    if m.group(5):
        return controlled_hadamard(int(m.group(5)) - 1, int(m.group(6)) - 1, n)
    return identity(n)


def sequence_unitary(gates: Iterable[Gate], n: int) -> np.ndarray:
    """
    Product of gates given in application order (the first gate acts first)
    """
    u = np.eye(2 ** n, dtype=complex)
    for g in gates:
        if g.arity != n:
            raise DimensionError(f"Gate {g.label} acts on {g.arity} qubits, register has {n}")
        u = g.unitary @ u
    return u


def product_unitary(tokens: Sequence[str], n: int) -> np.ndarray:
    """
    Unitary of an operator product written left to right, so the rightmost token acts first
    (``CNOT23.Ybar3.CNOT12.Ybar1`` applies ``Ybar1`` first)
    """
    return sequence_unitary([parse_token(t, n) for t in reversed(tokens)], n)
