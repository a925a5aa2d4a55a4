"""
Catalog of the states used throughout the package, plus pseudo-pure mixing, Haar sampling and dephasing.

Computational-basis indices put subsystem 0 first (most significant).
"""
from __future__ import annotations

import logging
from typing import Optional, Sequence, Union

import numpy as np
import scipy.stats

from qcorr.exceptions import ConfigError, DimensionError, InvalidStateError
from qcorr.linalg import DensityMatrix, PureState, local_operator, projector, to_density
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

PARAM_TOL = 1e-12


def basis_state(bits: str, dims: Sequence[int] = None) -> PureState:
    """
    Computational basis state from a digit string, e.g. ``basis_state("011")`` or ``basis_state("12", (2, 3))``
    """
    dims = tuple(dims) if dims is not None else (2,) * len(bits)
    if len(dims) != len(bits):
        raise DimensionError("One digit per subsystem is required")
    index = 0
    for digit, d in zip(bits, dims):
        if not 0 <= int(digit) < d:
            raise DimensionError(f"Digit {digit} out of range for dimension {d}")
        index = index * d + int(digit)
    amp = np.zeros(int(np.prod(dims)), dtype=complex)
    amp[index] = 1
    return PureState(amp, dims)


def superposition(terms: dict, dims: Sequence[int] = None) -> PureState:
    """Normalized superposition of basis states, ``{"00": 1, "11": 1}`` for example"""
    amp = sum(coeff * basis_state(bits, dims).amp for bits, coeff in terms.items())
    return PureState(amp, dims, normalize=True)


def bell(k: int) -> PureState:
    """
    Bell states in the order phi+, phi-, psi+, psi- for k = 1..4
    """
    terms = {
        1: {"00": 1, "11": 1},
        2: {"00": 1, "11": -1},
        3: {"01": 1, "10": 1},
        4: {"01": 1, "10": -1},
    }
    if k not in terms:
        raise ValueError(f"Bell state index must be 1..4, got {k}")
    return superposition(terms[k])


def ghz() -> PureState:
    return superposition({"000": 1, "111": 1})


def w() -> PureState:
    return superposition({"001": 1, "010": 1, "100": 1})


def w_bar() -> PureState:
    """Bit-flipped W state"""
    return superposition({"110": 1, "101": 1, "011": 1})


def w_wbar() -> PureState:
    return PureState(w().amp + w_bar().amp, normalize=True)


def bs(k: int) -> PureState:
    """
    Biseparable state with qubit ``k`` (1..3) in |0> and the other two in phi+
    """
    if k not in (1, 2, 3):
        raise ValueError(f"Biseparable index must be 1..3, got {k}")
    terms = {}
    for pair in ("00", "11"):
        bits = list(pair)
        bits.insert(k - 1, "0")
        terms["".join(bits)] = 1
    return superposition(terms)


def sep() -> PureState:
    return basis_state("000")


def s1() -> PureState:
    """Separable two-qubit state |00>"""
    return basis_state("00")


def s2() -> PureState:
    """Separable two-qubit state |+0>"""
    return superposition({"00": 1, "10": 1})


class GenericParams:
    """
    Parameters of the canonical generic three-qubit pure state

    :param amplitudes: a0..a4, nonnegative with unit squared sum
    :param theta: Relative phase on the |100> amplitude, in [0, pi]
    """
    def __init__(self, a0=0.0, a1=0.0, a2=0.0, a3=0.0, a4=0.0, theta: float = 0.0):
        self.a = np.array([a0, a1, a2, a3, a4], dtype=float)
        self.theta = float(theta)
        if np.any(self.a < 0):
            raise InvalidStateError("Generic-state amplitudes must be nonnegative")
        if abs(np.sum(self.a ** 2) - 1) > PARAM_TOL:
            raise InvalidStateError(f"Generic-state amplitudes have squared sum {np.sum(self.a ** 2)}, expected 1")
        if not -PARAM_TOL <= self.theta <= np.pi + PARAM_TOL:
            raise InvalidStateError(f"Generic-state phase {self.theta} outside [0, pi]")

    @classmethod
    def random(cls, rng: np.random.Generator, zero_probability: float = 0.3) -> GenericParams:
        """
        Random parameters where each amplitude is independently zeroed with the given probability
        """
        while True:
            a = np.abs(rng.standard_normal(5))
            a[rng.random(5) < zero_probability] = 0
            if np.any(a > 0):
                break
        a /= np.linalg.norm(a)
        return cls(*a, theta=rng.uniform(0, np.pi))

    def to_dict(self):
        return {**{f"a{i}": float(x) for i, x in enumerate(self.a)}, "theta": self.theta}

    @classmethod
    def from_dict(cls, data) -> GenericParams:
        return cls(*(data[f"a{i}"] for i in range(5)), theta=data["theta"])

    def __repr__(self):
        return repr_format(self, a=self.a.round(6).tolist(), theta=self.theta)


def generic(p: GenericParams) -> PureState:
    """
    a0|000> + a1 e^{i theta}|100> + a2|101> + a3|110> + a4|111>
    """
    amp = np.zeros(8, dtype=complex)
    amp[0] = p.a[0]
    amp[4] = p.a[1] * np.exp(1j * p.theta)
    amp[5] = p.a[2]
    amp[6] = p.a[3]
    amp[7] = p.a[4]
    return PureState(amp, normalize=True)


def e_theta(theta: float) -> PureState:
    """
    cos(theta/2)|00> + sin(theta/2)|11>, negativity sin(theta)/2
    """
    if not -PARAM_TOL <= theta <= np.pi + PARAM_TOL:
        raise InvalidStateError(f"theta {theta} outside [0, pi]")
    amp = np.zeros(4, dtype=complex)
    amp[0] = np.cos(theta / 2)
    amp[3] = np.sin(theta / 2)
    return PureState(amp, normalize=True)


def e_n(n: int) -> PureState:
    """The n-th member of the E family, theta = n pi / 30"""
    return e_theta(n * np.pi / 30)


class TwoParamQubitQutrit:
    """
    Parameters of the U x U invariant qubit-qutrit family. beta is fixed by unit trace: 2 alpha + 3 beta + gamma = 1

    :param validate: Reject parameters giving a negative beta. Off for points of the full (alpha, gamma) box,
                     which are only used through linear functionals
    """
    def __init__(self, alpha: float, gamma: float, validate: bool = True):
        self.alpha = float(alpha)
        self.gamma = float(gamma)
        if validate:
            if not -PARAM_TOL <= self.alpha <= 0.5 + PARAM_TOL or not -PARAM_TOL <= self.gamma <= 1 + PARAM_TOL:
                raise InvalidStateError(f"alpha={alpha}, gamma={gamma} outside [0, 1/2] x [0, 1]")
            if self.beta < -PARAM_TOL:
                raise InvalidStateError(f"alpha={alpha}, gamma={gamma} give beta={self.beta} < 0")

    @property
    def beta(self) -> float:
        return (1 - 2 * self.alpha - self.gamma) / 3

    @property
    def entangled(self) -> bool:
        return 2 * self.alpha + 2 * self.gamma > 1

    def __repr__(self):
        return repr_format(self, alpha=self.alpha, beta=self.beta, gamma=self.gamma)


def qubit_qutrit_operator(p: TwoParamQubitQutrit) -> np.ndarray:
    """
    alpha(|02><02| + |12><12|) + beta(phi+ + phi- + psi+) + gamma psi-, without positivity checks
    """
    dims = (2, 3)
    k = {bits: basis_state(bits, dims).amp for bits in ("00", "01", "02", "10", "11", "12")}
    phi_p = (k["00"] + k["11"]) / np.sqrt(2)
    phi_m = (k["00"] - k["11"]) / np.sqrt(2)
    psi_p = (k["01"] + k["10"]) / np.sqrt(2)
    psi_m = (k["01"] - k["10"]) / np.sqrt(2)
    return (p.alpha * (projector(k["02"]) + projector(k["12"]))
            + p.beta * (projector(phi_p) + projector(phi_m) + projector(psi_p))
            + p.gamma * projector(psi_m))


def qubit_qutrit(p: TwoParamQubitQutrit) -> DensityMatrix:
    return DensityMatrix(qubit_qutrit_operator(p), (2, 3))


def _check_b(b: float):
    if not -PARAM_TOL <= b <= 1 + PARAM_TOL:
        raise InvalidStateError(f"b={b} outside [0, 1]")


def horodecki_b(b: float) -> DensityMatrix:
    """
    The 2x4 PPT entangled family, written on three qubits (the ququart is qubits 2 and 3)
    """
    _check_b(b)
    m = np.zeros((8, 8))
    for i in (0, 1, 2, 3, 5, 6):
        m[i, i] = b
    m[4, 4] = m[7, 7] = (1 + b) / 2
    for i, j in ((0, 5), (1, 6), (2, 7)):
        m[i, j] = m[j, i] = b
    m[4, 7] = m[7, 4] = np.sqrt(max(1 - b * b, 0.0)) / 2
    return DensityMatrix(m / (1 + 7 * b), (2, 2, 2))


def horodecki_b_components(b: float):
    """
    Pure components and weights of the temporal-averaging construction:
    ``7b/(7b+1) sigma_insep + 1/(7b+1) |phi_b><phi_b|``

    :return: list of (weight, PureState)
    """
    _check_b(b)
    psi1 = superposition({"000": 1, "101": 1})
    psi2 = superposition({"001": 1, "110": 1})
    psi3 = superposition({"010": 1, "111": 1})
    phi_b = PureState(np.sqrt(1 + b) * basis_state("100").amp + np.sqrt(max(1 - b, 0.0)) * basis_state("111").amp,
                      normalize=True)
    norm = 7 * b + 1
    return [
        (2 * b / norm, psi1),
        (2 * b / norm, psi2),
        (2 * b / norm, psi3),
        (b / norm, basis_state("011")),
        (1 / norm, phi_b),
    ]


def horodecki_b_mixture(b: float) -> DensityMatrix:
    """The same family built as the convex combination of its five pure components"""
    weights, states = zip(*horodecki_b_components(b))
    return DensityMatrix.mixture(list(weights), list(states))


def ncc_sigma() -> DensityMatrix:
    """
    1/2 (|00><00| + |1+><1+|): separable, no product eigenbasis
    """
    return DensityMatrix.mixture([0.5, 0.5], [basis_state("00"), superposition({"10": 1, "11": 1})])


def pseudo_pure(psi: Union[PureState, DensityMatrix], eps: float) -> DensityMatrix:
    """
    (1 - eps) I/d + eps |psi><psi|
    """
    if not -PARAM_TOL <= eps <= 1 + PARAM_TOL:
        raise InvalidStateError(f"eps={eps} outside [0, 1]")
    rho = to_density(psi)
    return DensityMatrix((1 - eps) * np.eye(rho.dim) / rho.dim + eps * rho.mat, rho.dims)


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    """PCG64 generator. Seeds are taken modulo 2^64"""
    return np.random.Generator(np.random.PCG64(None if seed is None else int(seed) % 2 ** 64))


def haar_random_pure(n: int, seed: Optional[int] = None, rng: np.random.Generator = None,
                     dims: Sequence[int] = None) -> PureState:
    """
    Haar-random pure state from normalized standard complex Gaussians

    :param n: Number of qubits, ignored when ``dims`` is given
    :param seed: Seed for a fresh PCG64 generator
    :param rng: Caller-owned generator, takes precedence over ``seed``
    :param dims: Explicit subsystem dimensions
    """
    rng = rng if rng is not None else make_rng(seed)
    dims = tuple(dims) if dims is not None else (2,) * n
    d = int(np.prod(dims))
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return PureState(z, dims, normalize=True)


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    return scipy.stats.unitary_group.rvs(d, random_state=rng)


def random_local_unitary(dims: Sequence[int], rng: np.random.Generator) -> np.ndarray:
    u = np.eye(1)
    for d in dims:
        u = np.kron(u, haar_unitary(d, rng))
    return u


def random_separable(dims: Sequence[int], rng: np.random.Generator, n_terms: int = 4) -> DensityMatrix:
    """
    Random convex mixture of product pure states
    """
    weights = rng.dirichlet(np.ones(n_terms))
    terms = []
    for _ in range(n_terms):
        amp = np.ones(1, dtype=complex)
        for d in dims:
            amp = np.kron(amp, haar_random_pure(1, rng=rng, dims=(d,)).amp)
        terms.append(PureState(amp, dims, normalize=True))
    return DensityMatrix.mixture(list(weights), terms)


def dephase(rho: Union[DensityMatrix, PureState], qubit: int, lam: float) -> DensityMatrix:
    """
    Phase-damping channel on one qubit: off-diagonal elements of that qubit scale by (1 - lam)

    :param rho: Input state
    :param qubit: 0-based index of a two-dimensional subsystem
    :param lam: Dephasing strength in [0, 1]
    """
    if not -PARAM_TOL <= lam <= 1 + PARAM_TOL:
        raise InvalidStateError(f"lambda={lam} outside [0, 1]")
    rho = to_density(rho)
    if rho.dims[qubit] != 2:
        raise DimensionError(f"Subsystem {qubit} is not a qubit")
    z = local_operator(np.diag([1.0, -1.0]), qubit, rho.dims)
    mat = (1 - lam / 2) * rho.mat + (lam / 2) * z @ rho.mat @ z
    return DensityMatrix(mat, rho.dims, validate=False)


_TWO_QUBIT_NAMES = {"bell1": lambda: bell(1), "bell2": lambda: bell(2), "bell3": lambda: bell(3),
                    "bell4": lambda: bell(4), "s1": s1, "s2": s2}
_THREE_QUBIT_NAMES = {"ghz": ghz, "w": w, "wwbar": w_wbar, "bs1": lambda: bs(1), "bs2": lambda: bs(2),
                      "bs3": lambda: bs(3), "sep": sep}


def catalog_names():
    names = list(_TWO_QUBIT_NAMES) + [f"e{n}" for n in range(1, 15)] + list(_THREE_QUBIT_NAMES)
    return names + ["ncc_sigma", "horodecki", "qubit_qutrit"]


def from_name(name: str, b: float = None, alpha: float = None, gamma: float = None) -> Union[PureState, DensityMatrix]:
    """
    Looks up a catalog state by name (``bell1``, ``e5``, ``ghz``, ``ncc_sigma``, ``horodecki`` ...)

    :raises ConfigError: for unknown names or missing family parameters
    """
    key = name.strip().lower().replace("-", "_")
    if key in _TWO_QUBIT_NAMES:
        return _TWO_QUBIT_NAMES[key]()
    if key in _THREE_QUBIT_NAMES:
        return _THREE_QUBIT_NAMES[key]()
    if key.startswith("e") and key[1:].isdigit():
        return e_n(int(key[1:]))
    if key == "ncc_sigma":
        return ncc_sigma()
    if key == "horodecki":
        if b is None:
            raise ConfigError("State 'horodecki' needs --b")
        return horodecki_b(b)
    if key == "qubit_qutrit":
        if alpha is None or gamma is None:
            raise ConfigError("State 'qubit_qutrit' needs --alpha and --gamma")
        return qubit_qutrit(TwoParamQubitQutrit(alpha, gamma))
    raise ConfigError(f"Unknown state '{name}'. Known states: {', '.join(catalog_names())}")
