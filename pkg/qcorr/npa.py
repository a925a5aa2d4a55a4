"""
Second level of the commuting (modified) NPA hierarchy for two or three parties with two dichotomic
measurements each.

Generators are the +-1 valued observables ``A0, A1, B0, B1, C0, C1``. Generators of the same party are taken to
commute, and every generator squares to the identity, so a word is fully described by which generators occur an
odd number of times. Words are stored as bitmasks (bit ``2 * party + setting``) and multiply by XOR.

A moment is *observable* when at most one generator per party survives; such moments are fixed to measured
correlators. All other moments enter the moment matrix as free real variables and the feasibility SDP looks for
an assignment making the matrix positive semi-definite.
"""
from __future__ import annotations

import itertools
import logging
import re
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from qcorr.circuits.observables import PAULI
from qcorr.exceptions import DimensionError, NotHermitianError
from qcorr.linalg import DensityMatrix, PureState, dagger, is_hermitian, kron, matrix_to_dict, to_density
from qcorr.sdp import BarrierSolver, FeasibilityResult, LMIBlock, LMIProblem, SolverOptions
from qcorr.utils import repr_format
from qcorr.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

__all__ = [
    "PARTY_LETTERS", "OBSERVABLE", "VARIABLE", "Word", "level2_words", "canonicalize", "MomentMatrix",
    "W_SETTINGS", "GHZ_SETTINGS", "SETTINGS", "settings_from_dict", "measured_moments", "quantum_moment_matrix",
    "LocalityReport", "test_locality", "test_locality_batch", "deterministic_moments", "mix_moments",
    "chsh_value", "PRINTED_IDENTIFICATIONS", "diagnostics",
]

PARTY_LETTERS = "ABC"
OBSERVABLE = "observable"
VARIABLE = "variable"
DICHOTOMIC_TOL = 1e-9

_TOKEN = re.compile(r"([A-C])([01])")


class Word:
    """
    Canonical product of generators under the commuting relaxation

    :param mask: Bit ``2 * party + setting`` is set when that generator occurs an odd number of times
    """
    def __init__(self, mask: int = 0):
        if mask < 0 or mask >= 1 << (2 * len(PARTY_LETTERS)):
            raise ValueError(f"Word mask {mask} out of range")
        self.mask = int(mask)

    @classmethod
    def identity(cls) -> Word:
        return cls(0)

    @classmethod
    def generator(cls, party: int, setting: int) -> Word:
        if not 0 <= party < len(PARTY_LETTERS) or setting not in (0, 1):
            raise ValueError(f"No generator for party {party}, setting {setting}")
        return cls(1 << (2 * party + setting))

    @classmethod
    def from_string(cls, text: str) -> Word:
        """
        Parses products such as ``"A1A0A1B0"``; ``"I"`` and the empty string are the identity
        """
        text = text.replace(" ", "").replace("*", "")
        if text in ("", "I"):
            return cls.identity()
        tokens = _TOKEN.findall(text)
        if "".join(a + b for a, b in tokens) != text:
            raise ValueError(f"Cannot parse operator word '{text}'")
        word = cls.identity()
        for letter, setting in tokens:
            word = word * cls.generator(PARTY_LETTERS.index(letter), int(setting))
        return word

    @property
    def generators(self) -> List[Tuple[int, int]]:
        """**Read Only** (party, setting) pairs present in the word, in canonical order"""
        return [divmod(bit, 2) for bit in range(2 * len(PARTY_LETTERS)) if self.mask >> bit & 1]

    @property
    def key(self) -> str:
        if self.mask == 0:
            return "I"
        return "".join(f"{PARTY_LETTERS[p]}{s}" for p, s in self.generators)

    @property
    def length(self) -> int:
        return bin(self.mask).count("1")

    @property
    def is_observable(self) -> bool:
        """At most one generator per party"""
        return all((self.mask >> (2 * p)) & 3 != 3 for p in range(len(PARTY_LETTERS)))

    @property
    def body(self) -> int:
        """Number of parties acted on"""
        return sum(1 for p in range(len(PARTY_LETTERS)) if (self.mask >> (2 * p)) & 3)

    def __mul__(self, other: Word) -> Word:
        return Word(self.mask ^ other.mask)

    def __eq__(self, other):
        if not isinstance(other, Word):
            return NotImplemented
        return self.mask == other.mask

    def __hash__(self):
        return hash(self.mask)

    def __repr__(self):
        return f"Word({self.key})"


def _check_parties(n_parties: int):
    if n_parties not in (2, 3):
        raise DimensionError(f"Only 2 or 3 parties are supported, got {n_parties}")


def level2_words(n_parties: int) -> List[Word]:
    """
    Identity, the 2N generators and every product of two distinct generators.
    11 words for two parties, 22 for three
    """
    _check_parties(n_parties)
    gens = [Word.generator(p, s) for p in range(n_parties) for s in (0, 1)]
    return [Word.identity()] + gens + [a * b for a, b in itertools.combinations(gens, 2)]


def canonicalize(word: Union[Word, str]) -> Tuple[str, str]:
    """
    :return: (canonical key, ``"observable"`` or ``"variable"``)
    """
    word = Word.from_string(word) if isinstance(word, str) else word
    return word.key, OBSERVABLE if word.is_observable else VARIABLE


class MomentMatrix:
    """
    Symbolic level-2 moment matrix. Entry (i, j) holds the canonical key of ``word_i^dag word_j``

    :param n_parties: 2 or 3
    :param full_body: Treat the three-body correlators as measured. When False they become free variables
    """
    def __init__(self, n_parties: int, full_body: bool = True):
        self.n_parties = n_parties
        self.full_body = full_body
        self.words = level2_words(n_parties)
        masks = np.array([w.mask for w in self.words])
        self._entry_masks = masks[:, np.newaxis] ^ masks[np.newaxis, :]
        present = sorted(set(int(m) for m in np.unique(self._entry_masks)))
        self._known_masks = [m for m in present if self._is_known(Word(m))]
        self._free_masks = [m for m in present if not self._is_known(Word(m))]
        self.known: Dict[str, float] = {}

    def _is_known(self, word: Word) -> bool:
        if not word.is_observable:
            return False
        return self.full_body or word.body < 3

    @property
    def size(self) -> int:
        return len(self.words)

    @property
    def entry_map(self) -> List[List[str]]:
        """**Read Only** Key of every entry, row by row"""
        return [[Word(int(m)).key for m in row] for row in self._entry_masks]

    def key(self, i: int, j: int) -> str:
        return Word(int(self._entry_masks[i, j])).key

    @property
    def observable_keys(self) -> List[str]:
        """Measured keys present in the matrix, identity excluded"""
        return [Word(m).key for m in self._known_masks if m != 0]

    @property
    def free_keys(self) -> List[str]:
        """Free keys present in the matrix, in variable order"""
        return [Word(m).key for m in self._free_masks]

    @property
    def n_canonical_moments(self) -> int:
        return 1 << (2 * self.n_parties)

    @property
    def n_variables(self) -> int:
        """Canonical moments that are not measured, whether or not they appear in the matrix"""
        n_known = sum(1 for m in range(self.n_canonical_moments) if self._is_known(Word(m)))
        return self.n_canonical_moments - n_known

    @property
    def n_active_variables(self) -> int:
        return len(self._free_masks)

    def set_known(self, moments: Mapping[str, float]):
        """
        Fixes every measured entry. Extra keys are ignored

        :raises ValueError: if a measured key is missing
        """
        canonical = {canonicalize(k)[0]: float(v) for k, v in moments.items()}
        canonical["I"] = 1.0
        missing = [k for k in self.observable_keys if k not in canonical]
        if missing:
            raise ValueError(f"Missing measured moments for {missing}")
        self.known = {"I": 1.0, **{k: canonical[k] for k in self.observable_keys}}
        ignored = set(canonical) - set(self.known)
        if ignored:
            logger.debug(f"Ignoring {len(ignored)} moment(s) that are not measured entries")

    def _indicator(self, mask: int) -> np.ndarray:
        return (self._entry_masks == mask).astype(float)

    def lmi_block(self) -> LMIBlock:
        if not self.known:
            raise ValueError("Measured moments have not been set")
        f0 = sum(self.known[Word(m).key] * self._indicator(m) for m in self._known_masks)
        return LMIBlock(f0, [self._indicator(m) for m in self._free_masks], "moment-matrix")

    def evaluate(self, values: Mapping[str, float]) -> np.ndarray:
        """
        Numeric matrix from a value for every key present, e.g. a full deterministic assignment
        """
        values = {canonicalize(k)[0]: float(v) for k, v in values.items()}
        values.setdefault("I", 1.0)
        gamma = np.empty(self._entry_masks.shape)
        for m in set(int(x) for x in np.unique(self._entry_masks)):
            key = Word(m).key
            if key not in values:
                raise ValueError(f"No value for moment {key}")
            gamma[self._entry_masks == m] = values[key]
        return gamma

    def to_dict(self):
        return {
            "n_parties": self.n_parties,
            "size": self.size,
            "words": [w.key for w in self.words],
            "known": dict(self.known),
            "free": self.free_keys,
            "n_variables": self.n_variables,
            "n_active_variables": self.n_active_variables,
        }

    def __repr__(self):
        return repr_format(self, n_parties=self.n_parties, size=self.size, observables=len(self.observable_keys),
                           variables=self.n_variables)


_SQRT_HALF = 1 / np.sqrt(2)

W_SETTINGS = [(PAULI["X"], PAULI["Z"])] * 3
GHZ_SETTINGS = [(PAULI["X"], (PAULI["X"] + PAULI["Z"]) * _SQRT_HALF)] * 3
SETTINGS = {"w": W_SETTINGS, "ghz": GHZ_SETTINGS}


def settings_from_dict(data: Sequence[Mapping[str, Mapping[str, float]]]) -> List[Tuple[np.ndarray, np.ndarray]]:
    """
    Settings from Pauli coefficients, one entry per party::

        [{"M0": {"X": 1}, "M1": {"X": 0.7071, "Z": 0.7071}}, ...]
    """
    settings = []
    for party in data:
        pair = []
        for name in ("M0", "M1"):
            coeffs = party[name]
            pair.append(sum(float(c) * PAULI[label] for label, c in coeffs.items()))
        settings.append(tuple(pair))
    return settings


def _check_settings(settings) -> List[Tuple[np.ndarray, np.ndarray]]:
    checked = []
    for p, pair in enumerate(settings):
        if len(pair) != 2:
            raise ValueError(f"Party {p} needs exactly two settings")
        for s, m in enumerate(pair):
            m = np.asarray(m, dtype=complex)
            if m.shape != (2, 2):
                raise DimensionError(f"Setting {PARTY_LETTERS[p]}{s} must be 2x2, got {m.shape}")
            if not is_hermitian(m):
                raise NotHermitianError(f"Setting {PARTY_LETTERS[p]}{s} is not Hermitian")
            if np.max(np.abs(m @ m - np.eye(2))) > DICHOTOMIC_TOL:
                raise ValueError(f"Setting {PARTY_LETTERS[p]}{s} is not dichotomic (M^2 != I)")
        checked.append(tuple(np.asarray(m, dtype=complex) for m in pair))
    return checked


def _word_operator(word: Word, settings, n_parties: int) -> np.ndarray:
    factors = [np.eye(2, dtype=complex) for _ in range(n_parties)]
    for p, s in word.generators:
        factors[p] = factors[p] @ settings[p][s]
    return kron(*factors)


def measured_moments(rho: Union[DensityMatrix, PureState], settings) -> Dict[str, float]:
    """
    Every observable correlator (1-, 2- and, for three parties, 3-body) of ``rho`` under ``settings``

    :param settings: One (M0, M1) pair of dichotomic qubit observables per party
    """
    settings = _check_settings(settings)
    n = len(settings)
    _check_parties(n)
    rho = to_density(rho)
    if tuple(rho.dims) != (2,) * n:
        raise DimensionError(f"Expected {n} qubits, got dims {rho.dims}")
    moments = {}
    for m in range(1 << (2 * n)):
        word = Word(m)
        if word.is_observable:
            moments[word.key] = rho.expectation(_word_operator(word, settings, n))
    return moments


def quantum_moment_matrix(rho: Union[DensityMatrix, PureState], settings) -> np.ndarray:
    """
    Gram matrix Tr(rho O_i^dag O_j) of the level-2 words realized by the (possibly non-commuting) settings,
    each word taken as the ordered product of its generators
    """
    settings = _check_settings(settings)
    n = len(settings)
    rho = to_density(rho)
    ops = [_word_operator(w, settings, n) for w in level2_words(n)]
    gamma = np.array([[np.trace(rho.mat @ dagger(a) @ b) for b in ops] for a in ops])
    return (gamma + dagger(gamma)) / 2


class LocalityReport:
    """
    Unpacks as ``(local_feasible, t_star)``

    :ivar matrix: The moment matrix with its measured entries
    :ivar result: The feasibility result of the solver
    """
    def __init__(self, matrix: MomentMatrix, result: FeasibilityResult):
        self.matrix = matrix
        self.result = result

    @property
    def local_feasible(self) -> bool:
        return self.result.feasible

    @property
    def t_star(self) -> float:
        return self.result.t_star

    @property
    def verdict(self) -> str:
        return self.result.verdict.description

    def gamma(self) -> np.ndarray:
        """Moment matrix at the optimizer's free values, shifted by t* I"""
        return self.matrix.lmi_block().evaluate(self.result.x) + self.t_star * np.eye(self.matrix.size)

    def __iter__(self):
        return iter((self.local_feasible, self.t_star))

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "local_feasible": self.local_feasible,
            "t_star": self.t_star,
            "iterations": self.result.iterations,
            "n_variables": self.matrix.n_variables,
            "n_active_variables": self.matrix.n_active_variables,
            "known": dict(self.matrix.known),
            "gamma": matrix_to_dict(self.gamma()),
        }

    def __repr__(self):
        return repr_format(self, verdict=self.verdict, t_star=self.t_star)


def test_locality(moments: Mapping[str, float], n_parties: int, full_body: bool = True,
                  options: SolverOptions = None) -> LocalityReport:
    """
    Searches for a positive semi-definite level-2 moment matrix agreeing with the measured correlators

    :param moments: Measured value per observable key, e.g. from :func:`measured_moments`
    :param n_parties: 2 or 3
    :param full_body: Include the three-body correlators in the measured set
    :raises IterationLimitError: if the solver does not converge
    """
    matrix = MomentMatrix(n_parties, full_body)
    matrix.set_known(moments)
    block = matrix.lmi_block()
    problem = LMIProblem(np.zeros(block.nvars), [block])
    result = BarrierSolver(options).feasibility(problem)
    report = LocalityReport(matrix, result)
    logger.info(f"Locality test ({n_parties} parties, {matrix.n_active_variables} free): {report.verdict}, "
                f"t*={report.t_star:.3e}")
    return report


def test_locality_batch(moment_sets: Iterable[Mapping[str, float]], n_parties: int, full_body: bool = True,
                        options: SolverOptions = None, workers: int = None) -> List[LocalityReport]:
    """Independent locality tests, in input order"""
    return parallel_map(lambda m: test_locality(m, n_parties, full_body, options), list(moment_sets), workers)


def deterministic_moments(assignment: Sequence[Tuple[int, int]]) -> Dict[str, float]:
    """
    Value of every canonical moment under a deterministic local strategy

    :param assignment: (a0, a1) outcomes in {+1, -1} per party
    """
    n = len(assignment)
    _check_parties(n)
    for pair in assignment:
        if len(pair) != 2 or any(v not in (1, -1) for v in pair):
            raise ValueError(f"Deterministic outcomes must be +-1 pairs, got {pair}")
    values = {}
    for m in range(1 << (2 * n)):
        word = Word(m)
        values[word.key] = float(np.prod([assignment[p][s] for p, s in word.generators]))
    return values


def mix_moments(weights: Sequence[float], moment_sets: Sequence[Mapping[str, float]]) -> Dict[str, float]:
    """Convex combination of moment maps over their shared keys"""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(moment_sets) or np.any(weights < 0) or abs(weights.sum() - 1) > 1e-12:
        raise ValueError("Weights must be a probability vector matching the moment sets")
    keys = set.intersection(*(set(m) for m in moment_sets))
    return {k: float(sum(w * m[k] for w, m in zip(weights, moment_sets))) for k in keys}


def chsh_value(moments: Mapping[str, float]) -> float:
    """Largest |CHSH| over the four placements of the minus sign"""
    terms = [moments[k] for k in ("A0B0", "A0B1", "A1B0", "A1B1")]
    return max(abs(sum(terms) - 2 * terms[i]) for i in range(4))


PRINTED_IDENTIFICATIONS = [
    ("v6", "A1A0A1", "A0"),
    ("v8", "B1B0B1", "B0"),
    ("v9", "A1A0A1B0", "A0B0"),
    ("v10", "A1A0A1B1", "A0B1"),
    ("v14", "A0B1B0B1", "A0B0"),
    ("v15", "A1B1B0B1", "A1B0"),
    ("v11", "A1A0B0B1", "A0A1B0B1"),
    ("v12", "A0A1B0B1", "A0A1B0B1"),
    ("v13", "A0A1B1B0", "A0A1B0B1"),
]
"""(variable, product as printed, identification listed with the two-party matrix)"""


def diagnostics() -> List[dict]:
    """
    Checks the listed two-party identifications against canonicalization. Mismatches are logged, not raised
    """
    rows = []
    for name, printed, expected in PRINTED_IDENTIFICATIONS:
        key, kind = canonicalize(printed)
        match = key == canonicalize(expected)[0]
        if not match:
            logger.warning(f"{name} = <{printed}> canonicalizes to {key}, listed as {expected}")
        rows.append({"variable": name, "printed": printed, "canonical": key, "kind": kind, "expected": expected,
                     "match": match})
    return rows
