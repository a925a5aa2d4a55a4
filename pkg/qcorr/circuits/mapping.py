"""
Observable to single-qubit z-magnetization mapping.

Each entry holds a gate sequence U and a readout qubit r such that ``<Z_r>`` in ``U rho U^dagger`` equals
``sign * <P>`` in rho for a Pauli word P. Rows are checked when the registry is built: the word actually
realized by ``U^dagger Z_r U`` is derived numerically and recorded together with its sign. Rows whose
derived word differs from the printed word are flagged and registered under the derived word, and any
word left uncovered gets a synthesized entry (basis change followed by a CNOT ladder onto the readout).
"""
from __future__ import annotations

import json
import logging
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from qcorr.circuits.gates import embed, product_unitary
from qcorr.circuits.observables import PAULI, ProductObservable, all_pauli_words, pauli_word, pauli_word_from_index
from qcorr.exceptions import MappingMismatchError, UnregisteredObservableError
from qcorr.linalg import dagger, kron, to_density
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

MAPPING_TOL = 1e-9

# (label, printed word or None, operator product left to right, 1-based readout qubit)
TWO_QUBIT_TABLE: List[Tuple[str, Optional[str], str, int]] = [
    ("O1", "XX", "CNOT.Y2.Y1", 2),
    ("O2", "YY", "CNOT.Xbar2.Xbar1", 2),
    ("O3", "ZZ", "CNOT", 2),
    ("O4", None, "CNOT.Xbar2.Y1", 2),
    ("O5", None, "CNOT.Y1", 2),
    ("O6", None, "CNOT.Ybar2.X1", 2),
    ("O7", None, "CNOT.X1", 2),
    ("O8", None, "CNOT.Ybar2", 2),
    ("O9", None, "CNOT.X2", 2),
    ("O10", None, "Ybar1", 1),
    ("O11", None, "X1", 1),
    ("O12", None, "I", 1),
    ("O13", None, "Ybar2", 2),
    ("O14", None, "X2", 2),
    ("O15", None, "I", 2),
]

_THREE_QUBIT_ROWS = [
    ("Ybar3", 3), ("X3", 3), ("I", 3), ("Ybar2", 2),
    ("CNOT23.Ybar3.Ybar2", 3), ("CNOT23.X3.Ybar2", 3), ("CNOT23.Ybar2", 3), ("X2", 2),
    ("CNOT23.Ybar3.X2", 3), ("CNOT23.X3.X2", 3), ("CNOT23.X2", 3), ("I", 3),
    ("CNOT23.Ybar3", 3), ("CNOT23.X3", 3), ("CNOT23", 3), ("X1", 1),
    ("CNOT13.Ybar3.Ybar1", 3), ("CNOT13.X3.Ybar1", 3), ("CNOT13.Ybar1", 3), ("CNOT12.Ybar2.Ybar1", 2),
    ("CNOT23.Ybar3.CNOT12.Ybar2.Ybar1", 3), ("CNOT23.X3.CNOT12.Ybar2.Ybar1", 3),
    ("CNOT23.CNOT12.Ybar2.Ybar1", 3), ("CNOT12.X2.Ybar1", 2),
    ("CNOT23.Ybar3.CNOT12.X2.Ybar1", 3), ("CNOT23.X3.CNOT12.X2.Ybar1", 3),
    ("CNOT23.CNOT12.X2.Ybar1", 3), ("CNOT12.Ybar1", 2),
    ("CNOT23.Ybar3.CNOT12.Ybar1", 3), ("CNOT23.X3.CNOT12.Ybar1", 3), ("CNOT12.CNOT23.Ybar1", 3), ("X1", 1),
    ("CNOT13.Ybar3.X1", 3), ("CNOT13.X3.X1", 3), ("CNOT13.X1", 3), ("CNOT12.Ybar2.X1", 2),
    ("CNOT23.Ybar3.CNOT12.Ybar2.X1", 3), ("CNOT23.X3.CNOT12.Ybar2.X1", 3),
    ("CNOT23.CNOT12.Ybar2.X1", 3), ("CNOT12.X2.X1", 2),
    ("CNOT23.Ybar3.CNOT12.X2.X1", 3), ("CNOT23.X3.CNOT12.X2.X1", 3), ("CNOT23.CNOT12.X2.X1", 3), ("CNOT12.X1", 2),
    ("CNOT23.Ybar3.CNOT12.X1", 3), ("CNOT23.X3.CNOT12.X1", 3), ("CNOT23.CNOT12.X1", 3), ("I", 1),
    ("CNOT13.Ybar3", 3), ("CNOT13.X3", 3), ("CNOT13", 3), ("CNOT12.Ybar2", 2),
    ("CNOT23.Ybar3.CNOT12.Ybar2", 3), ("CNOT23.X3.CNOT12.Ybar2", 3), ("CNOT23.CNOT12.Ybar2", 3), ("CNOT12.X2", 2),
    ("CNOT23.Ybar3.CNOT12.X2", 3), ("CNOT23.X3.CNOT12.X2", 3), ("CNOT23.CNOT12.X2", 3), ("CNOT12", 2),
    ("CNOT23.Ybar3.CNOT12", 3), ("CNOT23.X3.CNOT12", 3), ("CNOT23.CNOT12", 3),
]

# B_k is the Pauli word whose base-4 digits (qubit 1 first, I=0 X=1 Y=2 Z=3) spell k
THREE_QUBIT_TABLE: List[Tuple[str, Optional[str], str, int]] = [
    (f"B{k}", pauli_word_from_index(k, 3), gates, readout)
    for k, (gates, readout) in enumerate(_THREE_QUBIT_ROWS, start=1)
]

# basis change taking Z to the given Pauli with sign +1 under U^dagger Z U
_BASIS_CHANGE = {"X": "Ybar", "Y": "X"}


class MappingEntry:
    """
    One way of reading a Pauli word off a single-qubit z-magnetization

    :ivar label: Table row label (``O4``, ``B29``) or ``S<word>`` for synthesized entries
    :ivar observable: The Pauli word realized by the sequence
    :ivar gates: Operator product tokens, left to right (the rightmost acts first)
    :ivar readout_qubit: 0-based readout qubit
    :ivar sign: +1 or -1 such that ``<Z_r>_mapped = sign * <P>``
    :ivar source: ``"table"`` or ``"synthesized"``
    :ivar printed_word: The word the table claims for the row, if it states one
    """
    def __init__(self, label: str, observable: ProductObservable, gates: Sequence[str], readout_qubit: int,
                 sign: int, source: str = "table", printed_word: Optional[str] = None):
        self.label = label
        self.observable = observable
        self.gates = tuple(gates)
        self.readout_qubit = readout_qubit
        self.sign = sign
        self.source = source
        self.printed_word = printed_word

    @property
    def n_qubits(self) -> int:
        return len(self.observable.dims)

    @property
    def printed_mismatch(self) -> bool:
        return self.printed_word is not None and self.printed_word != self.observable.word

    def unitary(self) -> np.ndarray:
        return product_unitary(self.gates, self.n_qubits)

    def mapped_magnetization(self, state) -> float:
        """<Z_r> in U rho U^dagger"""
        rho = to_density(state)
        u = self.unitary()
        z_r = embed(PAULI["Z"], self.readout_qubit, self.n_qubits)
        return float(np.real(np.trace(u @ rho.mat @ dagger(u) @ z_r)))

    def to_dict(self):
        return {
            "label": self.label,
            "word": self.observable.word,
            "gates": list(self.gates),
            "readout_qubit": self.readout_qubit + 1,
            "sign": self.sign,
            "source": self.source,
            "printed_word": self.printed_word,
            "printed_mismatch": self.printed_mismatch,
        }

    @classmethod
    def from_dict(cls, data) -> MappingEntry:
        return cls(data["label"], pauli_word(data["word"]), data["gates"], int(data["readout_qubit"]) - 1,
                   int(data["sign"]), data.get("source", "table"), data.get("printed_word"))

    def __repr__(self):
        return repr_format(self, label=self.label, word=self.observable.word, sign=self.sign, source=self.source)


def derive_word(gates: Sequence[str], readout_qubit: int, n: int) -> Tuple[str, int]:
    """
    Identifies the Pauli word ``U^dagger Z_r U`` for a Clifford sequence

    :return: the word and its sign
    :raises MappingMismatchError: if the operator is not a signed Pauli word
    """
    u = product_unitary(gates, n)
    heis = dagger(u) @ embed(PAULI["Z"], readout_qubit, n) @ u
    for word in all_pauli_words(n):
        coeff = np.real(np.trace(kron(*[PAULI[ch] for ch in word]) @ heis)) / 2 ** n
        if abs(abs(coeff) - 1) < MAPPING_TOL:
            return word, int(np.sign(coeff))
    raise MappingMismatchError(f"Sequence {'.'.join(gates)} with readout {readout_qubit + 1} is not a Pauli word")


def synthesize(word: str) -> Tuple[List[str], int]:
    """
    Basis-change plus CNOT-ladder sequence reading ``word`` from its last non-identity qubit

    :return: operator product tokens (left to right) and the 0-based readout qubit
    """
    support = [i for i, ch in enumerate(word) if ch != "I"]
    if not support:
        raise ValueError("The identity has no readout")
    readout = support[-1]
    ladder = [f"CNOT{k + 1}{readout + 1}" for k in support[:-1]]
    basis = [f"{_BASIS_CHANGE[word[k]]}{k + 1}" for k in support if word[k] in _BASIS_CHANGE]
    tokens = ladder + basis
    return tokens or ["I"], readout


class MappingRegistry:
    """
    Read-only lookup of :class:`MappingEntry` by Pauli word, built once per register size
    """
    def __init__(self, n_qubits: int, entries: Sequence[MappingEntry], flagged: Sequence[MappingEntry] = ()):
        self.n_qubits = n_qubits
        self._by_word: Dict[str, MappingEntry] = {}
        for e in entries:
            self._by_word.setdefault(e.observable.word, e)
        self.flagged: Tuple[MappingEntry, ...] = tuple(flagged)
        self.table_entries: Tuple[MappingEntry, ...] = tuple(e for e in entries if e.source == "table")

    @classmethod
    def build(cls, n_qubits: int, table: Sequence[Tuple[str, Optional[str], str, int]]) -> MappingRegistry:
        entries = []
        flagged = []
        for label, printed, product, readout in table:
            gates = product.split(".")
            word, sign = derive_word(gates, readout - 1, n_qubits)
            entry = MappingEntry(label, pauli_word(word), gates, readout - 1, sign, "table", printed)
            entries.append(entry)
            if entry.printed_mismatch or sign < 0:
                logger.info(f"Mapping row {label} realizes {'-' if sign < 0 else '+'}{word}, printed {printed}")
                flagged.append(entry)
        covered = {e.observable.word for e in entries}
        for word in all_pauli_words(n_qubits):
            if word not in covered:
                gates, readout = synthesize(word)
                derived, sign = derive_word(gates, readout, n_qubits)
                if derived != word or sign != 1:
                    raise MappingMismatchError(f"Synthesized sequence for {word} realizes {sign:+d}{derived}")
                entries.append(MappingEntry(f"S{word}", pauli_word(word), gates, readout, sign, "synthesized"))
        logger.debug(f"Built {n_qubits}-qubit mapping registry: {len(table)} table rows, "
                     f"{len(entries) - len(table)} synthesized, {len(flagged)} flagged")
        return cls(n_qubits, entries, flagged)

    def __contains__(self, word: str) -> bool:
        return word in self._by_word

    def __len__(self):
        return len(self._by_word)

    def __iter__(self):
        return iter(self._by_word.values())

    def lookup(self, obs: ProductObservable) -> MappingEntry:
        """
        :raises UnregisteredObservableError: if the observable is not a registered Pauli word
        """
        if not obs.is_pauli_word or obs.word not in self._by_word:
            raise UnregisteredObservableError(f"No mapping registered for '{obs.word}'")
        return self._by_word[obs.word]

    def to_dict(self):
        return {
            "n_qubits": self.n_qubits,
            "entries": [e.to_dict() for e in self._by_word.values()],
            "flagged": [e.to_dict() for e in self.flagged],
        }

    @classmethod
    def from_dict(cls, data) -> MappingRegistry:
        entries = [MappingEntry.from_dict(e) for e in data["entries"]]
        flagged = [MappingEntry.from_dict(e) for e in data.get("flagged", [])]
        return cls(int(data["n_qubits"]), entries, flagged)

    def dump(self, filename: str):
        logger.info(f"Saving mapping registry to {filename}")
        with open(filename, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, filename: str) -> MappingRegistry:
        logger.info(f"Loading mapping registry from {filename}")
        with open(filename, "r") as f:
            return cls.from_dict(json.load(f))


@lru_cache(maxsize=None)
def default_registry(n_qubits: int) -> MappingRegistry:
    """The registry built from the two- or three-qubit mapping table"""
    if n_qubits == 2:
        return MappingRegistry.build(2, TWO_QUBIT_TABLE)
    if n_qubits == 3:
        return MappingRegistry.build(3, THREE_QUBIT_TABLE)
    raise UnregisteredObservableError(f"No mapping table for {n_qubits} qubits")


def expectation_via_mapping(state, obs: ProductObservable, registry: MappingRegistry = None,
                            verify: bool = False) -> float:
    """
    Measures ``obs`` by mapping it onto one qubit's z-magnetization

    :param state: A density matrix or pure state on qubits
    :param obs: A Pauli word, prefactor allowed
    :param registry: Registry to use, defaults to the table for the register size
    :param verify: Also compute ``Tr(rho P)`` directly and raise if the two disagree
    :return: ``sign * <Z_r>`` scaled by the observable's prefactor
    :raises UnregisteredObservableError: if the word has no registered mapping
    :raises MappingMismatchError: if ``verify`` is set and the mapped value disagrees with the direct one
    """
    rho = to_density(state)
    registry = registry or default_registry(rho.n_subsystems)
    entry = registry.lookup(obs)
    value = obs.prefactor * entry.sign * entry.mapped_magnetization(rho)
    if verify:
        direct = obs.expectation(rho)
        if abs(direct - value) > MAPPING_TOL:
            raise MappingMismatchError(f"Mapped <{obs.word}> = {value}, direct value {direct} (row {entry.label})")
    return value
