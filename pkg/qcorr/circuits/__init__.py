from __future__ import annotations

from qcorr.circuits.gates import (
    Gate, cnot, controlled_hadamard, embed, hadamard, parse_token, product_unitary, pulse, rotation, rotation_matrix,
    rx, ry, rz, sequence_unitary, swap, z_rotation_composite
)
from qcorr.circuits.mapping import (
    MappingEntry, MappingRegistry, default_registry, derive_word, expectation_via_mapping, synthesize
)
from qcorr.circuits.observables import (
    GELL_MANN, PAULI, ProductObservable, all_pauli_words, pauli_word, pauli_word_from_index, pauli_word_index
)
