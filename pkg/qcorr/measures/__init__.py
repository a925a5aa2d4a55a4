from __future__ import annotations

from qcorr.measures.discord import DiscordResult, conditional_entropy, discord, discord_grid
from qcorr.measures.entanglement import (
    ccnr, entropy_bits, fidelity, majorization_check, negativity, ppt_check, realign, reduced_purity,
    von_neumann_entropy
)
from qcorr.measures.three_qubit import concurrence_sq, g_pauli, g_pauli_terms, three_tangle
