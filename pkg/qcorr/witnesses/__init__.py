from __future__ import annotations

from qcorr.witnesses.ncc import (
    A_HAT, MVPoint, mv_dynamics, mv_zero_crossing, ncc_c_opt, ncc_c_opt_numeric, ncc_circuit_magnetizations,
    ncc_map_from_magnetizations, ncc_map_value
)
from qcorr.witnesses.qubit_qutrit import (
    DetectionReport, QubitQutritDecomposition, SubsetFraction, canonical_operators, canonical_weights,
    decompose_qubit_qutrit, detection_fraction, detection_fraction_report, pt_spectrum, qubit_qutrit_witness
)
from qcorr.witnesses.sdp_witness import (
    DETECTION_TOL, WitnessReport, correlation_operators, hermitian_basis, random_local_observable,
    random_measurement_protocol, witness_sdp
)
