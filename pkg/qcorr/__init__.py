from __future__ import annotations

__version__ = "0.1.0"

from qcorr.linalg import DensityMatrix, PureState  # noqa: E402
