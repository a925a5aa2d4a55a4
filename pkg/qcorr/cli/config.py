from __future__ import annotations

import json
import logging
from typing import Optional, Union

from qcorr.exceptions import ConfigError
from qcorr.linalg import DensityMatrix, PureState
from qcorr.states import from_name, haar_random_pure
from qcorr.utils import repr_format

logger = logging.getLogger(__name__)

__all__ = ["SEED_MAX", "RunConfig", "load_state_file"]

SEED_MAX = 2 ** 64 - 1

_NUMERIC_FIELDS = ("b", "theta", "alpha", "gamma", "lam", "tol", "samples")


class RunConfig:
    """
    Parsed options of one CLI invocation

    :param command: Subcommand name
    :param state: Catalog state name
    :param state_file: Path to a JSON state, as written by ``DensityMatrix.to_dict`` or ``PureState.to_dict``
    :param random: Number of qubits of a Haar-random state (for ``classify``, the number of random generic states)
    :param seed: 64-bit seed
    :param fmt: ``csv`` or ``json``
    :param out: Output path, stdout when None
    """
    def __init__(self, command: str, state: str = None, state_file: str = None, random: int = None,
                 seed: int = None, b: float = None, theta: float = None, alpha: float = None, gamma: float = None,
                 lam: float = None, tol: float = None, samples: int = None, fmt: str = "json", out: str = None,
                 **extra):
        self.command = command
        self.state = state
        self.state_file = state_file
        self.random = random
        self.seed = seed
        self.b = b
        self.theta = theta
        self.alpha = alpha
        self.gamma = gamma
        self.lam = lam
        self.tol = tol
        self.samples = samples
        self.fmt = fmt
        self.out = out
        self.extra = extra
        self._validate()

    @classmethod
    def from_namespace(cls, ns) -> RunConfig:
        values = {k: v for k, v in vars(ns).items() if k not in ("func", "log_level", "verbose")}
        values["fmt"] = values.pop("format", "json")
        return cls(**values)

    def _validate(self):
        if self.seed is not None and not 0 <= self.seed <= SEED_MAX:
            raise ConfigError(f"Seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"Unknown output format '{self.fmt}'")
        if self.samples is not None and self.samples <= 0:
            raise ConfigError("--samples must be positive")
        if self.random is not None and self.random <= 0:
            raise ConfigError("--random must be positive")

    @property
    def n_state_sources(self) -> int:
        return sum(x is not None for x in (self.state, self.state_file, self.random))

    def load_state(self) -> Union[DensityMatrix, PureState]:
        """
        The state selected by exactly one of ``--state``, ``--state-file`` and ``--random``

        :raises ConfigError: if no source or more than one is given
        """
        if self.n_state_sources != 1:
            raise ConfigError("Give exactly one of --state, --state-file and --random")
        if self.state is not None:
            return from_name(self.state, b=self.b, alpha=self.alpha, gamma=self.gamma)
        if self.state_file is not None:
            return load_state_file(self.state_file)
        logger.debug(f"Haar-random {self.random}-qubit state, seed {self.seed}")
        return haar_random_pure(self.random, seed=self.seed)

    @property
    def state_label(self) -> Optional[str]:
        if self.state is not None:
            return self.state
        if self.state_file is not None:
            return self.state_file
        if self.random is not None:
            return f"haar{self.random}:{self.seed}"
        return None

    def __repr__(self):
        return repr_format(self, command=self.command, state=self.state_label, seed=self.seed,
                           **{k: getattr(self, k) for k in _NUMERIC_FIELDS if getattr(self, k) is not None})


def load_state_file(path: str) -> Union[DensityMatrix, PureState]:
    """
    Loads a JSON state. Objects with ``rows``/``cols`` are density matrices, others pure state vectors

    :raises ConfigError: if the file cannot be read or does not describe a state
    """
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot read state file {path}: {e}")
    if not isinstance(data, dict) or "re" not in data:
        raise ConfigError(f"State file {path} needs 're' (and optionally 'im', 'dims') fields")
    data.setdefault("im", [0.0] * len(data["re"]))
    if "rows" in data:
        return DensityMatrix.from_dict(data)
    return PureState.from_dict(data)
