import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from .utils import format_exponent, parse_exponent

Triple = Tuple[float, float, float]


def _default_norm_params() -> List[Triple]:
    # (s, p, q): two PLT and two PGT configurations, one of them with p = inf
    return [(0.0, 1.0, 2.0), (0.0, 0.5, 1.0), (0.0, 2.0, 1.0), (0.0, math.inf, 1.0)]


@dataclass(frozen=True)
class ExperimentConfig:
    """All parameters of an experiment run. Tolerances live here too, so a
    report is a function of the table plus this config.
    """

    n: int = 1
    L: float = 64.0
    N: int = 2**20
    Jmax: int = 12
    eps0: float = 0.1
    spacing: float = 2.0
    norm_params: List[Triple] = field(default_factory=_default_norm_params)
    cases: List[str] = field(default_factory=lambda: ["PLT", "PGT"])
    J_sweep: List[int] = field(default_factory=lambda: [4, 6, 8, 10])
    Jmax_sweep: List[int] = field(default_factory=lambda: [6, 8, 10, 12])
    out: str = "results"
    seed: int = 0
    random_fields: int = 20
    random_sequences: int = 50
    sweep_fields: int = 3
    boundary_tol: float = 1e-8
    reconstruction_tol: float = 1e-10
    bracket_low: float = 0.7
    bracket_high: float = 1.4
    besov_spread: float = 0.10
    besov_max: float = 2.5
    divergence_rtol: float = 0.25
    vector_rtol: float = 0.30
    decay_slope_max: float = -4.0
    k_emp_max: int = 5

    def __post_init__(self):
        triples = [tuple(parse_exponent(v) for v in t) for t in self.norm_params]
        for t in triples:
            if len(t) != 3:
                raise ValueError(f"norm_params entries are (s, p, q) triples, got {t}")
        object.__setattr__(self, "norm_params", triples)
        object.__setattr__(self, "J_sweep", [int(J) for J in self.J_sweep])
        object.__setattr__(self, "Jmax_sweep", [int(J) for J in self.Jmax_sweep])
        object.__setattr__(self, "cases", [str(c).upper() for c in self.cases])
        if self.J_sweep != sorted(self.J_sweep):
            raise ValueError(f"J_sweep must be sorted ascending, got {self.J_sweep}")
        if self.J_sweep and self.J_sweep[-1] > self.Jmax - 2:
            raise ValueError(
                f"J_sweep reaches {self.J_sweep[-1]}, needs Jmax >= {self.J_sweep[-1] + 2}"
            )
        for Jmax in self.Jmax_sweep:
            if Jmax < 3:
                raise ValueError(f"Jmax_sweep entries must be at least 3, got {Jmax}")
        for case in self.cases:
            if case not in ["PLT", "PGT"]:
                raise ValueError(f"Unknown case {case}, expected PLT or PGT")
        if self.seed < 0:
            raise ValueError(f"Seed must be non negative, got {self.seed}")

    @classmethod
    def fromDict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        for key in data:
            if key not in known:
                raise ValueError(f"Unknown config key: {key}")
        return cls(**data)

    @classmethod
    def fromFile(cls, path: str) -> "ExperimentConfig":
        """Read a flat JSON object whose keys are field names.

        :param path: path of the JSON file
        :type  path: str
        :rtype: ExperimentConfig
        """
        with open(path, "r") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError(f"Config file {path} must hold a JSON object")
        config = cls.fromDict(data)
        logging.info("Loaded config: %s", path)
        return config

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def toDict(self) -> Dict[str, Any]:
        data = dataclasses.asdict(self)
        data["norm_params"] = [[format_exponent(v) for v in t] for t in self.norm_params]
        return data
