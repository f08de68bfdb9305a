"""Tabulated transform curves and their CSV + JSON sidecar format."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ArgumentError

KINDS = ("G", "R", "S", "psi", "exp_gprime")


@dataclass(frozen=True, eq=False)
class TransformSample:
    """Values of a transform on a grid of arguments.

    ``kind`` is one of ``G``, ``R``, ``S``, ``psi`` or ``exp_gprime``
    (the latter tabulates ``exp(g'(alpha))``).
    """

    kind: str
    args: np.ndarray
    values: np.ndarray
    domain: tuple = (-np.inf, np.inf)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ArgumentError(f"unknown kind {self.kind!r}")
        a = np.asarray(self.args, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if a.shape != v.shape:
            raise ArgumentError("args and values differ in shape")
        object.__setattr__(self, "args", a)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "domain", (float(self.domain[0]), float(self.domain[1])))

    def write(self, path):
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["arg", "value"])
            for a, v in zip(self.args, self.values):
                w.writerow([f"{a:.17g}", f"{v:.17g}"])
        side = {"kind": self.kind, "domain_lo": _enc(self.domain[0]), "domain_hi": _enc(self.domain[1])}
        sidecar(path).write_text(json.dumps(side) + "\n")

    @classmethod
    def read(cls, path):
        path = Path(path)
        meta = json.loads(sidecar(path).read_text())
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(meta["kind"], data[:, 0], data[:, 1], (_dec(meta["domain_lo"]), _dec(meta["domain_hi"])))


def sidecar(path):
    path = Path(path)
    return path.with_suffix(path.suffix + ".json")


def _enc(v):
    if np.isinf(v):
        return "inf" if v > 0 else "-inf"
    return float(v)


def _dec(v):
    return float(v)
