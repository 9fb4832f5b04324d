"""CSV/JSON writers and the excitation reader.

Floats are written with ``repr`` (shortest string that parses back to the same
double), so every file round-trips exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .array_model import ExcitationMatrix, PatternCut
from .cuckoo import RunResult
from .errors import ContractViolation

PATTERN_HEADER = ("theta_deg", "magnitude_db")
CONVERGENCE_HEADER = ("iteration", "best_objective_db", "fitness_delta_db")
SUMMARY_HEADER = ("seed", "sll_db", "lobe_low_deg", "lobe_high_deg", "best_objective_db")


def _rows_to_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if header:
            writer.writerow(header)
        writer.writerows([[repr(v) if isinstance(v, float) else v for v in row] for row in rows])


def write_pattern(path, cut: PatternCut):
    _rows_to_csv(Path(path), PATTERN_HEADER,
                 zip(map(float, cut.theta_deg), map(float, cut.magnitude_db)))


def write_convergence(path, run: RunResult):
    rows = [(t + 1, float(b), float(d))
            for t, (b, d) in enumerate(zip(run.best_history, run.fitness_deltas))]
    _rows_to_csv(Path(path), CONVERGENCE_HEADER, rows)


def write_excitation(path, excitation: ExcitationMatrix):
    _rows_to_csv(Path(path), None, [[float(v) for v in row] for row in excitation.amplitudes])


def write_summary(path, rows):
    _rows_to_csv(Path(path), SUMMARY_HEADER, rows)


def write_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_excitation(path) -> np.ndarray:
    """Read a headerless grid of amplitudes; ragged or non-numeric files are rejected."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ContractViolation(f"{path}: no excitation rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ContractViolation(f"{path}: rows have differing numbers of columns")
    try:
        return np.array([[float(c) for c in r] for r in rows])
    except ValueError as exc:
        raise ContractViolation(f"{path}: {exc}") from exc


def read_pattern(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data[:, 0], data[:, 1]
