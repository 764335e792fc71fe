"""File formats: headerless numeric CSV matrices, JSON problem and
multi-task manifests, and deterministic JSON report output."""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .errors import CoverageError, DomainError, NonFiniteError
from .model import MultiTaskSpec, Problem, validate_partition


def load_matrix(path: str) -> np.ndarray:
    """Headerless numeric CSV, row-major, as a 2-D float array."""
    try:
        X = np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)
    except ValueError as e:
        raise DomainError(f"could not parse {path} as numeric CSV: {e}") from e
    if not np.all(np.isfinite(X)):
        raise NonFiniteError(f"{path} contains non-finite values")
    return X


def load_vector(path: str) -> np.ndarray:
    v = load_matrix(path)
    if 1 not in v.shape:
        raise DomainError(f"{path} is not a vector (shape {v.shape})")
    return v.reshape(-1)


def save_matrix(X, path: str) -> None:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    with open(path, "w") as f:
        for row in X:
            f.write(",".join(repr(float(v)) for v in row))
            f.write("\n")


def _resolve(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.join(base_dir, path)


def load_problem_manifest(path: str) -> Problem:
    """Problem manifest: {"design", "response", "groups", "lambda" (optional)}.

    Relative design/response paths are resolved against the manifest's
    directory; a missing lambda defaults to all zeros.
    """
    with open(path) as f:
        manifest = json.load(f)
    for field in ("design", "response"):
        if field not in manifest:
            raise CoverageError(f"manifest {path} missing {field!r} field")
    if "groups" not in manifest:
        raise CoverageError(f"manifest {path} missing 'groups' field")
    base = os.path.dirname(os.path.abspath(path))
    X = load_matrix(_resolve(base, manifest["design"]))
    y = load_vector(_resolve(base, manifest["response"]))
    partition = validate_partition(manifest["groups"], X.shape[1])
    lam = manifest.get("lambda")
    lam = np.zeros(partition.M) if lam is None else np.asarray(lam, dtype=np.float64)
    return Problem.create(X, y, partition, lam)


def load_multitask_manifest(path: str) -> MultiTaskSpec:
    """Multi-task manifest: {"tasks": [{"design", "response"}, ...]}."""
    with open(path) as f:
        manifest = json.load(f)
    if "tasks" not in manifest or not manifest["tasks"]:
        raise CoverageError(f"manifest {path} missing non-empty 'tasks' field")
    base = os.path.dirname(os.path.abspath(path))
    designs, responses = [], []
    for entry in manifest["tasks"]:
        for field in ("design", "response"):
            if field not in entry:
                raise CoverageError(f"task entry in {path} missing {field!r} field")
        designs.append(load_matrix(_resolve(base, entry["design"])))
        responses.append(load_vector(_resolve(base, entry["response"])))
    return MultiTaskSpec.create(designs, responses)


def write_json(obj, path: str) -> None:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    with open(path, "w") as f:
        json.dump(obj, f, sort_keys=True, indent=2)
        f.write("\n")


def write_trial_csv(records, path: str) -> None:
    """Per-trial records as CSV, sorted by trial index."""
    records = sorted(records, key=lambda r: r.trial)
    lhs_keys = sorted({k for r in records for k in r.lhs})
    header = ["trial", "seed", "event_A"]
    for k in lhs_keys:
        header += [f"lhs_{k}", f"rhs_{k}", f"ok_{k}"]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(header)
        for r in records:
            row = [r.trial, r.seed, int(r.event_A)]
            for k in lhs_keys:
                row += [
                    repr(r.lhs[k]) if k in r.lhs else "",
                    repr(r.rhs[k]) if k in r.rhs else "",
                    int(r.satisfied[k]) if k in r.satisfied else "",
                ]
            w.writerow(row)
