"""Instance file reading and writing.

Documented format (JSON text, 1-based indices to match the math):

    {
      "n": 3,
      "m": 1,
      "objective":   {"Q": [[1, 1, 2.0], [1, 2, -1.0]], "q": [0.0, 0.0, 0.0]},
      "constraints": [{"Q": [[1, 1, 1.0]], "q": [0.0, 0.0, 0.0],
                       "b": 1.0, "sense": "le"}]
    }

Each matrix is a list of upper-triangle triplets [i, j, value] with
1 <= i <= j <= n; every off-diagonal pair appears at most once. q is a
dense length-n array. Writers emit each stored nonzero once, so a load/save
round trip is value-exact.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InputError
from .model import SENSE_EQ, SENSE_LE, QcqpInstance


def _matrix_from_triplets(trips, n: int, where: str) -> np.ndarray:
    mat = np.zeros((n, n))
    seen: set[tuple[int, int]] = set()
    if not isinstance(trips, list):
        raise InputError(f"{where}: Q must be a list of [i, j, value] triplets")
    for t in trips:
        if not isinstance(t, (list, tuple)) or len(t) != 3:
            raise InputError(f"{where}: bad triplet {t!r}")
        i, j, v = t
        if not isinstance(i, int) or not isinstance(j, int) or isinstance(v, (bool, str)):
            raise InputError(f"{where}: triplet {t!r} must be [int, int, number]")
        if not (1 <= i <= n and 1 <= j <= n):
            raise InputError(f"{where}: index ({i}, {j}) out of range for n={n}")
        if i > j:
            raise InputError(f"{where}: triplet ({i}, {j}) is below the diagonal; store i <= j")
        if (i, j) in seen:
            raise InputError(f"{where}: duplicate entry ({i}, {j})")
        seen.add((i, j))
        v = float(v)
        mat[i - 1, j - 1] = v
        mat[j - 1, i - 1] = v
    return mat


def _triplets_from_matrix(mat: np.ndarray) -> list[list]:
    n = mat.shape[0]
    out = []
    for i in range(n):
        for j in range(i, n):
            if mat[i, j] != 0.0:
                out.append([i + 1, j + 1, float(mat[i, j])])
    return out


def _vector(field, n: int, where: str) -> np.ndarray:
    if not isinstance(field, list) or len(field) != n:
        raise InputError(f"{where}: q must be a dense list of length {n}")
    try:
        return np.array([float(v) for v in field])
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: q holds a non-numeric value") from exc


def from_dict(doc: dict) -> QcqpInstance:
    if not isinstance(doc, dict):
        raise InputError("instance document must be a JSON object")
    for key in ("n", "m", "objective", "constraints"):
        if key not in doc:
            raise InputError(f"instance document is missing the {key!r} field")
    n = doc["n"]
    m = doc["m"]
    if not isinstance(n, int) or n < 1:
        raise InputError(f"n must be a positive integer, got {n!r}")
    if not isinstance(m, int) or m < 0:
        raise InputError(f"m must be a nonnegative integer, got {m!r}")
    cons = doc["constraints"]
    if not isinstance(cons, list) or len(cons) != m:
        raise InputError(f"expected {m} constraints, found {len(cons) if isinstance(cons, list) else 'non-list'}")

    obj = doc["objective"]
    if not isinstance(obj, dict) or "Q" not in obj or "q" not in obj:
        raise InputError("objective must be an object with Q and q")
    Q = [_matrix_from_triplets(obj["Q"], n, "objective")]
    q = [_vector(obj["q"], n, "objective")]
    b = np.zeros(m)
    sense: list[str] = []
    for idx, row in enumerate(cons):
        where = f"constraint {idx + 1}"
        if not isinstance(row, dict):
            raise InputError(f"{where}: must be an object")
        for key in ("Q", "q", "b", "sense"):
            if key not in row:
                raise InputError(f"{where}: missing field {key!r}")
        Q.append(_matrix_from_triplets(row["Q"], n, where))
        q.append(_vector(row["q"], n, where))
        if isinstance(row["b"], (bool, str)) or not isinstance(row["b"], (int, float)):
            raise InputError(f"{where}: b must be a number")
        b[idx] = float(row["b"])
        if row["sense"] not in (SENSE_LE, SENSE_EQ):
            raise InputError(f"{where}: sense must be 'le' or 'eq', got {row['sense']!r}")
        sense.append(row["sense"])
    return QcqpInstance(Q=Q, q=q, b=b, sense=sense)


def to_dict(inst: QcqpInstance) -> dict:
    return {
        "n": inst.n,
        "m": inst.m,
        "objective": {
            "Q": _triplets_from_matrix(inst.Q[0]),
            "q": [float(v) for v in inst.q[0]],
        },
        "constraints": [
            {
                "Q": _triplets_from_matrix(inst.Q[p]),
                "q": [float(v) for v in inst.q[p]],
                "b": float(inst.b[p - 1]),
                "sense": inst.sense[p - 1],
            }
            for p in range(1, inst.m + 1)
        ],
    }


def load_instance(path: str) -> QcqpInstance:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise InputError(f"instance file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"instance file {path} is not valid JSON: {exc}") from exc
    return from_dict(doc)


def save_instance(inst: QcqpInstance, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(inst), fh, indent=1)
        fh.write("\n")
