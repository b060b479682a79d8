"""CSV schemas for covariates, adjacency, outcomes, and shocks.

All files carry a mandatory header, UTF-8 text, decimal dots, and 1-based
player/action indices. Floats are written with repr() so a simulate ->
estimate round trip through disk reproduces in-memory numbers bit for bit.

  covariates         t,m,x1..xK     one row per (player, action)
  dyadic covariates  t,s,x1..xK     one row per ordered dyad, s != t
  adjacency          s,t,value      omitted cells are zero
  outcomes           t,m,y          y in {0,1}
  shocks             t,m,u
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import SchemaError
from .model import GameKind, GameModel


def _open_rows(path):
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as err:
        raise SchemaError(f"cannot open file: {err}", path=path) from None
    return fh


def _parse_int(text, path, line, column):
    try:
        return int(text)
    except ValueError:
        raise SchemaError(f"column '{column}' must be an integer, got {text!r}", path, line) from None


def _parse_float(text, path, line, column):
    try:
        return float(text)
    except ValueError:
        raise SchemaError(f"column '{column}' must be a number, got {text!r}", path, line) from None


def read_covariates(path):
    """Read a per-(player, action) covariate file; returns an (T, M, K) array.

    The second header column decides the layout: 'm' for action-indexed
    covariates, 's' for dyadic (network) covariates keyed by receiver.
    """
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0].strip() != "t" or header[1].strip() not in ("m", "s"):
            raise SchemaError("header must start with 't,m,...' or 't,s,...'", path, 1)
        dyadic = header[1].strip() == "s"
        names = [h.strip() for h in header[2:]]
        if not names:
            raise SchemaError("no covariate columns found", path, 1)
        entries = {}
        max_t = max_j = 0
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2 + len(names):
                raise SchemaError(f"expected {2 + len(names)} fields, got {len(row)}", path, line)
            t = _parse_int(row[0], path, line, "t")
            j = _parse_int(row[1], path, line, header[1].strip())
            if t < 1 or j < 1:
                raise SchemaError("indices are 1-based and must be positive", path, line)
            if dyadic and j == t:
                raise SchemaError(f"dyadic covariates exclude the diagonal (t={t}, s={j})", path, line)
            values = [_parse_float(v, path, line, names[k]) for k, v in enumerate(row[2:])]
            if (t, j) in entries:
                raise SchemaError(f"duplicate entry for (t={t}, {header[1].strip()}={j})", path, line)
            entries[(t, j)] = values
            max_t = max(max_t, t)
            max_j = max(max_j, j)
        if not entries:
            raise SchemaError("file contains no data rows", path, 2)

    T = max(max_t, max_j) if dyadic else max_t
    M = T - 1 if dyadic else max_j
    X = np.zeros((T, M, len(names)))
    seen = np.zeros((T, M), dtype=bool)
    for (t, j), values in entries.items():
        if dyadic:
            m = j - 1 if j < t else j - 2  # receivers in increasing order, skipping t
        else:
            m = j - 1
        X[t - 1, m] = values
        seen[t - 1, m] = True
    if not np.all(seen):
        t, m = np.argwhere(~seen)[0]
        raise SchemaError(f"missing covariate row for player {t + 1}, slot {m + 1}", path)
    return X, names, dyadic


def read_adjacency(path, T):
    """Read a sparse 's,t,value' adjacency file into a dense (T, T) matrix."""
    A = np.zeros((T, T))
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or [h.strip() for h in header[:3]] != ["s", "t", "value"]:
            raise SchemaError("header must be 's,t,value'", path, 1)
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise SchemaError(f"expected 3 fields, got {len(row)}", path, line)
            s = _parse_int(row[0], path, line, "s")
            t = _parse_int(row[1], path, line, "t")
            v = _parse_float(row[2], path, line, "value")
            if not (1 <= s <= T and 1 <= t <= T):
                raise SchemaError(f"index ({s}, {t}) outside 1..{T}", path, line)
            if s == t and v != 0:
                raise SchemaError(f"nonzero diagonal cell ({s}, {t})", path, line)
            A[s - 1, t - 1] = v
    return A


def read_outcomes(path):
    """Read a 't,m,y' outcome file into a (T, M) binary profile."""
    entries = {}
    max_t = max_m = 0
    with _open_rows(path) as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or [h.strip() for h in header[:3]] != ["t", "m", "y"]:
            raise SchemaError("header must be 't,m,y'", path, 1)
        for line, row in enumerate(reader, start=2):
            if not row:
                continue
            t = _parse_int(row[0], path, line, "t")
            m = _parse_int(row[1], path, line, "m")
            y = _parse_int(row[2], path, line, "y")
            if y not in (0, 1):
                raise SchemaError(f"outcome must be 0 or 1, got {y}", path, line)
            entries[(t, m)] = y
            max_t, max_m = max(max_t, t), max(max_m, m)
    if not entries:
        raise SchemaError("file contains no data rows", path, 2)
    Y = np.zeros((max_t, max_m), dtype=np.int8)
    seen = np.zeros((max_t, max_m), dtype=bool)
    for (t, m), y in entries.items():
        Y[t - 1, m - 1] = y
        seen[t - 1, m - 1] = True
    if not np.all(seen):
        t, m = np.argwhere(~seen)[0]
        raise SchemaError(f"missing outcome for player {t + 1}, action {m + 1}", path)
    return Y


def write_covariates(path, model: GameModel, names=None) -> None:
    T, M, K = model.covariates.shape
    dyadic = model.kind is GameKind.DIRECTED_NETWORK_SUPPORT
    names = names or [f"x{k + 1}" for k in range(K)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "s" if dyadic else "m"] + list(names))
        for t in range(T):
            for m in range(M):
                j = model.dyad_of(t, m)[1] + 1 if dyadic else m + 1
                writer.writerow([t + 1, j] + [repr(float(v)) for v in model.covariates[t, m]])


def write_adjacency(path, adjacency) -> None:
    A = np.asarray(adjacency)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["s", "t", "value"])
        for s, t in np.argwhere(A != 0):
            writer.writerow([s + 1, t + 1, repr(float(A[s, t]))])


def write_outcomes(path, profile) -> None:
    Y = np.asarray(profile)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "m", "y"])
        for t in range(Y.shape[0]):
            for m in range(Y.shape[1]):
                writer.writerow([t + 1, m + 1, int(Y[t, m])])


def write_shocks(path, shocks) -> None:
    U = np.asarray(shocks)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "m", "u"])
        for t in range(U.shape[0]):
            for m in range(U.shape[1]):
                writer.writerow([t + 1, m + 1, repr(float(U[t, m]))])
