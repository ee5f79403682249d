"""CSV and JSON file formats for networks, covariates, and results.

Floats are written with ``repr`` so every value round-trips exactly and
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import json

import numpy as np

from .graphs import from_edge_list, validate_adjacency

__all__ = [
    "read_adjacency_csv",
    "read_covariates_csv",
    "read_draws_csv",
    "read_edge_list_csv",
    "read_mediators_csv",
    "write_adjacency_csv",
    "write_diagnostics_csv",
    "write_draws_csv",
    "write_mediators_csv",
    "write_scree_csv",
    "write_summary_csv",
    "write_summary_json",
]


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def read_edge_list_csv(path, node_ids=None):
    """Read a `from,to` edge list; returns (adjacency, ids).

    When ``node_ids`` is None the node universe is inferred as the sorted
    (lexicographic) set of ids appearing in the file.
    """
    edges = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty edge list file")
        if [c.strip().lower() for c in header[:2]] != ["from", "to"]:
            raise ValueError(f"{path}: expected header 'from,to', got {header!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 2:
                raise ValueError(f"{path}:{lineno}: edge row needs two columns")
            edges.append((row[0].strip(), row[1].strip()))
    if node_ids is None:
        node_ids = sorted({v for e in edges for v in e})
    ids = [str(v) for v in node_ids]
    return from_edge_list(edges, ids), ids


def read_adjacency_csv(path):
    """Read a square 0/1 matrix; the first row may be a string header.

    Returns (adjacency, ids); without a header, ids are row indices.
    """
    with open(path, newline="") as handle:
        rows = [row for row in csv.reader(handle) if row and any(c.strip() for c in row)]
    if not rows:
        raise ValueError(f"{path}: empty adjacency file")
    ids = None
    first_is_data = all(_is_number(c) and float(c) in (0.0, 1.0) for c in rows[0])
    if not first_is_data or len(rows) == len(rows[0]) + 1:
        ids = [c.strip() for c in rows[0]]
        rows = rows[1:]
    matrix = []
    for lineno, row in enumerate(rows, start=1 if ids is None else 2):
        try:
            matrix.append([float(c) for c in row])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: non-numeric adjacency entry ({exc})") from None
    a = np.asarray(matrix)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{path}: adjacency matrix is not square (shape {a.shape})")
    if ids is None:
        ids = [str(i) for i in range(a.shape[0])]
    if len(ids) != a.shape[0]:
        raise ValueError(f"{path}: header names {len(ids)} columns but matrix has {a.shape[0]}")
    return validate_adjacency(a), ids


def write_adjacency_csv(a, ids, path):
    a = np.asarray(a)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(ids)
        for row in a:
            writer.writerow([str(int(v)) for v in row])


def read_covariates_csv(path):
    """Read nodal covariates: header row, first column `id`.

    Returns (ids, columns) where columns maps each name to a list of raw
    string values in file order.
    """
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty covariates file")
        names = [c.strip() for c in header]
        if not names or names[0] != "id":
            raise ValueError(f"{path}: first covariate column must be 'id', got {names[:1]!r}")
        if len(set(names)) != len(names):
            raise ValueError(f"{path}: duplicate column names in header")
        ids = []
        columns = {name: [] for name in names[1:]}
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(names):
                raise ValueError(f"{path}:{lineno}: expected {len(names)} fields, got {len(row)}")
            ids.append(row[0].strip())
            for name, value in zip(names[1:], row[1:]):
                columns[name].append(value.strip())
    return ids, columns


def align_covariate(ids, column_values, node_ids, column_name):
    """Reorder a covariate column to the network's node order.

    Raises with the full list of missing ids when the covariate file does
    not cover the network.
    """
    lookup = dict(zip(ids, column_values))
    missing = [v for v in node_ids if v not in lookup]
    if missing:
        raise ValueError(
            f"covariates are missing {len(missing)} network node id(s) "
            f"for column {column_name!r}: {missing}"
        )
    return [lookup[v] for v in node_ids]


def numeric_column(values, name):
    out = []
    for v in values:
        try:
            out.append(float(v))
        except ValueError:
            raise ValueError(f"column {name!r} must be numeric, got {v!r}") from None
    return np.asarray(out)


def write_mediators_csv(ids, mediators, path):
    mediators = np.asarray(mediators)
    q = mediators.shape[1]
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["id"] + [f"U{k}" for k in range(1, q + 1)])
        for node, row in zip(ids, mediators):
            writer.writerow([node] + [_fmt(v) for v in row])


def read_mediators_csv(path):
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header[0] != "id":
            raise ValueError(f"{path}: expected mediators header starting with 'id'")
        ids = []
        rows = []
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            ids.append(row[0])
            rows.append([float(v) for v in row[1:]])
    return ids, np.asarray(rows)


def write_scree_csv(eigenvalues, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["index", "eigenvalue"])
        for i, value in enumerate(eigenvalues, start=1):
            writer.writerow([str(i), _fmt(float(value))])


def write_summary_csv(rows, path):
    """Write ParameterSummary rows with the canonical column names."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["parameter", "estimate", "post_sd", "hpd_lower", "hpd_upper", "significant"])
        for r in rows:
            writer.writerow([
                r.parameter,
                _fmt(r.estimate),
                _fmt(r.post_sd),
                _fmt(r.hpd_lower),
                _fmt(r.hpd_upper),
                _fmt(r.significant),
            ])


def summary_rows_to_dicts(rows):
    return [
        {
            "parameter": r.parameter,
            "estimate": r.estimate,
            "post_sd": r.post_sd,
            "hpd_lower": r.hpd_lower,
            "hpd_upper": r.hpd_upper,
            "significant": bool(r.significant),
        }
        for r in rows
    ]


def write_summary_json(rows, path, extra=None):
    doc = {"summary": summary_rows_to_dicts(rows)}
    if extra:
        doc.update(extra)
    with open(path, "w") as handle:
        json.dump(doc, handle, indent=2, sort_keys=True)


def write_draws_csv(posterior, path):
    """Wide draw export: one row per saved draw per chain."""
    names = list(posterior.param_order)
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["chain", "iteration"] + names)
        for chain in range(posterior.n_chains):
            for it in range(posterior.n_saved):
                writer.writerow(
                    [str(chain), str(it)]
                    + [_fmt(posterior.params[name][chain, it]) for name in names]
                )


def read_draws_csv(path):
    """Read a draw export; returns {parameter: list of per-chain arrays}."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header is None or header[:2] != ["chain", "iteration"]:
            raise ValueError(f"{path}: expected draw export header 'chain,iteration,...'")
        names = header[2:]
        by_chain = {}
        for row in reader:
            if not row or all(not c.strip() for c in row):
                continue
            chain = int(row[0])
            by_chain.setdefault(chain, []).append([float(v) for v in row[2:]])
    params = {}
    chain_ids = sorted(by_chain)
    for j, name in enumerate(names):
        params[name] = [np.asarray([r[j] for r in by_chain[c]]) for c in chain_ids]
    return params


def write_diagnostics_csv(rows, path):
    """Rows are dicts with parameter/geweke_z/ess/split_rhat/flag/error."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["parameter", "geweke_z", "ess", "split_rhat", "flag", "error"])
        for r in rows:
            writer.writerow([
                r["parameter"],
                _fmt(r["geweke_z"]) if r.get("geweke_z") is not None else "",
                _fmt(r["ess"]) if r.get("ess") is not None else "",
                _fmt(r["split_rhat"]) if r.get("split_rhat") is not None else "",
                _fmt(bool(r.get("flag", False))),
                r.get("error", "") or "",
            ])
