"""Versioned JSON/CSV serialization with deterministic number formatting."""

from __future__ import annotations

import hashlib
import json
from datetime import datetime, timezone

import numpy as np

from .basis import LAMBDA_FLOOR, ProlateBasis
from .bandlimited import BandlimitedFunction
from .metrology import DEFAULT_P_FLOOR, POVM_SLACK, PROB_SLACK, FisherMatrix
from .params import SlepianParams

SCHEMA_VERSION = 1


def format_number(x) -> str:
    """Shortest decimal that reconstructs the value exactly (repr round-trip)."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def basis_to_dict(basis: ProlateBasis) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "c": basis.params.c,
        "T": basis.params.T,
        "n_max": basis.n_max,
        "quad_order": basis.quad_order,
        "lambdas": basis.lambdas.tolist(),
        "nodes": basis.nodes.tolist(),
        "weights": basis.weights.tolist(),
        "samples": basis.samples.tolist(),
    }


def basis_from_dict(doc: dict) -> ProlateBasis:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return ProlateBasis(
        params=SlepianParams(c=float(doc["c"]), T=float(doc["T"])),
        n_max=int(doc["n_max"]),
        quad_order=int(doc["quad_order"]),
        nodes=np.asarray(doc["nodes"], dtype=float),
        weights=np.asarray(doc["weights"], dtype=float),
        lambdas=np.asarray(doc["lambdas"], dtype=float),
        samples=np.asarray(doc["samples"], dtype=float),
    )


def bandlimited_to_dict(g: BandlimitedFunction) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "c": g.params.c,
        "T": g.params.T,
        "coeffs": g.coeffs.tolist(),
    }


def bandlimited_from_dict(doc: dict) -> BandlimitedFunction:
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported schema_version {doc.get('schema_version')!r}")
    return BandlimitedFunction(
        params=SlepianParams(c=float(doc["c"]), T=float(doc["T"])),
        coeffs=np.asarray(doc["coeffs"], dtype=float),
    )


def fisher_to_dict(fisher: FisherMatrix) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "labels": list(fisher.labels),
        "steps": fisher.steps.tolist(),
        "excluded_outcomes": list(fisher.excluded_outcomes),
        "matrix": fisher.matrix.tolist(),
    }


def dump_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def write_json(path, doc: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dump_json(doc))


def load_json(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def csv_table(header, rows, meta: dict | None = None) -> str:
    """Render a CSV document; metadata rides along as leading '#' lines."""
    lines = []
    if meta:
        for key, value in meta.items():
            lines.append(f"# {key}={format_number(value)}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_number(x) for x in row))
    return "\n".join(lines) + "\n"


def write_csv(path, header, rows, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_table(header, rows, meta))


def write_fisher_csv(path, fisher: FisherMatrix) -> None:
    header = ["parameter"] + list(fisher.labels)
    rows = [[lab] + list(row) for lab, row in zip(fisher.labels, fisher.matrix)]
    meta = {
        "schema_version": SCHEMA_VERSION,
        "steps": ";".join(format_number(s) for s in fisher.steps),
        "excluded_outcomes": ";".join(str(i) for i in fisher.excluded_outcomes),
    }
    write_csv(path, header, rows, meta)


def write_probability_csv(path, probs, meta: dict | None = None) -> None:
    doc_meta = {"schema_version": SCHEMA_VERSION}
    if meta:
        doc_meta.update(meta)
    rows = [(i, p) for i, p in enumerate(np.asarray(probs, dtype=float))]
    write_csv(path, ["outcome", "probability"], rows, doc_meta)


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        digest.update(fh.read())
    return digest.hexdigest()


def write_manifest(path, command: str, config: dict, outputs: list) -> None:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "tolerances": {
            "lambda_floor": LAMBDA_FLOOR,
            "probability_slack": PROB_SLACK,
            "fisher_p_floor": DEFAULT_P_FLOOR,
            "povm_validity_slack": POVM_SLACK,
        },
        "outputs": [{"path": str(p), "sha256": sha256_of(p)} for p in outputs],
        "created_utc": datetime.now(timezone.utc).isoformat(),
    }
    write_json(path, doc)
