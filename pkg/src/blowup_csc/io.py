"""JSON encoding of manifolds, points, bases, groups and configurations."""

from __future__ import annotations

import json
import math
import os
import tempfile
from fractions import Fraction

import numpy as np

from .admissibility import check
from .kernel import (KernelBasis, KernelFunction, ModelManifold, Rigid, SymmetryGroup, as_point,
                     kernel_basis)
from .search import Configuration


def point_to_json(manifold: ModelManifold, p) -> list:
    out = []
    for comp, fac in zip(p, manifold.factors):
        if isinstance(fac, Rigid):
            out.append(comp)
        else:
            out.append([[float(v.real), float(v.imag)] for v in comp])
    return out


def _component(raw):
    arr = []
    for v in raw:
        if isinstance(v, (list, tuple)):
            arr.append(complex(float(v[0]), float(v[1])))
        else:
            arr.append(complex(v))
    return np.array(arr)


def point_from_json(manifold: ModelManifold, raw) -> tuple:
    # a single-factor point may be given as its bare coordinate list
    if len(manifold.factors) == 1 and raw and isinstance(raw[0], (list, tuple)) \
            and raw[0] and not isinstance(raw[0][0], (list, tuple)):
        raw = [raw]
    comps = []
    for comp, fac in zip(raw, manifold.factors):
        comps.append(comp if isinstance(fac, Rigid) else _component(comp))
    return as_point(manifold, tuple(comps))


def function_to_json(f: KernelFunction) -> dict:
    m = f.matrix
    return {"factor": f.factor, "label": f.label, "re": m.real.tolist(), "im": m.imag.tolist()}


def function_from_json(raw) -> KernelFunction:
    m = np.array(raw["re"], dtype=float) + 1j * np.array(raw["im"], dtype=float)
    return KernelFunction(int(raw["factor"]), m, raw.get("label", ""))


def basis_to_json(basis: KernelBasis) -> dict:
    return {"labels": basis.labels, "functions": [function_to_json(f) for f in basis]}


def basis_from_json(manifold: ModelManifold, raw) -> KernelBasis:
    if raw is None or raw == "full":
        return kernel_basis(manifold)
    return KernelBasis(manifold, [function_from_json(f) for f in raw["functions"]])


def jsonable(x):
    """Recursively convert numpy values and non-finite floats for json.dumps."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


def configuration_to_dict(cfg: Configuration) -> dict:
    return jsonable({
        "manifold": cfg.manifold.to_dict(),
        "points": [point_to_json(cfg.manifold, p) for p in cfg.points],
        "basis": basis_to_json(cfg.basis),
        "group": None if cfg.group is None else cfg.group.to_dict(),
        "report": None if cfg.report is None else cfg.report.to_dict(),
        "provenance": cfg.provenance,
    })


def configuration_from_dict(raw: dict, recheck: bool = True) -> Configuration:
    manifold = ModelManifold.from_dict(raw["manifold"])
    basis = basis_from_json(manifold, raw.get("basis"))
    pts = [point_from_json(manifold, p) for p in raw["points"]]
    group = raw.get("group")
    group = None if group is None else SymmetryGroup.from_dict(manifold, group)
    cfg = Configuration(manifold, pts, basis, group=group, provenance=raw.get("provenance", {}))
    if recheck:
        cfg.report = check(manifold, basis, pts)
    return cfg


def dumps(obj) -> str:
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


def atomic_write(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
