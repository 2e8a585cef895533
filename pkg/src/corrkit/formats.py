"""JSON file schemas.

Matrices are row-major lists of rows, each entry a ``[re, im]`` pair.
Unknown fields are rejected. Errors name the file, the location and the
violated constraint.

Correspondence::

    {"algebra": {"blocks": [n_0, ...]},
     "module": {"fibers": [k_0, ...]},
     "left_action": {"multiplicity": [[...], ...], "unitaries": [matrix or null, ...]}}

Representation::

    {"dim": N,
     "pi": {"j:r,c": matrix, ...},      # every matrix unit of every block
     "t": {"j:r,c": matrix, ...},       # every fiber matrix unit
     "levels": [d_0, ...],              # optional grading
     "truncated": true}                 # optional, top level is a cut

Cuntz-Krieger family::

    {"dim": N, "projections": {vertex: matrix}, "isometries": {edge: matrix}}
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import CorrkitError, InputError


def load_json(text: str, source: str = "<input>") -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}:{exc.colno}: syntax error: {exc.msg}") from None


def read_text(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"{path}: cannot read file: {exc.strerror}") from None


def check_keys(obj: Any, required: set[str], optional: set[str], where: str) -> None:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    missing = sorted(required - obj.keys())
    if missing:
        raise InputError(f"{where}: missing field(s) {missing}")
    unknown = sorted(obj.keys() - required - optional)
    if unknown:
        raise InputError(f"{where}: unknown field(s) {unknown}")


def _int_list(value, where: str, minimum: int) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in value):
        raise InputError(f"{where}: expected a list of integers")
    bad = [v for v in value if v < minimum]
    if bad:
        raise InputError(f"{where}: entries must be >= {minimum}, got {bad}")
    return value


def decode_matrix(value, where: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    if not isinstance(value, list):
        raise InputError(f"{where}: expected a list of rows")
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"{where}: rows must be equal-length lists of [re, im] pairs") from None
    if arr.size == 0:
        arr = arr.reshape(len(value), 0, 2) if arr.ndim < 3 else arr
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InputError(f"{where}: entries must be [re, im] pairs")
    mat = arr[..., 0] + 1j * arr[..., 1]
    if shape is not None and mat.shape != tuple(shape):
        raise InputError(f"{where}: expected shape {tuple(shape)}, got {mat.shape}")
    return mat


def encode_matrix(mat) -> list:
    mat = np.asarray(mat, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in mat]


# -- correspondences ------------------------------------------------------------


def parse_algebra(obj, where: str):
    from .fdalg import FdAlgebra

    check_keys(obj, {"blocks"}, set(), where)
    blocks = _int_list(obj["blocks"], f"{where}.blocks", 1)
    if not blocks:
        raise InputError(f"{where}.blocks: at least one block is required")
    return FdAlgebra(tuple(blocks))


def parse_correspondence(text: str, source: str = "<correspondence>"):
    from .corr import Correspondence, StarHom
    from .hmod import HilbertModule

    obj = load_json(text, source)
    check_keys(obj, {"algebra", "module", "left_action"}, set(), source)
    algebra = parse_algebra(obj["algebra"], f"{source}: algebra")
    check_keys(obj["module"], {"fibers"}, set(), f"{source}: module")
    fibers = _int_list(obj["module"]["fibers"], f"{source}: module.fibers", 0)
    if len(fibers) != algebra.m:
        raise InputError(f"{source}: module.fibers has {len(fibers)} entries for {algebra.m} blocks")
    left = obj["left_action"]
    check_keys(left, {"multiplicity"}, {"unitaries"}, f"{source}: left_action")
    mult = left["multiplicity"]
    if not isinstance(mult, list) or len(mult) != len(fibers):
        raise InputError(f"{source}: left_action.multiplicity needs one row per fiber ({len(fibers)})")
    for j, row in enumerate(mult):
        _int_list(row, f"{source}: left_action.multiplicity[{j}]", 0)
        if len(row) != algebra.m:
            raise InputError(f"{source}: left_action.multiplicity[{j}] needs {algebra.m} entries")
    unitaries = None
    if left.get("unitaries") is not None:
        raw = left["unitaries"]
        if not isinstance(raw, list) or len(raw) != len(fibers):
            raise InputError(f"{source}: left_action.unitaries needs one entry per fiber ({len(fibers)})")
        unitaries = [
            None if u is None else decode_matrix(u, f"{source}: left_action.unitaries[{j}]", (fibers[j], fibers[j]))
            for j, u in enumerate(raw)
        ]
    try:
        module = HilbertModule(algebra, tuple(fibers))
        return Correspondence(module, StarHom(algebra, fibers, mult, unitaries))
    except CorrkitError as exc:
        raise InputError(f"{source}: {exc}") from None


def correspondence_to_dict(x) -> dict:
    left: dict = {"multiplicity": [list(row) for row in x.left_action.multiplicity]}
    if x.left_action.unitaries is not None:
        left["unitaries"] = [None if w is None else encode_matrix(w) for w in x.left_action.unitaries]
    return {
        "algebra": {"blocks": list(x.algebra.blocks)},
        "module": {"fibers": list(x.fibers)},
        "left_action": left,
    }


# -- representations --------------------------------------------------------------


def unit_key(j: int, r: int, c: int) -> str:
    return f"{j}:{r},{c}"


def parse_representation(text: str, correspondence, source: str = "<representation>"):
    from .rep import Representation

    obj = load_json(text, source)
    check_keys(obj, {"dim", "pi", "t"}, {"levels", "truncated"}, source)
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"{source}: 'dim' must be a positive integer")
    x = correspondence

    def table(name, shapes):
        raw = obj[name]
        if not isinstance(raw, dict):
            raise InputError(f"{source}: '{name}' must be an object keyed by 'j:r,c'")
        expected = [unit_key(j, r, c) for j, (rows, cols) in enumerate(shapes) for r in range(rows) for c in range(cols)]
        missing = [k for k in expected if k not in raw]
        unknown = sorted(set(raw) - set(expected))
        if missing:
            raise InputError(f"{source}: '{name}' is missing basis element(s) {missing}")
        if unknown:
            raise InputError(f"{source}: '{name}' has unknown basis element(s) {unknown}")
        out = []
        for j, (rows, cols) in enumerate(shapes):
            arr = np.zeros((rows, cols, dim, dim), dtype=complex)
            for r in range(rows):
                for c in range(cols):
                    key = unit_key(j, r, c)
                    arr[r, c] = decode_matrix(raw[key], f"{source}: {name}[{key!r}]", (dim, dim))
            out.append(arr)
        return out

    pis = table("pi", [(n, n) for n in x.algebra.blocks])
    ts = table("t", x.module.shapes())
    levels = obj.get("levels")
    if levels is not None:
        _int_list(levels, f"{source}: levels", 0)
        if sum(levels) != dim:
            raise InputError(f"{source}: levels add up to {sum(levels)}, not dim = {dim}")
    truncated = obj.get("truncated", False)
    if not isinstance(truncated, bool):
        raise InputError(f"{source}: 'truncated' must be a boolean")
    return Representation(x, dim, pis, ts, levels=levels, truncated=truncated)


def representation_to_dict(r) -> dict:
    x = r.correspondence
    out: dict = {
        "dim": r.dim,
        "pi": {
            unit_key(j, a, b): encode_matrix(r.pi_units[j][a, b])
            for j, n in enumerate(x.algebra.blocks) for a in range(n) for b in range(n)
        },
        "t": {
            unit_key(j, a, b): encode_matrix(r.t_units[j][a, b])
            for j, (k, n) in enumerate(x.module.shapes()) for a in range(k) for b in range(n)
        },
    }
    if r.levels is not None:
        out["levels"] = list(r.levels)
        out["truncated"] = r.truncated
    return out


# -- Cuntz-Krieger families -------------------------------------------------------


def parse_ck_family(text: str, source: str = "<family>"):
    """Returns ``(dim, projections, isometries)``."""
    obj = load_json(text, source)
    check_keys(obj, {"dim", "projections", "isometries"}, set(), source)
    dim = obj["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise InputError(f"{source}: 'dim' must be a positive integer")
    out = []
    for name in ("projections", "isometries"):
        raw = obj[name]
        if not isinstance(raw, dict):
            raise InputError(f"{source}: '{name}' must be an object")
        out.append({k: decode_matrix(v, f"{source}: {name}[{k!r}]", (dim, dim)) for k, v in raw.items()})
    return dim, out[0], out[1]


def ck_family_to_dict(dim: int, projections, isometries) -> dict:
    return {
        "dim": dim,
        "projections": {k: encode_matrix(v) for k, v in projections.items()},
        "isometries": {k: encode_matrix(v) for k, v in isometries.items()},
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"
