"""JSON model files and CSV/JSON region files."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from .errors import ModelError
from .regions.core import RatePoint, RateRegion, Support, upper_right_hull, validate_region
from .state import DeterministicPair, StateBC, bsc

MODEL_KINDS = ("general", "deterministic", "bec", "bsc", "finite_field", "gaussian")


@dataclass
class Model:
    """A parsed model file; only the fields relevant to ``kind`` are set."""

    kind: str
    p1: Any = None
    p2: Any = None
    bc: StateBC | None = None
    det: DeterministicPair | None = None
    eps: np.ndarray | None = None
    alpha: np.ndarray | None = None
    field_size: int | None = None
    gain: Any = None
    gaussian: Any = None
    raw: dict | None = None

    def state_bc(self) -> StateBC:
        if self.bc is not None:
            return self.bc
        raise ModelError(f"a {self.kind} model does not describe a state broadcast channel")


def _need(d: dict, key: str):
    if key not in d:
        raise ModelError(f"model is missing required field '{key}'")
    return d[key]


def _scalar_prob(name, v) -> float:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ModelError(f"{name} for a two-component model must be a number or a pair")
        v = v[0]
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ModelError(f"{name} must be a number") from None
    if not 0 <= v <= 1:
        raise ModelError(f"{name} must lie in [0, 1]")
    return v


def parse_model(d: dict) -> Model:
    """Build a Model from a decoded JSON object."""
    if not isinstance(d, dict):
        raise ModelError("model file must contain a JSON object")
    try:
        if "deterministic" in d:
            f = d["deterministic"]
            det = DeterministicPair.from_maps(_need(f, "f1"), _need(f, "f2"))
            p1, p2 = _scalar_prob("p1", _need(d, "p1")), _scalar_prob("p2", _need(d, "p2"))
            return Model("deterministic", p1, p2, bc=det.to_state_bc(p1, p2), det=det, raw=d)
        if "finite_field" in d:
            from .regions.tdcs import DEFAULT_GAIN, finite_field_pair

            f = d["finite_field"]
            k = int(_need(f, "K"))
            gain = f.get("gain", DEFAULT_GAIN)
            det = finite_field_pair(k, gain)
            p1, p2 = _scalar_prob("p1", _need(d, "p1")), _scalar_prob("p2", _need(d, "p2"))
            return Model("finite_field", p1, p2, det=det, field_size=k, gain=gain, raw=d)
        if "bec" in d:
            from .regions.superposition import bec_state_bc

            eps = np.atleast_1d(np.asarray(_need(d["bec"], "eps"), float))
            p1 = np.atleast_1d(np.asarray(d.get("p1", [1.0] * len(eps)), float))
            p2 = np.atleast_1d(np.asarray(d.get("p2", [1.0] * len(eps)), float))
            return Model("bec", p1, p2, bc=bec_state_bc(eps, p1, p2), eps=eps, raw=d)
        if "bsc" in d:
            alpha = np.atleast_1d(np.asarray(_need(d["bsc"], "alpha"), float))
            if np.any((alpha < 0) | (alpha > 1)):
                raise ModelError("crossover probabilities must lie in [0, 1]")
            p1, p2 = _need(d, "p1"), _need(d, "p2")
            bc = StateBC(tuple(bsc(a) for a in alpha), p1, p2)
            return Model("bsc", bc.p1, bc.p2, bc=bc, alpha=alpha, raw=d)
        if "G" in d or "N1" in d:
            from .gaussian import GaussianBC

            g = GaussianBC(_need(d, "G"), _need(d, "N1"), _need(d, "N2"), _need(d, "P"),
                           float(_need(d, "p1")), float(_need(d, "p2")))
            if "t" in d and int(d["t"]) != g.t:
                raise ModelError(f"declared t = {d['t']} does not match G ({g.t})")
            return Model("gaussian", g.p1, g.p2, gaussian=g, raw=d)
        if "components" in d:
            comps = [np.asarray(c, float) for c in d["components"]]
            if "input_size" in d and any(c.ndim != 2 or c.shape[0] != int(d["input_size"]) for c in comps):
                raise ModelError("component row count must equal input_size")
            bc = StateBC(tuple(comps), _need(d, "p1"), _need(d, "p2"))
            return Model("general", bc.p1, bc.p2, bc=bc, raw=d)
        if "p1" in d and "p2" in d:
            return Model("probabilities", _scalar_prob("p1", d["p1"]), _scalar_prob("p2", d["p2"]), raw=d)
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"malformed model: {exc}") from None
    raise ModelError("unrecognised model schema")


def load_model(path) -> Model:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ModelError(f"cannot read model file: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from None
    return parse_model(data)


# -- region files ------------------------------------------------------------

def _fmt(x) -> str:
    return "" if x is None else format(float(x), ".12g")


def _has_common(region: RateRegion) -> bool:
    return any(len(s.direction) == 3 for s in region.supports)


def region_to_csv(region: RateRegion) -> str:
    common = _has_common(region)
    cols = ["lambda1", "lambda2"] + (["lambda0"] if common else [])
    cols += ["support_bits", "r1", "r2"] + (["r0"] if common else [])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for s in region.supports:
        d = s.direction
        l0, l1, l2 = (d if len(d) == 3 else (None, *d))
        row = [_fmt(l1), _fmt(l2)] + ([_fmt(l0)] if common else [])
        pt = s.point
        row += [_fmt(s.value), _fmt(pt.r1 if pt else None), _fmt(pt.r2 if pt else None)]
        if common:
            row.append(_fmt(pt.r0 if pt else None))
        w.writerow(row)
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)) and not isinstance(obj, bool):
        return int(obj)
    return obj


def region_to_json(region: RateRegion) -> str:
    sups = []
    for s in region.supports:
        p = s.point
        sups.append({
            "direction": list(s.direction),
            "support_bits": s.value,
            "point": None if p is None else {"r0": p.r0, "r1": p.r1, "r2": p.r2},
            "params": s.params,
        })
    doc = {
        "kind": region.kind,
        "meta": region.meta,
        "vertices": np.asarray(region.vertices).tolist(),
        "supports": sups,
    }
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def write_region(region: RateRegion, path=None, fmt: str = "csv") -> str:
    text = region_to_csv(region) if fmt == "csv" else region_to_json(region)
    if path is not None:
        Path(path).write_text(text)
    return text


def _num(s: str):
    return None if s == "" else float(s)


def read_region(path, validate: bool = True) -> RateRegion:
    """Load a CSV or JSON region file and (by default) run the consistency validator."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        sups = []
        for s in doc["supports"]:
            p = s["point"]
            pt = None if p is None else RatePoint(p["r1"], p["r2"], p.get("r0"))
            sups.append(Support(tuple(s["direction"]), s["support_bits"], pt, s.get("params", {})))
        verts = np.asarray(doc["vertices"], float).reshape(-1, 2) if doc["vertices"] else np.zeros((0, 2))
        region = RateRegion(sups, verts, doc.get("kind", ""), doc.get("meta", {}))
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
        sups = []
        for r in rows:
            l1, l2 = float(r["lambda1"]), float(r["lambda2"])
            direction = (l1, l2) if "lambda0" not in r else (float(r["lambda0"]), l1, l2)
            r1, r2, r0 = _num(r["r1"]), _num(r["r2"]), _num(r.get("r0", ""))
            pt = None if r1 is None else RatePoint(r1, r2, r0)
            sups.append(Support(direction, float(r["support_bits"]), pt))
        pts = [s.point.as_array()[-2:] for s in sups if s.point is not None]
        verts = upper_right_hull(pts) if pts else np.zeros((0, 2))
        region = RateRegion(sups, verts, "")
    if validate:
        validate_region(region)
    return region
