"""Built-in models and the JSON model catalogue format.

A catalogue is a JSON document holding a list of model records (or an object
with a ``"models"`` list).  Each record has the keys ``name, n, c_cross, c_pot,
kind, s_max`` plus ``lambda, m`` for ``kind == "closed_form"`` or ``samples``
(a list of ``[s, f]`` pairs) for ``kind == "tabulated"``; ``cross_volume`` is
optional and defaults to the volume of the unit sphere.  The horizon radius is
never stored: it is recomputed on load.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import ModelError
from .warped import ClosedFormProfile, TabulatedProfile, WarpedProductModel

__all__ = [
    "SCHW3",
    "ADS0",
    "DSS",
    "EUCLID",
    "builtin_models",
    "model_from_record",
    "model_to_record",
    "load_catalogue",
    "save_catalogue",
    "is_closed_form",
]

SCHW3 = WarpedProductModel("SCHW3", n=3, c_cross=1.0, c_pot=1.0, potential=ClosedFormProfile(0.0, 0.5), s_max=4.0)
ADS0 = WarpedProductModel("ADS0", n=3, c_cross=-1.0, c_pot=-1.0, potential=ClosedFormProfile(-1.0, 0.0), s_max=4.0)
# de Sitter-Schwarzschild: black-hole horizon near 0.209, cosmological horizon near 0.879
DSS = WarpedProductModel("DSS", n=3, c_cross=1.0, c_pot=1.0, potential=ClosedFormProfile(1.0, 0.1), s_max=0.8)
EUCLID = WarpedProductModel("EUCLID", n=3, c_cross=1.0, c_pot=1.0, potential=ClosedFormProfile(0.0, 0.0), s_max=4.0)


def builtin_models() -> dict[str, WarpedProductModel]:
    return {m.name: m for m in (SCHW3, ADS0, DSS, EUCLID)}


def is_closed_form(model: WarpedProductModel) -> bool:
    return isinstance(model.potential, ClosedFormProfile)


_REQUIRED = ("name", "n", "c_cross", "c_pot", "kind", "s_max")


def model_from_record(rec: dict) -> WarpedProductModel:
    """Build a model from a catalogue record; raises ``ModelError`` naming the bad field."""
    if not isinstance(rec, dict):
        raise ModelError("model record must be an object")
    missing = [k for k in _REQUIRED if k not in rec]
    if missing:
        raise ModelError(f"model record missing field(s): {', '.join(missing)}")
    kind = rec["kind"]
    if kind == "closed_form":
        if "lambda" not in rec or "m" not in rec:
            raise ModelError(f"model {rec['name']}: closed_form needs 'lambda' and 'm'")
        profile = ClosedFormProfile(float(rec["lambda"]), float(rec["m"]))
    elif kind == "tabulated":
        samples = rec.get("samples")
        if not samples:
            raise ModelError(f"model {rec['name']}: tabulated needs 'samples'")
        s, f = zip(*samples)
        profile = TabulatedProfile(s, f)
    else:
        raise ModelError(f"model {rec['name']}: unknown kind {kind!r}")
    return WarpedProductModel(
        name=str(rec["name"]),
        n=int(rec["n"]),
        c_cross=float(rec["c_cross"]),
        c_pot=float(rec["c_pot"]),
        potential=profile,
        s_max=float(rec["s_max"]),
        cross_volume=None if rec.get("cross_volume") is None else float(rec["cross_volume"]),
        potential_scale=float(rec.get("potential_scale", 1.0)),
    )


def model_to_record(model: WarpedProductModel) -> dict:
    rec = {
        "name": model.name,
        "n": model.n,
        "c_cross": model.c_cross,
        "c_pot": model.c_pot,
        "kind": model.potential.kind,
        "s_max": model.s_max,
        "cross_volume": model.cross_volume,
    }
    if isinstance(model.potential, ClosedFormProfile):
        rec["lambda"] = model.potential.lam
        rec["m"] = model.potential.m
    elif isinstance(model.potential, TabulatedProfile):
        rec["samples"] = [[float(a), float(b)] for a, b in zip(model.potential.s, model.potential.f)]
    else:
        raise ModelError(f"profile kind {model.potential.kind!r} is not serialisable")
    if model.potential_scale != 1.0:
        rec["potential_scale"] = model.potential_scale
    return rec


def load_catalogue(path) -> dict[str, WarpedProductModel]:
    data = json.loads(Path(path).read_text())
    records = data["models"] if isinstance(data, dict) else data
    if not isinstance(records, list):
        raise ModelError("catalogue must be a list of model records")
    out = {}
    for rec in records:
        model = model_from_record(rec)
        out[model.name] = model
    return out


def save_catalogue(models, path) -> None:
    records = [model_to_record(m) for m in models]
    Path(path).write_text(json.dumps({"models": records}, indent=2) + "\n")
