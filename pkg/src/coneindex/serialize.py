"""JSON formats: spectrum files, MSI model files and the emitted reports.

Output is canonical: keys sorted, floats written with 17 significant digits,
exact rationals written as integers when integral.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import fields, is_dataclass
from enum import Enum
from fractions import Fraction
from numbers import Integral
from pathlib import Path
from typing import Any

from .constants import TOLERANCES
from .fredholm import ConeModel, IndexReport, MSIModel, cone_model
from .indicial import AsymptoticSpectrum
from .spectra import LinkSpectrum, clifford_torus_spectrum, user_spectrum


def _float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def to_plain(obj: Any) -> Any:
    """Recursively convert dataclasses, enums and fractions into JSON-ready values."""
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return int(obj) if obj.denominator == 1 else float(obj)
    if isinstance(obj, Integral):
        return int(obj)
    if isinstance(obj, float):
        return obj
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if is_dataclass(obj):
        return {f.name: to_plain(getattr(obj, f.name)) for f in fields(obj)
                if f.metadata.get("serialize", True) and f.repr}
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return to_plain(obj.tolist())
    if isinstance(obj, os.PathLike):
        return os.fspath(obj)
    try:
        return float(obj)
    except (TypeError, ValueError):
        raise TypeError(f"cannot serialise {type(obj).__name__}") from None


def dumps(obj: Any, indent: int = 2) -> str:
    """Canonical JSON text for ``obj``."""

    def emit(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if v is None:
            return "null"
        if v is True:
            return "true"
        if v is False:
            return "false"
        if isinstance(v, int):
            return str(v)
        if isinstance(v, float):
            return _float(v)
        if isinstance(v, str):
            return json.dumps(v)
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(x, (list, dict)) for x in v):
                return "[" + ", ".join(emit(x, level + 1) for x in v) + "]"
            return "[\n" + ",\n".join(pad + emit(x, level + 1) for x in v) + "\n" + end + "]"
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = sorted(v.items())
            return "{\n" + ",\n".join(
                f"{pad}{json.dumps(k)}: {emit(x, level + 1)}" for k, x in items) + "\n" + end + "}"
        raise TypeError(type(v))

    return emit(to_plain(obj), 0) + "\n"


# --------------------------------------------------------------------------
# spectrum files

_SPECTRUM_KEYS = {"n", "N", "connected", "cutoff", "eigenvalues"}


def spectrum_to_dict(spec: LinkSpectrum) -> dict:
    return {
        "n": spec.n,
        "N": spec.N,
        "connected": spec.connected,
        "cutoff": spec.cutoff,
        "eigenvalues": [[e.value, e.multiplicity] for e in spec.eigenvalues],
    }


def spectrum_from_dict(d: dict) -> LinkSpectrum:
    unknown = set(d) - _SPECTRUM_KEYS
    if unknown:
        raise ValueError(f"unknown spectrum keys {sorted(unknown)}")
    missing = {"n", "N", "cutoff", "eigenvalues"} - set(d)
    if missing:
        raise ValueError(f"spectrum is missing {sorted(missing)}")
    entries = []
    for item in d["eigenvalues"]:
        if not isinstance(item, (list, tuple)) or len(item) != 2:
            raise ValueError(f"eigenvalue entries must be [value, multiplicity], got {item!r}")
        entries.append((item[0], item[1]))
    return user_spectrum(entries, int(d["n"]), int(d["N"]),
                         connected=bool(d.get("connected", True)), cutoff=d["cutoff"])


def load_json(path: str | os.PathLike) -> Any:
    with open(path) as fh:
        return json.load(fh)


def load_spectrum(path: str | os.PathLike) -> LinkSpectrum:
    return spectrum_from_dict(load_json(path))


# --------------------------------------------------------------------------
# MSI model files


def _cone_from_ref(ref: Any, base: Path, tol: dict[str, float]) -> ConeModel:
    area = None
    label = ""
    if isinstance(ref, str):
        spec = load_spectrum(base / ref)
        label = ref
    elif isinstance(ref, dict):
        ref = dict(ref)
        area = ref.pop("link_area", None)
        label = ref.pop("label", "")
        if "catalog" in ref:
            name = ref.pop("catalog")
            cutoff = ref.pop("cutoff", 10)
            if ref:
                raise ValueError(f"unknown catalog-reference keys {sorted(ref)}")
            if name != "clifford":
                raise ValueError(f"unknown catalog spectrum {name!r}")
            spec = clifford_torus_spectrum(cutoff)
            label = label or "clifford"
        elif "path" in ref:
            spec = load_spectrum(base / ref.pop("path"))
            if ref:
                raise ValueError(f"unknown path-reference keys {sorted(ref)}")
        else:
            spec = spectrum_from_dict(ref)
    else:
        raise ValueError(f"cone reference must be a path or an object, got {ref!r}")
    return cone_model(spec, area, label, log_tol=tol["log_case"], merge_tol=tol["root_merge"])


def msi_from_dict(d: dict, base: str | os.PathLike = ".",
                  tolerances: dict[str, float] | None = None) -> MSIModel:
    tol = {**TOLERANCES, **(tolerances or {})}
    unknown = set(d) - {"N", "n", "tau", "cones"}
    if unknown:
        raise ValueError(f"unknown MSI keys {sorted(unknown)}")
    base = Path(base)
    cones = tuple(_cone_from_ref(r, base, tol) for r in d.get("cones", []))
    tau = d.get("tau")
    return MSIModel(N=int(d["N"]), n=int(d["n"]), cones=cones,
                    tau=None if tau is None else float(tau))


def load_msi(path: str | os.PathLike, tolerances: dict[str, float] | None = None) -> MSIModel:
    path = Path(path)
    return msi_from_dict(load_json(path), path.parent, tolerances)


# --------------------------------------------------------------------------
# reports


def gamma_report(asym: AsymptoticSpectrum) -> dict:
    return {
        "entries": [[v, m] for v, m in asym.entries],
        "gamma_minus": asym.gamma_minus_of_cone,
        "complete_window": [asym.complete_below, asym.complete_above],
        "gamma_star": [asym.gamma_star_low, asym.gamma_star_high],
        "merge_convention": asym.merge_convention,
    }


def index_report(rep: IndexReport) -> dict:
    return {
        "tau": rep.tau,
        "tau_interval": list(rep.tau_interval),
        "index": rep.index,
        "hat_index": rep.hat_index,
        "per_cone_I": list(rep.per_cone_I),
        "admissible_tau": rep.admissible_tau,
        "provenance": rep.provenance,
        "crossings": [list(c) for c in rep.crossings],
    }
