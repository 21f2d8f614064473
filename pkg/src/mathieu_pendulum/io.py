"""JSON and CSV writers.

CSV numbers use 17 significant digits so values round-trip exactly; JSON
floats use Python's shortest round-trip repr.  Nothing time-dependent is
ever written, so identical inputs give identical bytes.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from . import TOOL_NAME, __version__
from .propagator import GridKernel, KernelEvaluation, TimeKind
from .spectrum import NegativeCouplingSpectrum, SpectrumTable

CONVENTIONS = {
    "paper_energy": "h0 - h/2; real-time kernel weight exp(+i*paper_energy*T)",
    "physical_energy": "h/2; eigenvalue of -1/2 d^2/dq^2 + b2*cos(2q)",
    "h0": "1/8 - b2",
}


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def header(**fields) -> dict:
    out = {"tool": TOOL_NAME, "version": __version__}
    out.update(fields)
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=True) + "\n"


def _csv_text(meta: dict, columns, rows) -> str:
    buf = io.StringIO()
    for key, val in meta.items():
        buf.write(f"# {key}={json.dumps(val, sort_keys=True) if isinstance(val, (dict, list)) else val}\n")
    writer = csv.writer(buf, lineterminator="\n")
    if columns:
        writer.writerow(columns)
    writer.writerows(rows)
    return buf.getvalue()


def _spectrum_parts(spec):
    if isinstance(spec, NegativeCouplingSpectrum):
        table = spec.table
        meta = header(
            b2=spec.requested_b2,
            h0=table.h0,
            negative_coupling={
                "computed_at_b2": table.b2,
                "argument_shift": spec.argument_shift,
                "rule": "eigenfunctions are the |b2| ones evaluated at q -> pi/2 + q; energies unchanged",
            },
        )
    else:
        table = spec
        meta = header(b2=table.b2, h0=table.h0)
    meta["count_per_family"] = table.count_per_family
    meta["truncation"] = "auto (N = 2m + 16 + ceil(2 sqrt(b2)), doubled to convergence)"
    meta["conventions"] = CONVENTIONS
    return table, meta


def spectrum_json(spec: SpectrumTable | NegativeCouplingSpectrum) -> str:
    table, meta = _spectrum_parts(spec)
    meta["levels"] = [
        {
            "family": lv.family.value,
            "m": lv.m,
            "label": lv.label,
            "paper_energy": lv.paper_energy,
            "physical_energy": lv.physical_energy,
        }
        for lv in table.levels
    ]
    return dumps(meta)


def spectrum_csv(spec: SpectrumTable | NegativeCouplingSpectrum) -> str:
    table, meta = _spectrum_parts(spec)
    rows = [
        [lv.family.value, lv.m, lv.label, fmt(lv.paper_energy), fmt(lv.physical_energy)]
        for lv in table.levels
    ]
    return _csv_text(meta, ["family", "m", "label", "paper_energy", "physical_energy"], rows)


def _time_meta(time):
    key = "beta" if time.kind is TimeKind.IMAGINARY_TIME else "T"
    return {"kind": time.kind.value, key: time.value}


def kernel_value_json(ev: KernelEvaluation) -> str:
    meta = header(
        b2=ev.b2,
        time=_time_meta(ev.time),
        modes_per_family=ev.truncation,
        convention=ev.convention,
        q=ev.q,
        q_prime=ev.q_prime,
        value={"re": ev.value.real, "im": ev.value.imag},
    )
    return dumps(meta)


def kernel_value_csv(ev: KernelEvaluation) -> str:
    meta = header(b2=ev.b2, time=_time_meta(ev.time), modes_per_family=ev.truncation,
                  convention=ev.convention)
    return _csv_text(meta, ["q", "q_prime", "re", "im"],
                     [[fmt(ev.q), fmt(ev.q_prime), fmt(ev.value.real), fmt(ev.value.imag)]])


def _grid_meta(k: GridKernel) -> dict:
    meta = header(
        b2=k.b2,
        time=_time_meta(k.time),
        grid_size=k.grid_size,
        spacing=k.spacing,
        source=k.metadata.get("source"),
        convention=k.metadata.get("convention"),
        composition="K(q_i, q_j); compose as A @ B * spacing",
    )
    if k.truncation is not None:
        meta["modes_per_family"] = k.truncation
    if k.slices is not None:
        meta["slices"] = k.slices
        meta["eps"] = k.eps
        meta["splitting"] = k.splitting.value
    return meta


def grid_json(k: GridKernel) -> str:
    meta = _grid_meta(k)
    mat = np.asarray(k.matrix)
    if np.iscomplexobj(mat):
        meta["values_re"] = mat.real.ravel().tolist()
        meta["values_im"] = mat.imag.ravel().tolist()
    else:
        meta["values"] = mat.ravel().tolist()
    meta["layout"] = "row-major, row = q index, column = q' index"
    return dumps(meta)


def grid_csv(k: GridKernel) -> str:
    mat = np.asarray(k.matrix)
    if np.iscomplexobj(mat):
        raise ValueError("CSV grid output needs a real (imaginary-time) kernel; use --format json")
    meta = _grid_meta(k)
    head = ",".join(f"{key}={json.dumps(val) if not isinstance(val, str) else val}"
                    for key, val in meta.items())
    rows = "\n".join(",".join(fmt(v) for v in row) for row in mat)
    return f"# {head}\n{rows}\n"


def jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x
