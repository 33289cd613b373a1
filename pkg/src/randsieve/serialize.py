"""JSON and CSV encodings for every report type, with exact round-trips.

CSV files carry scalar metadata as leading ``# key=value`` lines followed by
a header row. Reals are written with 17 significant digits so float64 values
survive a write/read cycle unchanged; JSON relies on Python's shortest
round-trip float repr.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from dataclasses import asdict, dataclass

import numpy as np

from .classical import OmegaCensus
from .exact import MomentReport, Pmf
from .model import ModelParams, SampleBatch
from .primes import PrimeTable, frozen_array
from .stats import EmpiricalSummary

FORMATS = ("json", "csv")


@dataclass(frozen=True)
class LindebergResult:
    x: int
    epsilon: float
    sigma: float
    value: float


@dataclass(frozen=True)
class ReportRow:
    x: int
    mu: float
    sigma_sq: float
    mertens_gap: float
    D_exact_vs_normal: float


def fmt_real(v) -> str:
    if v is None:
        return ""
    return "%.17g" % v


def _parse_real(s: str):
    return None if s == "" else float(s)


def _write_csv(meta: dict, header: list[str], rows) -> str:
    buf = io.StringIO()
    for k, v in meta.items():
        buf.write(f"# {k}={v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _read_csv(text: str) -> tuple[dict, list[str], list[list[str]]]:
    meta = {}
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            k, _, v = line[1:].strip().partition("=")
            meta[k] = v
        elif line:
            body.append(line)
    rows = list(csv.reader(body))
    return meta, rows[0], rows[1:]


# -- per-type encoders -------------------------------------------------------


def _primes_json(t: PrimeTable) -> dict:
    return {
        "limit": t.limit,
        "primes": t.primes.tolist(),
        "recip_prefix": t.recip_prefix.tolist(),
        "recip_sq_prefix": t.recip_sq_prefix.tolist(),
    }


def _primes_from_json(d: dict) -> PrimeTable:
    return PrimeTable(
        limit=d["limit"],
        primes=frozen_array(np.array(d["primes"], dtype=np.int64)),
        recip_prefix=frozen_array(np.array(d["recip_prefix"], dtype=np.float64)),
        recip_sq_prefix=frozen_array(np.array(d["recip_sq_prefix"], dtype=np.float64)),
    )


def _primes_csv(t: PrimeTable) -> str:
    rows = (
        (int(p), fmt_real(a), fmt_real(b))
        for p, a, b in zip(t.primes, t.recip_prefix, t.recip_sq_prefix)
    )
    return _write_csv({"limit": t.limit}, ["p", "recip_prefix", "recip_sq_prefix"], rows)


def _primes_from_csv(text: str) -> PrimeTable:
    meta, _, rows = _read_csv(text)
    cols = list(zip(*rows)) or [(), (), ()]
    return PrimeTable(
        limit=int(meta["limit"]),
        primes=frozen_array(np.array([int(v) for v in cols[0]], dtype=np.int64)),
        recip_prefix=frozen_array(np.array([float(v) for v in cols[1]], dtype=np.float64)),
        recip_sq_prefix=frozen_array(np.array([float(v) for v in cols[2]], dtype=np.float64)),
    )


MOMENT_FIELDS = ["x", "mu", "sigma_sq", "loglog_x", "mertens_gap", "zeta_partial"]


def _moments_csv(reports: list[MomentReport]) -> str:
    rows = ([r.x] + [fmt_real(getattr(r, f)) for f in MOMENT_FIELDS[1:]] for r in reports)
    return _write_csv({}, MOMENT_FIELDS, rows)


def _moments_from_csv(text: str) -> list[MomentReport]:
    _, header, rows = _read_csv(text)
    out = []
    for row in rows:
        d = dict(zip(header, row))
        out.append(MomentReport(x=int(d["x"]), **{f: _parse_real(d[f]) for f in MOMENT_FIELDS[1:]}))
    return out


def _pmf_json(p: Pmf) -> dict:
    return {
        "x": p.x,
        "support_cap": p.support_cap,
        "mass": p.mass.tolist(),
        "truncated_tail": p.truncated_tail,
    }


def _pmf_from_json(d: dict) -> Pmf:
    return Pmf(
        x=d["x"],
        support_cap=d["support_cap"],
        mass=np.array(d["mass"], dtype=np.float64),
        truncated_tail=d["truncated_tail"],
    )


def _pmf_csv(p: Pmf) -> str:
    meta = {"x": p.x, "support_cap": p.support_cap, "truncated_tail": fmt_real(p.truncated_tail)}
    return _write_csv(meta, ["k", "mass"], ((k, fmt_real(m)) for k, m in enumerate(p.mass)))


def _pmf_from_csv(text: str) -> Pmf:
    meta, _, rows = _read_csv(text)
    return Pmf(
        x=int(meta["x"]),
        support_cap=int(meta["support_cap"]),
        mass=np.array([float(m) for _, m in rows], dtype=np.float64),
        truncated_tail=float(meta["truncated_tail"]),
    )


def _sample_json(b: SampleBatch) -> dict:
    return {"params": asdict(b.params), "provenance": b.provenance, "omegas": b.omegas.tolist()}


def _sample_from_json(d: dict) -> SampleBatch:
    return SampleBatch(
        params=ModelParams(**d["params"]),
        omegas=np.array(d["omegas"], dtype=np.int64),
        provenance=d["provenance"],
    )


PROVENANCE_INTS = ("chunk_size", "n_chunks")


def _sample_csv(b: SampleBatch) -> str:
    meta = dict(asdict(b.params))
    meta.update({f"provenance.{k}": v for k, v in b.provenance.items()})
    return _write_csv(meta, ["omega"], ([int(w)] for w in b.omegas))


def _sample_from_csv(text: str) -> SampleBatch:
    meta, _, rows = _read_csv(text)
    params = ModelParams(
        x=int(meta["x"]),
        seed=int(meta["seed"]),
        trials=int(meta["trials"]),
        chunk_size=int(meta["chunk_size"]),
        method=meta["method"],
    )
    prov = {}
    for k, v in meta.items():
        if k.startswith("provenance."):
            key = k[len("provenance.") :]
            prov[key] = int(v) if key in PROVENANCE_INTS else v
    return SampleBatch(params=params, omegas=np.array([int(r[0]) for r in rows], dtype=np.int64), provenance=prov)


def _summary_json(s: EmpiricalSummary) -> dict:
    d = asdict(s)
    d["histogram"] = {str(k): v for k, v in s.histogram.items()}
    return d


def _summary_from_json(d: dict) -> EmpiricalSummary:
    d = dict(d)
    d["histogram"] = {int(k): v for k, v in d["histogram"].items()}
    return EmpiricalSummary(**d)


def _summary_csv(s: EmpiricalSummary) -> str:
    meta = {
        "n": s.n,
        "mean": fmt_real(s.mean),
        "variance": fmt_real(s.variance),
        "ks_vs_normal": fmt_real(s.ks_vs_normal),
        "ks_vs_exact": fmt_real(s.ks_vs_exact),
    }
    return _write_csv(meta, ["k", "count"], sorted(s.histogram.items()))


def _summary_from_csv(text: str) -> EmpiricalSummary:
    meta, _, rows = _read_csv(text)
    return EmpiricalSummary(
        n=int(meta["n"]),
        mean=float(meta["mean"]),
        variance=float(meta["variance"]),
        histogram={int(k): int(c) for k, c in rows},
        ks_vs_normal=_parse_real(meta["ks_vs_normal"]),
        ks_vs_exact=_parse_real(meta["ks_vs_exact"]),
    )


def _census_json(c: OmegaCensus) -> dict:
    return {"x": c.x, "counts": {str(k): v for k, v in c.counts.items()}, "omega_total": c.omega_total}


def _census_from_json(d: dict) -> OmegaCensus:
    return OmegaCensus(x=d["x"], counts={int(k): v for k, v in d["counts"].items()}, omega_total=d["omega_total"])


def _census_csv(c: OmegaCensus) -> str:
    meta = {"x": c.x, "omega_total": c.omega_total}
    return _write_csv(meta, ["omega", "count"], sorted(c.counts.items()))


def _census_from_csv(text: str) -> OmegaCensus:
    meta, _, rows = _read_csv(text)
    return OmegaCensus(
        x=int(meta["x"]),
        counts={int(k): int(v) for k, v in rows},
        omega_total=int(meta["omega_total"]),
    )


def _rows_csv(rows, cls) -> str:
    fields = list(cls.__dataclass_fields__)
    return _write_csv(
        {}, fields, ([v if isinstance(v, int) else fmt_real(v) for v in asdict(r).values()] for r in rows)
    )


def _rows_from_csv(text: str, cls) -> list:
    _, header, rows = _read_csv(text)
    types = {k: f.type for k, f in cls.__dataclass_fields__.items()}
    return [
        cls(**{h: (int(v) if types[h] in (int, "int") else float(v)) for h, v in zip(header, row)})
        for row in rows
    ]


# -- public entry points -------------------------------------------------------

_SINGLE = {
    "primes": (_primes_json, _primes_from_json, _primes_csv, _primes_from_csv),
    "pmf": (_pmf_json, _pmf_from_json, _pmf_csv, _pmf_from_csv),
    "sample": (_sample_json, _sample_from_json, _sample_csv, _sample_from_csv),
    "summary": (_summary_json, _summary_from_json, _summary_csv, _summary_from_csv),
    "census": (_census_json, _census_from_json, _census_csv, _census_from_csv),
}
_ROWS = {"lindeberg": LindebergResult, "report": ReportRow}
KINDS = tuple(_SINGLE) + ("moments",) + tuple(_ROWS)


def dumps(obj, kind: str, fmt: str) -> str:
    """Encode a report. ``moments``, ``lindeberg`` and ``report`` take lists of rows."""
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if kind in _SINGLE:
        to_json, _, to_csv, _ = _SINGLE[kind]
        return json.dumps(to_json(obj)) + "\n" if fmt == "json" else to_csv(obj)
    if kind == "moments":
        if fmt == "json":
            return json.dumps([asdict(r) for r in obj]) + "\n"
        return _moments_csv(obj)
    if kind in _ROWS:
        if fmt == "json":
            return json.dumps([asdict(r) for r in obj]) + "\n"
        return _rows_csv(obj, _ROWS[kind])
    raise ValueError(f"unknown report kind {kind!r}")


def loads(text: str, kind: str, fmt: str):
    if fmt not in FORMATS:
        raise ValueError(f"format must be one of {FORMATS}, got {fmt!r}")
    if kind in _SINGLE:
        _, from_json, _, from_csv = _SINGLE[kind]
        return from_json(json.loads(text)) if fmt == "json" else from_csv(text)
    if kind == "moments":
        if fmt == "json":
            return [MomentReport(**d) for d in json.loads(text)]
        return _moments_from_csv(text)
    if kind in _ROWS:
        cls = _ROWS[kind]
        if fmt == "json":
            return [cls(**d) for d in json.loads(text)]
        return _rows_from_csv(text, cls)
    raise ValueError(f"unknown report kind {kind!r}")


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to a temp file beside ``path`` and rename it into place."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
