"""Run configuration, run records, and JSON/CSV persistence.

Scalars that exceed double precision are emitted as exact decimal strings
with a ``prec_bits`` sibling, so records parse back bit-identically; a
rounded float rides along for plotting.  Identical configs produce
byte-identical result sections.
"""

from __future__ import annotations

import csv
import io
import json
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from mpmath import mpf

from . import __version__
from .errors import CapExceeded, NestgeomError, NoFixedPoint, NotInDomain
from .geometry import GeometryReport, geometry_report, parabolic_proximity
from .maps import UnimodalMap, make_map
from .nest import Nest, build_nest
from .precision import (
    DEFAULT_MAX_BITS,
    Precision,
    from_decimal,
    round_to,
    scalar_bits,
    to_decimal,
)
from .renorm import (
    LevelMaps,
    cascade_structure,
    combinatorics,
    record_from_json_dict,
    record_to_json_dict,
    return_map_domains,
)

SCHEMA_VERSION = 1


def scalar_to_json(x: mpf, bits: int | None = None) -> dict:
    """Scalars round to the report precision before encoding: records stay
    compact and reruns give byte-identical output."""
    if bits is not None:
        x = round_to(x, bits)
    return {"dec": to_decimal(x), "prec_bits": max(1, scalar_bits(x)), "float": float(x)}


def scalar_from_json(obj: dict) -> mpf:
    return from_decimal(obj["dec"])


@dataclass(frozen=True)
class RunConfig:
    """Everything a pipeline run depends on; reruns reproduce results."""

    parameter: str | None = None
    target: str | None = None
    precision_start: int = 256
    precision_max: int = DEFAULT_MAX_BITS
    max_levels: int = 16
    orbit_cap: int = 10**6
    return_cap: int = 10**4
    renorm_horizon: int = 64
    delta: str = "0.01"
    digits: int = 40
    search_depth: int = 8
    format: str = "json"

    def validate(self) -> None:
        if self.precision_start > self.precision_max:
            raise ValueError("precision_start exceeds precision_max")
        if min(self.max_levels, self.orbit_cap, self.return_cap) < 1:
            raise ValueError("caps and level budget must be at least 1")
        if not 0 < float(self.delta) < 1:
            raise ValueError("delta must lie in (0, 1)")
        if self.format not in ("json", "csv"):
            raise ValueError(f"unknown format {self.format!r}")


def interval_to_json(iv, bits: int | None = None) -> dict:
    return {"lo": scalar_to_json(iv.lo, bits), "hi": scalar_to_json(iv.hi, bits)}


def _geometry_to_json(rep: GeometryReport, bits: int | None = None) -> dict:
    return {
        "lambdas": [scalar_to_json(x, bits) for x in rep.lambdas],
        "central_flags": rep.central_flags,
        "noncentral_levels": rep.noncentral,
        "noncentral_lambdas": [scalar_to_json(x, bits) for x in rep.noncentral_lambdas],
        "commensurability": [[n, c] for n, c in rep.commensurability],
        "extension_margin": [[n, m] for n, m in rep.extension_margin],
        "decay": None if rep.decay is None else {
            "C": rep.decay.C, "rho": rep.decay.rho, "residual": rep.decay.residual,
            "accepted": rep.decay.accepted, "points": rep.decay.points,
        },
        "trigger": None if rep.trigger is None else
            {"level": rep.trigger[0], "delta": rep.trigger[1]},
        "tower_lambdas": [scalar_to_json(x, bits) for x in rep.tower_lambdas],
        "indexing": rep.indexing,
    }


def run_nest_pipeline(config: RunConfig) -> dict:
    """Build the nest and every downstream artifact the config allows.

    Per-stage failures that merely limit depth (caps, gaps, missing fixed
    points) degrade the record instead of aborting it.
    """
    config.validate()
    if not config.parameter:
        raise ValueError("nest pipeline needs an explicit parameter")
    timings: dict[str, float] = {}
    t0 = time.monotonic()
    fmap = make_map(config.parameter, Precision(config.precision_start))
    nest = build_nest(
        fmap,
        max_levels=config.max_levels,
        orbit_cap=config.orbit_cap,
        max_bits=config.precision_max,
        renorm_horizon=config.renorm_horizon or None,
    )
    timings["nest"] = time.monotonic() - t0

    t0 = time.monotonic()
    branches_by_level = {}
    resolved: dict[int, LevelMaps] = {}
    for n in range(1, nest.depth + 1):
        try:
            maps = cascade_structure(nest, n, cap=config.return_cap)
            resolved[n] = maps
            branches_by_level[n] = maps.branches
        except (CapExceeded, NestgeomError):
            break
    timings["branches"] = time.monotonic() - t0

    t0 = time.monotonic()
    records = []
    for n in range(1, nest.depth):
        if n not in resolved or not resolved[n].escaped:
            continue
        try:
            records.append(combinatorics(nest, n, cap=config.return_cap,
                                         maps=resolved[n]))
        except (CapExceeded, NotInDomain, NestgeomError):
            continue
    timings["combinatorics"] = time.monotonic() - t0

    t0 = time.monotonic()
    report = geometry_report(nest, branches_by_level, delta=float(config.delta),
                             resolved=resolved)
    parabolic = []
    for n in range(1, nest.depth + 1):
        if nest.levels[n].central is not True:
            continue
        if n > 1 and nest.levels[n - 1].central:
            continue  # one probe per cascade: the structure repeats inside
        try:
            parabolic.append(parabolic_proximity(nest, n))
        except (NoFixedPoint, NestgeomError):
            continue
    timings["geometry"] = time.monotonic() - t0

    enc_bits = config.precision_start + 64
    results = {
        "parameter": scalar_to_json(fmap.a),
        "alpha": scalar_to_json(nest.alpha, enc_bits),
        "depth": nest.depth,
        "termination": nest.termination,
        "levels": [
            {
                "index": lv.index,
                "r": lv.r,
                "central": lv.central,
                "interval": interval_to_json(lv.interval, enc_bits),
            }
            for lv in nest.levels
        ],
        "branches": {
            str(n): [
                {
                    "label": b.label,
                    "return_time": b.return_time,
                    "orientation": b.orientation,
                    "domain": interval_to_json(b.domain, enc_bits),
                }
                for b in brs
            ]
            for n, brs in sorted(branches_by_level.items())
        },
        "combinatorics": [record_to_json_dict(rec) for rec in records],
        "geometry": _geometry_to_json(report, enc_bits),
        "parabolic": [
            {
                "level": pp.level,
                "cascade_levels": pp.cascade_levels,
                "fixed_point": scalar_to_json(pp.fixed_point, enc_bits),
                "multiplier": scalar_to_json(pp.multiplier, enc_bits),
                "multiplier_fd": scalar_to_json(pp.multiplier_fd, enc_bits),
                "low_return": pp.low_return,
            }
            for pp in parabolic
        ],
    }
    return {
        "schema_version": SCHEMA_VERSION,
        "artifact_version": __version__,
        "config": asdict(config),
        "results": results,
        "timings": timings,
    }


def record_to_json(record: dict) -> str:
    """Canonical serialization: sorted keys, no float surprises."""
    return json.dumps(record, sort_keys=True, indent=1)


def results_fingerprint(record: dict) -> str:
    """Serialization of the reproducible part (config + results) only."""
    return json.dumps({"config": record["config"], "results": record["results"]},
                      sort_keys=True)


def record_from_json(text: str) -> dict:
    return json.loads(text)


def nest_csv_rows(record: dict) -> list[dict]:
    """Plot-friendly rows: one per level with its scaling data."""
    geom = record["results"]["geometry"]
    lambdas = geom["lambdas"]
    flags = geom["central_flags"]
    commens = dict((n, c) for n, c in geom["commensurability"])
    rows = []
    for i, lam in enumerate(lambdas, start=1):
        rows.append({
            "level": i,
            "lambda": lam["float"],
            "central": "" if flags[i] is None else int(bool(flags[i])),
            "c_geo": commens.get(i, ""),
        })
    return rows


def write_csv(rows: list[dict], stream) -> None:
    if not rows:
        stream.write("\r\n")
        return
    writer = csv.DictWriter(stream, fieldnames=list(rows[0].keys()),
                            lineterminator="\r\n")
    writer.writeheader()
    writer.writerows(rows)


def read_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    return list(reader)


def combinatorics_records_from_file(text: str):
    """Parse a search-target file: a JSON list of combinatorics records."""
    data = json.loads(text)
    if isinstance(data, dict):
        data = data.get("combinatorics", [])
    return [record_from_json_dict(item) for item in data]
