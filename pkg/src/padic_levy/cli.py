"""Batch command line: ``padic-levy {eval,verify,sample,limit,integrals}``.

Every subcommand reads a JSON config (``--config``), validates it fully
before computing, and writes its table atomically to ``--out`` (or stdout).
CSV outputs start with a ``#`` row carrying the seed and the SHA-256 of the
effective config.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from typing import Any

from . import charfn as cf
from . import process as pr
from .errors import ConfigError, InvalidParams, PadicLevyError
from .field import FieldKind, FieldSpec, PElement, PVector, vector_from_text, vector_to_text
from .measure import ball_character_integral, ball_integral_closed_form, measure_from_json, measure_to_json, StepMeasure
from .verify import SUITES, run_suite


# -- config --------------------------------------------------------------------------

@dataclass
class RunConfig:
    field: FieldSpec
    dimension: int = 1
    triplet: cf.LevyTriplet | None = None
    measure: StepMeasure | None = None
    grid: list | dict = field(default_factory=list)
    t: list = field(default_factory=lambda: [1.0])
    seed: int = 0
    sample: dict = field(default_factory=dict)
    limit: dict = field(default_factory=dict)
    integrals: dict = field(default_factory=dict)

    @classmethod
    def from_json(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        known = {"field", "dimension", "triplet", "measure", "grid", "t", "seed", "sample", "limit", "integrals"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        if "field" not in d:
            raise ConfigError("missing required key 'field'")
        try:
            spec = FieldSpec.from_json(d["field"])
        except (PadicLevyError, KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"field: {exc}") from None
        dim = d.get("dimension", 1)
        if not isinstance(dim, int) or dim < 1:
            raise ConfigError("dimension must be a positive integer")
        triplet = measure = None
        if d.get("triplet") is not None:
            try:
                triplet = cf.triplet_from_json(spec, d["triplet"])
            except (PadicLevyError, KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"triplet: {exc}") from None
        if d.get("measure") is not None:
            try:
                measure = measure_from_json(spec, d["measure"])
            except (PadicLevyError, KeyError, ValueError, TypeError) as exc:
                raise ConfigError(f"measure: {exc}") from None
        grid = d.get("grid", [])
        if isinstance(grid, dict):
            if set(grid) - {"radius", "depth"} or not all(isinstance(grid.get(k), int) for k in ("radius", "depth")):
                raise ConfigError("grid generator needs integer 'radius' and 'depth'")
            if grid["depth"] < 0:
                raise ConfigError("grid depth must be non-negative")
        elif isinstance(grid, list):
            for i, cell in enumerate(grid):
                try:
                    pt = vector_from_text(spec, cell)
                except (InvalidParams, ValueError, TypeError, AttributeError) as exc:
                    raise ConfigError(f"grid[{i}]: {exc}") from None
                if pt.dim != dim:
                    raise ConfigError(f"grid[{i}] has dimension {pt.dim}, expected {dim}")
        else:
            raise ConfigError("grid must be a list of points or a {radius, depth} generator")
        ts = d.get("t", [1.0])
        if not isinstance(ts, list) or not all(isinstance(x, (int, float)) and x >= 0 for x in ts):
            raise ConfigError("t must be a list of non-negative numbers")
        seed = d.get("seed", 0)
        if not isinstance(seed, int) or not 0 <= seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        for key in ("sample", "limit", "integrals"):
            if not isinstance(d.get(key, {}), dict):
                raise ConfigError(f"{key} must be an object")
        for key in ("sample", "limit"):
            if "lam" in d.get(key, {}):
                try:
                    measure_from_json(spec, d[key]["lam"])
                except (PadicLevyError, KeyError, ValueError, TypeError) as exc:
                    raise ConfigError(f"{key}.lam: {exc}") from None
        return cls(spec, dim, triplet, measure, grid, [float(x) for x in ts], seed,
                   dict(d.get("sample", {})), dict(d.get("limit", {})), dict(d.get("integrals", {})))

    def to_json(self) -> dict:
        d: dict = {"field": self.field.to_json(), "dimension": self.dimension}
        if self.triplet is not None:
            d["triplet"] = cf.triplet_to_json(self.triplet)
        if self.measure is not None:
            d["measure"] = measure_to_json(self.measure)
        d["grid"] = self.grid
        d["t"] = list(self.t)
        d["seed"] = self.seed
        for key in ("sample", "limit", "integrals"):
            if getattr(self, key):
                d[key] = getattr(self, key)
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def grid_points(self) -> list:
        if isinstance(self.grid, dict):
            return generate_grid(self.field, self.dimension, self.grid["radius"], self.grid["depth"])
        return [vector_from_text(self.field, c) for c in self.grid]

    def grid_size(self) -> int:
        if isinstance(self.grid, dict):
            return self.field.p ** (self.grid["depth"] * self.dimension)
        return len(self.grid)


def generate_grid(spec: FieldSpec, n: int, radius: int, depth: int) -> list:
    """All points with coordinates carrying digits only at exponents ``-radius .. -radius+depth-1``."""
    if depth == 0:
        return [PVector([spec.zero()] * n)]
    coords = [PElement(spec, -radius, ds) for ds in itertools.product(range(spec.p), repeat=depth)]
    return [PVector(c) for c in itertools.product(coords, repeat=n)]


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# -- output ---------------------------------------------------------------------------

def write_atomic(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".padic-levy-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(cfg: RunConfig, header: list, rows: list) -> str:
    buf = io.StringIO()
    buf.write(f"# seed={cfg.seed} config_sha256={cfg.digest()}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x: float) -> str:
    return repr(float(x))


# -- subcommands ------------------------------------------------------------------------

def _require(cfg: RunConfig, what: str, value):
    if value is None:
        raise ConfigError(f"this subcommand needs '{what}' in the config")
    return value


def cmd_eval(cfg: RunConfig) -> str:
    triplet = _require(cfg, "triplet", cfg.triplet)
    ys = cfg.grid_points()
    print(f"evaluating {len(cfg.t)} t values x {len(ys)} grid points", file=sys.stderr)
    rows = []
    if ys:
        values = cf.grid_values(triplet, cfg.t, ys)
        for i, t in enumerate(cfg.t):
            for j, y in enumerate(ys):
                v = values[i, j]
                rows.append([_fmt(t), vector_to_text(y), _fmt(v.real), _fmt(v.imag), _fmt(abs(v))])
    return csv_text(cfg, ["t", "y", "re_psi", "im_psi", "abs_psi"], rows)


def _jump_law(cfg: RunConfig, section: dict) -> StepMeasure:
    if "lam" in section:
        return measure_from_json(cfg.field, section["lam"])
    return _require(cfg, "measure", cfg.measure)


def cmd_sample(cfg: RunConfig) -> str:
    sec = cfg.sample
    w = float(sec.get("w", 1.0))
    t = float(sec.get("t", cfg.t[-1] if cfg.t else 1.0))
    paths = int(sec.get("paths", 1))
    lam = _jump_law(cfg, sec)
    root = pr.RngStream(cfg.seed)
    rows = []
    for i in range(paths):
        path = pr.sample_compound_poisson(w, lam, t, root.child(i))
        for s, v in zip(path.times, path.values):
            rows.append([i, _fmt(s), vector_to_text(v)])
    return csv_text(cfg, ["path", "time", "value"], rows)


def cmd_limit(cfg: RunConfig, m_list=None) -> str:
    sec = cfg.limit
    w = float(sec.get("w", 1.0))
    t = float(sec.get("t", cfg.t[-1] if cfg.t else 1.0))
    n = int(sec.get("n", 10000))
    ms = m_list or sec.get("m", [1, 4, 16, 64, 256, 1024])
    lam = _jump_law(cfg, sec)
    ys = cfg.grid_points()
    rep = pr.triangular_array_experiment(w, lam, t, ms, ys, n, pr.RngStream(cfg.seed))
    rows = [[r.m, _fmt(r.gap_empirical), _fmt(r.gap_analytic), _fmt(r.bound), int(r.within_bound), int(r.monotone_ok)]
            for r in rep.rows]
    return csv_text(cfg, ["m", "gap_empirical", "gap_analytic", "bound", "within_bound", "non_increasing_ok"], rows)


def cmd_integrals(cfg: RunConfig) -> str:
    sec = cfg.integrals
    primes = sec.get("primes", [cfg.field.p])
    ks = sec.get("k", list(range(-2, 3)))
    dims = sec.get("dims", [cfg.dimension])
    norm_logs = sec.get("norm_logs", list(range(-3, 4)))
    kind = cfg.field.kind
    rows = []
    for p in primes:
        spec = FieldSpec(int(p), kind, cfg.field.precision)
        for n in dims:
            for k in ks:
                for j in norm_logs:
                    s = PVector([spec.monomial(1, -j)] + [spec.monomial(p - 1, -j + 1)] * (n - 1))
                    brute = ball_character_integral(s, k).real
                    closed = float(ball_integral_closed_form(s, k))
                    rows.append(["ball_character", p, kind.value, n, k, j, "", _fmt(brute), _fmt(closed),
                                 _fmt(abs(brute - closed))])
        q = float(sec.get("q", 1.0))
        for j in sec.get("unit_ball_norm_logs", list(range(-1, 4))):
            y = spec.vector(spec.monomial(1, -j))
            for variant in cf.UnitBallVariant:
                A, B = cf.unit_ball_closed_form(q, y, variant)
                nu = cf.unit_ball_jump(spec, q, variant)
                A2, B2 = cf.A_functional(nu, y), cf.B_functional(nu, y)
                rows.append(["unit_ball_A", p, kind.value, 1, "", j, variant.value, _fmt(A2), _fmt(A), _fmt(abs(A - A2))])
                rows.append(["unit_ball_B", p, kind.value, 1, "", j, variant.value, _fmt(B2), _fmt(B), _fmt(abs(B - B2))])
    header = ["table", "p", "kind", "n", "k", "log_norm", "variant", "computed", "closed_form", "gap"]
    return csv_text(cfg, header, rows)


def cmd_verify(cfg: RunConfig | None, suite: str) -> tuple:
    seed = 0 if cfg is None else cfg.seed
    report = run_suite(suite, seed)
    return json.dumps(report, indent=2, default=_json_default) + "\n", report["passed"]


def _json_default(o):
    if isinstance(o, complex):
        return [o.real, o.imag]
    if hasattr(o, "item"):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


# -- entry point -------------------------------------------------------------------------

def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padic-levy", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("eval", "verify", "sample", "limit", "integrals"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=name != "verify")
        sp.add_argument("--out")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--t", type=_float_list)
        sp.add_argument("--grid-radius", type=int)
        sp.add_argument("--grid-depth", type=int)
        if name == "verify":
            sp.add_argument("--suite", choices=SUITES + ("all",), default="all")
        if name == "limit":
            sp.add_argument("--m", type=_int_list)
    return parser


def _effective_config(args) -> RunConfig | None:
    if args.config is None:
        if args.command != "verify":
            raise ConfigError("--config is required")
        return None
    d = load_config(args.config)
    if args.seed is not None:
        d["seed"] = args.seed
    if args.t is not None:
        d["t"] = args.t
    if args.grid_radius is not None or args.grid_depth is not None:
        g = d.get("grid") if isinstance(d.get("grid"), dict) else {"radius": 0, "depth": 1}
        if args.grid_radius is not None:
            g["radius"] = args.grid_radius
        if args.grid_depth is not None:
            g["depth"] = args.grid_depth
        d["grid"] = g
    if getattr(args, "m", None) is not None:
        d.setdefault("limit", {})["m"] = args.m
    return RunConfig.from_json(d)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _effective_config(args)
        if args.command == "verify":
            text, ok = cmd_verify(cfg, args.suite)
            write_atomic(args.out, text)
            return 0 if ok else 1
        if args.command == "eval":
            text = cmd_eval(cfg)
        elif args.command == "sample":
            text = cmd_sample(cfg)
        elif args.command == "limit":
            text = cmd_limit(cfg)
        else:
            text = cmd_integrals(cfg)
        write_atomic(args.out, text)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except PadicLevyError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
