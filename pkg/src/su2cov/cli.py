"""Command-line interface: every analysis as a reproducible CSV/JSON-emitting command."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import acceptance
from .capacity import coherent_info_single, moe_cov1l, moe_cov22, superactivation_experiment
from .channels import FAMILIES, ChannelFamilyParams, channel_to_json, family_channel
from .degpos import (
    decomposability_errors_cov1l,
    decomposability_errors_cov22,
    degradability_witness,
    positivity_region_cov1l,
    positivity_region_cov22,
)
from .entcrit import ebt_certify, ppt_test, ppt_vertices, twirl_average

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# fields carrying entropies in nats; --bits rescales them on output only
ENTROPY_KEYS = {
    "h_min", "holevo", "q1", "h_out", "h_env", "ic", "fannes_error_bound", "certified_upper",
    "q1_upper_via_scan", "fannes_bound", "certified_q1_upper", "two_copy_h_out", "two_copy_h_env",
    "two_copy_half_bound", "gap", "two_copy_ascent_half_bound",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str = "cov1l"
    l: int = 2
    p: float | None = None
    q: float = 0.0
    grid: int | None = None
    samples: int = 100_000
    seed: int = 0
    tol_override: float | None = None
    out: str | None = None
    format: str = "json"
    bits: bool = False

    def params(self) -> ChannelFamilyParams:
        if self.p is None:
            raise UsageError(f"{self.command} needs --p")
        return ChannelFamilyParams(self.family, self.p, self.l, self.q)


def fmt_number(x) -> str:
    return format(float(x), ".17g")


def _scale(key, value, bits: bool):
    if bits and key in ENTROPY_KEYS and isinstance(value, (int, float)) and not isinstance(value, bool):
        return value / math.log(2)
    return value


def _to_jsonable(obj, bits: bool = False, key=None):
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v, bits, k) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v, bits, key) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_to_jsonable(v, bits, key) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return _scale(key, float(obj), bits)
    return obj


def dumps_json(obj, bits: bool = False) -> str:
    """JSON with insertion-ordered keys and floats at 17 significant digits."""

    def enc(v, indent):
        pad = "  " * (indent + 1)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(x, indent + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + "  " * indent + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(x, (dict, list)) for x in v):
                return "[" + ", ".join(enc(x, indent) for x in v) + "]"
            return "[\n" + ",\n".join(pad + enc(x, indent + 1) for x in v) + "\n" + "  " * indent + "]"
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            if not math.isfinite(v):
                return json.dumps(str(v))
            return fmt_number(v)
        return json.dumps(v)

    return enc(_to_jsonable(obj, bits), 0) + "\n"


def dumps_csv(columns: list[str], rows: list[list], cfg: RunConfig) -> str:
    buf = io.StringIO()
    buf.write("# " + json.dumps(asdict(cfg), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for col, v in zip(columns, row):
            v = _scale(col, v, cfg.bits)
            if isinstance(v, (bool, np.bool_)):
                out.append(str(bool(v)).lower())
            elif isinstance(v, (float, np.floating, int, np.integer)):
                out.append(fmt_number(v) if isinstance(v, (float, np.floating)) else str(int(v)))
            else:
                out.append(v)
        w.writerow(out)
    return buf.getvalue()


def emit(text: str, cfg: RunConfig, path: str | None = None) -> None:
    target = path if path is not None else cfg.out
    if target is None:
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, encoding="utf-8")


def emit_table(columns, rows, cfg: RunConfig) -> None:
    if cfg.format == "csv":
        emit(dumps_csv(columns, rows, cfg), cfg)
    else:
        emit(dumps_json({"config": asdict(cfg), "columns": columns,
                         "rows": [dict(zip(columns, r)) for r in rows]}, cfg.bits), cfg)


def emit_record(record: dict, cfg: RunConfig) -> None:
    if cfg.format == "csv":
        flat = {k: v for k, v in record.items() if not isinstance(v, (dict, list))}
        emit_table(list(flat), [list(flat.values())], cfg)
    else:
        emit(dumps_json({"config": asdict(cfg), "result": record}, cfg.bits), cfg)


def _grid(cfg: RunConfig, default: int) -> int:
    n = cfg.grid if cfg.grid is not None else default
    if n < 2:
        raise UsageError("--grid must be at least 2")
    return n


def cmd_ppt_region(cfg: RunConfig) -> int:
    n = _grid(cfg, 101)
    rows = []
    axis = np.linspace(0, 1, n)
    if cfg.family == "cov22":
        for p in axis:
            for q in axis:
                if p + q > 1 + 1e-12:
                    continue
                params = ChannelFamilyParams("cov22", float(p), 2, float(min(q, 1 - p)))
                rep = ppt_test(family_channel(params), params)
                rows.append([params.p, params.q, rep.margin, rep.numeric_member])
    else:
        for p in axis:
            params = ChannelFamilyParams(cfg.family, float(p), cfg.l)
            rep = ppt_test(family_channel(params), params)
            rows.append([params.p, 0.0, rep.margin, rep.numeric_member])
    emit_table(["p", "q", "min_pt_eigenvalue", "member"], rows, cfg)
    return EXIT_OK


def cmd_ebt_certify(cfg: RunConfig) -> int:
    cert = ebt_certify(cfg.params(), cfg.samples, np.random.default_rng(cfg.seed))
    emit_record(cert.as_dict(), cfg)
    return EXIT_OK


def _moe_rows(cfg: RunConfig):
    if cfg.family == "cov22":
        cols = ["p", "q", "h_min", "holevo", "minimizer", "rule_value"]
        pts = [(cfg.p, cfg.q)] if cfg.p is not None else [
            (float(p), float(min(q, 1 - p))) for p in np.linspace(0, 1, _grid(cfg, 101))
            for q in np.linspace(0, 1, _grid(cfg, 101)) if p + q <= 1 + 1e-12
        ]
        rows = []
        for p, q in pts:
            r = moe_cov22(p, q)
            rows.append([p, q, r.h_min, r.holevo, r.minimizer_label, (5 * p - 3 * q) * (5 * p + 6 * q - 5)])
        return cols, rows
    if cfg.family != "cov1l":
        raise UsageError("moe supports the cov1l and cov22 families")
    cols = ["l", "p", "h_min", "holevo", "minimizer"]
    pts = [cfg.p] if cfg.p is not None else [float(p) for p in np.linspace(0, 1, _grid(cfg, 101))]
    rows = []
    for p in pts:
        r = moe_cov1l(cfg.l, p)
        rows.append([cfg.l, p, r.h_min, r.holevo, r.minimizer_label])
    return cols, rows


def cmd_moe(cfg: RunConfig) -> int:
    emit_table(*_moe_rows(cfg), cfg)
    return EXIT_OK


def cmd_holevo(cfg: RunConfig) -> int:
    cols, rows = _moe_rows(cfg)
    keep = [c for c in cols if c in ("l", "p", "q", "holevo")]
    idx = [cols.index(c) for c in keep]
    emit_table(keep, [[r[i] for i in idx] for r in rows], cfg)
    return EXIT_OK


def _scan_rows(scan: dict) -> list[list]:
    return [list(r) for r in zip(scan["lambda"], scan["h_out"], scan["h_env"], scan["ic"])]


def cmd_coherent_info(cfg: RunConfig) -> int:
    if cfg.p is None:
        raise UsageError("coherent-info needs --p")
    res = coherent_info_single(cfg.l, cfg.p, _grid(cfg, 100_001), keep_scan=cfg.format == "csv")
    if cfg.format == "csv":
        emit_table(["lambda", "h_out", "h_env", "ic"], _scan_rows(res.scan), cfg)
    else:
        emit_record(res.as_dict(), cfg)
    return EXIT_OK


def cmd_superactivation(cfg: RunConfig) -> int:
    if cfg.p is None:
        raise UsageError("superactivation needs --p")
    rep = superactivation_experiment(cfg.l, cfg.p, _grid(cfg, 100_001), keep_scan=cfg.out is not None)
    scan = rep.pop("_scan", None)
    emit(dumps_json({"config": asdict(cfg), "result": rep}, cfg.bits), cfg)
    if scan is not None:
        out = Path(cfg.out)
        scan_path = out.with_name(out.stem + "_scan.csv")
        emit(dumps_csv(["lambda", "h_out", "h_env", "ic"], _scan_rows(scan), cfg), cfg, str(scan_path))
    return EXIT_OK


def cmd_degradability(cfg: RunConfig) -> int:
    if cfg.p is not None:
        emit_record(degradability_witness(cfg.params()).as_dict(), cfg)
        return EXIT_OK
    n = _grid(cfg, 21)
    axis = np.linspace(0, 1, n)
    if cfg.family == "cov22":
        pts = [ChannelFamilyParams("cov22", float(p), 2, float(min(q, 1 - p)))
               for p in axis for q in axis if p + q <= 1 + 1e-12]
    else:
        pts = [ChannelFamilyParams(cfg.family, float(p), cfg.l) for p in axis]
    rows = []
    for params in pts:
        r = degradability_witness(params)
        rows.append([params.p, params.q, r.witness_kind or "", r.witness_value,
                     np.nan if r.closed_form is None else r.closed_form, r.conclusion])
    emit_table(["p", "q", "witness_kind", "witness_value", "closed_form", "conclusion"], rows, cfg)
    return EXIT_OK


def cmd_positivity(cfg: RunConfig) -> int:
    samples = min(cfg.samples, 10_000)
    if cfg.family == "cov1l":
        if cfg.p is None:
            raise UsageError("positivity needs --p")
        rep = positivity_region_cov1l(cfg.l, cfg.p, samples, cfg.seed).as_dict()
        rep["decomposability_error"] = decomposability_errors_cov1l(cfg.l)
    elif cfg.family == "cov22":
        if cfg.p is None:
            raise UsageError("positivity needs --p")
        rep = positivity_region_cov22(cfg.p, cfg.q, samples, cfg.seed).as_dict()
        rep["decomposability_errors"] = decomposability_errors_cov22()
    else:
        raise UsageError("positivity supports the cov1l and cov22 families")
    emit_record(rep, cfg)
    return EXIT_OK


def cmd_twirl_verify(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    base = ChannelFamilyParams(cfg.family, 1.0, cfg.l, 0.0)
    rows = []
    for vp, (m, i1, i2) in ppt_vertices(base):
        l_out = 2 if vp.family == "cov22" else vp.l
        tw = twirl_average(m, l_out, i1, i2, cfg.samples, rng)
        rows.append([vp.p, vp.q, m, l_out, i1, i2, cfg.samples, tw.frobenius_gap])
    emit_table(["p", "q", "m", "l", "i1", "i2", "samples", "gap"], rows, cfg)
    return EXIT_OK


def cmd_kraus_dump(cfg: RunConfig) -> int:
    params = cfg.params()
    emit(channel_to_json(family_channel(params), params) + "\n", cfg)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, only: list[int] | None = None, fault: str | None = None) -> int:
    if fault == "cg-sign":
        with acceptance.tampered_cg_sign():
            results = acceptance.run_all(cfg.tol_override, only)
    else:
        results = acceptance.run_all(cfg.tol_override, only)
    for r in results:
        print(r.summary_line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    emit(dumps_json({"config": asdict(cfg), "fault": fault, "passed": ok,
                     "criteria": [r.as_dict() for r in results]}), cfg)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "ppt-region": cmd_ppt_region,
    "ebt-certify": cmd_ebt_certify,
    "moe": cmd_moe,
    "holevo": cmd_holevo,
    "coherent-info": cmd_coherent_info,
    "superactivation": cmd_superactivation,
    "degradability": cmd_degradability,
    "positivity": cmd_positivity,
    "twirl-verify": cmd_twirl_verify,
    "kraus-dump": cmd_kraus_dump,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--family", choices=FAMILIES, default="cov1l")
    common.add_argument("--l", type=int, default=2)
    common.add_argument("--p", type=float)
    common.add_argument("--q", type=float, default=0.0)
    common.add_argument("--grid", type=int)
    common.add_argument("--samples", type=int, default=100_000)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--bits", action="store_true", help="display entropies in bits")
    parser = argparse.ArgumentParser(prog="su2cov", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name == "verify":
            sp.add_argument("--tol-override", type=float, help="replace every numeric tolerance")
            sp.add_argument("--only", type=int, nargs="+", choices=sorted(acceptance.CRITERIA))
            sp.add_argument("--inject-fault", choices=("cg-sign",), help="tamper with the model to test the gate")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    cfg = RunConfig(
        command=args.command, family=args.family, l=args.l, p=args.p, q=args.q, grid=args.grid,
        samples=args.samples, seed=args.seed, tol_override=getattr(args, "tol_override", None),
        out=args.out, format=args.format, bits=args.bits,
    )
    if cfg.samples < 1:
        parser.error("--samples must be positive")
    try:
        if args.command == "verify":
            return cmd_verify(cfg, args.only, args.inject_fault)
        return COMMANDS[args.command](cfg)
    except (UsageError, ValueError) as exc:
        print(f"su2cov {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        # an unwritable --out path is an invocation problem, not a failed check
        print(f"su2cov {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
