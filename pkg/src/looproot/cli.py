"""Command-line front end.

    looproot roots      --type g2
    looproot subsystems --type b2
    looproot scalings   --gcm g2.json
    looproot census     --type b2 --modulus-bound 2
    looproot build      --type a2 --input pair.json
    looproot classify   --type a2 --input family.json
    looproot verify     --type a2 --input family.json --oracle --window 12

Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence, TextIO

from looproot import __version__
from looproot.errors import LoopRootError
from looproot.loop_classifier import (
    build_root_function,
    classify_root_function,
    enumerate_loop_subsystems,
    oracle_check,
    verify_root_function,
)
from looproot.records import dumps, family_from_record, gcm_from_json, loads, pair_from_record
from looproot.root_core import (
    DEFAULT_SAFETY_CAP,
    GeneralizedCartanMatrix,
    RootSystem,
    cartan_matrix,
    generate_root_system,
    is_finite_type,
)
from looproot.scaling import enumerate_basic_scalings, finite_type_scalings
from looproot.subsystems import enumerate_subsystems

COMMANDS = ("roots", "subsystems", "scalings", "classify", "build", "verify", "census")
BUILTINS = ("a1", "a2", "b2", "c2", "g2", "a1~")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    gcm_path: str | None = None
    builtin: str | None = None
    input_path: str | None = None
    height_bound: int | None = None
    window: int = 12
    modulus_bound: int | None = None
    offset_bound: int | None = None
    include_zero: bool = True
    oracle: bool = False
    per_subsystem: bool = False
    output_format: str = "json"
    parallelism: int = 1
    verbose: bool = False

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.gcm_path is None and self.builtin is None:
            raise UsageError("one of --gcm or --type is required")
        for name in ("height_bound", "window", "modulus_bound"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise UsageError(f"--{name.replace('_', '-')} must be positive")
        if self.offset_bound is not None and self.offset_bound < 0:
            raise UsageError("--offset-bound must be nonnegative")
        if self.parallelism < 0:
            raise UsageError("--parallelism must be nonnegative")
        if self.command in ("classify", "build", "verify") and not self.input_path:
            raise UsageError(f"{self.command} requires --input")
        if self.command == "census" and self.modulus_bound is None:
            raise UsageError("census requires --modulus-bound")


def safety_cap() -> int:
    raw = os.environ.get("LOOPROOT_SAFETY_CAP")
    if raw is None:
        return DEFAULT_SAFETY_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"LOOPROOT_SAFETY_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise UsageError("LOOPROOT_SAFETY_CAP must be positive")
    return cap


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read {path}: {err.strerror}") from None


def load_gcm(config: RunConfig) -> GeneralizedCartanMatrix:
    if config.gcm_path is not None:
        return gcm_from_json(loads(_read(config.gcm_path)))
    return cartan_matrix(config.builtin)


def _ambient(config: RunConfig, gcm: GeneralizedCartanMatrix) -> RootSystem:
    return generate_root_system(gcm, config.height_bound, safety_cap())


def _roots(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    rs = _ambient(config, gcm)
    rows = [
        {
            "root": list(r.root_coords),
            "coroot": list(r.coroot_coords),
            "height": r.height,
            "label": rs.label(r),
        }
        for r in rs.sorted_roots
    ]
    payload = {
        "labels": list(gcm.labels),
        "height_bound": config.height_bound,
        "complete": rs.complete,
        "count": len(rows),
        "positive": len(rs.positive_roots),
        "roots": rows,
    }
    return payload, "roots"


def _subsystems(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    subs = enumerate_subsystems(_ambient(config, gcm))
    return {"count": len(subs), "subsystems": [s.to_record() for s in subs]}, "subsystems"


def scalings_record(cartan: GeneralizedCartanMatrix) -> dict:
    """Both scaling routes for one Gamma, with an equality flag."""
    labels = cartan.labels
    basic = enumerate_basic_scalings(cartan)
    padic = sorted(basic.basics)
    finite = all(is_finite_type(cartan.submatrix(b), safety_cap()) for b in basic.split.blocks)
    record: dict[str, Any] = {
        "components": [[labels[i] for i in b] for b in basic.split.blocks],
        "primes": list(basic.primes),
    }
    if finite:
        closed = finite_type_scalings(cartan, include_zero=True, safety_cap=safety_cap())
        closed_nonzero = sorted(s.m for s in closed if all(s.m))
        record["basics"] = [{"m": dict(zip(labels, s.m)), "case": s.case} for s in closed]
        record["padic"] = [list(m) for m in padic]
        record["closed_form"] = [list(m) for m in closed_nonzero]
        record["equal"] = padic == closed_nonzero
        record["status"] = "cross-checked"
    else:
        record["basics"] = [{"m": dict(zip(labels, m)), "case": "basic"} for m in padic]
        record["padic"] = [list(m) for m in padic]
        record["closed_form"] = None
        record["equal"] = None
        record["status"] = "uncross-checked"
    return record


def _scalings(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    if not config.per_subsystem:
        return scalings_record(gcm), "basics"
    rows = []
    for sub in enumerate_subsystems(_ambient(config, gcm)):
        if sub.rank == 0:
            continue
        rec = {"gamma": [list(g.root_coords) for g in sub.gamma]}
        rec.update(scalings_record(sub.cartan))
        rows.append(rec)
    return {"count": len(rows), "subsystems": rows}, "subsystems"


def _build(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    rs = _ambient(config, gcm)
    pair = pair_from_record(loads(_read(config.input_path)), rs)
    return build_root_function(pair).to_record(), "entries"


def _classify(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    rs = _ambient(config, gcm)
    family = family_from_record(loads(_read(config.input_path)), rs)
    return classify_root_function(family, rs).to_record(), "pair"


class VerificationFailed(LoopRootError):
    pass


def _verify(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    rs = _ambient(config, gcm)
    family = family_from_record(loads(_read(config.input_path)), rs)
    report = verify_root_function(family, rs)
    payload: dict[str, Any] = {
        "ok": report.ok,
        "failures": [str(f) for f in report.failures],
    }
    if report and config.oracle:
        pair = classify_root_function(family, rs)
        missing, extra = oracle_check(pair, config.window)
        payload["oracle"] = {
            "window": config.window,
            "missing": len(missing),
            "extra": len(extra),
            "agree": not missing and not extra,
        }
    if not report:
        raise VerificationFailed(
            f"family is not a root function; first failure {report.first}", payload
        )
    if config.oracle and not payload["oracle"]["agree"]:
        raise VerificationFailed("closure oracle disagrees with the classified family", payload)
    return payload, "failures"


def _census_row(pair) -> dict:
    family = build_root_function(pair)
    ambient = pair.subsystem.ambient
    row = pair.to_record()
    row["verified"] = bool(verify_root_function(family, ambient, stop_at_first=True)) and (
        classify_root_function(family, ambient) == pair
    )
    return row


def _census(config: RunConfig, gcm: GeneralizedCartanMatrix) -> tuple[dict, str]:
    rs = _ambient(config, gcm)
    pairs = enumerate_loop_subsystems(
        rs,
        config.modulus_bound,
        config.offset_bound,
        include_zero=config.include_zero,
    )
    workers = config.parallelism or (os.cpu_count() or 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_census_row, pairs))
    else:
        rows = [_census_row(p) for p in pairs]
    payload = {
        "modulus_bound": config.modulus_bound,
        "offset_bound": config.modulus_bound if config.offset_bound is None else config.offset_bound,
        "include_zero": config.include_zero,
        "count": len(rows),
        "pairs": rows,
    }
    return payload, "pairs"


HANDLERS = {
    "roots": _roots,
    "subsystems": _subsystems,
    "scalings": _scalings,
    "classify": _classify,
    "build": _build,
    "verify": _verify,
    "census": _census,
}


def _cell(value: Any) -> str:
    if isinstance(value, str):
        return value
    return json.dumps(value, separators=(",", ":"))


def to_tsv(payload: dict, table: str) -> str:
    rows = payload.get(table)
    if not isinstance(rows, list):
        rows = [payload]
    if rows and not isinstance(rows[0], dict):
        rows = [{table: r} for r in rows]
    header: list[str] = []
    for r in rows:
        for k in r:
            if k not in header:
                header.append(k)
    lines = ["\t".join(header)]
    lines += ["\t".join(_cell(r.get(k, "")) for k in header) for r in rows]
    return "\n".join(lines) + "\n"


def render(payload: dict, table: str, fmt: str) -> str:
    return dumps(payload) if fmt == "json" else to_tsv(payload, table)


def run(config: RunConfig, out: TextIO | None = None, err: TextIO | None = None) -> int:
    """Execute one command; returns the exit status."""
    out = out or sys.stdout
    err = err or sys.stderr
    started = time.perf_counter()
    try:
        config.validate()
        gcm = load_gcm(config)
        payload, table = HANDLERS[config.command](config, gcm)
    except UsageError as e:
        err.write(f"usage error: {e}\n")
        return 2
    except VerificationFailed as e:
        payload = e.args[1]
        out.write(render(payload, "failures", config.output_format))
        err.write(f"VerificationFailed: {e.args[0]}\n")
        return 1
    except LoopRootError as e:
        err.write(f"{type(e).__name__}: {e}\n")
        return 1
    out.write(render(payload, table, config.output_format))
    if config.verbose:
        elapsed = time.perf_counter() - started
        err.write(f"looproot {__version__} {config.command} finished in {elapsed:.3f}s\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="looproot",
        description="Classify root subsystems of loop extensions of crystallographic root systems.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--gcm", dest="gcm_path", help="GCM JSON file; overrides --type")
    parser.add_argument(
        "--type",
        dest="builtin",
        help=f"named Cartan matrix ({', '.join(BUILTINS)}, or any An/Bn/Cn/Dn/En/F4/G2)",
    )
    parser.add_argument("--input", dest="input_path", help="pair (build) or family (classify, verify) JSON")
    parser.add_argument("--height-bound", type=int, help="keep roots with |height| <= N")
    parser.add_argument("--window", type=int, default=12, help="oracle level window (default 12)")
    parser.add_argument("--modulus-bound", type=int)
    parser.add_argument("--offset-bound", type=int, help="bound for zero-modulus offsets")
    parser.add_argument("--no-zero", dest="include_zero", action="store_false", help="skip zero-modulus families")
    parser.add_argument("--oracle", action="store_true", help="cross-check with brute-force closure")
    parser.add_argument("--per-subsystem", action="store_true", help="scalings for every subsystem's Gamma")
    parser.add_argument("--format", dest="output_format", choices=("json", "tsv"), default="json")
    parser.add_argument("--parallelism", type=int, default=1, help="worker count, 0 = auto")
    parser.add_argument("--verbose", action="store_true", help="run metadata on stderr")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return run(RunConfig(**vars(args)))


if __name__ == "__main__":
    sys.exit(main())
