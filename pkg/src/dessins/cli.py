"""Command-line entry point: ``dessins {specs,count,verify,dessin,table}``.

Exit status: 0 on success, 1 when a verification mismatch is found, 2 on
invalid arguments. Output is deterministic for a fixed configuration,
whatever the worker count.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass

from .classify import spec_row, theorem_formula, verify
from .dessin import build_dessin, to_dict
from .group_core import DEFAULT_BRUTE_FORCE_LIMIT, enumerate_specs
from .numtheory import check_odd_prime

SCHEMA_VERSION = 1
COUNT_COLUMNS = ["p", "d", "e", "family", "f", "h", "pairs", "auts", "nu", "nu_formula", "match"]
TABLE_COLUMNS = ["p", "d", "e", "nu", "verified", "match"]
SPEC_COLUMNS = ["p", "d", "e", "family", "f", "h", "order", "label"]


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    p: int
    d: int | None = None
    e: int | None = None
    max_de: int | None = None
    format: str = "text"
    out: str | None = None
    parallel: int = 1
    max_order: int = DEFAULT_BRUTE_FORCE_LIMIT
    slow: bool = False
    oracle: bool = False
    adjacency: bool = False

    def validate(self) -> None:
        try:
            check_odd_prime(self.p)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if self.command == "table":
            if self.max_de is None or self.max_de < 0:
                raise ConfigError("table needs --max-de >= 0")
            return
        if self.d is None or self.e is None:
            raise ConfigError(f"{self.command} needs --d and --e")
        if not 0 <= self.d <= self.e:
            raise ConfigError(f"need 0 <= d <= e, got d={self.d}, e={self.e}")
        if self.command != "specs" and self.p ** (self.d + self.e) > self.max_order and not self.slow:
            raise ConfigError(
                f"group order {self.p}^{self.d + self.e} exceeds --max-order {self.max_order}; pass --slow"
            )


def _default_max_order() -> int:
    value = os.environ.get("DESSIN_MAX_ORDER")
    return int(value) if value else DEFAULT_BRUTE_FORCE_LIMIT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dessins", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, required=True, help="odd prime")
    common.add_argument("--format", choices=["json", "csv", "text"], default="text")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--parallel", type=int, default=1, metavar="N", help="worker processes")
    common.add_argument("--max-order", type=int, default=_default_max_order(),
                        help="largest group order handled without --slow (env DESSIN_MAX_ORDER)")
    common.add_argument("--slow", action="store_true", help="allow groups above --max-order")
    common.add_argument("--oracle", action="store_true",
                        help="use brute-force definitional predicates instead of congruences")
    common.add_argument("-v", "--verbose", action="store_true")

    de = argparse.ArgumentParser(add_help=False)
    de.add_argument("--d", type=int, required=True)
    de.add_argument("--e", type=int, required=True)

    sub.add_parser("specs", parents=[common, de], help="list the groups for K_{p^d,p^e}")
    sub.add_parser("count", parents=[common, de], help="pair/automorphism/class counts per group")
    sub.add_parser("verify", parents=[common, de], help="full recount; exit 1 on any mismatch")
    dp = sub.add_parser("dessin", parents=[common, de], help="export one dessin per class")
    dp.add_argument("--adjacency", action="store_true",
                    help="include vertex, edge-end and face lists")
    tp = sub.add_parser("table", parents=[common], help="class counts over a (d, e) grid")
    tp.add_argument("--max-de", type=int, required=True, help="largest d + e")
    return parser


def _config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command, p=args.p, d=getattr(args, "d", None), e=getattr(args, "e", None),
        max_de=getattr(args, "max_de", None), format=args.format, out=args.out,
        parallel=max(1, args.parallel), max_order=args.max_order, slow=args.slow,
        oracle=args.oracle, adjacency=getattr(args, "adjacency", False),
    )


# ---------------------------------------------------------------------------
# rendering


def _csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in columns})
    return buf.getvalue()


def _text(rows: list[dict], columns: list[str]) -> str:
    cells = [[("-" if r.get(c) is None else str(r.get(c))) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(line[k]) for line in cells]) for k, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(x.rjust(w) for x, w in zip(line, widths)) for line in cells]
    return "\n".join(lines) + "\n"


def _render(rows: list[dict], columns: list[str], fmt: str, payload: dict | None = None) -> str:
    if fmt == "json":
        body = payload if payload is not None else {"rows": rows}
        return json.dumps({"schema_version": SCHEMA_VERSION, **body}, indent=2) + "\n"
    if fmt == "csv":
        return _csv(rows, columns)
    return _text(rows, columns)


# ---------------------------------------------------------------------------
# commands


def _spec_dicts(cfg: RunConfig) -> list[dict]:
    return [{**s.to_dict(), "order": s.order, "label": s.label}
            for s in enumerate_specs(cfg.p, cfg.d, cfg.e)]


def run_specs(cfg: RunConfig) -> tuple[str, int]:
    return _render(_spec_dicts(cfg), SPEC_COLUMNS, cfg.format), 0


def _count_rows(report_rows, p, d, e) -> list[dict]:
    return [{"p": p, "d": d, "e": e, "family": r.spec.family.value, "f": r.spec.f, "h": r.spec.h,
             "pairs": r.pair_count, "auts": r.aut_count, "nu": r.nu, "nu_formula": r.nu_formula,
             "match": r.match} for r in report_rows]


def run_count(cfg: RunConfig) -> tuple[str, int]:
    report = verify(cfg.p, cfg.d, cfg.e, oracle=cfg.oracle, geometry=False, workers=cfg.parallel)
    rows = _count_rows(report.rows, cfg.p, cfg.d, cfg.e)
    return _render(rows, COUNT_COLUMNS, cfg.format), 0


def run_verify(cfg: RunConfig) -> tuple[str, int]:
    report = verify(cfg.p, cfg.d, cfg.e, oracle=cfg.oracle, geometry=True, workers=cfg.parallel)
    rows = _count_rows(report.rows, cfg.p, cfg.d, cfg.e)
    payload = report.to_dict()
    if cfg.format == "text":
        text = _text(rows, COUNT_COLUMNS)
        text += (f"reciprocal-pair classes: {report.reciprocal_pair_classes} "
                 f"(formula {report.theorem_value})\n")
        if report.total_dessins is not None:
            text += (f"dessins: {report.total_dessins} (formula {report.expected_total_dessins}), "
                     f"symmetric: {report.symmetric_total} (formula {report.expected_symmetric})\n")
        for r in report.rows:
            for err in r.errors:
                text += f"MISMATCH {r.spec}: {err}\n"
        text += f"match: {report.match}\n"
    else:
        text = _render(rows, COUNT_COLUMNS, cfg.format, payload)
    return text, 0 if report.match else 1


def run_dessin(cfg: RunConfig) -> tuple[str, int]:
    items = []
    for spec in enumerate_specs(cfg.p, cfg.d, cfg.e):
        row = spec_row(spec, oracle=cfg.oracle, geometry=False)
        if row.errors:
            raise RuntimeError("; ".join(row.errors))
        for key in row.representatives:
            n = spec.order
            pair = (spec.from_index(key // n), spec.from_index(key % n))
            items.append(to_dict(build_dessin(spec, pair), adjacency=cfg.adjacency))
    if cfg.format == "json":
        return json.dumps({"schema_version": SCHEMA_VERSION, "dessins": items}) + "\n", 0
    rows = [{"spec": it["spec"]["family"], "f": it["spec"]["f"], "h": it["spec"]["h"],
             "alpha": "b^{} a^{}".format(*it["alpha"]), "beta": "b^{} a^{}".format(*it["beta"]),
             "edges": len(it["rot_black"])} for it in items]
    cols = ["spec", "f", "h", "alpha", "beta", "edges"]
    return (_csv if cfg.format == "csv" else _text)(rows, cols), 0


def run_table(cfg: RunConfig) -> tuple[str, int]:
    rows, status = [], 0
    for e in range(cfg.max_de + 1):
        for d in range(0, e + 1):
            if d + e > cfg.max_de:
                continue
            nu = theorem_formula(cfg.p, d, e)
            verified = None
            if cfg.p ** (d + e) <= cfg.max_order or cfg.slow:
                report = verify(cfg.p, d, e, oracle=cfg.oracle, geometry=False,
                                workers=cfg.parallel)
                verified = report.reciprocal_pair_classes
                if not report.match:
                    status = 1
            rows.append({"p": cfg.p, "d": d, "e": e, "nu": nu, "verified": verified,
                         "match": None if verified is None else verified == nu})
    return _render(rows, TABLE_COLUMNS, cfg.format), status


COMMANDS = {"specs": run_specs, "count": run_count, "verify": run_verify,
            "dessin": run_dessin, "table": run_table}


def run(cfg: RunConfig) -> tuple[str, int]:
    cfg.validate()
    if cfg.oracle:
        # brute force is gated in group_core through the same variable; workers inherit it
        limit = 2**31 if cfg.slow else max(cfg.max_order, _default_max_order())
        os.environ["DESSIN_MAX_ORDER"] = str(limit)
    return COMMANDS[cfg.command](cfg)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    cfg = _config_from_args(args)
    try:
        text, status = run(cfg)
    except ConfigError as exc:
        print(f"dessins: error: {exc}", file=sys.stderr)
        return 2
    if cfg.out:
        with open(cfg.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
