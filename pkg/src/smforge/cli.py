"""smforge command line: build machines, run traces, decide acceptance,
emit presentations, build diagrams, verify the lemma suites, bench areas.

Exit codes: 0 success, 1 domain-negative (rejected input or failed
property), 2 usage error or incomplete search.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import serialize
from .checks import SUITES
from .core import Machine, MachineError, fmt_admissible, run
from .diagrams import (
    MetricParams,
    area,
    disk_diagram,
    export_dot,
    export_flat,
    trapezium,
    un_diagram,
    weight,
)
from .presentations import (
    disk_relator_stream,
    emit_flat,
    emit_presentation,
    presentation_g,
    presentation_m,
    presentation_omega,
)
from .search import SearchBudget, bounded_accept, decide_accept_m1
from .tower import (
    InvalidParams,
    TowerParams,
    _BUILDERS,
    build,
    canonical_accepting,
    config_i,
    config_j,
    parse_params,
)
from .words import Word, power


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("SMFORGE_THREADS", "1")))
    except ValueError:
        return 1


def _load_params(path: str | None) -> TowerParams:
    if path is None:
        return TowerParams(alphabet=("a", "b"), n=2, k=2, L=3)
    return parse_params(Path(path).read_text())


def _load_machine(spec: str, params_path: str | None) -> Machine:
    if spec in _BUILDERS:
        return build(spec, _load_params(params_path))
    return serialize.machine_from_text(Path(spec).read_text())


def _parse_input(text: str) -> Word:
    text = text.strip()
    if not text or text == "1":
        return ()
    if " " in text:
        from .words import parse_word

        return parse_word(text)
    out: list = []
    i = 0
    while i < len(text):
        name = text[i]
        i += 1
        sign = 1
        if text[i : i + 3] == "^-1":
            sign = -1
            i += 3
        out.append((name, sign))
    return tuple(out)


def _report(rows: list[tuple], header: tuple[str, ...]) -> None:
    widths = [max(len(str(r[i])) for r in rows + [header]) for i in range(len(header))]
    print("  ".join(h.ljust(w) for h, w in zip(header, widths)))
    for r in rows:
        print("  ".join(str(x).ljust(w) for x, w in zip(r, widths)))


def cmd_build(args) -> int:
    machine = _load_machine(args.machine, args.params)
    if args.declarative and args.machine in _BUILDERS:
        p = _load_params(args.params)
        text = serialize.tower_line(args.machine, p.alphabet, p.n, p.k, p.L)
    else:
        text = serialize.machine_to_text(machine)
    _write_out(args.out, text)
    return 0


def _write_out(out: str | None, text: str) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(args) -> int:
    machine = _load_machine(args.machine, args.params)
    if args.trace:
        comp = serialize.trace_from_text(machine, Path(args.trace).read_text())
    else:
        w = _parse_input(args.input or "1")
        if not args.canonical:
            print("nothing to run: give --trace FILE or --canonical", file=sys.stderr)
            return 2
        history = canonical_accepting(machine, w, args.lane)
        w_n = power(w, machine.meta["n"])
        if args.lane == 2 and machine.meta.get("builder") == "m":
            start = config_j(machine, w_n)
        else:
            start = config_i(machine, w_n)
        comp = run(machine, start, history)
    sys.stdout.write(serialize.trace_to_text(comp))
    return 0


def cmd_accept(args) -> int:
    machine = _load_machine(args.machine, args.params)
    w = _parse_input(args.input)
    start = machine.input_config(w)
    if args.complete_m1:
        res = decide_accept_m1(machine, start, width=start.norm + args.width_slack)
    else:
        budget = SearchBudget(
            max_history=args.bound,
            max_word_norm=start.norm + args.width_slack if args.width_slack >= 0 else None,
            frontier_cap=args.frontier_cap,
        )
        res = bounded_accept(machine, start, budget)
    print(f"# input {args.input}: accepted={res.accepted} [{res.completeness()}]", file=sys.stderr)
    if res.accepted:
        comp = run(machine, start, res.witness)
        sys.stdout.write(serialize.trace_to_text(comp))
        return 0
    return 1 if res.complete else 2


def cmd_present(args) -> int:
    machine = _load_machine(args.machine, args.params)
    if args.group == "m":
        pres = presentation_m(machine)
    elif args.group == "g":
        pres = presentation_g(machine)
    elif args.group == "g-omega":
        n = machine.meta.get("n", 2)
        alphabet = machine.meta["alphabet"]
        source = (power(((alphabet[0], 1),), n),)
        pres = presentation_omega(machine, source)
    elif args.group == "disk":
        pres = presentation_g(machine)
        w = _parse_input(args.input or "1")
        u_n = power(w, machine.meta["n"])
        cfg = config_i(machine, u_n)
        witness = canonical_accepting(machine, w, 1)
        pres.relators.extend(disk_relator_stream(machine, [(cfg, witness)]))
    else:
        print(f"unknown group {args.group}", file=sys.stderr)
        return 2
    text = (
        emit_flat(pres, stream_limit=args.stream_limit)
        if args.export == "flat"
        else emit_presentation(pres, stream_limit=args.stream_limit)
    )
    _write_out(args.out, text)
    return 0


def cmd_diagram(args) -> int:
    machine = _load_machine(args.machine, args.params)
    params = MetricParams()
    if args.kind == "trapezium":
        comp = serialize.trace_from_text(machine, Path(args.infile).read_text())
        diagram = trapezium(comp)
        boundary_note = "trapezium boundary"
    elif args.kind == "disk":
        w = _parse_input(args.infile)
        u_n = power(w, machine.meta["n"])
        cfg = config_i(machine, u_n)
        diagram = disk_diagram(machine, cfg, canonical_accepting(machine, w, 1))
        boundary_note = fmt_admissible(cfg)
    elif args.kind == "un":
        u = _parse_input(args.infile)
        diagram = un_diagram(machine, u)
        boundary_note = " ".join(
            x if s == 1 else x + "^-1" for x, s in diagram.boundary_projected()
        )
    else:
        print(f"unknown diagram kind {args.kind}", file=sys.stderr)
        return 2
    if args.metrics:
        print(f"# area {area(diagram)} [measured]", file=sys.stderr)
        print(f"# weight {weight(diagram, params)} [measured, delta={params.delta} c1={params.c1}]", file=sys.stderr)
        print(f"# boundary {boundary_note}", file=sys.stderr)
    text = export_dot(diagram) if args.export == "dot" else export_flat(diagram)
    _write_out(args.out, text)
    return 0


def cmd_bench_area(args) -> int:
    p = _load_params(args.params)
    machine = build("m", TowerParams(p.alphabet, args.n, args.k, args.L))
    lengths = list(range(args.min_len, args.max_len + 1))
    alphabet = p.alphabet

    def u_of(length: int) -> Word:
        return tuple((alphabet[i % len(alphabet)], 1) for i in range(length))

    def one(length: int):
        d = un_diagram(machine, u_of(length))
        return (length, d.area, Fraction(d.area, length * length))

    workers = _threads()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(one, lengths))
    else:
        rows = [one(l) for l in lengths]
    base_ratio = rows[0][2]
    ok = all(r[2] <= 2 * base_ratio for r in rows)
    table = [
        (l, a, f"{float(q):.1f}", f"{float(q / base_ratio):.3f}", "measured")
        for l, a, q in rows
    ]
    _report(table, ("|u|", "area", "area/|u|^2", "vs-baseline", "provenance"))
    print(
        f"# quadratic upper surrogate (ratio <= 2x baseline): {'pass' if ok else 'FAIL'}"
    )
    if args.out_prefix:
        data = "\n".join(f"{l}\t{a}\t{float(q):.6f}" for l, a, q in rows) + "\n"
        Path(args.out_prefix + ".tsv").write_text(data)
        Path(args.out_prefix + ".svg").write_text(_area_svg(rows))
        print(f"# wrote {args.out_prefix}.tsv and {args.out_prefix}.svg")
    return 0 if ok else 1


def _area_svg(rows) -> str:
    """Static plot of area against squared input length."""
    w, h, margin = 480, 320, 40
    xs = [l * l for l, _, _ in rows]
    ys = [a for _, a, _ in rows]
    xmax, ymax = max(xs), max(ys)
    pts = []
    for x, y in zip(xs, ys):
        px = margin + (w - 2 * margin) * x / xmax
        py = h - margin - (h - 2 * margin) * y / ymax
        pts.append((px, py))
    path = " ".join(f"{px:.1f},{py:.1f}" for px, py in pts)
    circles = "\n".join(
        f'  <circle cx="{px:.1f}" cy="{py:.1f}" r="3" fill="black"/>' for px, py in pts
    )
    return f"""<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">
  <rect width="{w}" height="{h}" fill="white"/>
  <line x1="{margin}" y1="{h - margin}" x2="{w - margin}" y2="{h - margin}" stroke="black"/>
  <line x1="{margin}" y1="{margin}" x2="{margin}" y2="{h - margin}" stroke="black"/>
  <text x="{w // 2}" y="{h - 8}" font-size="12" text-anchor="middle">squared input length</text>
  <text x="12" y="{h // 2}" font-size="12" transform="rotate(-90 12 {h // 2})" text-anchor="middle">area</text>
  <polyline points="{path}" fill="none" stroke="steelblue"/>
{circles}
</svg>
"""


def cmd_verify_lemmas(args) -> int:
    try:
        suite = SUITES[args.suite]
    except KeyError:
        print(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}", file=sys.stderr)
        return 2
    params = _load_params(args.params)
    if args.n:
        params = TowerParams(params.alphabet, args.n, params.k, params.L)
    if args.alphabet:
        params = TowerParams(tuple(args.alphabet), params.n, params.k, params.L)
    results = suite(params, args.seed)
    rows = [
        (r.name, "pass" if r.passed else "FAIL", r.provenance, r.details)
        for r in results
    ]
    _report(rows, ("check", "status", "provenance", "details"))
    print(f"# suite {args.suite}: seed={args.seed} params={params}")
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="smforge")
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add_machine_args(p):
        p.add_argument("--machine", required=True, help="tower name (m1..m) or machine file")
        p.add_argument("--params", help="parameter file (alphabet/n/k/L)")

    p = sub.add_parser("build", help="emit a machine definition")
    add_machine_args(p)
    p.add_argument("--declarative", action="store_true", help="emit the one-line tower form")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_build)

    p = sub.add_parser("run", help="run a trace or the canonical accepting history")
    add_machine_args(p)
    p.add_argument("--trace", help="trace file to re-validate and replay")
    p.add_argument("--input", help="input word (canonical mode)")
    p.add_argument("--canonical", action="store_true")
    p.add_argument("--lane", type=int, default=1)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("accept", help="bounded acceptance decision")
    add_machine_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--bound", type=int, default=512)
    p.add_argument("--complete-m1", action="store_true", dest="complete_m1")
    p.add_argument("--width-slack", type=int, default=2, dest="width_slack")
    p.add_argument("--frontier-cap", type=int, default=2_000_000, dest="frontier_cap")
    p.set_defaults(fn=cmd_accept)

    p = sub.add_parser("present", help="emit a group presentation")
    add_machine_args(p)
    p.add_argument("--group", choices=("m", "g", "g-omega", "disk"), default="m")
    p.add_argument("--input", help="configuration input for disk relators")
    p.add_argument("--export", choices=("native", "flat"), default="native")
    p.add_argument("--stream-limit", type=int, default=1, dest="stream_limit")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_present)

    p = sub.add_parser("diagram", help="build a diagram and export it")
    add_machine_args(p)
    p.add_argument("--kind", choices=("trapezium", "disk", "un"), required=True)
    p.add_argument("--in", dest="infile", required=True, help="trace file or input word")
    p.add_argument("--metrics", action="store_true")
    p.add_argument("--export", choices=("dot", "flat"), default="flat")
    p.add_argument("--out")
    p.set_defaults(fn=cmd_diagram)

    p = sub.add_parser("bench-area", help="area growth of power diagrams")
    p.add_argument("--params")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--L", type=int, default=3)
    p.add_argument("--min-len", type=int, default=1, dest="min_len")
    p.add_argument("--max-len", type=int, default=4, dest="max_len")
    p.add_argument("--out-prefix", dest="out_prefix")
    p.set_defaults(fn=cmd_bench_area)

    p = sub.add_parser("verify-lemmas", help="run a property suite")
    p.add_argument("suite")
    p.add_argument("--params")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--alphabet", default="")
    p.add_argument("--seed", type=int, default=20240811)
    p.set_defaults(fn=cmd_verify_lemmas)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (MachineError, InvalidParams, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
