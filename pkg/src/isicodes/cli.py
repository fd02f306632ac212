"""Command-line driver: construct, verify, simulate, trellis, field-check.

Exit codes: 0 when every checked guarantee holds, 1 when one is violated
(a witness is printed), 2 for usage, parse and parameter errors.

Every output file starts with a ``# manifest:`` line (or a ``manifest``
key for JSON) holding the argument vector; ``isicodes --replay FILE``
re-runs it.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from . import __version__, gfmatrix
from . import minbasis as mb
from .binmat import binary_rank, left_nullspace
from .channel import SimConfig, THREADS_ENV, default_threads, estimate_slope, run_monte_carlo, summary_json
from .constellation import parse_constellation
from .errors import ConfigError, InsufficientPoints, IsiCodesError, ParseError, PolynomialNotPrimitive
from .fileio import (format_code_set, format_codebook, format_header, manifest_line, parse_code_set,
                     parse_codebook, read_manifest)
from .gf import format_poly, make_field, multiplicative_order
from .multilevel import codebook_array, full_codebook, make_layers, message_table
from .rankcodes import CodeParams, EvalMode, construct, theta_lift
from .trellis import (build_generator, effective_rate, encode_lifted, encode_trellis, format_generator,
                      parse_generator, random_message, verify_trellis_rank)

EXIT_OK, EXIT_VIOLATED, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _hex(text: str) -> int:
    return int(text, 16)


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--Mt", type=int, required=True, help="transmit antennas M_t")
    p.add_argument("--nu", type=int, required=True, help="ISI memory")
    p.add_argument("--T", type=int, required=True, help="block length (field degree)")
    p.add_argument("--R", type=int, required=True, help="rate in symbols per transmission")
    p.add_argument("--prim-poly", type=_hex, default=None, help="primitive polynomial as hex, bit k = x^k")
    p.add_argument("--eval-mode", choices=[m.value for m in EvalMode], default="ISI")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="isicodes", description="Rank-distance codes for MIMO ISI channels")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--replay", type=Path, help="re-run the command recorded in FILE's manifest")
    parser.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or 1)")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("construct", help="build the code set S and optionally a joint codebook")
    _add_params(c)
    c.add_argument("--out", type=Path, required=True, help="code-set file")
    c.add_argument("--limit", type=int, default=1 << 20, help="maximum codewords written")
    c.add_argument("--header-only", action="store_true", help="write only the header line")
    c.add_argument("--layers", type=int, default=1, help="layers sharing this code set")
    c.add_argument("--constellation", default=None, help="psk:L or qam:L for the codebook")
    c.add_argument("--no-translate", action="store_true", help="keep the raw constellation origin")
    c.add_argument("--codebook-out", type=Path, default=None)

    v = sub.add_parser("verify", help="check rank, minimal-basis, trellis or determinant guarantees")
    v.add_argument("input", type=Path)
    v.add_argument("--mode", choices=["rank", "basis", "trellis", "cauchy-binet"], default="rank")
    v.add_argument("--report", type=Path, default=None)
    v.add_argument("--claimed", type=int, default=None, help="override the claimed rank")
    v.add_argument("--instances", type=int, default=200, help="random instances for property checks")
    v.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("simulate", help="Monte Carlo error rate and diversity slope")
    s.add_argument("codebook", type=Path)
    s.add_argument("--config", type=Path, required=True, help="JSON simulation config")
    s.add_argument("--out", type=Path, required=True, help="CSV output; the JSON summary goes next to it")

    t = sub.add_parser("trellis", help="write the monomial convolutional generator")
    t.add_argument("--Mt", type=int, required=True)
    t.add_argument("--R", type=int, required=True)
    t.add_argument("--nu", type=int, required=True)
    t.add_argument("--T", type=int, required=True)
    t.add_argument("--out", type=Path, required=True)

    f = sub.add_parser("field-check", help="check a primitive polynomial and print field data")
    f.add_argument("--T", type=int, required=True)
    f.add_argument("--prim-poly", type=_hex, default=None)
    f.add_argument("--out", type=Path, default=None)
    return parser


def _manifest(command: str, argv: Sequence[str], params: dict, seed=None, inputs=(), outputs=()) -> dict:
    return {
        "command": command,
        "argv": list(argv),
        "params": params,
        "seed": seed,
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "version": __version__,
    }


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _emit_report(lines: List[str], manifest: dict, path: Optional[Path]) -> None:
    body = "\n".join(lines) + "\n"
    sys.stdout.write(body)
    if path is not None:
        _write(path, manifest_line(manifest) + body)


def _params_from(args) -> CodeParams:
    return CodeParams(args.Mt, args.nu, args.T, args.R, eval_mode=EvalMode(args.eval_mode))


def cmd_construct(args, argv) -> int:
    params = _params_from(args)
    code = construct(params, args.prim_poly)
    outputs = [args.out] + ([args.codebook_out] if args.codebook_out else [])
    manifest = _manifest("construct", argv, {
        "M_t": params.M_t, "nu": params.nu, "T": params.T, "R": params.R,
        "prim_poly": f"{code.ctx.primitive_polynomial:#x}", "eval_mode": params.eval_mode.value,
        "header_only": args.header_only, "layers": args.layers,
        "constellation": args.constellation, "translate": not args.no_translate,
    }, outputs=outputs)
    if args.header_only:
        _write(args.out, manifest_line(manifest) + format_header(params, code.ctx.primitive_polynomial) + "\n")
    else:
        code.indices(limit=args.limit)  # raises EnumerationTooLarge past the cap
        _write(args.out, format_code_set(code, manifest))
    print(f"kernel dimension {code.dimension} (bound {params.R * params.T - params.nu * params.M_t}), "
          f"{len(code)} codewords -> {args.out}")
    if args.codebook_out is not None:
        if args.constellation is None:
            raise ConfigError("--codebook-out needs --constellation")
        mapper = parse_constellation(args.constellation, translate=not args.no_translate)
        codes = [code] * args.layers
        layers = make_layers(codes)
        cb = full_codebook(layers, mapper)
        X = codebook_array(cb)
        _write(args.codebook_out, format_codebook(codes, X, message_table(cb), str(mapper),
                                                  mapper.translate, manifest))
        print(f"{len(cb)} joint codewords -> {args.codebook_out}")
    return EXIT_OK


def _load_code(path: Path):
    sf = parse_code_set(path.read_text())
    code = construct(sf.params, sf.prim_poly)
    it, _ = code.indices(limit=max(len(sf.codewords), 1))
    expected = [code.codeword(k) for k in it]
    if expected[:len(sf.codewords)] != sf.codewords or len(sf.codewords) not in (len(expected), 0):
        raise ParseError(f"{path}: codewords do not match the construction named in the header")
    return sf, code


def _verify_rank(args, manifest) -> int:
    sf, code = _load_code(args.input)
    p = sf.params
    claimed = args.claimed if args.claimed is not None else p.claimed_rank
    best = witness = None
    hist: dict = {}
    skipped = 0
    for k, C in enumerate(sf.codewords):
        if C.is_zero():
            continue
        if not C.tail_is_zero(p.nu):
            skipped += 1
            continue
        r = binary_rank(theta_lift(C, p.nu))
        hist[r] = hist.get(r, 0) + 1
        if best is None or r < best:
            best, witness = r, k
    ok = best is None or best >= claimed
    lines = [
        "mode: rank",
        f"params: M_t={p.M_t} nu={p.nu} T={p.T} R={p.R} eval_mode={p.eval_mode.value}",
        f"kernel_dimension: {code.dimension}",
        f"cardinality_bound: {p.R * p.T - p.nu * p.M_t}",
        f"T_thr: {p.T_thr}",
        f"guarantee_applies: {str(p.guarantee_applies()).lower()}",
        f"claimed: {claimed}",
        f"scanned: {sum(hist.values())}",
        f"skipped_nonzero_tail: {skipped}",
        f"min_rank: {best}",
        "histogram: " + " ".join(f"{r}:{n}" for r, n in sorted(hist.items())),
    ]
    if witness is not None:
        lines.append(f"witness_index: {witness}")
        lines.append(f"witness_f: {code.poly(witness).describe(code.ctx)}")
        lines.append("witness_matrix: " + " / ".join(
            "".join(str((row >> c) & 1) for c in range(p.T)) for row in sf.codewords[witness].rows))
    lines.append(f"verdict: {'holds' if ok else 'violated'}")
    _emit_report(lines, manifest, args.report)
    return EXIT_OK if ok else EXIT_VIOLATED


def _verify_basis(args, manifest) -> int:
    sf, code = _load_code(args.input)
    p, ctx = sf.params, code.ctx
    scanned = props_ok = size_ok = 0
    max_d = 0
    failures = []
    for k, C in enumerate(sf.codewords):
        if C.is_zero() or not C.tail_is_zero(p.nu):
            continue
        U = theta_lift(C, p.nu)
        nullity = len(left_nullspace(U))
        Gf = mb.enumerate_Gf(ctx, p, C.rows)
        basis = mb.find_minimal_basis(ctx, Gf, p)
        check = mb.check_minimal_basis(ctx, basis.vectors, Gf, p)
        scanned += 1
        props_ok += check.ok
        size_ok += len(Gf) == 1 << nullity
        max_d = max(max_d, basis.d)
        if not check.ok or len(Gf) != 1 << nullity:
            failures.append(k)
    d_ok = max_d <= p.R - 1 or not p.guarantee_applies()
    ok = not failures and d_ok
    lines = [
        "mode: basis",
        f"params: M_t={p.M_t} nu={p.nu} T={p.T} R={p.R} eval_mode={p.eval_mode.value}",
        f"scanned: {scanned}",
        f"properties_verified: {props_ok}",
        f"nullspace_size_matches: {size_ok}",
        f"max_basis_size: {max_d}",
        f"basis_bound: {p.R - 1}",
        f"guarantee_applies: {str(p.guarantee_applies()).lower()}",
    ]
    if failures:
        lines.append("failing_indices: " + " ".join(map(str, failures[:20])))
    lines.append(f"verdict: {'holds' if ok else 'violated'}")
    _emit_report(lines, manifest, args.report)
    return EXIT_OK if ok else EXIT_VIOLATED


def _verify_trellis(args, manifest) -> int:
    gen = parse_generator(args.input.read_text())
    report = verify_trellis_rank(gen, args.claimed)
    rng = random.Random(args.seed)
    lift_fail = 0
    for _ in range(args.instances):
        u = random_message(gen, rng)
        if theta_lift(encode_trellis(gen, u), gen.nu) != encode_lifted(gen, u):
            lift_fail += 1
    ok = report.holds and lift_fail == 0
    lines = [
        "mode: trellis",
        f"params: M_t={gen.M_t} nu={gen.nu} R={gen.R} T={gen.T}",
        f"effective_rate: {effective_rate(gen)}",
        f"messages: {gen.n_messages}",
        f"claimed: {report.claimed}",
        f"min_rank: {report.min_rank}",
        "histogram: " + " ".join(f"{r}:{n}" for r, n in report.histogram.items()),
        f"witness: {report.witness}",
        f"lift_checks: {args.instances}",
        f"lift_failures: {lift_fail}",
        f"verdict: {'holds' if ok else 'violated'}",
    ]
    _emit_report(lines, manifest, args.report)
    return EXIT_OK if ok else EXIT_VIOLATED


def random_cauchy_binet(ctx, rng: random.Random, max_m: int = 4, max_n: int = 6) -> bool:
    m = rng.randint(1, max_m)
    n = rng.randint(m, max_n)
    A = [[rng.randrange(ctx.order) for _ in range(n)] for _ in range(m)]
    B = [[rng.randrange(ctx.order) for _ in range(m)] for _ in range(n)]
    return mb.cauchy_binet_check(ctx, A, B)


def random_independent_gamma(ctx, params: CodeParams, rng: random.Random):
    """R Gamma-vectors, redrawn until independent over the extension field."""
    while True:
        vecs = [tuple(rng.randrange(1 << (params.nu + 1)) for _ in range(params.M_t)) for _ in range(params.R)]
        if gfmatrix.rank(ctx, vecs) == params.R:
            return vecs


def _verify_cauchy_binet(args, manifest) -> int:
    sf = parse_code_set(args.input.read_text())
    p = sf.params
    ctx = make_field(p.T, sf.prim_poly)
    rng = random.Random(args.seed)
    cb_fail = sum(not random_cauchy_binet(ctx, rng) for _ in range(args.instances))
    thr = mb.detP_threshold(p)
    lines = ["mode: cauchy-binet", f"field: T={p.T} poly={format_poly(sf.prim_poly)}",
             f"cauchy_binet_instances: {args.instances}", f"cauchy_binet_failures: {cb_fail}",
             f"detP_threshold: {thr}"]
    det_fail = 0
    if p.T >= thr:
        for _ in range(args.instances):
            det_fail += not mb.verify_detP(ctx, p, random_independent_gamma(ctx, p, rng))
        lines += [f"detP_instances: {args.instances}", f"detP_failures: {det_fail}"]
    else:
        lines.append("detP: skipped (T below threshold)")
    ok = cb_fail == 0 and det_fail == 0
    lines.append(f"verdict: {'holds' if ok else 'violated'}")
    _emit_report(lines, manifest, args.report)
    return EXIT_OK if ok else EXIT_VIOLATED


def cmd_verify(args, argv) -> int:
    if not args.input.exists():
        raise ParseError(f"{args.input}: no such file")
    manifest = _manifest("verify", argv, {"mode": args.mode, "claimed": args.claimed,
                                          "instances": args.instances},
                         seed=args.seed, inputs=[args.input], outputs=[args.report] if args.report else [])
    handler = {"rank": _verify_rank, "basis": _verify_basis, "trellis": _verify_trellis,
               "cauchy-binet": _verify_cauchy_binet}[args.mode]
    return handler(args, manifest)


def cmd_simulate(args, argv) -> int:
    try:
        raw = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    cfg = SimConfig.from_dict(raw)
    cfg.threads = args.threads or default_threads()
    cfg.validate()
    cb = parse_codebook(args.codebook.read_text())
    json_path = args.out.with_suffix(".json")
    manifest = _manifest("simulate", argv, {"config": raw}, seed=cfg.seed,
                         inputs=[args.codebook, args.config], outputs=[args.out, json_path])
    result = run_monte_carlo(cb.X, cb.nu, cfg, cb.messages)
    window = tuple(raw.get("slope_window", (1e-4, 1e-2)))
    try:
        fit = estimate_slope(result, window, cfg.min_errors)
    except InsufficientPoints as exc:
        fit = None
        print(f"slope: not fitted ({exc})")
    _write(args.out, manifest_line(manifest) + result.to_csv())
    _write(json_path, summary_json(result, fit, manifest))
    for pt in result.points:
        print(f"snr {pt.snr_db:6.2f} dB  trials {pt.trials:8d}  errors {pt.errors:6d}  pe {pt.pe:.3e}")
    if fit is not None:
        print(f"slope {fit.slope:.3f} over {fit.snr_db}")
    expected = raw.get("slope_range")
    if expected is not None:
        lo, hi = expected
        if fit is None or not lo <= fit.slope <= hi:
            return EXIT_VIOLATED
    return EXIT_OK


def cmd_trellis(args, argv) -> int:
    gen = build_generator(args.Mt, args.R, args.nu, args.T)
    manifest = _manifest("trellis", argv, {"M_t": args.Mt, "R": args.R, "nu": args.nu, "T": args.T},
                         outputs=[args.out])
    text = (manifest_line(manifest)
            + f"# effective_rate {effective_rate(gen)} messages {gen.n_messages}\n"
            + format_generator(gen))
    _write(args.out, text)
    print(f"effective rate {effective_rate(gen)}, {gen.n_messages} messages -> {args.out}")
    return EXIT_OK


def cmd_field_check(args, argv) -> int:
    try:
        ctx = make_field(args.T, args.prim_poly)
    except PolynomialNotPrimitive as exc:
        print(f"not primitive: {exc}")
        return EXIT_VIOLATED
    manifest = _manifest("field-check", argv, {"T": args.T, "prim_poly": f"{ctx.primitive_polynomial:#x}"},
                         outputs=[args.out] if args.out else [])
    lines = [
        f"polynomial: {format_poly(ctx.primitive_polynomial)} ({ctx.primitive_polynomial:#x})",
        f"order_of_alpha: {multiplicative_order(ctx, ctx.alpha)}",
        f"trace_mask: {ctx.trace_mask:#x}",
        "dual_basis: " + " ".join(f"{t:#x}" for t in ctx.dual_basis),
    ]
    _emit_report(lines, manifest, args.out)
    return EXIT_OK


COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "trellis": cmd_trellis,
    "field-check": cmd_field_check,
}


def _strip_threads(argv: Sequence[str]) -> List[str]:
    out: List[str] = []
    skip = False
    for a in argv:
        if skip:
            skip = False
        elif a == "--threads":
            skip = True
        elif not a.startswith("--threads="):
            out.append(a)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.replay is not None:
        try:
            manifest = read_manifest(args.replay.read_text())
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        if not manifest or "argv" not in manifest:
            print(f"error: {args.replay} has no manifest", file=sys.stderr)
            return EXIT_USAGE
        return main(manifest["argv"])
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    # the thread count never changes results, so keep it out of manifests
    recorded = _strip_threads(argv)
    try:
        return COMMANDS[args.command](args, recorded)
    except IsiCodesError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
