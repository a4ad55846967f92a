"""Command-line front end.

Subcommands: construct, encode, decode, simulate, diagnose. Exit codes:
0 success, 1 bad usage or bad input, 2 unexpected runtime failure. All
randomness flows from --seed; rerunning any subcommand with identical
flags produces byte-identical output files.
"""

import argparse
import sys

import numpy as np

from .channel import (
    ChannelParams,
    DecoderSelection,
    StopRule,
    run_monte_carlo,
)
from .codes import CodeSpec, construct_frozen_set, encode, encode_systematic
from .diagnostics import iteration_reports
from .graph import build_tanner, derive_parity_check
from .sparse import DecoderConfig, arsbp_decode, nwrbp_decode, spa_decode
from .reference import dense_bp_details, sc_decode, scl_decode

SIM_HEADER = "decoder,N,K,ebn0_db,t_max,beta,frames,bit_errors,frame_errors,ber,fer,avg_iters,seed"
DIAG_HEADER = "iter,row_margin,col_margin,mean_abs_rho_dev,syndrome_ok"
TRACE_HEADER = "iter,mean_abs_rho_minus_1,bit_errors_vs_truth,syndrome_ok"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _bits_str(bits) -> str:
    return "".join("1" if b else "0" for b in bits)


def _parse_bits(text: str, expected: int, where: str) -> np.ndarray:
    cleaned = text.replace(" ", "").replace("\t", "").strip()
    if len(cleaned) != expected or any(c not in "01" for c in cleaned):
        raise ValueError(f"{where}: expected {expected} bits of 0/1, got {text.strip()!r}")
    return np.frombuffer(cleaned.encode(), dtype=np.uint8) - ord("0")


def _parse_snr_sweep(text: str):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            start, stop, step = (float(p) for p in parts)
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"bad SNR sweep {text!r}; expected a value or start:stop:step")
    if step <= 0:
        raise ValueError("SNR sweep step must be positive")
    points = []
    k = 0
    while True:
        v = start + k * step
        if v > stop + 1e-9:
            break
        points.append(round(v, 9))
        k += 1
    if not points:
        raise ValueError("empty SNR sweep")
    return points


def _load_spec(path: str) -> CodeSpec:
    with open(path, "r", encoding="ascii") as fh:
        return CodeSpec.from_text(fh.read())


def _load_llr_frames(path: str, n: int):
    frames = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                vals = np.array([float(tok) for tok in line.split()], dtype=np.float64)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a number in LLR line")
            if vals.size != n:
                raise ValueError(
                    f"{path}:{lineno}: expected {n} values, got {vals.size}"
                )
            frames.append(vals)
    if not frames:
        raise ValueError(f"{path}: no LLR frames found")
    return frames


def _sparse_config(args) -> DecoderConfig:
    return DecoderConfig(
        t_max=args.tmax,
        beta=args.beta,
        gamma=getattr(args, "gamma", 1.0),
        clamp_rho=args.clamp_rho,
        vn_exclusive=not getattr(args, "vn_inclusive", False),
    )


def cmd_construct(args) -> int:
    spec = construct_frozen_set(args.N, args.K, args.design_snr)
    text = spec.to_text()
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    H = derive_parity_check(spec)
    edges = int(H.edge_count)
    rows = H.num_checks
    mean_w = edges / rows if rows else 0.0
    print(f"rows={rows} edges={edges} mean_row_weight={mean_w:.4f}")
    return 0


def cmd_encode(args) -> int:
    spec = _load_spec(args.spec)
    if (args.bits is None) == (args.infile is None):
        raise UsageError("provide exactly one of --bits or --in")
    if args.bits is not None:
        frames = [_parse_bits(args.bits, spec.K, "--bits")]
    else:
        frames = []
        with open(args.infile, "r", encoding="ascii") as fh:
            for lineno, line in enumerate(fh, start=1):
                if line.strip():
                    frames.append(_parse_bits(line, spec.K, f"{args.infile}:{lineno}"))
    enc = encode_systematic if args.systematic else encode
    lines = [_bits_str(enc(d, spec)) for d in frames]
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        for ln in lines:
            print(ln)
    return 0


def _decode_one(args, spec, graph, H, y, want_trace):
    name = args.decoder
    if name in ("spa", "arsbp"):
        cfg = _sparse_config(args)
        fn = spa_decode if name == "spa" else arsbp_decode
        out = fn(graph, H, y, cfg, trace="light" if want_trace else None)
        return out.hard_bits, out.iterations, out.converged, out.trace
    if name == "nwrbp":
        out = nwrbp_decode(graph, H, y, args.budget)
        return out.hard_bits, out.iterations, out.converged, None
    if name == "sc":
        return sc_decode(spec, y), 1, True, None
    if name == "scl":
        return scl_decode(spec, y, args.list_size), 1, True, None
    xw, iters, ok = dense_bp_details(spec, y, args.dense_tmax)
    return xw, iters, ok, None


def cmd_decode(args) -> int:
    spec = _load_spec(args.spec)
    frames = _load_llr_frames(args.llr, spec.N)
    if args.trace and args.decoder not in ("spa", "arsbp"):
        raise UsageError("--trace is only available for spa and arsbp")
    graph = H = None
    if args.decoder in ("spa", "arsbp", "nwrbp"):
        H = derive_parity_check(spec)
        graph = build_tanner(H)
    trace_rows = []
    for y in frames:
        bits, iters, ok, trace = _decode_one(args, spec, graph, H, y, bool(args.trace))
        print(f"bits={_bits_str(bits)} iterations={iters} converged={1 if ok else 0}")
        if args.trace and trace is not None:
            for t, row in enumerate(trace, start=1):
                trace_rows.append(
                    f"{t},{row.mean_abs_rho_minus_1:.6e},-1,{1 if row.syndrome_ok else 0}"
                )
    if args.trace:
        with open(args.trace, "w", encoding="ascii") as fh:
            fh.write(TRACE_HEADER + "\n")
            fh.write("\n".join(trace_rows) + ("\n" if trace_rows else ""))
    return 0


def _selection_for(args, name: str) -> DecoderSelection:
    return DecoderSelection(
        name=name,
        config=_sparse_config(args),
        list_size=args.list_size,
        t_max=args.dense_tmax,
        budget=args.budget,
    )


def _t_max_column(args, name: str) -> int:
    if name in ("spa", "arsbp"):
        return args.tmax
    if name == "nwrbp":
        return args.budget
    if name == "dense-bp":
        return args.dense_tmax
    return 1


def cmd_simulate(args) -> int:
    spec = _load_spec(args.spec)
    points = _parse_snr_sweep(args.snr)
    names = [d.strip() for d in args.decoders.split(",") if d.strip()]
    if not names:
        raise UsageError("--decoders must name at least one decoder")
    selections = [_selection_for(args, name) for name in names]
    if args.frames is None and args.frame_errors is None:
        stop = StopRule()
    else:
        stop = StopRule(min_frames=args.frames, min_frame_errors=args.frame_errors)
    lines = [SIM_HEADER]
    for sel in selections:
        for snr in points:
            channel = ChannelParams.from_ebn0(snr, spec.rate)
            stats = run_monte_carlo(
                spec,
                sel,
                channel,
                stop_rule=stop,
                seed=args.seed,
                workers=args.workers,
                noiseless=args.noiseless,
                all_zero=args.all_zero,
                codeword_ber=args.codeword_ber,
            )
            lines.append(
                f"{sel.name},{spec.N},{spec.K},{snr:g},{_t_max_column(args, sel.name)},"
                f"{args.beta:g},{stats.frames},{stats.bit_errors},{stats.frame_errors},"
                f"{stats.ber:.6e},{stats.fer:.6e},{stats.avg_iterations:.6f},{args.seed}"
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_diagnose(args) -> int:
    spec = _load_spec(args.spec)
    H = derive_parity_check(spec)
    graph = build_tanner(H)
    channel = ChannelParams.from_ebn0(args.snr, spec.rate)
    cfg = _sparse_config(args)
    lines = [DIAG_HEADER]
    for f in range(args.frames):
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, f]))
        msg = rng.integers(0, 2, size=spec.K, dtype=np.uint8)
        x = encode(msg, spec)
        s = 1.0 - 2.0 * x.astype(np.float64)
        r = s + channel.sigma * rng.standard_normal(spec.N)
        y = 2.0 * r / (channel.sigma**2)
        for row in iteration_reports(graph, H, y, cfg):
            lines.append(
                f"{row['iter']},{row['row_margin']:.6e},{row['col_margin']:.6e},"
                f"{row['mean_abs_rho_dev']:.6e},{1 if row['syndrome_ok'] else 0}"
            )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _add_sparse_flags(p, default_tmax=20):
    p.add_argument("--tmax", type=int, default=default_tmax, help="sparse decoder iteration cap")
    p.add_argument("--beta", type=float, default=1.0, help="reweighting strength in [0,1]")
    p.add_argument("--gamma", type=float, default=1.0, help="edge-weight limit target")
    p.add_argument("--clamp-rho", action="store_true", help="clamp edge weights into (0,1]")
    p.add_argument(
        "--vn-inclusive",
        action="store_true",
        help="include the target edge in the variable-node sum (literal mode)",
    )


def _add_decoder_knobs(p):
    p.add_argument("--list-size", type=int, default=32, help="list size for scl")
    p.add_argument("--budget", type=int, default=20, help="iteration-equivalents for nwrbp")
    p.add_argument("--dense-tmax", type=int, default=60, help="iteration cap for dense-bp")


def build_parser() -> _Parser:
    parser = _Parser(prog="polarbp", description="Polar-code toolkit: construction, encoding, decoding, simulation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="derive a code spec and its graph statistics")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--design-snr", type=float, default=1.0, help="construction design SNR in dB")
    p.add_argument("--out", help="path for the code spec file (stdout if omitted)")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("encode", help="encode message bits")
    p.add_argument("--spec", required=True, help="code spec file from construct")
    p.add_argument("--bits", help="inline message bits, e.g. 0101")
    p.add_argument("--in", dest="infile", help="file with one message per line")
    p.add_argument("--systematic", action="store_true")
    p.add_argument("--out", help="write codewords here instead of stdout")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", help="decode LLR frames from a file")
    p.add_argument("--spec", required=True)
    p.add_argument("--llr", required=True, help="file with N whitespace-separated LLRs per line")
    p.add_argument(
        "--decoder",
        required=True,
        choices=["spa", "arsbp", "nwrbp", "sc", "scl", "dense-bp"],
    )
    _add_sparse_flags(p)
    _add_decoder_knobs(p)
    p.add_argument("--trace", help="write per-iteration trace CSV here (spa/arsbp)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("simulate", help="Monte Carlo sweep, one CSV row per decoder/SNR")
    p.add_argument("--spec", required=True)
    p.add_argument("--decoders", required=True, help="comma-separated decoder names")
    p.add_argument("--snr", required=True, help="Eb/N0 sweep as start:stop:step or a single value")
    _add_sparse_flags(p)
    _add_decoder_knobs(p)
    p.add_argument("--frames", type=int, help="stop after at least this many frames")
    p.add_argument("--frame-errors", type=int, help="stop after this many frame errors")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--noiseless", action="store_true")
    p.add_argument("--all-zero", action="store_true", help="send the all-zero message")
    p.add_argument("--codeword-ber", action="store_true", help="count codeword bits instead of info bits")
    p.add_argument("--out", help="results CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("diagnose", help="per-iteration convergence diagnostics CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--snr", type=float, required=True)
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_sparse_flags(p)
    p.add_argument("--out", help="diagnostics CSV path (stdout if omitted)")
    p.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())
