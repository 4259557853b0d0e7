"""Command-line frontend.

Exit codes: 0 success, 1 validation or verification failure, 2 usage
errors.  All commands accept --seed for reproducible randomness; the
modular polynomial directory can be overridden with CRSKEX_MODPOLY_DIR.
"""

from __future__ import annotations

import argparse
import random
import sys
import time

from . import oracle, protocol
from .ff import PrimeField
from .params import CostModel, ParamError, optimize_bounds, parse_constraints


def _rng(args) -> random.Random:
    return random.Random(args.seed)


def _load_params(path: str, rng: random.Random) -> protocol.SystemParams:
    return protocol.load_params_file(path, rng)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


# -- subcommands -----------------------------------------------------------


def cmd_params_search(args) -> int:
    rng = _rng(args)
    constraints = parse_constraints(open(args.constraints).read()) \
        if args.constraints else None
    kwargs = {}
    if constraints is not None:
        kwargs["require"] = constraints.require
        kwargs["bits"] = constraints.bits
        kwargs["budget"] = constraints.budget
    if args.bits is not None:
        kwargs["bits"] = args.bits
    field = PrimeField(args.p) if args.p else None
    params = protocol.build_system(field, rng, ell_max=args.ell_max, **kwargs)
    _write(args.out, protocol.serialize_params(params))
    print(f"p = {params.p}, t = {params.t}, delta_k = {params.delta_k}, "
          f"conductor = {params.conductor}, "
          f"primes = {[s.ell for s in params.steps]}", file=sys.stderr)
    return 0


def cmd_params_classify(args) -> int:
    from .params import classify_primes

    part = classify_primes(args.p, args.t, args.ell_max, r_max=args.r_max)
    for label, steps in (("VV", part.vv), ("VE", part.ve), ("EE", part.ee)):
        for s in sorted(steps, key=lambda s: s.ell):
            twist = " twist" if s.use_twist else ""
            print(f"{label}  ell={s.ell:<5} lam={s.lam:<5} mu={s.mu:<5} "
                  f"r={s.r}{twist}")
    return 0


def cmd_params_optimize(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    bounds = optimize_bounds(CostModel(), params.partition, args.bits)
    params.bounds = bounds
    ks = params.keyspace()
    for ell, m in sorted(bounds.items()):
        print(f"{ell}: {m}")
    print(f"keyspace = 2^{ks.bit_length() - 1} (target 2^{2 * args.bits})",
          file=sys.stderr)
    if args.out:
        _write(args.out, protocol.serialize_params(params))
    return 0


def cmd_keygen(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    priv, pub = protocol.keygen(params, rng)
    _write(args.out + ".priv", priv.serialize())
    _write(args.out + ".pub", pub.serialize())
    print(f"wrote {args.out}.priv and {args.out}.pub", file=sys.stderr)
    return 0


def cmd_pub(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    priv = protocol.parse_private_key(open(args.priv).read())
    pub = protocol.public_from_private(params, priv, rng)
    _write(args.out, pub.serialize())
    return 0


def cmd_dh(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    priv = protocol.parse_private_key(open(args.priv).read())
    pub = protocol.parse_public_key(open(args.pub).read(), params.field)
    if args.no_validate:
        print("warning: peer key NOT validated; an invalid key can move "
              "this walk onto a weaker isogeny class", file=sys.stderr)
    try:
        shared = protocol.derive_shared(priv, pub, params, rng,
                                        validate=not args.no_validate)
    except protocol.ValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    _write(args.out, format(shared.val, "x") + "\n")
    return 0


def cmd_validate(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    pub = protocol.parse_public_key(open(args.pub).read(), params.field)
    try:
        order_ok = protocol.validate_order(pub, params, rng)
        endo_ok = order_ok and protocol.validate_endo_level(pub, params, rng)
    except protocol.InconclusiveValidation as e:
        print(f"inconclusive: {e}", file=sys.stderr)
        return 1
    print(f"order check: {'pass' if order_ok else 'FAIL'}")
    if order_ok:
        print(f"endomorphism level check: {'pass' if endo_ok else 'FAIL'}")
    return 0 if order_ok and endo_ok else 1


def cmd_verify(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    report = oracle.verify_params(params, rng)
    print(oracle.format_report(report))
    orbit = report["orbit_size"]
    h = report["class_number"]
    verdict = "PASS" if report["ok"] else "FAIL"
    print(f"orbit = {orbit} = h({params.delta_k}): {verdict}")
    return 0 if report["ok"] else 1


def cmd_graph(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    data = oracle.enumerate_orbit(params, rng)
    lines = ["graph orbit {"]
    for key in sorted(data["orbit"]):
        lines.append(f'  "{key}";')
    for ell, cycles in sorted(data["cycles"].items()):
        for cycle in cycles:
            for a, b in zip(cycle, cycle[1:] + cycle[:1]):
                if len(cycle) == 1:
                    continue
                lines.append(f'  "{a.val}" -- "{b.val}" [label="{ell}"];')
    lines.append("}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_bench(args) -> int:
    rng = _rng(args)
    params = _load_params(args.params, rng)
    from .isogeny import elkies_walk, velu_walk

    E = params.e0.to_weierstrass() if params.e0.c2 != params.field.zero \
        else params.e0
    print(f"{'ell':>6} {'method':>6} {'r':>3} {'sec/step':>10}")
    for s in sorted(params.steps, key=lambda s: (s.method, s.ell)):
        walker = velu_walk if s.method in ("VV", "VE") else elkies_walk
        t0 = time.time()
        for _ in range(args.reps):
            walker(E, s, 1, rng)
        dt = (time.time() - t0) / args.reps
        print(f"{s.ell:>6} {s.method:>6} {s.r:>3} {dt:>10.4f}")
    return 0


# -- wiring ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="crskex",
        description="class-group-action key exchange on ordinary curves",
    )
    top.add_argument("--seed", type=int, default=None,
                     help="seed the RNG for reproducible output")
    sub = top.add_subparsers(dest="command", required=True)

    p_params = sub.add_parser("params", help="parameter tooling")
    psub = p_params.add_subparsers(dest="subcommand", required=True)

    ps = psub.add_parser("search", help="search a toy parameter set")
    ps.add_argument("--constraints", help="constraints file")
    ps.add_argument("--bits", type=int, help="field size when no --p")
    ps.add_argument("--p", type=int, help="fixed field characteristic")
    ps.add_argument("--ell-max", type=int, default=47)
    ps.add_argument("--out", default="-")
    ps.set_defaults(func=cmd_params_search)

    pc = psub.add_parser("classify", help="partition the walk primes")
    pc.add_argument("--p", type=int, required=True)
    pc.add_argument("--t", type=int, required=True)
    pc.add_argument("--ell-max", type=int, default=47)
    pc.add_argument("--r-max", type=int, default=9)
    pc.set_defaults(func=cmd_params_classify)

    po = psub.add_parser("optimize", help="optimize walk bounds for a target")
    po.add_argument("--params", required=True)
    po.add_argument("--bits", type=int, required=True,
                    help="classical security target n (keyspace 2^(2n))")
    po.add_argument("--out", help="rewrite the params file with new bounds")
    po.set_defaults(func=cmd_params_optimize)

    kg = sub.add_parser("keygen", help="generate a key pair")
    kg.add_argument("--params", required=True)
    kg.add_argument("--out", required=True, help="basename for .priv/.pub")
    kg.set_defaults(func=cmd_keygen)

    pb = sub.add_parser("pub", help="recompute a public key")
    pb.add_argument("--params", required=True)
    pb.add_argument("--priv", required=True)
    pb.add_argument("--out", default="-")
    pb.set_defaults(func=cmd_pub)

    dh = sub.add_parser("dh", help="derive the shared secret")
    dh.add_argument("--params", required=True)
    dh.add_argument("--priv", required=True)
    dh.add_argument("--pub", required=True)
    dh.add_argument("--out", default="-")
    dh.add_argument("--no-validate", action="store_true",
                    help="skip peer key validation (prints a warning)")
    dh.set_defaults(func=cmd_dh)

    va = sub.add_parser("validate", help="validate a public key")
    va.add_argument("--params", required=True)
    va.add_argument("--pub", required=True)
    va.set_defaults(func=cmd_validate)

    ve = sub.add_parser("verify", help="certify a toy system against the "
                                       "form-class ground truth")
    ve.add_argument("--params", required=True)
    ve.set_defaults(func=cmd_verify)

    gr = sub.add_parser("graph", help="DOT export of a toy orbit")
    gr.add_argument("--params", required=True)
    gr.add_argument("--out", default="-")
    gr.set_defaults(func=cmd_graph)

    be = sub.add_parser("bench", help="measure per-prime step timings")
    be.add_argument("--params", required=True)
    be.add_argument("--reps", type=int, default=3)
    be.set_defaults(func=cmd_bench)

    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (protocol.ProtocolError, ParamError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
