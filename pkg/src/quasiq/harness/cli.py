"""Command-line harness: gap reports, single simulations, verification sweeps.

Subcommands:
    gap       exact branch counts and gap quantities for one input
    simulate  run one construction on one input, emitting the outcome as JSON
    verify    sweep every input of a given size, cross-checking the simulation
              against the branch-counting oracle; nonzero exit on mismatch
    duals     validate the dual-pair invariants (and the half-gap witness)

Machine output goes to stdout as JSON; diagnostics go to stderr.
Exit codes: 0 success, 1 verification mismatch, 2 usage or spec error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from quasiq.circuitgen import (
    AncillaRestorationError,
    PostselectionError,
    ResidualTermError,
    SimulationInvariantError,
    build_lpwpp_decider,
    build_lwpp_decider,
    gate_alphabet,
    run_lpwpp,
    run_lwpp,
    run_posteqp,
    run_un,
    run_wn,
    run_zqp,
    simulate_circuit,
)
from quasiq.exactnum import HALF, ONE, Amplitude
from quasiq.harness.dsl import ParseError
from quasiq.harness.problems import ProblemSpec, ResolvedProblem, SpecError, load_problem_file, resolve_problem
from quasiq.quasistate import StateVector, bits_of
from quasiq.verifierkit import (
    DualityError,
    HalfGapPromiseError,
    builtin_problems,
    gap_stats,
    validate_dual_pair,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2

CONSTRUCTIONS = ("un", "fig3-zqp", "fig3-post", "wn", "lwpp", "lpwpp")
DESK_SCALE_LIMIT = 20

_DOMAIN_ERRORS = (
    SpecError,
    ParseError,
    DualityError,
    HalfGapPromiseError,
    ResidualTermError,
    AncillaRestorationError,
    PostselectionError,
    SimulationInvariantError,
    ValueError,
)


def _diag(message: str) -> None:
    print(message, file=sys.stderr)


def _emit(obj, compact: bool) -> None:
    if compact:
        print(json.dumps(obj, sort_keys=True, separators=(",", ":")))
    else:
        print(json.dumps(obj, sort_keys=True, indent=2))


def _parse_input(text: str, n: int | None) -> tuple[int, ...]:
    if not text or any(ch not in "01" for ch in text):
        raise SpecError(f"--input must be a nonempty bit string, got {text!r}")
    if n is not None and len(text) != n:
        raise SpecError(f"--input has {len(text)} bits but n = {n}")
    return tuple(int(ch) for ch in text)


def _m_hint(spec_or_name: ProblemSpec | str, n: int) -> int:
    """Branching length without building any verifier (guardrail precheck)."""
    catalog = builtin_problems()
    if isinstance(spec_or_name, str):
        if spec_or_name not in catalog:
            raise SpecError(
                f"unknown builtin problem {spec_or_name!r}; "
                f"choices: {', '.join(sorted(catalog))}")
        return catalog[spec_or_name].m_of(n)
    spec = spec_or_name
    source = spec.verifier
    if source["kind"] == "builtin":
        return _m_hint(source["name"], n)
    extra = 1 if spec.dual == "derive-via-lemma" else 0
    declared = spec.m_of(n)
    if declared is not None:
        return declared + extra
    # table-file without an explicit m: the file header carries it
    ref = source.get("base") or source.get("v0")
    path = ref if os.path.isabs(ref) else os.path.join(spec.base_dir, ref)
    with open(path, "rt", encoding="utf-8") as fh:
        return int(json.load(fh)["m"]) + extra


def _load(args) -> ResolvedProblem:
    ref = args.problem
    n = args.n
    if n is None:
        raise SpecError("--n is required (or derivable from --input)")
    spec_or_name = ref if ref in builtin_problems() else load_problem_file(ref)
    m = _m_hint(spec_or_name, n)
    if n + m > DESK_SCALE_LIMIT and not args.force_large:
        raise SpecError(
            f"n + m = {n + m} exceeds the desk-scale limit "
            f"{DESK_SCALE_LIMIT}; pass --force-large to override")
    return resolve_problem(spec_or_name, n, seed=args.seed)


def _h_value(resolved: ResolvedProblem, corrupt: bool) -> int:
    value = resolved.require_h().value(resolved.n)
    return value + 1 if corrupt else value


def _power_form(resolved: ResolvedProblem) -> tuple[int, int]:
    h = resolved.require_h()
    if h.kind == "power":
        return h.base, h.exponent(resolved.n)
    raise SpecError(
        f"problem {resolved.name!r} has a tabulated half-gap witness; the fixed "
        "finite gate alphabet needs it in power form M**t")


# -- subcommands -----------------------------------------------------------------


def cmd_gap(args) -> int:
    resolved = _load(args)
    x = _parse_input(args.input, resolved.n)
    reports = [gap_stats(v, x).to_json() for v in resolved.verifiers]
    _emit(
        {
            "problem": resolved.name,
            "n": resolved.n,
            "m": resolved.m,
            "input": args.input,
            "seed": args.seed,
            "reports": reports,
        },
        args.json,
    )
    return EXIT_OK


def _simulate_one(resolved: ResolvedProblem, construction: str, x, record, corrupt_h=False):
    pair = resolved.require_pair()
    if construction == "un":
        return run_un(pair, x, record)
    if construction == "fig3-zqp":
        return run_zqp(pair, x, record)
    if construction == "fig3-post":
        return run_posteqp(pair, x, record)
    if construction == "wn":
        return run_wn(pair, x, record)
    if construction == "lwpp":
        return run_lwpp(pair, _h_value(resolved, corrupt_h), x, record)
    if construction == "lpwpp":
        base, t = _power_form(resolved)
        return run_lpwpp(pair, base, t, x, record)
    raise SpecError(f"unknown construction {construction!r}")


def cmd_simulate(args) -> int:
    resolved = _load(args)
    x = _parse_input(args.input, resolved.n)
    outcome = _simulate_one(resolved, args.construction, x, args.checkpoints,
                            corrupt_h=args.corrupt_h)
    obj = outcome.to_json()
    obj["problem"] = resolved.name
    obj["seed"] = args.seed
    if not args.dump_state:
        del obj["final_state"]
    if not args.checkpoints:
        del obj["checkpoints"]
    _emit(obj, args.json)
    return EXIT_OK


def _expected_wn_state(pair, x, lx):
    width = pair.n + pair.m + 3
    xs = "".join(str(v) for v in x)
    delta = gap_stats(pair.side(lx), x).delta
    rest = StateVector.basis(width, xs + "0" * pair.m + str(lx) + "0" + "1", delta)
    return StateVector.basis(width, xs + "0" * pair.m + "000") + rest


def _verify_one(resolved: ResolvedProblem, construction: str, x, corrupt_h: bool) -> str | None:
    """None when the exact cross-checks pass, else a mismatch description."""
    pair = resolved.require_pair()
    lx = pair.language_bit(x)
    g0, g1 = pair.gap_reports(x)
    xs = "".join(str(v) for v in x)
    if construction == "un":
        outcome = run_un(pair, x)
        final = outcome.final_state
        m = pair.m
        for c, report in ((0, g0), (1, g1)):
            got = final.amplitude(xs + "0" * m + str(c) + "1")
            if got != report.delta:
                return f"amplitude at c={c} is {got}, oracle delta is {report.delta}"
            if final.amplitude(xs + "0" * m + str(c) + "0") != HALF:
                return f"amplitude of |{c}0> block is not 1/2"
        if final.norm_sq() != ONE:
            return "unitary circuit did not preserve the norm"
        residual = final.filter_terms(
            lambda k: (k >> 2) & ((1 << m) - 1) != 0)
        if not residual.norm_sq() < HALF:
            return "residual mass is not strictly below 1/2"
        if outcome.answer != lx:
            return f"gap block sits on {outcome.answer}, oracle says {lx}"
        return None
    if construction == "fig3-zqp":
        outcome = run_zqp(pair, x)
        if outcome.answer != lx:
            return f"zero-error answer {outcome.answer} != oracle {lx}"
        if not outcome.failure_mass < outcome.success_mass:
            return "success probability not certified above 1/2"
        live = g1 if lx else g0
        if outcome.success_mass != live.delta * live.delta:
            return "success mass differs from the squared gap amplitude"
        return None
    if construction == "fig3-post":
        outcome = run_posteqp(pair, x)
        if outcome.answer != lx:
            return f"postselected answer {outcome.answer} != oracle {lx}"
        if outcome.success_mass.is_zero():
            return "postselection mass is zero"
        return None
    if construction == "wn":
        outcome = run_wn(pair, x)
        expected = _expected_wn_state(pair, x, lx)
        if outcome.final_state != expected:
            return "uncomputed state differs from |x>(|00> + delta|L>|1>) plus ancillas"
        return None
    if construction == "lwpp":
        outcome = run_lwpp(pair, _h_value(resolved, corrupt_h), x)
        hv = _h_value(resolved, corrupt=False)
        expected = StateVector.basis(
            outcome.width, xs + "0" * pair.m + "1" + "0" + str(lx), Amplitude(hv, 0, pair.m))
        if outcome.final_state != expected:
            return "decider output is not the single term (h/2^m)|x>|1>|L(x)>"
        return None
    if construction == "lpwpp":
        base, t = _power_form(resolved)
        outcome = run_lpwpp(pair, base, t, x)
        reference, _ = simulate_circuit(
            build_lwpp_decider(pair, _h_value(resolved, corrupt=False), pair.n), x)
        if outcome.final_state != reference:
            return "fixed-gate-set decider differs from the length-dependent one"
        alphabet = gate_alphabet(build_lpwpp_decider(pair, base, t, pair.n))
        if "A" in alphabet:
            return "fixed-gate-set circuit still contains a length-dependent gate"
        return None
    raise SpecError(f"unknown construction {construction!r}")


def _available(resolved: ResolvedProblem, construction: str) -> bool:
    if construction in ("lwpp", "lpwpp") and resolved.h is None:
        return False
    if construction == "lpwpp" and resolved.h is not None and resolved.h.kind != "power":
        return False
    return True


def cmd_verify(args) -> int:
    resolved = _load(args)
    resolved.require_pair()
    if args.construction == "all":
        constructions = tuple(c for c in CONSTRUCTIONS if _available(resolved, c))
        skipped = [c for c in CONSTRUCTIONS if c not in constructions]
        if skipped:
            _diag(f"skipping {', '.join(skipped)}: no usable half-gap witness")
    else:
        if not _available(resolved, args.construction):
            raise SpecError(
                f"problem {resolved.name!r} carries no half-gap witness usable "
                f"for construction {args.construction!r}")
        constructions = (args.construction,)
    results = []
    ok = True
    for construction in constructions:
        for xkey in range(2**resolved.n):
            x = bits_of(xkey, resolved.n)
            xs = "".join(str(v) for v in x)
            try:
                detail = _verify_one(resolved, construction, x, args.corrupt_h)
            except _DOMAIN_ERRORS as exc:
                detail = f"{type(exc).__name__}: {exc}"
            row = {"construction": construction, "input": xs, "ok": detail is None}
            if detail is not None:
                row["detail"] = detail
                ok = False
            results.append(row)
    _emit(
        {
            "problem": resolved.name,
            "n": resolved.n,
            "m": resolved.m,
            "seed": args.seed,
            "ok": ok,
            "results": results,
        },
        args.json,
    )
    if not ok:
        _diag(f"verification failed on {sum(1 for r in results if not r['ok'])} row(s)")
    return EXIT_OK if ok else EXIT_MISMATCH


def cmd_duals(args) -> int:
    resolved = _load(args)
    pair = resolved.require_pair()
    rows = validate_dual_pair(pair)
    ok = all(row["dual"] for row in rows)
    if resolved.h is not None:
        hv = resolved.h.value(resolved.n)
        for row in rows:
            if not row["dual"]:
                continue
            x = tuple(int(ch) for ch in row["x"])
            live = gap_stats(pair.side(row["language_bit"]), x)
            row["h_matches"] = live.delta == Amplitude(hv, 0, pair.m)
            ok = ok and row["h_matches"]
    _emit(
        {
            "problem": resolved.name,
            "n": resolved.n,
            "m": pair.m,
            "pair": pair.name,
            "seed": args.seed,
            "ok": ok,
            "rows": rows,
        },
        args.json,
    )
    return EXIT_OK if ok else EXIT_MISMATCH


# -- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quasiq",
        description="Exact quasi-quantum circuit simulator for verifier pairs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool) -> None:
        p.add_argument("--problem", required=True,
                       help="builtin problem name or path to a problem-spec JSON file")
        p.add_argument("--n", type=int, default=None, help="input size")
        p.add_argument("--seed", type=int, default=0,
                       help="seed for randomized problems (recorded in the report)")
        p.add_argument("--force-large", action="store_true",
                       help=f"override the n + m <= {DESK_SCALE_LIMIT} guardrail")
        p.add_argument("--json", action="store_true",
                       help="compact single-line JSON output")
        if needs_input:
            p.add_argument("--input", required=True, help="input bit string x")

    p_gap = sub.add_parser("gap", help="emit exact gap reports for one input")
    common(p_gap, needs_input=True)
    p_gap.set_defaults(func=cmd_gap)

    p_sim = sub.add_parser("simulate", help="run one construction on one input")
    common(p_sim, needs_input=True)
    p_sim.add_argument("--construction", required=True, choices=CONSTRUCTIONS)
    p_sim.add_argument("--dump-state", action="store_true",
                       help="include the final statevector in the output")
    p_sim.add_argument("--checkpoints", action="store_true",
                       help="record and include intermediate checkpoint states")
    p_sim.add_argument("--corrupt-h", action="store_true",
                       help="fault injection: bump the half-gap witness by one")
    p_sim.set_defaults(func=cmd_simulate)

    p_ver = sub.add_parser("verify", help="sweep all inputs and cross-check vs the oracle")
    common(p_ver, needs_input=False)
    p_ver.add_argument("--construction", default="all", choices=CONSTRUCTIONS + ("all",))
    p_ver.add_argument("--corrupt-h", action="store_true",
                       help="fault injection: bump the half-gap witness by one")
    p_ver.set_defaults(func=cmd_verify)

    p_dual = sub.add_parser("duals", help="validate dual-pair invariants")
    common(p_dual, needs_input=False)
    p_dual.set_defaults(func=cmd_duals)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.n is None and getattr(args, "input", None):
        args.n = len(args.input)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        _diag(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
