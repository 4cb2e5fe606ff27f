"""
qgamble command line.

  qgamble payoff   --honest --theta 0.5235988 --R 10
  qgamble play     --alice 1,0,0,0 --s 0.1 --R 5 --rounds 100000 --seed 7
  qgamble optimize --R 1000 [--theta T]
  qgamble sweep    --R 100,1000,10000 --out sweep.csv
  qgamble decompose u --theta 0.3
  qgamble flux     --spec ring.json --times 0,0.5,1

Exit codes: 0 ok, 2 usage error, 3 optimizer did not converge, 4 invalid input file.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import equilibrium, fluxmodel, protocol, synth
from .errors import InvalidArgumentError, InvalidSpecError, QGambleError, ReductionInvalidError
from .formats import (
    InputFileError,
    alice_to_dict,
    csv_text,
    dumps,
    flatten,
    format_real,
    load_strategy_document,
    parse_alice,
)
from .protocol import AliceStrategy, BobStrategy, GameRules

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_INPUT = 0, 2, 3, 4
SEED_ENV = "QGAMBLE_SEED"


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _add_strategy_flags(p: argparse.ArgumentParser, rules: bool = True) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--honest", action="store_true", help="Alice prepares (|01>+|10>)/sqrt(2) (default)")
    g.add_argument("--alice", metavar="A,B,C,D", help="amplitudes of |00>,|01>,|10>,|11>; complex as 0.5+0.5j")
    g.add_argument("--eta", type=float, help="restricted family sqrt(1-eta)|10> + sqrt(eta)|01>")
    t = p.add_mutually_exclusive_group()
    t.add_argument("--theta", type=float, help="Bob's rotation angle in radians, in [0, pi/2]")
    t.add_argument("--s", type=float, dest="s_value", metavar="VALUE", help="set theta = asin(sqrt(VALUE))")
    if rules:
        p.add_argument("--R", type=float, dest="R", help="prize paid to Bob when verification fails")
        p.add_argument("--win", type=float, default=None, help="Bob's stake when B reads 1 (default 1)")
        p.add_argument("--loss", type=float, default=None, help="Bob's stake when verification passes (default -1)")
    p.add_argument("--strategies", metavar="FILE", help="JSON strategy document; flags override its fields")


def _add_output_flags(p: argparse.ArgumentParser, formats=("json", "csv", "text")) -> None:
    p.add_argument("--format", choices=formats, default=None, help="output format (default json)")
    p.add_argument("--out", metavar="PATH", help="write output here instead of stdout")


def _add_search_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help=f"seed (fallback ${SEED_ENV}, then 0)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; results do not depend on it")
    p.add_argument("--starts", type=int, default=16, help="local searches per inner minimization")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="qgamble", description="Quantum gambling protocol simulator and analyzer.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("payoff", help="exact branch probabilities and expected gain")
    _add_strategy_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("play", help="seeded Monte Carlo play")
    _add_strategy_flags(p)
    p.add_argument("--rounds", type=int, default=100000)
    p.add_argument("--seed", type=int, default=None, help=f"seed (fallback ${SEED_ENV}, then 0)")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--interactive", action="store_true", help="ask before each round and print its outcome")
    _add_output_flags(p)

    p = sub.add_parser("optimize", help="Bob's guaranteed gain (or Alice's best response with --theta)")
    p.add_argument("--R", type=float, dest="R", required=True)
    p.add_argument("--theta", type=float, default=None)
    p.add_argument("--s", type=float, dest="s_value", default=None, metavar="VALUE")
    _add_search_flags(p)
    _add_output_flags(p)

    p = sub.add_parser("sweep", help="guarantee over a list of prizes, with log-log slope")
    p.add_argument("--R", type=_float_list, dest="R", required=True, metavar="R1,R2,...")
    _add_search_flags(p)
    _add_output_flags(p, formats=("json", "csv"))

    p = sub.add_parser("decompose", help="compile Bob's rotation (u) or Alice's preparation (prep)")
    p.add_argument("target", choices=("u", "prep"))
    _add_strategy_flags(p, rules=False)
    _add_output_flags(p, formats=("json", "text"))

    p = sub.add_parser("flux", help="ring Hamiltonian reduction and Rabi evolution")
    p.add_argument("--spec", required=True, metavar="FILE", help='{"E": [...], "omega": [[...]], "hbar": 1}')
    p.add_argument("--gap-ratio", type=float, default=fluxmodel.DEFAULT_GAP_RATIO)
    p.add_argument("--times", type=_float_list, default=[], metavar="T1,T2,...")
    _add_output_flags(p)
    return ap


def _seed(args) -> int:
    if args.seed is not None:
        seed = args.seed
    else:
        env = os.environ.get(SEED_ENV, "").strip()
        try:
            seed = int(env) if env else 0
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    if seed < 0:
        raise UsageError("seed must be non-negative")
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _alice(args, doc: dict) -> AliceStrategy:
    if args.alice is not None:
        parts = args.alice.split(",")
        if len(parts) != 4:
            raise UsageError("--alice needs four comma-separated amplitudes")
        try:
            return parse_alice(dict(zip(("alpha", "beta", "gamma", "delta"), parts)))
        except ValueError as exc:
            raise UsageError(f"--alice: {exc}") from exc
    if args.eta is not None:
        return AliceStrategy.restricted(args.eta)
    if args.honest or doc.get("alice") is None:
        return AliceStrategy.honest()
    return doc["alice"]


def _bob(args, doc: dict) -> BobStrategy:
    if args.theta is not None:
        return BobStrategy(args.theta)
    if args.s_value is not None:
        return BobStrategy.from_s(args.s_value)
    if doc.get("bob") is not None:
        return doc["bob"]
    raise UsageError("give --theta, --s or a 'bob' section in --strategies")


def _rules(args, doc: dict) -> GameRules:
    base = doc.get("rules")
    r = args.R if args.R is not None else (base.r_prize if base else None)
    if r is None:
        raise UsageError("give --R or a 'rules' section in --strategies")
    win = args.win if args.win is not None else (base.win_stake if base else 1.0)
    loss = args.loss if args.loss is not None else (base.loss_stake if base else -1.0)
    return GameRules(r, win, loss)


def _game(args):
    doc = load_strategy_document(args.strategies) if args.strategies else {}
    return _alice(args, doc), _bob(args, doc), _rules(args, doc)


def _game_fields(bob: BobStrategy, rules: GameRules) -> dict:
    return {"theta": bob.theta, "s": bob.s, "R": rules.r_prize, "win": rules.win_stake, "loss": rules.loss_stake}


def _render(doc: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(doc) + "\n"
    flat = flatten(doc)
    if fmt == "csv":
        return csv_text([flat])
    width = max(len(k) for k in flat)
    return "".join(f"{k:<{width}}  {format_real(v) if isinstance(v, float) else v}\n" for k, v in flat.items())


def cmd_payoff(args) -> tuple[str, int]:
    alice, bob, rules = _game(args)
    b = protocol.expected_payoff(alice, bob, rules)
    doc = {"command": "payoff", "alice": alice_to_dict(alice), **_game_fields(bob, rules),
           "p_b1": b.p_b1, "p_pass": b.p_pass, "p_fail": b.p_fail, "expected_gain": b.expected_gain}
    return _render(doc, args.format or "json"), EXIT_OK


def _interactive(alice, bob, rules, seed) -> list[protocol.RoundOutcome]:
    rng = protocol.shard_generator(seed, 0)
    outcomes = []
    while True:
        print(f"round {len(outcomes) + 1}: Enter to play, q to stop> ", end="", file=sys.stderr, flush=True)
        reply = sys.stdin.readline()
        if not reply or reply.strip().lower().startswith("q"):
            break
        o = protocol.play_round(alice, bob, rules, rng)
        outcomes.append(o)
        print(f"round {len(outcomes)}: B={o.b_bit} verification={o.verification.value} "
              f"payoff={format_real(o.payoff)}", file=sys.stderr)
    return outcomes


def cmd_play(args) -> tuple[str, int]:
    alice, bob, rules = _game(args)
    seed = _seed(args)
    if args.rounds < 1:
        raise UsageError("--rounds must be >= 1")
    expected = protocol.expected_payoff(alice, bob, rules).expected_gain
    if args.interactive:
        outcomes = _interactive(alice, bob, rules, seed)
        n = len(outcomes)
        pays = np.array([o.payoff for o in outcomes], dtype=float)
        counts = {"b1": sum(o.b_bit == 1 for o in outcomes),
                  "pass": sum(o.verification is protocol.Verification.PASSED for o in outcomes),
                  "fail": sum(o.verification is protocol.Verification.FAILED for o in outcomes)}
        mean = float(pays.mean()) if n else math.nan
        se = float(pays.std(ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    else:
        summary = protocol.simulate(alice, bob, rules, args.rounds, seed, jobs=args.jobs)
        n, mean, se, counts = summary.n_rounds, summary.mean_payoff, summary.std_error, summary.counts
    z = (mean - expected) / se if se and math.isfinite(se) and se > 0 else math.nan
    doc = {"command": "play", "seed": seed, "rounds": n, "alice": alice_to_dict(alice), **_game_fields(bob, rules),
           "mean_payoff": mean, "std_error": se, "counts": {k: int(v) for k, v in counts.items()},
           "expected_gain": expected, "z_score": z}
    return _render(doc, args.format or "json"), EXIT_OK


def _options(args, seed: int) -> equilibrium.SearchOptions:
    if args.jobs < 1 or args.starts < 1:
        raise UsageError("--jobs and --starts must be >= 1")
    return equilibrium.SearchOptions(starts=args.starts, seed=seed, jobs=args.jobs)


def cmd_optimize(args) -> tuple[str, int]:
    seed = _seed(args)
    opts = _options(args, seed)
    rules = GameRules(args.R)
    if args.theta is not None or args.s_value is not None:
        bob = BobStrategy(args.theta) if args.theta is not None else BobStrategy.from_s(args.s_value)
        br = equilibrium.alice_best_response(bob.theta, rules, opts)
        doc = {"command": "optimize", "mode": "best_response", "seed": seed, "R": rules.r_prize,
               "theta": bob.theta, "s": bob.s, "value": br.value, "restricted_value": br.restricted_value,
               "eta": br.eta, "alice": alice_to_dict(br.alice), "evaluations": br.evaluations,
               "tolerance_achieved": br.tolerance_achieved, "converged": br.converged}
        converged = br.converged
    else:
        res = equilibrium.bob_guarantee(rules, opts)
        doc = {"command": "optimize", "mode": "guarantee", "seed": seed, "R": res.r_prize,
               "theta_star": res.theta_star, "s_star": res.s_star, "guarantee": res.guarantee,
               "paper_G": -math.sqrt(2.0 / res.r_prize), "asymptotic_s": math.sqrt(1.0 / (2.0 * res.r_prize)),
               "eta_star": res.alice_worst.eta, "alice": alice_to_dict(res.alice_full),
               "evaluations": res.evaluations, "tolerance_achieved": res.tolerance_achieved,
               "converged": res.converged}
        converged = res.converged
    return _render(doc, args.format or "json"), EXIT_OK if converged else EXIT_CONVERGENCE


SWEEP_COLUMNS = ["R", "theta_star", "s_star", "guarantee", "paper_G", "ratio"]


def sweep_csv(table: equilibrium.SweepTable) -> str:
    rows = [{"R": r.r_prize, "theta_star": r.theta_star, "s_star": r.s_star, "guarantee": r.guarantee,
             "paper_G": r.paper_G, "ratio": r.ratio} for r in table.rows]
    summary = dumps({"slope": table.slope, "intercept": table.intercept}, indent=0).replace("\n", " ")
    return csv_text(rows, SWEEP_COLUMNS) + f"# {summary}\n"


def cmd_sweep(args) -> tuple[str, int]:
    seed = _seed(args)
    opts = _options(args, seed)
    table = equilibrium.sweep_R(sorted(args.R), opts)
    fmt = args.format or ("csv" if args.out and args.out.lower().endswith(".csv") else "json")
    if fmt == "csv":
        text = sweep_csv(table)
    else:
        doc = {"command": "sweep", "seed": seed,
               "rows": [{"R": r.r_prize, "theta_star": r.theta_star, "s_star": r.s_star,
                         "guarantee": r.guarantee, "paper_G": r.paper_G, "ratio": r.ratio,
                         "eta_star": r.eta_star, "converged": r.converged} for r in table.rows],
               "summary": {"slope": table.slope, "intercept": table.intercept}}
        text = dumps(doc) + "\n"
    ok = all(r.converged for r in table.rows)
    return text, EXIT_OK if ok else EXIT_CONVERGENCE


def cmd_decompose(args) -> tuple[str, int]:
    doc = load_strategy_document(args.strategies) if args.strategies else {}
    if args.target == "u":
        bob = _bob(args, doc)
        circuit = synth.synth_u(bob.theta)
        report = synth.verify_circuit(circuit, protocol.bob_rotation(bob.theta), phase_free=True)
        labels, params = ["B", "C"], {"theta": bob.theta, "s": bob.s}
    else:
        alice = _alice(args, doc)
        circuit = synth.synth_prep(alice)
        report = synth.verify_circuit(circuit, alice.as_array(), phase_free=True)
        labels, params = ["A", "B"], alice_to_dict(alice)
    if (args.format or "json") == "text":
        text = (circuit.diagram(labels) + "\n"
                f"gates: {len(circuit)}  distance: {format_real(report.distance)}  ok: {report.ok}\n")
        return text, EXIT_OK
    doc = {"command": "decompose", "target": args.target, "n_qubits": circuit.n_qubits, "wires": labels,
           "parameters": params, "gates": [op.to_dict() for op in circuit.ops], "gate_count": len(circuit),
           "distance": report.distance, "ok": report.ok}
    return dumps(doc) + "\n", EXIT_OK


def cmd_flux(args) -> tuple[str, int]:
    spec = fluxmodel.RingSpec.load(args.spec)
    h = fluxmodel.build_hamiltonian(spec)
    params = fluxmodel.reduce_two_level(h, args.gap_ratio)
    rabi = []
    for t in args.times:
        u = fluxmodel.evolve(params, t, spec.hbar)
        rabi.append({"t": t, "p1": float(abs(u[1, 0]) ** 2)})
    doc = {"command": "flux", "levels": int(h.shape[0]), "hbar": spec.hbar,
           "epsilon": params.epsilon, "delta": params.delta, "trace_shift": params.trace_shift,
           "gauge_angle": params.gauge_angle, "gap_ratio": params.gap_ratio,
           "full_eigenvalues": [float(v) for v in np.linalg.eigvalsh(h)],
           "reduced_eigenvalues": list(params.eigenvalues()), "rabi": rabi}
    fmt = args.format or "json"
    if fmt != "json":
        doc = {k: v for k, v in doc.items() if k != "rabi"}
        if fmt == "csv" and rabi:
            return csv_text(rabi, ["t", "p1"]), EXIT_OK
    return _render(doc, fmt), EXIT_OK


COMMANDS = {
    "payoff": cmd_payoff,
    "play": cmd_play,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "decompose": cmd_decompose,
    "flux": cmd_flux,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help exits 0, usage errors exit 2
        return int(exc.code or 0)
    try:
        text, code = COMMANDS[args.command](args)
    except (InputFileError, InvalidSpecError, ReductionInvalidError) as exc:
        print(f"qgamble: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (UsageError, InvalidArgumentError) as exc:
        parser.print_usage(sys.stderr)
        print(f"qgamble: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QGambleError as exc:
        print(f"qgamble: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    raise SystemExit(run())
