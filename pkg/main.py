import argparse
import logging
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from config.settings import get_config
from execution.trial_runner import (exhaustive_fills, indexing_checks, replay_qubit_wire, run_indexing_once,
                                    verify_bounds_exhaustive)
from graph.build_graph import run_experiment
from schemas.errors import InsdelError
from schemas.experiment import ExperimentConfig, Scheme
from schemas.registers import Alphabet, PolicyKind
from sync.sync_string import (construct_sync_string, construct_with_growth, load_sync_string,
                              save_sync_string)
from utils.fs import FileSystemUtils
from utils.json_validator import PatternValidator
from utils.rational import parse_rational

EXIT_OK, EXIT_VIOLATION, EXIT_ERROR = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Quantum insertion-deletion channel simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Seeded trials of one scheme against one adversary")
    run.add_argument("--scheme", choices=[s.value for s in Scheme], required=True)
    run.add_argument("--n", type=int, required=True)
    run.add_argument("--delta", required=True, help="p/q")
    run.add_argument("--epsilon", default="1/2", help="p/q")
    run.add_argument("--c", type=int, default=1)
    run.add_argument("--l", type=int, default=4)
    run.add_argument("--adversary", default="uniform-random-insdel")
    run.add_argument("--trials", type=int, default=1)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", default=None, help="JSON-lines output path")
    run.add_argument("--alphabet", type=int, default=None, help="Sync alphabet size")
    run.add_argument("--policy", choices=[p.value for p in PolicyKind], default=None)
    run.add_argument("--workers", type=int, default=None, help="Overrides INSDEL_MAX_PARALLEL")

    verify = sub.add_parser("verify", help="Exhaustive bound check over every noise pattern")
    verify.add_argument("--scheme", choices=[Scheme.TRIVIAL.value, Scheme.SYNC.value], required=True)
    verify.add_argument("--n", type=int, required=True)
    verify.add_argument("--budget", type=int, required=True)
    verify.add_argument("--epsilon", default="1/2")
    verify.add_argument("--alphabet", type=int, default=None)
    verify.add_argument("--seed", type=int, default=0)

    syncgen = sub.add_parser("syncgen", help="Construct and save a synchronization string")
    syncgen.add_argument("--n", type=int, required=True)
    syncgen.add_argument("--epsilon", required=True)
    syncgen.add_argument("--alphabet", type=int, default=None)
    syncgen.add_argument("--seed", type=int, default=0)
    syncgen.add_argument("--out", required=True)

    replay = sub.add_parser("replay", help="Re-run a saved failure: a noise pattern, or a received qubit wire")
    replay.add_argument("--scheme", choices=[s.value for s in Scheme], required=True)
    replay.add_argument("--pattern", default=None, help="Pattern JSON or a counterexample line")
    replay.add_argument("--sync", default=None, help="Sync string file (sync scheme)")
    replay.add_argument("--epsilon", default="1/2")
    replay.add_argument("--fill", choices=["forge", "neighbour"], default=None)
    replay.add_argument("--wire", default=None, help="Received-wire dump of a failing qubit trial")
    replay.add_argument("--n", type=int, default=None)
    replay.add_argument("--delta", default=None, help="p/q")
    replay.add_argument("--c", type=int, default=1)
    replay.add_argument("--l", type=int, default=4)
    replay.add_argument("--alphabet", type=int, default=None)
    replay.add_argument("--seed", type=int, default=0, help="Experiment seed (qubit)")
    replay.add_argument("--trial-seed", type=int, default=0, help="Seed recorded for the failing trial (qubit)")
    replay.add_argument("--policy", choices=[p.value for p in PolicyKind], default=None)
    return parser


def cmd_run(args) -> int:
    config = ExperimentConfig.build(
        scheme=args.scheme, n=args.n, delta=args.delta, epsilon=args.epsilon, c=args.c, l=args.l,
        adversary=args.adversary, trials=args.trials, seed=args.seed, out_path=args.out,
        alphabet_size=args.alphabet, policy=args.policy or get_config("measurement_policy"))

    print(f"\n📝 {config.scheme.value} scheme, n={config.n}, δ={args.delta}, {config.trials} trial(s)")
    print("=" * 50)
    state = run_experiment(config, workers=args.workers)

    summary = state.summary
    print(f"\n📊 Summary:")
    print(f"   - Trials: {summary.trials}")
    print(f"   - Max half-errors: {summary.max_half_errors} (mean {summary.mean_half_errors})")
    for name, passes in sorted(summary.check_passes.items()):
        print(f"   - {name}: {passes}/{summary.trials} pass")
    if summary.fitted_damage_constant is not None:
        print(f"   - Fitted C: {summary.fitted_damage_constant}, C': {summary.fitted_cover_constant}")
    for path in state.written_files:
        print(f"📦 {path}")
    return EXIT_VIOLATION if summary.violations else EXIT_OK


def cmd_verify(args) -> int:
    epsilon = parse_rational(args.epsilon)
    s = None
    if args.scheme == Scheme.SYNC.value:
        s = construct_with_growth(args.n, epsilon, args.seed, get_config("sync_max_attempts"), args.alphabet)
        print(f"🧭 Sync string over {s.alphabet_size} symbols: {' '.join(map(str, s.content))}")

    print(f"🔍 Enumerating every pattern with n={args.n}, budget={args.budget}...")
    report = verify_bounds_exhaustive(Scheme(args.scheme), args.n, args.budget, epsilon, s, args.seed)
    print(f"   {report.patterns} patterns, {report.runs} runs, {report.violations} violation(s)")
    for line in report.counterexamples:
        print(line)
    return EXIT_OK if report.passed else EXIT_VIOLATION


def cmd_syncgen(args) -> int:
    epsilon = parse_rational(args.epsilon)
    attempts = get_config("sync_max_attempts")
    if args.alphabet:
        s = construct_sync_string(args.n, epsilon, Alphabet(size=args.alphabet), args.seed, attempts)
    else:
        s = construct_with_growth(args.n, epsilon, args.seed, attempts)
    save_sync_string(s, args.out)
    print(f"✅ {args.n} symbols over {s.alphabet_size}, saved to {args.out}")
    return EXIT_OK


def _report_checks(checks) -> int:
    failed = False
    for check_name, check in checks.items():
        mark = "✅" if check.passed else "❌"
        print(f"   {mark} {check_name}: observed {check.observed}, bound {check.bound}")
        failed = failed or not check.passed
    return EXIT_VIOLATION if failed else EXIT_OK


def cmd_replay_wire(args) -> int:
    if not (args.wire and args.n and args.delta):
        print("❌ the qubit scheme needs --wire FILE, --n and --delta")
        return EXIT_ERROR
    config = ExperimentConfig.build(
        scheme=args.scheme, n=args.n, delta=args.delta, epsilon=args.epsilon, c=args.c, l=args.l,
        seed=args.seed, alphabet_size=args.alphabet, policy=args.policy or get_config("measurement_policy"))
    ledger, checks = replay_qubit_wire(config, FileSystemUtils.read_file(Path(args.wire)), args.trial_seed)
    print(f"🔁 wire: {ledger.model_dump_json()}")
    return _report_checks(checks)


def cmd_replay(args) -> int:
    if args.scheme == Scheme.QUBIT.value:
        return cmd_replay_wire(args)
    if not args.pattern:
        print("❌ indexing schemes need --pattern FILE")
        return EXIT_ERROR

    text = FileSystemUtils.read_file(Path(args.pattern))
    ok, pattern, error = PatternValidator.validate(text)
    if not ok:
        print(f"❌ {error}")
        return EXIT_ERROR

    scheme = Scheme(args.scheme)
    epsilon = parse_rational(args.epsilon)
    s = None
    if scheme is Scheme.SYNC:
        if not args.sync:
            print("❌ the sync scheme needs --sync FILE")
            return EXIT_ERROR
        s = load_sync_string(args.sync)

    fills = exhaustive_fills(scheme, pattern, s)
    name = args.fill or PatternValidator.fill_name(text) or "forge"
    ledger = run_indexing_once(scheme, pattern.n, pattern, fills[name], s)
    print(f"🔁 fill={name}: {ledger.model_dump_json()}")
    return _report_checks(indexing_checks(scheme, ledger, pattern, epsilon))


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=get_config("log_level"), format="%(levelname)s %(name)s: %(message)s")

    handlers = {"run": cmd_run, "verify": cmd_verify, "syncgen": cmd_syncgen, "replay": cmd_replay}
    try:
        return handlers[args.command](args)
    except InsdelError as e:
        print(f"\n❌ Error: {e}")
        return EXIT_ERROR
    except ValueError as e:
        # malformed files and flags that slipped past argparse
        print(f"\n❌ Error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
