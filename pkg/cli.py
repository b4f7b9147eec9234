"""
Command-line front end for the quantum battery toolkit.

Subcommands: xxz, csyk, brickwall, xy-pulsed, sre, selftest.
Exit codes: 0 success, 1 runtime failure or failed self-test, 2 invalid
config or usage, 3 size-cap violation.
"""
import argparse
import json
import sys
from typing import Any, Dict, List, Optional

from pydantic import ValidationError

from experiments.config_models import Scenario, load_config
from main import BatteryLab
from simulation.errors import InvalidArgumentError, SizeLimitError
from simulation.evolution import GateFamily, LayerParity
from simulation.models import GateKind, SpinUnit
from simulation.observables import SreMethod, sre_fast, sre_naive
from simulation.oracles import ORACLES, run_oracle_suite
from utils.state_io import read_state

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2
EXIT_SIZE = 3
EXIT_CODES = {"config": EXIT_CONFIG, "size": EXIT_SIZE, "runtime": EXIT_RUNTIME}

# CLI flag -> config field, per scenario
FLAG_FIELDS = {
    "common": {"n": "n_sites", "j": "J", "seed": "master_seed", "unit": "unit", "out": "output_dir",
               "threads": "threads"},
    Scenario.XXZ: {"delta": "delta", "tmax": "t_max", "dt": "dt", "with_sre": "with_sre"},
    Scenario.CSYK: {"tmax": "t_max", "dt": "dt", "disorder": "n_disorder", "window": "growth_window",
                    "with_sre": "with_sre"},
    Scenario.BRICKWALL: {"family": "gate_family", "kind": "gate_kind", "tau": "tau", "depth": "depth",
                         "circuits": "n_circuits", "first_layer": "first_layer_parity",
                         "tableau_only": "tableau_only", "with_sre": "with_sre"},
    Scenario.XY_PULSED: {"jp": "J_prime", "gamma": "gammas", "h_min": "h_min", "h_max": "h_max",
                         "h_step": "h_step", "kmax": "k_max"},
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="PATH", help="JSON config file; flags given here override its values")
    parser.add_argument("--out", metavar="DIR", help="Output directory for CSV and sidecar (default: QB_OUTPUT_DIR)")
    parser.add_argument("--n", type=int, help="Total number of spins N (even)")
    parser.add_argument("--j", type=float, help="Interaction scale J (energy units; default 1)")
    parser.add_argument("--seed", type=int, help="Master seed; omitted means an entropy-derived seed recorded in the sidecar")
    parser.add_argument("--threads", type=int, help="Worker threads (default: QB_THREADS or available cores)")
    parser.add_argument("--unit", choices=[u.value for u in SpinUnit],
                        help="Battery energy unit: 'half' for (1/2) sigma_z, 'pauli' for sigma_z (default half)")


def _add_sre_switch(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--no-sre", dest="with_sre", action="store_const", const=False,
                        help="Skip the stabilizer Renyi entropy (M2 column is 0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbattery",
        description="Nonstabilizerness and ergotropy of spin-1/2 quantum batteries.",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="subcommand")
    subparsers.required = True

    xxz = subparsers.add_parser("xxz", help="Domain-wall charging through an XXZ chain")
    _add_common(xxz)
    xxz.add_argument("--delta", type=float, help="XXZ anisotropy Delta (dimensionless; default 1)")
    xxz.add_argument("--tmax", type=float, help="Final time (units 1/J; default 20)")
    xxz.add_argument("--dt", type=float, help="Time step (units 1/J; default QB_DEFAULT_DT)")
    _add_sre_switch(xxz)

    csyk = subparsers.add_parser("csyk", help="Disorder-averaged charging through a complex SYK charger")
    _add_common(csyk)
    csyk.add_argument("--tmax", type=float, help="Final time (units 1/J; default 10)")
    csyk.add_argument("--dt", type=float, help="Time step (units 1/J; default QB_DEFAULT_DT)")
    csyk.add_argument("--disorder", type=int, help="Number of coupling realizations (default QB_CSYK_SAMPLES)")
    csyk.add_argument("--window", type=float, nargs=2, metavar=("T_MIN", "T_MAX"),
                      help="Growth-exponent fit window (units 1/J; default 0.1 1.0)")
    _add_sre_switch(csyk)

    brickwall = subparsers.add_parser("brickwall", help="Charging by brick-wall random circuits")
    _add_common(brickwall)
    brickwall.add_argument("--family", choices=[f.value for f in GateFamily], help="Gate family (default haar)")
    brickwall.add_argument("--kind", choices=[k.value for k in GateKind],
                           help="Generator of Hamiltonian gates (default ising)")
    brickwall.add_argument("--tau", type=float, help="Hamiltonian gate duration (units 1/J; default 1)")
    brickwall.add_argument("--depth", type=int, help="Number of layers (default 50)")
    brickwall.add_argument("--circuits", type=int, help="Independent circuits to average (default 20)")
    brickwall.add_argument("--first-layer", dest="first_layer", choices=[p.value for p in LayerParity],
                           help="Bond pattern of the first layer (default odd)")
    brickwall.add_argument("--tableau-only", dest="tableau_only", action="store_const", const=True,
                           help="Clifford family only: simulate with the stabilizer tableau (M2 reported as 0)")
    _add_sre_switch(brickwall)

    xy = subparsers.add_parser("xy-pulsed", help="P_max sweep of pulsed charging from XY ground states")
    _add_common(xy)
    xy.add_argument("--jp", type=float, help="XY coupling J' (energy units; default 1)")
    xy.add_argument("--gamma", type=float, nargs="+", help="Anisotropies gamma (dimensionless; default 0.2 1.0)")
    xy.add_argument("--h-min", dest="h_min", type=float, help="Smallest field h = h'/J' (default 0)")
    xy.add_argument("--h-max", dest="h_max", type=float, help="Largest field h = h'/J' (default 2)")
    xy.add_argument("--h-step", dest="h_step", type=float, help="Field step (default 0.02)")
    xy.add_argument("--kmax", type=int, help="Number of pi/4 pulses (default 64)")

    sre = subparsers.add_parser("sre", help="Print M2 of a QBSV state file")
    sre.add_argument("path", help="QBSV binary state file")
    sre.add_argument("--alpha", type=float, default=2.0, help="Renyi index (dimensionless; default 2)")
    sre.add_argument("--method", choices=[m.value for m in SreMethod], default=SreMethod.FAST.value,
                     help="Pauli enumeration ('naive') or Walsh-Hadamard ('fast', default)")

    selftest = subparsers.add_parser("selftest", help="Run the closed-form oracle suite")
    selftest.add_argument("--oracle", nargs="*", metavar="NAME", help="Oracles to run (default: all)")
    return parser


def collect_overrides(args: argparse.Namespace, scenario: Scenario) -> Dict[str, Any]:
    """Config fields set on the command line; unset flags are absent."""
    overrides: Dict[str, Any] = {}
    for flag, field_name in {**FLAG_FIELDS["common"], **FLAG_FIELDS[scenario]}.items():
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field_name] = value
    return overrides


def load_config_file(path: Optional[str]) -> Dict[str, Any]:
    if not path:
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return data


def run_experiment(args: argparse.Namespace) -> int:
    scenario = Scenario(args.command)
    try:
        file_data = load_config_file(args.config)
        if file_data.get("scenario", scenario.value) != scenario.value:
            raise ValueError(f"config file is for scenario '{file_data['scenario']}', not '{scenario.value}'")
        exp_config = load_config({**file_data, "scenario": scenario.value}, collect_overrides(args, scenario))
    except (OSError, ValueError, ValidationError) as e:
        print(f"error: invalid configuration: {e}", file=sys.stderr)
        return EXIT_CONFIG

    results = BatteryLab().run_scenario(scenario.value, exp_config.model_dump(mode="json"))
    if "error" in results:
        print(f"error: {results['error']}", file=sys.stderr)
        return EXIT_CODES.get(results.get("error_type"), EXIT_RUNTIME)

    output = results["output"]
    rows = len(output.record) if output.record is not None else len(output.pmax)
    print(f"{scenario.value}: {rows} rows written to {results['paths'].get('csv')}")
    print(f"sidecar: {results['paths'].get('sidecar')} (seed {output.seed})")
    return EXIT_OK


def run_sre(args: argparse.Namespace) -> int:
    try:
        state = read_state(args.path)
        method = sre_fast if SreMethod(args.method) is SreMethod.FAST else sre_naive
        result = method(state, alpha=args.alpha)
    except SizeLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SIZE
    except (OSError, InvalidArgumentError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    # M_alpha >= 0; clamp round-off and -0.0
    print(f"{max(0.0, result.value):.6f}")
    return EXIT_OK


def run_selftest(args: argparse.Namespace) -> int:
    names = args.oracle or list(ORACLES)
    unknown = [name for name in names if name not in ORACLES]
    if unknown:
        print(f"error: unknown oracles {unknown}; choose from {sorted(ORACLES)}", file=sys.stderr)
        return EXIT_CONFIG
    results = run_oracle_suite(names)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'} {result.name}: {result.detail}")
    return EXIT_OK if all(result.passed for result in results) else EXIT_RUNTIME


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse ``argv`` and dispatch to a subcommand.

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_CONFIG

    if args.command == "sre":
        return run_sre(args)
    if args.command == "selftest":
        return run_selftest(args)
    return run_experiment(args)


if __name__ == "__main__":
    sys.exit(main())
