"""
Example usage of the quantum battery toolkit.
"""
import json

from main import BatteryLab, QUICK_ORACLES, quick_run
from simulation.hilbert import domain_wall_state
from simulation.observables import block_state_model, steady_ergotropy_exact, steady_ergotropy_gauss
from simulation.stabilizer import asymptotic_ergotropy, clifford_ergotropy


def example_xxz_charging():
    """Example of domain-wall charging through an XXZ chain."""
    print("🔋 Example 1: XXZ Charging")
    print("=" * 50)

    results = quick_run("xxz", n_sites=8, t_max=20.0, dt=0.05, master_seed=1)

    if "error" not in results:
        output = results["output"]
        record = output.record
        print("✅ Run completed successfully!")
        print(f"📄 Data saved to: {results['paths']['csv']}")
        print(f"⏱️ Ergotropy onset: t = {output.diagnostics['onset_time']}")
        print(f"📈 Final W={record.W[-1]:.4f}, E={record.E[-1]:.4f}, M2={record.M2[-1]:.4f}")
        if "pearson_avgM2_avgE" in output.diagnostics:
            print(f"🔗 Correlation of averaged M2 and E: {output.diagnostics['pearson_avgM2_avgE']:.3f}")
    else:
        print(f"❌ Run failed: {results['error']}")

    print("\n" + "=" * 50 + "\n")


def example_csyk_disorder():
    """Example of a disorder-averaged cSYK run with growth exponents."""
    print("🎲 Example 2: cSYK Disorder Average")
    print("=" * 50)

    lab = BatteryLab()
    results = lab.run_scenario("csyk", {"n_sites": 8, "t_max": 5.0, "n_disorder": 8, "master_seed": 2})

    if "error" not in results:
        output = results["output"]
        print(f"✅ Averaged {output.config.n_disorder} realizations")
        print(f"📐 M2 growth exponent: {output.diagnostics.get('exponent_M2')}")
        print(f"📐 E growth exponent: {output.diagnostics.get('exponent_E')}")
        if "tanh_sum" in output.fits:
            print(f"🧮 tanh-sum fit: {json.dumps(output.fits['tanh_sum']['parameters'], indent=2)}")
    else:
        print(f"❌ Run failed: {results['error']}")

    print("\n" + "=" * 50 + "\n")


def example_clifford_circuits():
    """Example of Clifford brick-wall charging at a size only the tableau reaches."""
    print("🧱 Example 3: Clifford Circuits")
    print("=" * 50)

    results = quick_run("brickwall", gate_family="clifford", n_sites=64, depth=80, n_circuits=10, master_seed=3)

    if "error" not in results:
        diagnostics = results["output"].diagnostics
        print(f"✅ Tableau only: {diagnostics['tableau_only']}")
        print(f"🔋 Ergotropy plateau: {diagnostics['E_plateau']:.4f}")
        print(f"📊 Mean battery rank after the last layer: {diagnostics['final_mean_rank']:.2f}")
        print(f"🎯 Rank-limited asymptote: {diagnostics['asymptotic_E']:.4f}")
    else:
        print(f"❌ Run failed: {results['error']}")

    print("\n" + "=" * 50 + "\n")


def example_pulsed_sweep():
    """Example of the P_max sweep for pulsed charging of XY ground states."""
    print("⚡ Example 4: Pulsed XY Sweep")
    print("=" * 50)

    results = quick_run("xy-pulsed", n_sites=8, gammas=[0.2, 1.0], h_step=0.05, master_seed=4)

    if "error" not in results:
        for gamma, summary in results["output"].diagnostics.items():
            print(f"📍 {gamma}: SRE peaks at h={summary['h_at_max_sre']}, "
                  f"P_max peaks at h={summary['h_at_max_power']}")
            print(f"   Non-injective pair: {summary['non_injective_witness']}")
    else:
        print(f"❌ Run failed: {results['error']}")

    print("\n" + "=" * 50 + "\n")


def example_closed_forms():
    """Example of the closed-form ergotropy results."""
    print("📚 Example 5: Closed Forms")
    print("=" * 50)

    for n_sites in (8, 12, 16, 20):
        exact = steady_ergotropy_exact(block_state_model(n_sites))
        print(f"N={n_sites}: steady ergotropy {exact:.6f} (gaussian estimate {steady_ergotropy_gauss(n_sites):.4f})")

    print(f"Clifford ergotropy n_b=3, r=1: {clifford_ergotropy(3, 1, 0)}")
    for n_b in (16, 64):
        print(f"n_b={n_b}: exact {clifford_ergotropy(n_b, n_b // 2, 0):.3f}, "
              f"asymptotic {asymptotic_ergotropy(n_b, n_b // 2):.3f}")
    print(f"Domain wall for n_b=2 has {domain_wall_state(2).n_sites} sites")

    print("\n" + "=" * 50 + "\n")


def example_system_validation():
    """Example of system validation."""
    print("🔍 Example 6: System Validation")
    print("=" * 50)

    lab = BatteryLab()
    validation = lab.validate_system(QUICK_ORACLES)

    print(f"Overall Status: {validation['overall_status']}")
    for name, result in validation["oracles"].items():
        print(f"  {'✅' if result['passed'] else '❌'} {name}: {result['detail']}")
    if validation["errors"]:
        print(f"Errors: {validation['errors']}")

    print("\n📋 Configuration:")
    print(json.dumps(lab.get_system_config(), indent=2))

    print("\n" + "=" * 50 + "\n")


def main():
    """Run all examples."""
    print("🚀 Quantum Battery Toolkit - Examples")
    print("=" * 60)
    print()

    example_system_validation()
    example_closed_forms()
    example_xxz_charging()
    example_csyk_disorder()
    example_clifford_circuits()
    example_pulsed_sweep()

    print("🎉 All examples completed!")


if __name__ == "__main__":
    main()
