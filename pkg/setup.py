"""
Setup script for the quantum battery toolkit.

Installs requirements, seeds ``.env``, creates the output locations named by
the QB_* settings and runs the fast closed-form checks.
"""
import os
import shutil
import subprocess
import sys
from importlib import metadata
from pathlib import Path

MIN_PYTHON = (3, 9)
# distribution -> minimum major version the toolkit relies on
STACK_MAJORS = {"numpy": 1, "scipy": 1, "pandas": 1, "pydantic": 2}


def install_requirements() -> bool:
    print("📦 pip install -r requirements.txt")
    try:
        subprocess.check_call([sys.executable, "-m", "pip", "install", "-r", "requirements.txt"])
    except subprocess.CalledProcessError as e:
        print(f"❌ pip exited with {e.returncode}")
        return False
    return True


def check_stack() -> bool:
    """Installed versions of the numerical stack; pydantic v1 is not supported."""
    ok = True
    for name, major in STACK_MAJORS.items():
        try:
            version = metadata.version(name)
        except metadata.PackageNotFoundError:
            print(f"❌ {name} is not installed")
            ok = False
            continue
        if int(version.split(".")[0]) < major:
            print(f"❌ {name} {version} found, {major}.x or newer needed")
            ok = False
        else:
            print(f"✅ {name} {version}")
    return ok


def seed_env_file() -> None:
    if Path(".env").exists():
        print("✅ Keeping existing .env")
        return
    shutil.copy("env.example", ".env")
    print("✅ .env created from env.example (size caps and QB_THREADS are worth a look)")


def prepare_output_locations() -> None:
    """Directories for runs, reports, the run index and the log, as configured."""
    from utils.config import config

    settings = config.get_output_config()
    targets = [settings["output_dir"], settings["reports_dir"],
               os.path.dirname(settings["run_index"]), os.path.dirname(config.log_file)]
    for target in filter(None, targets):
        Path(target).mkdir(parents=True, exist_ok=True)
        print(f"📁 {target}")

    limits = config.get_size_limits()
    print("📏 size caps: " + ", ".join(f"{key}={value}" for key, value in limits.items()))


def run_quick_checks() -> bool:
    from main import QUICK_ORACLES, BatteryLab

    validation = BatteryLab().validate_system(QUICK_ORACLES)
    for name, outcome in validation["oracles"].items():
        print(f"{'✅' if outcome['passed'] else '❌'} {name}: {outcome['detail']}")
    return validation["overall_status"] == "ready"


def main():
    print("🔋 Quantum Battery Toolkit - Setup")
    print("=" * 50)
    if sys.version_info < MIN_PYTHON:
        print(f"❌ Python {'.'.join(map(str, MIN_PYTHON))}+ required, running {sys.version.split()[0]}")
        sys.exit(1)

    if not install_requirements() or not check_stack():
        sys.exit(1)
    seed_env_file()
    prepare_output_locations()

    print("🔍 Closed-form checks")
    if not run_quick_checks():
        print("❌ Setup validation failed")
        sys.exit(1)

    print("\n🎉 Ready. Next:")
    print("   python cli.py selftest                       # every oracle, acceptance sizes")
    print("   python cli.py xxz --n 8 --seed 1             # first charging run")
    print("   python example_usage.py                      # library walkthrough")
    print("   pytest -m \"not slow\"                         # quick test pass")


if __name__ == "__main__":
    os.chdir(Path(__file__).resolve().parent)
    main()
