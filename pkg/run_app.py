#!/usr/bin/env python3
"""
Unstable Gibbs Launcher
Runs every default experiment configuration through the command-line runner
"""

import subprocess
import sys
from pathlib import Path

RUNS = [
    ("measure", "configs/figure3a.json"),
    ("measure", "configs/figure3b.json"),
    ("measure", "configs/horizontal_seed.json"),
    ("pressure", "configs/figure3a.json"),
    ("oracle", "configs/figure3b.json"),
    ("measure", "configs/solenoid.json"),
    ("pressure", "configs/solenoid.json"),
]


def check_environment():
    """Check if environment is set up properly"""
    env_file = Path(".env")
    if not env_file.exists():
        print("⚠️  .env file not found")
        print("   Run setup.py first; defaults will be used")

    missing = [config for _, config in RUNS if not Path(config).exists()]
    if missing:
        print(f"⚠️  Missing configs: {', '.join(sorted(set(missing)))}")
        return False
    return True


def main():
    """Launch the default experiments"""
    print("Running default unstable-gibbs experiments...")

    # Check environment
    if not check_environment():
        print("\n❌ Environment not properly configured")
        sys.exit(1)

    failures = 0
    try:
        for command, config in RUNS:
            print(f"🚀 {command} {config}")
            result = subprocess.run([sys.executable, "cli.py", command, "--config", config])
            if result.returncode != 0:
                print(f"❌ {command} {config} exited with {result.returncode}")
                failures += 1
    except KeyboardInterrupt:
        print("\n👋 Interrupted")
        sys.exit(130)

    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
