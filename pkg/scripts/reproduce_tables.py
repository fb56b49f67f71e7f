#!/usr/bin/env python3
"""End-to-end reproduction run against the recorded fixtures.

Drives all five CLI workflows and drops their outputs under out/:

  cost      -> out/cost/cost_table.csv          (+ energy cross-check rows)
  scan      -> out/scan/report_ledger.csv,      per-year counts
            -> out/scan/report_estimates.csv    (code-search estimates)
  classify  -> out/classify/classified.csv,     scatter + cross tables
  analyze   -> out/analyze/analysis.csv         (independence test)
  simulate  -> out/simulate/simulation.csv      (toy strength corpus; supply
               your own strength CSV for full-scale runs)

Usage: python3 scripts/reproduce_tables.py [OUT_DIR]
"""

import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from hashecon.cli import main  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
TERMS = ["argon2", "bcrypt", "scrypt", "yescrypt", "pbkdf2"]


def run(argv):
    code = main(argv)
    if code != 0:
        raise SystemExit(f"command failed ({code}): {' '.join(argv)}")


def main_driver(out_root: Path):
    run(["--out-dir", str(out_root / "cost"), "cost", "--energy-check"])

    term_flags = [flag for t in TERMS for flag in ("--term", t)]
    run(["--out-dir", str(out_root / "scan"), "scan", "--mode", "repos",
         "--fixtures", str(FIXTURES / "scan" / "cache"), *term_flags,
         "--allow-owner", "prolific-pbkdf2-dev",
         "--decisions", str(FIXTURES / "scan" / "scrypt_decisions.csv")])
    run(["--out-dir", str(out_root / "scan"), "scan", "--mode", "code",
         "--fixtures", str(FIXTURES / "scan" / "cache"), *term_flags,
         "--retention", "scrypt=0.452"])

    run(["--out-dir", str(out_root / "classify"), "classify",
         "--configs", str(FIXTURES / "params" / "argon2_params_161.csv")])

    run(["--out-dir", str(out_root / "analyze"), "analyze",
         "--test", "independence",
         "--table", str(out_root / "classify" / "crosstab_age.csv")])

    with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
        fh.write("strength_bits,count\n")
        for bits in range(4, 61, 4):
            fh.write(f"{bits},{max(1, 30 - bits // 3)}\n")
        toy = fh.name
    run(["--out-dir", str(out_root / "simulate"), "simulate",
         "--strengths", toy, "--doubled", "--curve", "--emit-distribution",
         "--dataset-label", "toy"])

    print(f"\nall outputs under {out_root}/")


if __name__ == "__main__":
    main_driver(Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "out")
