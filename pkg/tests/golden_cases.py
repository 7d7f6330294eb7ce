"""CLI invocations whose outputs are committed under tests/golden/.

Regenerate with ``python tests/golden_cases.py`` after an intentional change.
"""

from pathlib import Path

GOLDEN_DIR = Path(__file__).parent / "golden"

CASES = {
    # closed form vs integrator over the acceptance grid
    "sweep.csv": ["sweep"],
    # gate fixtures
    "synth_not.json": ["synthesize", "--gate", "not", "--a0", "0.8i", "--a1", "0.6",
                       "--omega0", "1", "--omega", "2", "--verify"],
    "synth_hadamard.json": ["synthesize", "--gate", "hadamard", "--a0", "0.5+0.5i",
                            "--a1", "0.5-0.5i", "--omega0", "1", "--omega", "2", "--verify"],
    "synth_not_infeasible.json": ["synthesize", "--gate", "not", "--a0", "0.8", "--a1", "0.6",
                                  "--omega0", "1", "--omega", "2"],
    "evolve.csv": ["evolve", "--omega0", "1", "--omega", "2", "--theta", "1.0471975512",
                   "--t-end", "5", "--points", "501", "--format", "csv"],
    "cascade3.json": ["cascade", "--stages", "3", "--omega0", "1", "--omega", "2",
                      "--theta-deg", "60", "--t-end", "0.9"],
}


def run_case(name, out_dir):
    from sgspin.cli import main

    out = Path(out_dir) / name
    code = main(CASES[name] + ["--output", str(out)])
    return code, out


if __name__ == "__main__":
    for name in CASES:
        code, path = run_case(name, GOLDEN_DIR)
        print(f"{name}: exit {code}")
