"""
Command line tour
=================

The same capabilities through the ``cptwb`` command.  Every invocation
is deterministic: identical commands produce identical bytes.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from cptwb import channels as chan
from cptwb import zoo


def cptwb(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "cptwb.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc.returncode, proc.stdout


# Validate and classify a catalogue channel.
code, out = cptwb("info", "--family", "werner_holevo", "--dim", "3")
print("$ cptwb info --family werner_holevo --dim 3   ->", code)
print("\n".join("  " + line for line in out.strip().split("\n")[:8]))

# Largest output 5-norm, JSON output.
code, out = cptwb("numax", "--family", "werner_holevo", "--dim", "3",
                  "--p", "5", "--restarts", "8", "--format", "json")
rep = json.loads(out)
print("\nnumax p=5 best value:", rep["best_value"],
      "  (exact 2^(-4/5) =", 2.0 ** (-4 / 5), ")")

# Multiplicativity check as CSV (the tabular commands accept --format csv).
code, out = cptwb("multcheck", "--family", "werner_holevo", "--dim", "3",
                  "--p", "5", "--restarts", "8", "--tensor-restarts", "12",
                  "--format", "csv")
print("\nmultcheck CSV:")
print("\n".join("  " + line for line in out.strip().split("\n")))

# Channels travel as JSON files.
with tempfile.TemporaryDirectory() as tmp:
    f = Path(tmp) / "channel.json"
    f.write_text(json.dumps(chan.channel_to_json(zoo.random_channel(3, 2, 5, seed=9))))
    code, out = cptwb("decompose", "--input", str(f), "--format", "json")
    rep = json.loads(out)
    print("\ndecompose mixture residual:", rep["mixture_residual"])
    print("halves generalized extreme:",
          [h["generalized_extreme"] for h in rep["halves"]])

# Exit codes: 0 success, 2 invalid input, 3 numerical failure, 64 usage.
code, _ = cptwb("numax", "--p", "2")
print("\nmissing channel source exits:", code)
