"""
Campaigns, files and the command line
=====================================

Trial i of a campaign always runs on derive_trial_field(seed, i), so
campaigns are reproducible regardless of thread count.  The `lpplab`
command wraps everything and writes sorted JSON Lines plus CSV curves.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from lpplab import store

out = Path(tempfile.mkdtemp()) / "tf.jsonl"
base = [sys.executable, "-m", "lpplab.cli"]
argv = ["tails", "--stat", "tf-local", "--r", "32", "--n", "128", "--t", "0.5:2.5:0.5",
        "--trials", "300", "--seed", "7", "--format", "both", "--out", str(out)]
print("$ lpplab", " ".join(argv))
print("exit", subprocess.run(base + argv).returncode)

records = store.read_jsonl(out)
summary = records[-1]
print(len(records) - 1, "trial records; params echoed:", summary["params"])
print(out.with_suffix(".csv").read_text())
for name, fit in summary["payload"]["fits"].items():
    print(name, "R2", round(fit["r2"], 4))

# The same campaign on four threads is byte-identical.
again = out.with_name("tf4.jsonl")
subprocess.run(base + argv[:-4] + ["--threads", "4", "--out", str(again)], check=True)
print("identical with 4 threads:", again.read_bytes() == out.read_bytes())

print("\n$ lpplab verify")
print("exit", subprocess.run(base + ["verify", "--trials", "100", "--out", str(out.with_name("v.jsonl"))]).returncode)
