"""Validates CLI JSON reports against schema/report.schema.json."""
import copy
import json
import subprocess
import sys

import jsonschema

cli, schema_path, corpus = sys.argv[1:4]
with open(schema_path) as f:
    schema = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

runs = [
    (["check", f"{corpus}/example7.toml", "--report", "json"], 0),
    (["classify", f"{corpus}/example9.toml", "--param", "alpha=0.3", "--param", "beta=0.4", "--report", "json"], 0),
    (["check", f"{corpus}/warped10.toml", "--only", "curvature_item1,harmonic", "--report", "json"], 0),
    (["check", f"{corpus}/example9.toml", "--param", "alpha=pi/12", "--param", "beta=pi/3",
      "--tol", "1e-17", "--points", "2", "--report", "json"], 1),
]
failures = 0
for args, expected_exit in runs:
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    doc = json.loads(proc.stdout)
    errors = sorted(validator.iter_errors(doc), key=str)
    ok = not errors and proc.returncode == expected_exit and doc["exit_code"] == expected_exit
    print(("ok   " if ok else "FAIL ") + " ".join(args[:2]), f"exit={proc.returncode}")
    for e in errors[:5]:
        print("     ", e.message, list(e.absolute_path))
    failures += not ok
    if args[0] == "check" and ok:
        broken = copy.deepcopy(doc)
        broken["entries"][0]["suite"]["checks"][0]["verdict"] = "maybe"
        if validator.is_valid(broken):
            print("FAIL schema accepts an unknown verdict")
            failures += 1

sys.exit(1 if failures else 0)
