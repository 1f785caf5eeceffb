"""Validate qaybe JSON reports against docs/report-schema.json."""
import json
import subprocess
import sys

import jsonschema

qaybe, schema_path = sys.argv[1], sys.argv[2]
with open(schema_path) as f:
    schema = json.load(f)
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

runs = [
    ["verify", "--family", "rational", "--N", "2", "--samples", "3"],
    ["verify", "--family", "rcal", "--identity", "aybe", "--samples", "2", "--timings"],
    ["verify", "--family", "trig-literal", "--N", "1", "--samples", "2", "--hbar", "0.3+0.1i"],
    ["suite", "--N", "1", "--samples", "2", "--tol", "1e-8"],
]
bad = 0
for args in runs:
    proc = subprocess.run([qaybe, *args], capture_output=True, text=True)
    if proc.returncode not in (0, 1):
        print("FAIL", args, "exit", proc.returncode, proc.stderr)
        bad += 1
        continue
    errors = list(validator.iter_errors(json.loads(proc.stdout)))
    for e in errors[:5]:
        print("FAIL", args, e.json_path, e.message)
    bad += bool(errors)
    if not errors:
        print("ok", " ".join(args))
sys.exit(1 if bad else 0)
