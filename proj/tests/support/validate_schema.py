"""Validates the shipped configs against docs/config.schema.json."""
import glob
import json
import os
import sys

import jsonschema

root = sys.argv[1]
schema = json.load(open(os.path.join(root, "docs", "config.schema.json")))
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

failed = False
for path in sorted(glob.glob(os.path.join(root, "configs", "*.json"))):
    errors = list(validator.iter_errors(json.load(open(path))))
    for e in errors:
        print(f"{path}: {'/'.join(map(str, e.path))}: {e.message}")
    failed |= bool(errors)

rejected = [
    {"problem": "lq", "grid": {"T": 1, "K": 10}},
    {"problem": "mv", "grid": {"T": 1, "K": 10}, "mv": {"d": 1, "x": 0, "A": 1, "mu": 0.1, "sigma": 0.2}, "extra": 1},
    {"problem": "mv", "grid": {"T": 1, "K": 0}, "mv": {"d": 1, "x": 0, "A": 1, "mu": 0.1, "sigma": 0.2}},
    {"problem": "mv", "grid": {"T": 1, "K": 10}, "mv": {"d": 1, "x": 0, "A": 1, "mu": 0.1, "sigma": 0.2},
     "perturbations": [{"label": "a", "dx0": [1.0]}]},
]
for doc in rejected:
    if validator.is_valid(doc):
        print(f"schema accepted an invalid document: {json.dumps(doc)}")
        failed = True

sys.exit(1 if failed else 0)
