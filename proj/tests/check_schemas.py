"""Validate shipped fixtures and CLI output against docs/schemas.

usage: check_schemas.py <repo root> <devsel binary>
"""

import json
import pathlib
import subprocess
import sys
import tempfile

try:
    import jsonschema
    from referencing import Registry, Resource
except ImportError:
    print("jsonschema not installed; skipping")
    sys.exit(0)

root = pathlib.Path(sys.argv[1])
cli = sys.argv[2]
schemas = {p.name: json.loads(p.read_text()) for p in (root / "docs/schemas").glob("*.json")}
registry = Registry().with_resources(
    (s["$id"], Resource.from_contents(s)) for s in schemas.values()
)
failures = 0


def check(kind, doc, expect_valid=True, label=""):
    global failures
    schema = schemas[f"{kind}.schema.json"]
    validator = jsonschema.Draft202012Validator(schema, registry=registry)
    errors = list(validator.iter_errors(doc))
    if bool(errors) == expect_valid:
        failures += 1
        print(f"FAIL {kind} {label}: " + (errors[0].message if errors else "accepted invalid document"))
    else:
        print(f"ok   {kind} {label}")


def load(path):
    return json.loads(pathlib.Path(path).read_text())


home = root / "data/smart_home"
check("registry", load(home / "registry.json"), label="smart_home")
check("workflow", load(home / "workflow.json"), label="smart_home")
check("model", load(home / "model.json"), label="smart_home")

with tempfile.TemporaryDirectory() as tmp:
    tmp = pathlib.Path(tmp)
    subprocess.run([cli, "synth", "--f-count", "5", "--seed", "3", "--out-dir", str(tmp)],
                   check=True, stdout=subprocess.DEVNULL)
    check("registry", load(tmp / "registry.json"), label="synthesized")
    check("workflow", load(tmp / "workflow.json"), label="synthesized")
    check("model", load(tmp / "model.json"), label="synthesized")
    check("assignment", load(tmp / "planted.json"), label="synthesized planted")
    subprocess.run([cli, "policy", "--registry", str(tmp / "registry.json"),
                    "--workflow", str(tmp / "workflow.json"),
                    "--assignment", str(tmp / "planted.json"),
                    "--out", str(tmp / "policy.json")], check=True, stdout=subprocess.DEVNULL)
    check("policy", load(tmp / "policy.json"), label="synthesized")
    subprocess.run([cli, "policy", "--registry", str(home / "registry.json"),
                    "--workflow", str(home / "workflow.json"),
                    "--model", str(home / "model.json"),
                    "--out", str(tmp / "home_policy.json")], check=True, stdout=subprocess.DEVNULL)
    check("policy", load(tmp / "home_policy.json"), label="smart_home")

bad = load(home / "registry.json")
bad["devices"][3]["net_requirements"]["make_coffee"][1].pop("external_endpoint")
check("registry", bad, expect_valid=False, label="outbound without endpoint")
bad = load(home / "registry.json")
bad["devices"][0]["address"] = "10.0.0.05"
check("registry", bad, expect_valid=False, label="leading zero address")
check("workflow", {"functions": ["a"], "edges": [["a"]]}, expect_valid=False, label="short edge")

sys.exit(1 if failures else 0)
