"""Run every experiment through the CLI on small configs and validate the reports."""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

CONFIGS = {
    "duality": "[experiment]\ncases = 10\n",
    "reversal": "[graph]\nd = 2\nn = 2\n[weights]\nz = random\n[experiment]\nsamples = 1000\ncycles = 3\nreplicas = 5\n",
    "green-moment": "[experiment]\nn_values = 2, 3\nreplicas = 5\n",
    "invariant-measure": "[experiment]\nn_values = 2, 3\np = 1, 2\nreplicas = 20\n",
    "trap-times": "[graph]\nn = 3\n[experiment]\nreplicas = 100\n",
}


def main() -> int:
    cli, schema_path = sys.argv[1], sys.argv[2]
    schema = json.loads(Path(schema_path).read_text())
    validator = jsonschema.Draft202012Validator(schema)
    bad = 0
    with tempfile.TemporaryDirectory() as tmp:
        for name, text in CONFIGS.items():
            ini = Path(tmp, name + ".ini")
            ini.write_text(text)
            out = Path(tmp, name + ".json")
            run = subprocess.run([cli, name, "--config", str(ini), "--out", str(out)], capture_output=True, text=True)
            if run.returncode not in (0, 1) or not out.exists():
                print(f"FAIL {name}: exit {run.returncode} {run.stderr.strip()}")
                bad += 1
                continue
            errors = sorted(validator.iter_errors(json.loads(out.read_text())), key=str)
            for e in errors:
                print(f"FAIL {name}: {'/'.join(map(str, e.path))}: {e.message}")
            bad += bool(errors)
            if not errors:
                print(f"PASS {name}")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
