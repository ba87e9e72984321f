#!/usr/bin/env python3
"""End-to-end checks of the command-line tool: schemas, CSV layout, determinism, errors.

usage: cli_contract.py <bufchem> <fixtures dir> <schemas dir>
"""
import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

exe, fixtures, schemas = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
failures = []


def check(ok, what):
    if not ok:
        failures.append(what)
        print("FAIL", what)


def run(*args):
    return subprocess.run([exe, *args], capture_output=True)


def schema(name):
    return json.loads((schemas / f"{name}.schema.json").read_text())


def validate(doc, name, what):
    try:
        jsonschema.validate(doc, schema(name))
    except jsonschema.ValidationError as e:
        check(False, f"{what}: {e.message}")


def check_csv(text, header, what):
    check("\r" not in text and text.endswith("\n"), f"{what}: line endings")
    lines = text.split("\n")[:-1]
    check(lines[0] == header, f"{what}: header {lines[0]!r}")
    check(len(lines) > 1, f"{what}: no rows")
    for line in lines[1:]:
        for field in line.split(","):
            # %.17g round trip: the field must be exactly what 17 digits give
            check("%.17g" % float(field) == field, f"{what}: field {field!r}")


json_runs = [
    ("kinetics", "table1.ini", []),
    ("kinetics", "monod.ini", []),
    ("classify", "table1.ini", []),
    ("classify", "table1_ki08.ini", []),
    ("equilibria", "table1.ini", []),
    ("equilibria", "monod.ini", []),
    ("domain", "table1.ini", ["--format", "json"]),
    ("design", "table1.ini", ["--format", "json"]),
    ("simulate", "monod.ini", ["--format", "json"]),
    ("audit", "audit_serial.ini", []),
]
for command, fixture, extra in json_runs:
    what = f"{command} {fixture}"
    p = run(command, "--config", str(fixtures / fixture), *extra)
    check(p.returncode == 0, f"{what}: exit {p.returncode} {p.stderr.decode()}")
    if p.returncode == 0:
        validate(json.loads(p.stdout), command, what)

# monod equilibria: exactly one positive equilibrium, stable
eq = json.loads(run("equilibria", "--config", str(fixtures / "monod.ini")).stdout)
positive = [e for e in eq["equilibria"] if e["branch"] == "BufferPositive"]
check(len(positive) == 1 and positive[0]["tag"] == "Stable", "monod equilibria: one stable positive")

# CSV artifacts plus sidecars
with tempfile.TemporaryDirectory() as tmp:
    out = pathlib.Path(tmp)
    for command, header in [("domain", "alpha,r_bar"), ("design", "S_in,delta_v_inf,v2_inf")]:
        p = run(command, "--config", str(fixtures / "table1.ini"), "--out", tmp)
        check(p.returncode == 0, f"{command} --out: exit {p.returncode}")
        check_csv((out / f"{command}.csv").read_text(), header, f"{command}.csv")
        validate(json.loads((out / f"{command}.json").read_text()), command, f"{command} sidecar")
    rows = (out / "domain.csv").read_text().split("\n")[1:-1]
    check(all(0.0 < float(r.split(",")[1]) <= 1.0 for r in rows), "domain.csv: r_bar in (0,1]")
    side = json.loads((out / "domain.json").read_text())
    check(isinstance(side["ul_alpha"], float), "domain sidecar: ul_alpha present")

# determinism
for fixture in ("monod.ini", "table1.ini"):
    a = run("simulate", "--config", str(fixtures / fixture))
    b = run("simulate", "--config", str(fixtures / fixture))
    check(a.returncode == 0 and a.stdout == b.stdout, f"simulate {fixture}: byte-identical reruns")
    header = "t,S1,X1,S2,X2" if b"S1" in a.stdout.split(b"\n")[0] else "t,S,X"
    check_csv(a.stdout.decode(), header, f"simulate {fixture}")

# errors
p = run("kinetics", "--config", str(fixtures / "missing.ini"))
check(p.returncode != 0, "missing file: non-zero exit")
err = json.loads(p.stderr)
validate(err, "error", "missing file")
check(err["error"]["kind"] == "io", "missing file: io error")

with tempfile.TemporaryDirectory() as tmp:
    bad = pathlib.Path(tmp) / "bad.ini"
    bad.write_text((fixtures / "table1.ini").read_text().replace("K_I = 0.08", "K_I = 0"))
    p = run("kinetics", "--config", str(bad))
    check(p.returncode == 2, f"K_I = 0: exit {p.returncode}")
    err = json.loads(p.stderr)
    validate(err, "error", "K_I = 0")
    check("strictly positive" in err["error"]["message"], "K_I = 0: message")

    a2 = pathlib.Path(tmp) / "a2.ini"
    a2.write_text((fixtures / "table1.ini").read_text().replace("alpha = 0.6", "alpha = 1.5"))
    p = run("equilibria", "--config", str(a2))
    check(p.returncode == 1 and p.stdout == b"", f"A2 violation: exit {p.returncode}")
    validate(json.loads(p.stderr), "error", "A2 violation")

p = run("audit", "--config", str(fixtures / "table1.ini"))
check(p.returncode == 2, "audit without [audit]: config error")

print("cli contract:", "FAIL" if failures else "PASS", f"({len(failures)} failures)")
sys.exit(1 if failures else 0)
