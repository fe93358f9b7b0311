"""Runs every subcommand with --json and validates the output against the
shipped schema, each against its own definition."""

import json
import subprocess
import sys

import jsonschema

tool, corpus, schema_path = sys.argv[1:4]
with open(schema_path) as f:
    root = json.load(f)
jsonschema.Draft202012Validator.check_schema(root)


def c(name):
    return f"{corpus}/{name}"


cases = [
    ("eval", ["eval", c("t3.sst"), "--input", "aaa"], 0),
    ("runs", ["runs", c("t1.sst"), "--input", "abab"], 0),
    ("runs", ["runs", c("t3.sst"), "--input", "b"], 1),
    ("delay", ["delay", "--seq1", c("t3_run.seq"), "--seq2", c("t4_run.seq"), "--ell", "1"], 0),
    ("delay", ["delay", "--seq1", c("rho2.seq"), "--seq2", c("rho3.seq"), "--measure", "symmetric"], 0),
    ("factorize", ["factorize", "--word", "aaababcbabaaaaa", "--ell", "2"], 0),
    ("resync", ["resync", c("rat3_a.sst"), c("rat3_b.sst"), "--k", "1", "--ell", "2"], 0),
    ("verdict", ["include", c("t3.sst"), c("t4.sst"), "--k", "1"], 1),
    ("verdict", ["equiv", c("t1.sst"), c("t2.sst")], 0),
    ("verdict", ["equiv", c("t3.sst"), c("t4.sst")], 1),
    ("verdict", ["minvars", c("t2.sst"), "--m", "1"], 0),
    ("verdict", ["minvars", c("t2.sst"), "--m", "1", "--det"], 0),
    ("verdict", ["minvars", c("reverse.sst"), "--m", "1"], 1),
    ("pump", ["pump", "--seq1", c("t3_run.seq"), "--seq2", c("t4_run.seq"), "--C", "2", "--k", "0"], 0),
    ("error", ["pump", "--seq1", c("t3_run.seq"), "--seq2", c("t3_run.seq")], 1),
    ("corpus_check", ["corpus-check", "--quick", "--corpus", corpus, "--criteria", "1,7"], 0),
    ("corpus_check", ["corpus-check", "--quick", "--corpus", corpus, "--criteria", "1", "--inject", "max-diff"], 1),
    ("error", ["--max-states", "10", "resync", c("t1.sst"), c("t2.sst")], 2),
]

bad = 0
for definition, args, expected_rc in cases:
    cmd = [tool, "--json"] + args
    p = subprocess.run(cmd, capture_output=True, text=True)
    label = " ".join(args)
    try:
        doc = json.loads(p.stdout)
        sub = dict(root)
        sub.pop("anyOf")
        sub["$ref"] = f"#/$defs/{definition}"
        jsonschema.validate(doc, sub, cls=jsonschema.Draft202012Validator)
        jsonschema.validate(doc, root, cls=jsonschema.Draft202012Validator)
        if p.returncode != expected_rc:
            raise ValueError(f"exit {p.returncode}, expected {expected_rc}")
        print(f"ok    {definition:13} {label}")
    except Exception as e:  # report every case, then fail once
        bad += 1
        print(f"FAIL  {definition:13} {label}: {e}\n{p.stdout[:500]}{p.stderr[:500]}")

print(f"{len(cases) - bad}/{len(cases)} outputs valid")
sys.exit(1 if bad else 0)
