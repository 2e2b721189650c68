"""The aggregated verification report, positive and negative.

verify_all runs every checkable statement: flag compatibility, the
eigenspace-splitting claim, the three spectral assumptions, the morphism
property of every alpha-lattice, vanishing of degree-0/2 hypercohomology,
the rank formula against the Smith oracle, the char-poly identity, the pole
orders and semisimple leading term of theta-hat, and the R-parabolic axioms
of the transformed family. Failures carry witnesses; blocked stages say what
blocked them. Reports are byte-identical across runs.
"""

import json

from parahiggs import parse_bundle, verify_all
from parahiggs.corpus import claim21_counterexample_document, ex1_document, exn_document, random_bundle_document

print("== the running example ==")
report = verify_all(parse_bundle(ex1_document()), depth=3)
for entry in report.entries:
    print(f"  {entry['check']:<24} {entry['verdict']}")
print("all pass:", report.all_pass)

print("\n== determinism ==")
again = verify_all(parse_bundle(ex1_document()), depth=3)
print("byte-identical reports:", json.dumps(report.to_dict()) == json.dumps(again.to_dict()))

print("\n== a random valid bundle ==")
doc = random_bundle_document(7)
report = verify_all(parse_bundle(doc), depth=2)
print(f"rank {doc['rank']}, punctures {[p['location'] for p in doc['punctures']]}:")
for entry in report.entries:
    print(f"  {entry['check']:<24} {entry['verdict']}")

print("\n== negative examples ==")
for name, document in (("EXN", exn_document()), ("Claim 2.1 counterexample", claim21_counterexample_document())):
    report = verify_all(parse_bundle(document), depth=2)
    failing = [e["check"] for e in report.entries if e["verdict"] == "fail"]
    blocked = [e["check"] for e in report.entries if e["verdict"] == "blocked"]
    print(f"{name}: failing {failing}; blocked {blocked}")
