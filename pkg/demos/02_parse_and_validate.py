"""Parsing and validating bundle documents.

The running example has rank 2, one logarithmic puncture at z=1 and the
required order-two pole at infinity with semisimple leading term
A = diag(1,-1). The negative examples show how violations are reported with
witnesses instead of being silently accepted.
"""

import json

from parahiggs import check_assumptions, check_residue_compatibility, parse_bundle, residue
from parahiggs.corpus import b_zero_eigenvalue_document, ex1_document, exn_document
from parahiggs.errors import PoleOrderError
from parahiggs.qi import format_qi


def show(m):
    return [[format_qi(x) for x in row] for row in m]


print("== the running example ==")
doc = ex1_document()
print(json.dumps(doc, indent=2))
bundle = parse_bundle(doc)
inf = bundle.puncture_data(0)
print("A (canonical frame):", show(inf.a_matrix))
print("B (canonical frame):", show(inf.b_matrix))
print("residue at z=1:", show(residue(bundle, 1)))
print("flag compatibility:", check_residue_compatibility(bundle))
print("assumptions:", check_assumptions(bundle)["ok"])

print("\n== a forbidden second-order finite pole ==")
bad = ex1_document()
bad["higgs"][0][0] = "1/(z-1)^2"
try:
    parse_bundle(bad)
except PoleOrderError as err:
    print("rejected:", err, "witness:", err.witness)

print("\n== assumption violations carry exact witnesses ==")
for name, document in (("EXN", exn_document()), ("B-zero", b_zero_eigenvalue_document())):
    verdict = check_assumptions(parse_bundle(document))
    items = sorted({f["item"] for f in verdict["failures"]})
    print(f"{name}: ok={verdict['ok']}, failing items {items}")
    print("  first witness:", verdict["failures"][0])
