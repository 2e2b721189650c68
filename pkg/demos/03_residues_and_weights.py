"""Residue splits, weight filtrations, frame indices and the connection side.

Each puncture's residue action is split into commuting semisimple and
nilpotent parts on every flag level; the nilpotent part carries the unique
weight filtration, and every canonical frame vector gets its triple
(j(s), k(s), lambda). The connection-side dictionary converts the Higgs-side
weights and eigenvalues into the weights and residue eigenvalues of the
corresponding flat connection.
"""

from parahiggs import (
    connection_side_data,
    frame_indices,
    graded_residue_split,
    parse_bundle,
    weight_filtration,
)
from parahiggs.corpus import ex1_document
from parahiggs.qi import format_qi, qi

print("== a full Jordan block and its weight filtration ==")
n = [[qi(0), qi(1), qi(0)], [qi(0), qi(0), qi(1)], [qi(0), qi(0), qi(0)]]
w = weight_filtration(n)
print("graded dimensions by level k:", w.graded_dims())
print("(one line of weights -2, 0, 2: the size-3 Jordan string)")

print("\n== graded residue split with a nilpotent part ==")
doc = {
    "rank": 2,
    "punctures": [
        {"location": "0", "weights": ["0"], "flag": []},
        {"location": "inf", "weights": ["0"], "flag": []},
    ],
    "higgs": [
        ["1 + 2/z", "1/z"],
        ["0", "1 + 2/z"],
    ],
}
bundle = parse_bundle(doc)
split = graded_residue_split(bundle, 1)
level = split.levels[0]
print("eigenvalues:", [format_qi(e) for e in level.eigenvalues])
print("semisimple part:", [[format_qi(x) for x in r] for r in level.semisimple])
print("nilpotent part:", [[format_qi(x) for x in r] for r in level.nilpotent])

print("\n== frame indices ==")
for row in frame_indices(bundle):
    extra = f", a={format_qi(row.a_eigenvalue)}" if row.a_eigenvalue is not None else ""
    print(f"puncture {row.puncture}, column {row.column}: "
          f"j={row.level}, k={row.weight_index}, lambda={format_qi(row.eigenvalue)}{extra}")

print("\n== connection-side dictionary for the running example ==")
bundle = parse_bundle(ex1_document())
data = connection_side_data(bundle)
for row in data["table"]:
    print(f"puncture {row['puncture']} column {row['column']}: "
          f"alpha={row['alpha']}, lambda={format_qi(row['lambda'])}, "
          f"beta={row['beta']}, res(connection)={format_qi(row['residue_connection'])}")
