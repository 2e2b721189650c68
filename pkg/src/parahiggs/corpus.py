"""Deterministic generators of valid random bundles for tests and demos.

Bundles are built so that every structural requirement holds by construction:
diagonal leading term with grouped eigenvalues, upper-triangular nilpotent
couplings only inside equal-eigenvalue blocks, spectra kept away from zero
where the spectral assumption demands it, and the order-one term at infinity
automatically the sum of the finite residues. Every candidate is pushed
through parse_bundle and check_assumptions before being returned.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .bundle import check_assumptions, parse_bundle
from .errors import EngineError
from .qi import GaussianRational, format_qi, qi

_LOCATIONS = [1, 2, -1, -2, 3, -3]
_EIGENVALUES = [
    qi(1),
    qi(-1),
    qi(2),
    qi(-2),
    qi(Fraction(1, 2)),
    qi(Fraction(-3, 2)),
    qi(0, 1),
    qi(0, -1),
    qi(1, 1),
]
_WEIGHT_POOL = [Fraction(0), Fraction(0), Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(2, 3)]


def ex1_document():
    """Rank 2, one puncture at z=1, diagonal Higgs field (the running example)."""
    return {
        "rank": 2,
        "punctures": [
            {"location": "1", "weights": ["0"], "flag": []},
            {"location": "inf", "weights": ["0"], "flag": []},
        ],
        "higgs": [
            ["1/2 + 1/(z-1)", "0"],
            ["0", "-1/2 - 1/(z-1)"],
        ],
    }


def exn_document():
    """Nilpotent residue on a zero weight at z=1: fails assumption item (2)."""
    return {
        "rank": 2,
        "punctures": [
            {"location": "1", "weights": ["0"], "flag": []},
            {"location": "2", "weights": ["0"], "flag": []},
            {"location": "inf", "weights": ["0"], "flag": []},
        ],
        "higgs": [
            ["1/2 + 5/(z-2)", "1/(z-1)"],
            ["0", "1/2 + 7/(z-2)"],
        ],
    }


def b_zero_eigenvalue_document():
    """B = diag(0, 3) at infinity: fails assumption item (1)."""
    return {
        "rank": 2,
        "punctures": [
            {"location": "1", "weights": ["0"], "flag": []},
            {"location": "inf", "weights": ["0"], "flag": []},
        ],
        "higgs": [
            ["1", "0"],
            ["0", "2 + 3/(z-1)"],
        ],
    }


def claim21_counterexample_document():
    """Infinity flag spanned by e1+e2 with A = diag(1,-1): Claim 2.1 witness."""
    doc = ex1_document()
    doc["punctures"][1] = {
        "location": "inf",
        "weights": ["0", "1/2"],
        "flag": [[["1", "1"]]],
    }
    return doc


def _entry_string(constant, residues, locations):
    """constant + sum residues[i]/(z - z_i), as an expression string."""
    parts = []
    if not constant.is_zero():
        parts.append(f"({format_qi(constant)})")
    for lam, z_i in zip(residues, locations):
        if lam.is_zero():
            continue
        parts.append(f"({format_qi(lam)})/(z-({z_i}))")
    return " + ".join(parts) if parts else "0"


def random_bundle_document(seed: int) -> dict:
    """One random valid bundle document; deterministic in the seed.

    Retries internally (bumping a sub-seed) until parse and assumption checks
    pass, so the returned document is always valid.
    """
    for attempt in range(60):
        doc = _candidate_document(seed * 1000 + attempt)
        if doc is None:
            continue
        try:
            bundle = parse_bundle(doc)
        except EngineError:
            continue
        if not check_assumptions(bundle)["ok"]:
            continue
        if not all(d.coupling_ok for d in bundle.data):
            continue
        try:
            from .transform import transformed_rank

            transformed_rank(bundle)
        except EngineError:
            continue
        return doc
    raise EngineError("random bundle generation failed", {"seed": seed})


def _candidate_document(seed: int):
    rng = random.Random(seed)
    r = rng.choice([2, 3])
    n = rng.choice([1, 2])
    locations = rng.sample(_LOCATIONS, n)

    # group columns by leading-term eigenvalue; couplings stay inside groups
    group_count = rng.choice([1, r])
    if group_count == 1:
        groups = [list(range(r))]
    else:
        groups = [[s] for s in range(r)]
    a_values = rng.sample(_EIGENVALUES[:6], len(groups))

    # residues: lambda per (puncture, column)
    lam = [[rng.choice(_EIGENVALUES) for _ in range(r)] for _ in range(n)]
    # optionally a zero eigenvalue on a weight-zero level (needs n = 2 so the
    # infinity spectrum can stay nonzero)
    if n == 2 and rng.random() < 0.4:
        lam[0][rng.randrange(r)] = qi(0)

    # weights: single level per puncture most of the time
    weights = []
    flags = []
    for i in range(n + 1):  # finite punctures then infinity
        if r >= 2 and rng.random() < 0.3:
            w0 = rng.choice([Fraction(0), Fraction(1, 4), Fraction(1, 3)])
            w1 = w0 + rng.choice([Fraction(1, 3), Fraction(1, 2), Fraction(1, 4)])
            if w1 >= 1:
                w1 = (w0 + 1) / 2
            dim1 = rng.randint(1, r - 1)
            weights.append([w0, w1])
            flags.append(dim1)
        else:
            weights.append([rng.choice(_WEIGHT_POOL)])
            flags.append(None)

    # columns on positive-weight levels need nonzero eigenvalues; enforce
    for i in range(n):
        wlist = weights[i]
        d1 = flags[i]
        for s in range(r):
            level = 0
            if d1 is not None and s < d1:
                level = 1
            if wlist[level] > 0 and lam[i][s].is_zero():
                lam[i][s] = rng.choice(_EIGENVALUES[:4])

    # the order-one term at infinity is the sum of the residues; item (1)
    for s in range(r):
        total = qi(0)
        for i in range(n):
            total = total + lam[i][s]
        if total.is_zero():
            lam[0][s] = lam[0][s] + qi(1)

    # couplings: same group, same lambda at the coupled puncture, upper
    # triangular, never on a zero eigenvalue
    couplings = []
    if rng.random() < 0.55:
        group = rng.choice([g for g in groups if len(g) >= 2] or [None])
        if group:
            s, t = sorted(rng.sample(group, 2))
            i = rng.randrange(n)
            if not lam[i][s].is_zero():
                lam[i][t] = lam[i][s]
                # positive-weight levels must keep a nonzero spectrum; fine
                couplings.append((i, s, t, rng.choice([qi(1), qi(-1), qi(2)])))
    if r == 3 and n == 1 and rng.random() < 0.25 and group_count == 1:
        # full Jordan block: exercises k(s) < -1 lattice cases
        val = rng.choice(_EIGENVALUES[:4])
        lam[0] = [val, val, val]
        couplings = [(0, 0, 1, qi(1)), (0, 1, 2, qi(1))]

    # assemble the matrix entries
    entries = [["0"] * r for _ in range(r)]
    a_of_col = {}
    for a_val, group in zip(a_values, groups):
        for s in group:
            a_of_col[s] = a_val
    for s in range(r):
        entries[s][s] = _entry_string(
            a_of_col[s] / qi(2), [lam[i][s] for i in range(n)], locations
        )
    for i, s, t, c in couplings:
        if a_of_col[s] != a_of_col[t]:
            return None
        prev = entries[s][t]
        term = f"({format_qi(c)})/(z-({locations[i]}))"
        entries[s][t] = term if prev == "0" else f"{prev} + {term}"

    punctures = []
    for i in range(n):
        p = {"location": str(locations[i]), "weights": [str(w) for w in weights[i]]}
        d1 = flags[i]
        if d1 is None or len(weights[i]) == 1:
            p["flag"] = []
            p["weights"] = [str(weights[i][0])]
        else:
            basis = [["1" if c == k else "0" for c in range(r)] for k in range(d1)]
            p["flag"] = [basis]
        punctures.append(p)
    winf = weights[n]
    dinf = flags[n]
    pinf = {"location": "inf", "weights": [str(w) for w in winf]}
    if dinf is None or len(winf) == 1:
        pinf["flag"] = []
        pinf["weights"] = [str(winf[0])]
    else:
        basis = [["1" if c == k else "0" for c in range(r)] for k in range(dinf)]
        pinf["flag"] = [basis]
    punctures.append(pinf)

    return {"rank": r, "punctures": punctures, "higgs": entries}


def random_corpus(count: int, base_seed: int = 2024):
    """`count` valid bundle documents, deterministic in base_seed."""
    return [random_bundle_document(base_seed + k) for k in range(count)]
