"""Structured report documents: everything exact, numbers as p/q strings.

Rational functions are serialized as coefficient lists (degree-indexed exact
strings) so no parser is needed to re-read them; the bundle echo keeps the
original expression strings so a report can be fed back in as input.
"""

from __future__ import annotations

from fractions import Fraction

from .bundle import (
    ParabolicHiggsBundle,
    check_assumptions,
    check_residue_compatibility,
    connection_side_data,
    frame_indices,
)
from .lattice import build_FG, jump_candidates
from .points import INFINITY, PointOnLine
from .qi import GaussianRational, format_qi
from .ratfunc import RationalFunction
from .roots import poly_gaussian_roots
from .transform import (
    SpectralCurve,
    TransformedHiggsBundle,
    TransformedParabolic,
    spectral_curve,
    transform,
    transformed_parabolic,
    transformed_residues,
)
from .verify import verify_all


def q_str(x) -> str:
    if isinstance(x, GaussianRational):
        return format_qi(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    raise TypeError(f"not an exact number: {x!r}")


def rf_doc(f: RationalFunction) -> dict:
    return {
        "var": f.var,
        "num": [q_str(c) for c in f.num.coeffs],
        "den": [q_str(c) for c in f.den.coeffs],
    }


def matrix_doc(m) -> list:
    out = []
    for row in m:
        orow = []
        for e in row:
            if isinstance(e, RationalFunction):
                orow.append(rf_doc(e))
            else:
                orow.append(q_str(e))
        out.append(orow)
    return out


def bipoly_doc(p) -> dict:
    terms = {}
    for (a, b), c in sorted(p.terms.items()):
        terms[f"{p.var1}^{a}*{p.var2}^{b}"] = q_str(c)
    return {"vars": [p.var1, p.var2], "terms": terms}


def validation_doc(bundle: ParabolicHiggsBundle) -> dict:
    compat = check_residue_compatibility(bundle)
    assumptions = check_assumptions(bundle)
    return {
        "rank": bundle.rank,
        "punctures": [str(p.location) for p in bundle.punctures],
        "residue_compatibility": {str(k): v for k, v in compat.items()},
        "assumptions": assumptions,
        "claim_2_1": {
            "ok": bundle.data[0].claim21_ok,
            "witness": bundle.data[0].claim21_witness,
        },
        "block_coupling": {
            str(i): {"ok": bundle.data[i].coupling_ok, "witness": bundle.data[i].coupling_witness}
            for i in range(len(bundle.punctures))
        },
    }


def residues_doc(bundle: ParabolicHiggsBundle) -> dict:
    from .bundle import residue

    out = {"per_puncture": []}
    for i in range(len(bundle.punctures)):
        data = bundle.data[i]
        entry = {
            "puncture": i,
            "location": str(bundle.punctures[i].location),
        }
        if i == 0:
            entry["A"] = matrix_doc(data.a_matrix)
            entry["B"] = matrix_doc(data.b_matrix)
        else:
            entry["residue"] = matrix_doc(residue(bundle, i))
        if data.frame is not None:
            entry["frame"] = matrix_doc(data.frame)
            entry["levels"] = [
                {
                    "level": lv.level,
                    "weight": q_str(lv.weight),
                    "dim": lv.dim,
                    "eigenvalues": [q_str(e) for e in lv.eigenvalues],
                    "semisimple_part": matrix_doc(lv.semisimple),
                    "nilpotent_part": matrix_doc(lv.nilpotent),
                }
                for lv in data.split.levels
            ]
        out["per_puncture"].append(entry)
    out["frame_table"] = [
        {
            "puncture": row.puncture,
            "column": row.column,
            "j": row.level,
            "k": row.weight_index,
            "lambda": q_str(row.eigenvalue),
            **({"a": q_str(row.a_eigenvalue)} if row.a_eigenvalue is not None else {}),
        }
        for row in frame_indices(bundle)
    ]
    conn = connection_side_data(bundle)
    out["connection_side"] = {
        "A": matrix_doc(conn["A"]),
        "table": [
            {
                "puncture": r["puncture"],
                "column": r["column"],
                "alpha": q_str(r["alpha"]),
                "lambda": q_str(r["lambda"]),
                "beta": q_str(r["beta"]),
                "residue_connection": q_str(r["residue_connection"]),
            }
            for r in conn["table"]
        ],
    }
    out["k_convention"] = "uniform"
    return out


def lattice_doc(bundle: ParabolicHiggsBundle) -> dict:
    f_lat, g_lat = build_FG(bundle)
    return {
        "F_twists": [list(r) for r in f_lat.twists],
        "G_twists": [list(r) for r in g_lat.twists],
        "jump_candidates": [q_str(a) for a in jump_candidates(bundle)],
    }


def curve_doc(curve: SpectralCurve) -> dict:
    return {
        "P": bipoly_doc(curve.p),
        "checks": curve.checks,
        "branches_at_infinity_hat": [
            {
                "puncture": b.puncture,
                "lambda_from_curve": q_str(b.eigenvalue),
                "leading": q_str(b.leading),
                "multiplicity": b.multiplicity,
                "subleading": q_str(b.subleading) if b.subleading is not None else None,
                "branch_constant_convention": "zeta*(z-z_i) -> leading; the paper states lambda, the twist theta-(zeta/2)dz gives 2*lambda",
            }
            for b in curve.branch_table
        ],
    }


def transform_doc(t: TransformedHiggsBundle) -> dict:
    residues = transformed_residues(t)
    return {
        "rank": t.rank,
        "transformed_punctures": [q_str(z) for z in t.p_points],
        "provenance": t.provenance,
        "theta_hat": matrix_doc(t.theta_hat),
        "infinity_frame": matrix_doc(t.infinity_frame),
        "theta_at_infinity_hat": matrix_doc(t.theta_infinity),
        "checks": t.checks,
        "residues": {
            label: {
                "matrix": matrix_doc(data["matrix"]),
                "eigenvalues": [[q_str(v), m] for v, m in data["eigenvalues"]],
                "nonsplit_cofactor_degree": data["cofactor_degree"],
            }
            for label, data in residues.residues.items()
        },
        "A_tilde": matrix_doc(residues.a_tilde),
        "B_tilde": matrix_doc(residues.b_tilde),
        "A_tilde_semisimple": residues.a_tilde_semisimple,
        "A_tilde_eigenvalues_in_half_punctures": residues.a_tilde_eigenvalues_expected,
    }


def parabolic_doc(tp: TransformedParabolic) -> dict:
    return {
        "divisor": tp.divisor,
        "jump_candidates": [q_str(a) for a in tp.jump_candidates],
        "points": {
            label: {
                "weights": [q_str(w) for w in pt.weights],
                "chain_dims": pt.flag_dims,
                "flags": [[[q_str(x) for x in v] for v in span] for span in pt.flags],
                "residue_preserves_flags": pt.residue_preserves,
            }
            for label, pt in tp.points.items()
        },
        "family_valuations": {
            label: {q_str(a): vals for a, vals in sorted(d.items())}
            for label, d in tp.family_valuations.items()
        },
        "checks": tp.checks,
        "weight_convention": "jumps reported in [0,1); the period twist at 1 is imposed",
    }


def full_report(bundle: ParabolicHiggsBundle, depth: int = 5) -> dict:
    report = {"bundle": bundle.document, "validation": validation_doc(bundle)}
    report["residues"] = residues_doc(bundle)
    assumptions = check_assumptions(bundle)
    if assumptions["ok"]:
        report["lattices"] = lattice_doc(bundle)
        curve = spectral_curve(bundle)
        report["spectral"] = curve_doc(curve)
        t = transform(bundle)
        report["transform"] = transform_doc(t)
        report["parabolic"] = parabolic_doc(transformed_parabolic(bundle, t))
    report["verification"] = verify_all(bundle, depth).to_dict()
    return report


# ---------------------------------------------------------------------------
# curve samples (CSV for external plotting)
# ---------------------------------------------------------------------------


def _decimal(x: Fraction, digits: int = 15) -> str:
    sign = "-" if x < 0 else ""
    x = abs(x)
    whole = x.numerator // x.denominator
    rem = x.numerator - whole * x.denominator
    frac_digits = []
    for _ in range(digits):
        rem *= 10
        d = rem // x.denominator
        frac_digits.append(str(d))
        rem -= d * x.denominator
        if rem == 0:
            break
    frac = "".join(frac_digits)
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def curve_samples(curve: SpectralCurve, count: int):
    """Sample points on real-z slices: exact Q(i)-roots of P(z0, zeta).

    Returns CSV rows (z_re, z_im, zeta_re, zeta_im) as decimal strings
    rendered exactly from the rationals.
    """
    rows = []
    k = 0
    while len(rows) < count and k < 40 * count + 400:
        z0 = GaussianRational(Fraction(k - (k % 4) * 7, 4))
        k += 1
        slice_poly = curve.p.eval_first(z0)
        if slice_poly.is_zero() or slice_poly.degree < 1:
            continue
        roots, _ = poly_gaussian_roots(slice_poly)
        for zeta0, _mult in roots:
            rows.append(
                (
                    _decimal(z0.re),
                    _decimal(z0.im),
                    _decimal(zeta0.re),
                    _decimal(zeta0.im),
                )
            )
            if len(rows) >= count:
                break
    return rows


def curve_samples_csv(curve: SpectralCurve, count: int) -> str:
    lines = ["z_re,z_im,zeta_re,zeta_im"]
    for row in curve_samples(curve, count):
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"
