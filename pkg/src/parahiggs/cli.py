"""Command-line front end.

Subcommands: validate | residues | spectral | transform | parabolic | verify
| report. Input is a bundle document (JSON); a previously emitted report is
also accepted (its bundle echo is used). Output is a structured JSON document
with all numbers exact; exit codes: 0 success, 1 domain error with witness,
2 usage or parse error. PARAHIGGS_VERBOSITY=summary|full tunes text output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bundle import parse_bundle
from .errors import EngineError, ParseError
from . import report as rep
from .transform import spectral_curve, transform, transformed_parabolic
from .verify import verify_all


def _load_document(path):
    try:
        with open(path) as handle:
            doc = json.load(handle)
    except OSError as err:
        raise ParseError(f"cannot read input: {err}")
    except json.JSONDecodeError as err:
        raise ParseError(f"input is not valid JSON: {err}")
    if isinstance(doc, dict) and "bundle" in doc and "higgs" not in doc:
        doc = doc["bundle"]
    return doc


def _emit(document, args):
    text = json.dumps(document, indent=2, sort_keys=False)
    if args.output:
        with open(args.output, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def _summary_lines(doc):
    lines = []
    if "validation" in doc:
        ok = doc["validation"]["assumptions"]["ok"]
        lines.append(f"assumptions: {'pass' if ok else 'FAIL'}")
    if "transform" in doc:
        t = doc["transform"]
        lines.append(
            f"transformed rank {t['rank']}, punctures {t['transformed_punctures']}, path {t['provenance']}"
        )
    if "verification" in doc:
        entries = doc["verification"]["entries"]
        for e in entries:
            lines.append(f"{e['check']:<24} {e['verdict']}")
        lines.append("all-pass" if doc["verification"]["all_pass"] else "FAILURES PRESENT")
    return lines


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="parahiggs",
        description="Exact Nahm transform engine for parabolic Higgs bundles on the line",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("validate", "residues", "spectral", "transform", "parabolic", "verify", "report"):
        p = sub.add_parser(name)
        p.add_argument("input", help="bundle document (JSON), or a report to re-ingest")
        p.add_argument("-o", "--output", default=None, help="write the document here instead of stdout")
        p.add_argument("--format", choices=("structured", "text"), default="structured")
        if name in ("verify", "report"):
            p.add_argument("--depth", type=int, default=5)
        if name == "spectral":
            p.add_argument("--emit-curve-samples", type=int, default=None, metavar="N")
            p.add_argument("--samples-output", default=None, help="CSV path (default: alongside output)")

    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0

    try:
        doc = _load_document(args.input)
        bundle = parse_bundle(doc)
    except ParseError as err:
        _emit_error(err, args, stage="parse")
        return 2
    except EngineError as err:
        _emit_error(err, args, stage="validate")
        return 1

    try:
        out = {"bundle": bundle.document}
        if args.command == "validate":
            out["validation"] = rep.validation_doc(bundle)
        elif args.command == "residues":
            out["validation"] = rep.validation_doc(bundle)
            out["residues"] = rep.residues_doc(bundle)
        elif args.command == "spectral":
            curve = spectral_curve(bundle)
            out["spectral"] = rep.curve_doc(curve)
            if args.emit_curve_samples:
                csv_text = rep.curve_samples_csv(curve, args.emit_curve_samples)
                csv_path = args.samples_output or (
                    (args.output or "curve") + ".samples.csv"
                )
                with open(csv_path, "w") as handle:
                    handle.write(csv_text)
                out["spectral"]["samples_csv"] = csv_path
        elif args.command == "transform":
            t = transform(bundle)
            out["transform"] = rep.transform_doc(t)
        elif args.command == "parabolic":
            t = transform(bundle)
            out["transform"] = rep.transform_doc(t)
            out["parabolic"] = rep.parabolic_doc(transformed_parabolic(bundle, t))
        elif args.command == "verify":
            out["validation"] = rep.validation_doc(bundle)
            out["verification"] = verify_all(bundle, args.depth).to_dict()
        elif args.command == "report":
            out = rep.full_report(bundle, args.depth)
    except EngineError as err:
        _emit_error(err, args, stage=args.command)
        return 1

    if args.format == "text":
        verbosity = os.environ.get("PARAHIGGS_VERBOSITY", "summary")
        lines = _summary_lines(out)
        body = "\n".join(lines) if lines else "ok"
        if verbosity == "full":
            body += "\n" + json.dumps(out, indent=2)
        if args.output:
            with open(args.output, "w") as handle:
                handle.write(body + "\n")
        else:
            print(body)
    else:
        _emit(out, args)

    if args.command == "verify" and not out["verification"]["all_pass"]:
        return 1
    return 0


def _emit_error(err, args, stage):
    document = {
        "error": {
            "stage": stage,
            "type": type(err).__name__,
            "message": str(err),
            "witness": getattr(err, "witness", {}),
        }
    }
    text = json.dumps(document, indent=2, default=str)
    if getattr(args, "output", None):
        with open(args.output, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text, file=sys.stderr)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
