"""Verification harness: aggregation, witnesses, blocking, determinism."""

from parahiggs.bundle import parse_bundle
from parahiggs.corpus import (
    b_zero_eigenvalue_document,
    claim21_counterexample_document,
    ex1_document,
    exn_document,
)
from parahiggs.verify import CHECK_ORDER, verify_all


class TestVerifyAll:
    def test_ex1_all_pass(self):
        report = verify_all(parse_bundle(ex1_document()), depth=3)
        assert report.all_pass
        assert [e["check"] for e in report.entries] == CHECK_ORDER

    def test_determinism(self):
        a = verify_all(parse_bundle(ex1_document()), depth=4).to_dict()
        b = verify_all(parse_bundle(ex1_document()), depth=4).to_dict()
        assert a == b

    def test_depth_changes_fibers_not_verdicts(self):
        a = verify_all(parse_bundle(ex1_document()), depth=2)
        b = verify_all(parse_bundle(ex1_document()), depth=5)
        assert a.all_pass and b.all_pass

    def test_exn_blocks_downstream(self):
        report = verify_all(parse_bundle(exn_document()), depth=2)
        verdicts = {e["check"]: e["verdict"] for e in report.entries}
        assert verdicts["assumption-2.6"] == "fail"
        assert verdicts["prop-vanishing"] == "blocked"
        assert verdicts["rank-formula"] == "blocked"
        entry = next(e for e in report.entries if e["check"] == "assumption-2.6")
        items = {f["item"] for f in entry["witness"]["failures"]}
        assert items == {2}

    def test_b_zero_fails_item_one(self):
        report = verify_all(parse_bundle(b_zero_eigenvalue_document()), depth=2)
        entry = next(e for e in report.entries if e["check"] == "assumption-2.6")
        assert entry["verdict"] == "fail"
        assert {f["item"] for f in entry["witness"]["failures"]} == {1}

    def test_claim21_counterexample(self):
        report = verify_all(parse_bundle(claim21_counterexample_document()), depth=2)
        verdicts = {e["check"]: e["verdict"] for e in report.entries}
        assert verdicts["residue-compatibility"] == "fail"
        assert verdicts["claim-2.1"] == "fail"
        entry = next(e for e in report.entries if e["check"] == "claim-2.1")
        assert entry["witness"]["witness"]["vector"] == ["1", "1"]
        # everything downstream is blocked, not silently skipped
        assert verdicts["rank-formula"] == "blocked"

    def test_no_check_missing(self):
        for doc in (ex1_document(), exn_document(), claim21_counterexample_document()):
            report = verify_all(parse_bundle(doc), depth=2)
            assert [e["check"] for e in report.entries] == CHECK_ORDER
