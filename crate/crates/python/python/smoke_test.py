"""Smoke test for the lie_hermitian_py extension."""

import json

import lie_hermitian_py as lh

BTPV1 = {
    "schema": "lie-hermitian/v1",
    "n": 3,
    "family": "btpv1",
    "payload": {"v2": 1.0, "a": [[0.0, 1.0]]},
}


def main():
    spec = json.dumps(BTPV1)
    report = json.loads(lh.check(spec))
    flags = report["report"]["flags"]
    assert flags["btp"] and flags["bkl"] and not flags["balanced"], flags

    cls = json.loads(lh.classify(spec))["classification"]
    assert cls["family"] == "v1", cls

    tens = json.loads(lh.tensors(spec))
    assert "tensors" in tens

    suite = json.loads(lh.sample("almost_abelian", count=20, seed=7))
    assert all(c["failed"] == 0 for c in suite["checks"]), suite["checks"]

    ver = json.loads(lh.verify_paper(filter="lemma9"))
    assert ver["passed"], ver

    try:
        lh.check("{not json")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed spec accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
