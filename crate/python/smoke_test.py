"""Smoke test for the `apq` extension module.

Build it first:

    cargo build --release -p apq-py --features extension-module

then run `python3 python/smoke_test.py` from the repository root (or pass
the path of the built library as the first argument).
"""

import importlib.machinery
import importlib.util
import json
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load(path=None):
    candidates = [pathlib.Path(path)] if path else [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libapq.so", "libapq.dylib", "apq.dll")
    ]
    for lib in candidates:
        if lib.exists():
            loader = importlib.machinery.ExtensionFileLoader("apq", str(lib))
            spec = importlib.util.spec_from_file_location("apq", lib, loader=loader)
            module = importlib.util.module_from_spec(spec)
            loader.exec_module(module)
            return module
    sys.exit("apq extension not found; build it with cargo first")


def main():
    apq = load(sys.argv[1] if len(sys.argv) > 1 else None)

    q = apq.Quiver(2, 3)
    assert (q.p, q.q, q.num_vertices) == (2, 3, 5)
    assert q.null_root() == [1, 1, 1, 1, 1]
    assert q.euler_form(q.null_root(), q.null_root()) == 0

    m = q.realize("tP(3,1)")
    assert m.dims == [4, 3, 3, 3, 3]
    assert m.sincere() and m.end_dim() == 1 and m.self_ext() == 0
    assert json.loads(m.to_json())["p"] == 2

    assert q.hom_dim("P(4)", "Ehom(1/1)") == 1
    assert q.ext_dim("Ehom(2)", "Ehom(2)") == 1
    assert q.tau("F(1)", 2) == "Einf(1)"

    ok = q.is_stratifying("S(4),F*,G*,P(0)")
    assert ok.passed and bool(ok)
    bad = q.is_stratifying("S(0),S(0)")
    assert not bad.passed
    assert bad.violations[0][:4] == ("hom", 2, 1, 1)
    assert json.loads(bad.json)["passed"] is False

    assert q.enumerate_y("postprojective", 0) == ["P(0)", "P(4)"]
    assert q.predicted_y("preinjective", 3) == ["tI(1,3)", "tI(2,1)", "tI(3,2)"]
    assert q.find_completion("P(4)", 6) == ["tP(1,2)"]
    assert q.predicted_completion("P(4)") == "tP(1,2)"

    report = q.check_theorem(12)
    assert report.passed, report.violations

    try:
        apq.Quiver(0, 3)
    except ValueError:
        pass
    else:
        raise AssertionError("p = 0 accepted")
    try:
        q.realize("Q(1)")
    except ValueError as e:
        assert "position" in str(e)
    else:
        raise AssertionError("bad descriptor accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
