"""Smoke test for the qcsp_py extension module.

Build it first:
    cargo build -p qcsp-python --features extension-module --release
then run `python3 python/smoke_test.py` from the repository root. If the
module is not installed, the freshly built library is loaded from target/.
"""

import importlib.util
import pathlib
import shutil
import sys
import tempfile


def load():
    try:
        import qcsp_py

        return qcsp_py
    except ImportError:
        pass
    root = pathlib.Path(__file__).resolve().parent.parent
    for profile in ("release", "debug"):
        lib = root / "target" / profile / "libqcsp_py.so"
        if lib.exists():
            dest = pathlib.Path(tempfile.mkdtemp()) / "qcsp_py.so"
            shutil.copy(lib, dest)
            spec = importlib.util.spec_from_file_location("qcsp_py", dest)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit("qcsp_py not built; see the module docstring")


def main():
    q = load()

    r = q.solve("algebra IA\nvars X Y\nX { s f } Y\n")
    assert r["satisfiable"] is True
    assert r["witness"] == {"X": "[0, 1]", "Y": "[0, 2]"}, r

    cycle = "algebra IA\nvars X Y Z\nX { p } Y\nY { p } Z\nZ { p } X\n"
    for method in ("auto", "bruteforce", "backtracking", "ordhorn", "translate:ia.J"):
        assert q.solve(cycle, method=method)["satisfiable"] is False, method

    r = q.solve("algebra RA\nvars A B\nA { (s,p) } B\n", seed=4)
    assert r["satisfiable"] and r["seed"] == 4

    out = q.translate("algebra IA\nvars X Y\nX { s } Y\n", "ia.J")
    assert out.startswith("algebra POINT\nvars X.1 X.2 Y.1 Y.2\n"), out

    assert q.count_models("x != y \\/ u = v") == 65

    pp = q.preserved("x != y \\/ u = v", "pp")
    assert pp["status"] == "violated"
    assert (pp["first"], pp["second"], pp["result"]) == (
        [-1, -1, 2, 2],
        [1, 2, 1, 2],
        [-1, -1, 1, 2],
    ), pp

    report = q.classify(["x != y \\/ u = v"])
    rel = report["relations"][0]
    assert rel["ll_horn"] and rel["dual_ll_horn"]
    assert rel["maximal_classes"] == ["ll-Horn", "dual-ll-Horn"]

    h = q.check_homotopy("ia", samples=50, seed=1)
    assert h["counterexample"] is None and h["checked"] == 50

    try:
        q.solve("algebra IA\nvars X Y\nX { zz } Y\n")
    except ValueError as e:
        assert "line 3" in str(e)
    else:
        raise AssertionError("bad code accepted")

    print("qcsp_py smoke test passed")


if __name__ == "__main__":
    main()
