"""Smoke test for the ordlab_py extension.

Builds the extension with cargo when ORDLAB_PY_LIB is unset, copies it next
to a temporary package path and imports it.
"""

import os
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture(scope="session")
def ordlab(tmp_path_factory):
    lib = os.environ.get("ORDLAB_PY_LIB")
    if lib is None:
        subprocess.run(
            ["cargo", "build", "-p", "ordlab-py", "--features", "extension-module"],
            cwd=ROOT,
            check=True,
        )
        lib = ROOT / "target" / "debug" / "libordlab_py.so"
    dest = tmp_path_factory.mktemp("ext")
    shutil.copy(lib, dest / "ordlab_py.so")
    sys.path.insert(0, str(dest))
    import ordlab_py

    return ordlab_py


def test_parse_and_balls(ordlab):
    g = ordlab.Group("gens x y; rel x y x^-1 y; peripheral T = x^2, y;")
    assert g.family == "KleinBottle"
    assert g.generators == ["x", "y"]
    assert g.ball_sizes(3) == [1, 5, 13, 25]
    assert "o(x,y)" in g.order_names()


def test_slopes_and_detection(ordlab):
    k = ordlab.Group.klein_bottle()
    est = k.slope("o")
    assert est["exact"] and est["display"].startswith("0/1")
    assert k.detect("0", "o", level="regular")["status"] == "certified"
    t = ordlab.Group.trefoil()
    assert t.slope("lex++")["display"].startswith("0/1")
    assert t.sign("lex++", "u") in "+-"


def test_cones_and_certificates(ordlab):
    z = ordlab.Group.zn(2)
    assert z.count_cones(1, [("T", "0")]) == (4, True)
    assert ordlab.Group("gens x; rel x^2;").certify_nonorderable(2) == 1
    assert ordlab.transport([[0, 1], [1, 0]], "0") == "∞"


def test_errors(ordlab):
    with pytest.raises(ValueError):
        ordlab.Group("gens x; rel y;")
    with pytest.raises(ValueError):
        ordlab.Group.klein_bottle().slope("nope")
