import io
import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from convexrope import cli
from convexrope.fixtures import (
    FAMILIES,
    PolygonFile,
    PolygonFileError,
    dumps,
    generate_fixture,
    loads,
    write,
)
from convexrope.polygon import convex_hull, is_x_monotone_boundary, validate
from convexrope.report import parse_svg_rope

from conftest import SPIRAL, SQUARE


def run(*argv):
    out = io.StringIO()
    code = cli.run([str(a) for a in argv], out=out)
    return code, out.getvalue()


# ---------------------------------------------------------------------------
# fixtures


def test_convex_quadrilateral():
    p = generate_fixture(4, 9, "convex").polygon()
    assert p.n == 4
    assert convex_hull(p).vertices == p.vertices


def test_generation_deterministic():
    a = dumps(generate_fixture(100, 42, "monotone"))
    b = dumps(generate_fixture(100, 42, "monotone"))
    assert a == b
    assert generate_fixture(100, 42, "monotone").digest() == (
        "b57ca8725f839770ef034841e43e2e9ad1a122db86afea46c97d6b62afdae3c7"
    )


def test_large_fixture_pinned():
    pf = generate_fixture(3000, 7, "monotone")
    assert pf.polygon().n == 3000
    assert pf.digest() == "c8e18b52ba98c81399b2e111fb6fdbdd6905b6024b5edc339f18710407ab73bc"


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [3, 5, 17, 64, 301])
def test_family_contracts(family, n):
    pf = generate_fixture(n, n * 7, family)
    p = validate(pf.vertices)
    assert p.vertices == pf.vertices
    assert all(float(x).is_integer() and float(y).is_integer() for x, y in p.vertices)
    assert 0 <= pf.b < p.n
    assert pf.vertices[pf.b] in convex_hull(p).vertices
    if family in ("monotone", "comb"):
        assert is_x_monotone_boundary(p)
    if family == "convex":
        assert convex_hull(p).n == p.n


def test_generate_rejects_bad_args():
    with pytest.raises(ValueError):
        generate_fixture(2, 0, "convex")
    with pytest.raises(ValueError):
        generate_fixture(10, 0, "spiral")


coords = st.one_of(st.integers(-10 ** 6, 10 ** 6).map(float), st.floats(-1e6, 1e6, allow_nan=False))


@settings(max_examples=80)
@given(st.lists(st.tuples(coords, coords), min_size=3, max_size=20),
       st.one_of(st.none(), st.integers(0, 2)),
       st.one_of(st.none(), st.tuples(coords, coords)))
def test_file_round_trip(verts, b, ray):
    pf = PolygonFile(tuple(verts), b=b, ray=ray)
    back = loads(dumps(pf))
    assert back.vertices == pf.vertices
    assert back.b == b and back.ray == ray


@pytest.mark.parametrize(
    "text",
    ["b 1\n0 0\n1 0\n0 1\n", "rope-polygon v1\n0 0\n1 zero\n", "rope-polygon v1\nb 7\n0 0\n1 0\n0 1\n",
     "rope-polygon v1\n0 0\n1 0 2\n"],
)
def test_bad_files(text):
    with pytest.raises(PolygonFileError):
        loads(text)


def test_comments_and_blank_lines():
    pf = loads("# hi\nrope-polygon v1\n\nb 0   # the apex\n0 0\n2 0\n1 1.5\n")
    assert pf.b == 0 and pf.vertices[2] == (1.0, 1.5)


# ---------------------------------------------------------------------------
# command line


@pytest.fixture()
def square_file(tmp_path):
    f = tmp_path / "square.txt"
    write(PolygonFile(tuple(SQUARE), b=2), f)
    return f


@pytest.fixture()
def comb_file(tmp_path):
    f = tmp_path / "comb.txt"
    write(generate_fixture(40, 3, "comb"), f)
    return f


def parse_path(text):
    lines = text.splitlines()
    k = lines.index("path:")
    pts = []
    for ln in lines[k + 1:]:
        if not ln.startswith("  "):
            break
        x, y = ln.split()
        pts.append((float(x), float(y)))
    return pts


def test_square_converges_to_hull_chain(square_file):
    code, out = run("--input", square_file, "--cuts", 1, "--epsilon", 1e-9)
    assert code == 0
    assert "status: converged" in out
    assert parse_path(out) == [(1, 1), (0, 1), (0, 0), (1, 0), (1, 1)]


def test_exit_codes(tmp_path, square_file, comb_file, capsys):
    spiral = tmp_path / "spiral.txt"
    write(PolygonFile(tuple(SPIRAL), b=6), spiral)
    assert run("--input", spiral)[0] == cli.EXIT_NOT_VISIBLE
    assert run("--input", spiral, "--b-index", 2)[0] == cli.EXIT_NON_MONOTONE
    bow = tmp_path / "bow.txt"
    bow.write_text("rope-polygon v1\nb 0\n0 0\n2 2\n2 0\n0 2\n")
    assert run("--input", bow)[0] == cli.EXIT_INVALID
    assert run("--input", tmp_path / "missing.txt")[0] == cli.EXIT_INVALID
    assert run("--input", square_file, "--b-index", 9)[0] == cli.EXIT_INVALID
    assert run("--input", square_file, "--epsilon", 0)[0] == cli.EXIT_INVALID
    assert run("--input", comb_file, "--cuts", 4, "--epsilon", 1e-12, "--max-iters", 2)[0] == cli.EXIT_CAPPED
    assert run("--input", comb_file, "--cuts", 4)[0] == 0
    assert run()[0] == 2
    with pytest.raises(SystemExit) as e:
        run("--cuts", "x")
    assert e.value.code == 2
    err = capsys.readouterr().err
    assert "not visible from infinity" in err and "not x-monotone" in err


def test_clockwise_input_keeps_indices(tmp_path):
    f = tmp_path / "cw.txt"
    cw = tuple(reversed(SQUARE))  # (0,1) (1,1) (1,0) (0,0)
    write(PolygonFile(cw, b=1), f)  # b = (1, 1)
    code, out = run("--input", f, "--cuts", 2, "--epsilon", 1e-9)
    assert code == 0
    pts = parse_path(out)
    assert pts[0] == pts[-1] == (1.0, 1.0)


def test_manual_cut_file(tmp_path, square_file):
    from convexrope.domain import build_domain
    from convexrope.partition import make_vertical_partition

    d = build_domain(validate(SQUARE), 2)
    auto = make_vertical_partition(d, 2)
    cuts = tmp_path / "cuts.txt"
    cuts.write_text("".join(f"{s.u[0]!r} {s.u[1]!r} {s.v[0]!r} {s.v[1]!r}\n" for s in auto.segments))
    code, out = run("--input", square_file, "--cut-file", cuts)
    assert code == 0
    bad = tmp_path / "bad.txt"
    top = d.rect[2][1]
    bad.write_text(f"0.2 {top!r} 0.8 1\n0.8 {top!r} 0.2 1\n")
    assert run("--input", square_file, "--cut-file", bad)[0] == cli.EXIT_INVALID


def test_a_index(tmp_path):
    f = tmp_path / "hex.txt"
    write(PolygonFile(((0, 0), (4, 0), (6, 3), (4, 6), (0, 6), (-2, 3)), b=3), f)
    code, out = run("--input", f, "--a-index", 1, "--cuts", 2)
    assert code == 0
    assert parse_path(out) == [(4, 0), (6, 3), (4, 6)]


def test_report_and_svg(tmp_path, comb_file):
    rep = tmp_path / "run.json"
    svg = tmp_path / "run.svg"
    code, out = run("--input", comb_file, "--cuts", 5, "--epsilon", 1e-9, "--report", rep, "--svg", svg,
                    "--oracle", "--seed", 3)
    assert code == 0
    data = json.loads(rep.read_text())
    assert data["status"] == "converged"
    assert data["config"] == {"n_cuts": 5, "epsilon": 1e-9, "max_iterations": 10000, "seed": 3}
    lengths = [r["length"] for r in data["table"]]
    assert len(lengths) == data["iterations"]
    assert all(b <= a + 1e-9 for a, b in zip(lengths, lengths[1:]))
    assert data["oracle"]["relative_gap"] <= 1e-6
    assert (tmp_path / "run.csv").read_text().splitlines()[0] == "j,length,max_shift,violated"
    assert (tmp_path / "run_convergence.png").read_bytes()[:4] == b"\x89PNG"
    text = svg.read_text()
    assert text.count('id="cut-') == 5
    assert text.count('id="rope"') == 1
    assert text.count('id="shoot-') == 5
    assert 'id="domain"' in text
    rope = parse_svg_rope(text)
    final = parse_path(out)
    assert len(rope) == len(final)
    for p, q in zip(rope, final):
        assert math.dist(p, q) <= 1e-9 * max(1.0, abs(q[0]), abs(q[1]))
    # identical inputs give identical bytes
    svg2 = tmp_path / "again.svg"
    run("--input", comb_file, "--cuts", 5, "--epsilon", 1e-9, "--svg", svg2, "-q")
    assert svg2.read_bytes() == svg.read_bytes()


def test_convex_svg_count_contract(tmp_path):
    f = tmp_path / "cvx.txt"
    write(generate_fixture(20, 1, "convex"), f)
    svg = tmp_path / "c.svg"
    assert run("--input", f, "--cuts", 7, "--svg", svg, "-q")[0] == 0
    text = svg.read_text()
    assert text.count('id="cut-') == 7 and text.count('id="rope"') == 1


def test_epsilon_sweep(tmp_path, comb_file):
    rep = tmp_path / "sweep.json"
    code, out = run("--input", comb_file, "--cuts", 6, "--epsilon-sweep", "1e0:1e-9", "--report", rep)
    assert code == 0
    rows = json.loads(rep.read_text())["rows"]
    assert len(rows) == 10
    assert [r["epsilon"] for r in rows] == [10.0 ** -k for k in range(10)]
    L = [r["length"] for r in rows]
    T = [r["runtime"] for r in rows]
    assert all(b <= a for a, b in zip(L, L[1:]))
    assert all(b >= a for a, b in zip(T, T[1:]))
    assert (tmp_path / "sweep_sweep.png").exists()
    assert (tmp_path / "sweep.csv").exists()


def test_independent_sweep_mode(comb_file):
    code, out = run("--input", comb_file, "--cuts", 4, "--sweep", "1e-1:1e-3", "--sweep-mode", "independent")
    assert code == 0
    assert len(out.strip().splitlines()) == 4


def test_generate_command(tmp_path):
    out_file = tmp_path / "g.txt"
    assert run("--generate", "comb,30", "--seed", 5, "--output", out_file)[0] == 0
    assert out_file.read_text() == dumps(generate_fixture(30, 5, "comb"))
    code, text = run("--generate", "convex,6")
    assert code == 0 and text.startswith("rope-polygon v1")
    assert run("--generate", "spiral,6")[0] == cli.EXIT_INVALID
