"""Smoke test for the Python bindings.

Build and install the extension first:

    pip install maturin
    maturin build --release -m crates/py/Cargo.toml -o dist
    pip install dist/skewchain-*.whl

then run `python python/smoke_test.py` (or `pytest python/`).
"""

import math

import skewchain as sc


def test_graph_analysis():
    k2 = sc.Graph.complete(2)
    assert k2.is_valid()
    assert k2.scc() == [[0, 1]]
    assert k2.chaos_certificate([0, 1])[0] == "chaotic"

    c2 = sc.Graph.cycle(2)
    assert c2.chaos_certificate([0, 1]) == ("periodic_orbit", [0, 1])

    g = sc.Graph(2, [(0, 0), (0, 1), (1, 1)], ["A", "B"])
    comps = g.scc()
    assert len(comps) == 2
    a, b = comps.index([0]), comps.index([1])
    assert g.morse_pairs() == [(a, b)]

    bad = sc.Graph(2, [(0, 1)])
    assert not bad.is_valid()
    assert bad.violations() == [(0, 0, 1), (1, 1, 0)]


def test_metrics():
    g = sc.Graph(2, [(0, 0), (0, 1), (1, 0), (1, 1)], ["A", "B"])
    x = sc.Sequence.parse(g, "left=(A) right=(A)")
    y = sc.Sequence.parse(g, "left=(B) right=(B)")
    assert abs(x.distance(y) - 5 / 3) <= 1e-10
    assert x.distance(x) == 0.0
    assert x.shift(3) == x

    alt = sc.Sequence.periodic(g, [0, 1])
    f = sc.Signal.embed(alt, 0.1)
    f_half = sc.Signal.embed(alt, 0.1, offset=0.05)
    assert abs(f.distance(f_half) - 5 / 6) <= 1e-10
    # embedding is an isometry
    assert abs(sc.Signal.embed(x, 0.1).distance(sc.Signal.embed(y, 0.1)) - x.distance(y)) <= 2e-10

    try:
        sc.Sequence.parse(g, "left=(C)")
    except ValueError as e:
        assert "position" in str(e)
    else:
        raise AssertionError("expected a parse error")


def test_switched_flow_and_chain_sets():
    g = sc.Graph.complete(2)
    system = sc.System(g, [(0.0, 2.0)], 0.1, [["-x*(x-1)*(x-2)"], ["-x*(x-2)"]])
    only_b = sc.Signal.parse(g, "left=(B) right=(B)", h=0.1)
    xs = [x[0] for _, x, _ in system.trajectory([0.5], only_b, 5.0, 0.1)]
    assert all(b > a for a, b in zip(xs, xs[1:]))
    assert 1.99 < xs[-1] < 2.0

    # flowing back undoes flowing forward
    f = sc.Signal.parse(g, "left=(A) core=[BAB] right=(B) tau=0.03", h=0.1)
    x1, f1 = system.skew_product(0.7, [0.4], f)
    x0, _ = system.skew_product(-0.7, x1, f1)
    assert abs(x0[0] - 0.4) < 1e-9

    comps = [c for c in system.chain_sets([200], 0.02) if c["viable"]]
    assert len(comps) == 2
    lo = min(c[0] for c in comps[0]["centers"])
    hi = max(c[0] for c in comps[0]["centers"])
    assert lo < 0.01 and abs(hi - 1.0) < 0.1

    sine = sc.System(
        g,
        [(0.0, 1 / (2 * math.pi))],
        0.1,
        [["-x*(1/(2*pi) - x)"], ["x*(1/(2*pi) - x)"]],
    )
    comps = [c for c in sine.chain_sets([400], 0.002) if c["viable"]]
    assert len(comps) == 1 and len(comps[0]["cells"]) == 400


def test_product_metric():
    g = sc.Graph.complete(2)
    f = sc.Signal.parse(g, "left=(A) right=(B)", h=0.1)
    assert abs(sc.product_metric([0.5], f, [0.75], f) - 0.25) < 1e-15


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"ok  {name}")
    print("python bindings smoke test passed")
