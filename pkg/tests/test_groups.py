from __future__ import annotations

import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qrcorners import (
    InvalidInputError,
    ResourceCapError,
    check_axioms,
    make_alternating,
    make_cyclic,
    make_product,
    make_sl2,
    make_symmetric,
    mul_chain,
    parse_group,
)
from qrcorners.groups import MAX_ORDER

SMALL = ["cyclic:1", "cyclic:2", "cyclic:7", "cyclic:12", "sym:1", "sym:3", "sym:4",
         "alt:3", "alt:4", "alt:5", "sl2:2", "sl2:3", "sl2:5",
         "prod:(cyclic:2,cyclic:2)", "prod:(cyclic:2,cyclic:3)", "prod:(sl2:3,cyclic:2)"]


def element_orders(G):
    out = []
    for x in G.elements():
        k, y = 1, x
        while y != G.identity:
            y = G.mul(y, x)
            k += 1
        out.append(k)
    return Counter(out)


def test_cyclic_examples():
    Z4 = make_cyclic(4)
    assert Z4.mul(2, 3) == 1
    assert Z4.inv(1) == 3
    assert Z4.identity == 0
    assert mul_chain(make_cyclic(5), [2, 4, 4]) == 0


@pytest.mark.parametrize("desc,order", [("cyclic:9", 9), ("sym:4", 24), ("alt:5", 60),
                                        ("sl2:3", 24), ("sl2:5", 120), ("sl2:7", 336),
                                        ("sl2:13", 2184), ("prod:(sl2:3,cyclic:2)", 48)])
def test_orders(desc, order):
    assert parse_group(desc).order == order


@pytest.mark.parametrize("desc", SMALL)
def test_axioms_exhaustive(desc):
    rep = check_axioms(parse_group(desc))
    assert rep.exhaustive and rep.ok


def test_axioms_detect_broken_table():
    G = make_cyclic(5)
    T = G.table.copy()
    T[1, 2], T[1, 3] = T[1, 3], T[1, 2]
    from qrcorners.groups import Group
    bad = Group("bad", T, G.inverse, G.identity)
    assert not check_axioms(bad).ok


def test_symmetric_composition_convention():
    S3 = make_symmetric(3)
    # a*b applies b first: (a*b)(x) = a(b(x))
    for a, b in itertools.product(S3.elements(), repeat=2):
        pa, pb, pab = (eval(S3.name(v)) for v in (a, b, S3.mul(a, b)))
        assert tuple(pa[pb[x]] for x in range(3)) == tuple(pab)
    assert not S3.is_abelian()
    assert element_orders(S3) == Counter({1: 1, 2: 3, 3: 2})


def test_alt5_is_simple():
    G = make_alternating(5)
    T, inv = G.table, G.inverse
    for x in G.elements():
        if x == G.identity:
            continue
        closure = {G.identity} | {int(T[T[g, x], inv[g]]) for g in G.elements()}
        while True:
            grown = closure | {int(T[a, b]) for a in closure for b in closure}
            if grown == closure:
                break
            closure = grown
        assert len(closure) == 60


def test_product_examples():
    V = parse_group("prod:(cyclic:2,cyclic:2)")
    assert all(V.mul(x, x) == V.identity for x in V.elements())
    Z6 = parse_group("prod:(cyclic:2,cyclic:3)")
    assert element_orders(Z6) == element_orders(make_cyclic(6))
    P = make_product(make_sl2(3), make_cyclic(2))
    assert P.order == 48 and check_axioms(P).ok
    # identity of a product is (e_G, e_H) with id g*|H| + h
    assert P.identity == make_sl2(3).identity * 2


def test_sl2_identity_and_center():
    G = make_sl2(7)
    assert G.name(G.identity) == "[[1,0],[0,1]]" or G.mul(G.identity, 5) == 5
    center = [z for z in G.elements() if all(G.mul(z, x) == G.mul(x, z) for x in range(0, 336, 7))]
    assert len(center) == 2


def test_descriptor_errors():
    for bad in ["cyclic:0", "sym:9", "sl2:4", "sl2:15", "nope:3", "cyclic:x", "prod:(cyclic:2)"]:
        with pytest.raises((InvalidInputError, ResourceCapError)):
            parse_group(bad)
    with pytest.raises(ResourceCapError):
        make_sl2(19)
    with pytest.raises(ResourceCapError):
        parse_group(f"cyclic:{MAX_ORDER + 1}")
    with pytest.raises(ResourceCapError):
        parse_group("prod:(alt:5,sl2:7)")


def test_empty_chain_is_identity():
    G = make_sl2(5)
    assert mul_chain(G, []) == G.identity


@settings(max_examples=60, deadline=None)
@given(desc=st.sampled_from(SMALL), data=st.data())
def test_inverse_involution_and_chain(desc, data):
    G = parse_group(desc)
    xs = data.draw(st.lists(st.integers(0, G.order - 1), min_size=1, max_size=6))
    assert all(G.inv(G.inv(x)) == x for x in xs)
    # left-to-right chain equals right-to-left chain
    right = xs[-1]
    for x in reversed(xs[:-1]):
        right = G.mul(x, right)
    assert mul_chain(G, xs) == right
    # inverse of a product reverses the order
    assert G.inv(mul_chain(G, xs)) == mul_chain(G, [G.inv(x) for x in reversed(xs)])


def test_tables_are_int_arrays():
    G = parse_group("sl2:5")
    assert G.table.dtype.kind == "i" and G.table.shape == (120, 120)
    assert np.array_equal(G.table[G.identity], np.arange(120))
