import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sparsepoly.index_sets import (
    MultiIndexSet,
    cardinality,
    from_text,
    hyperbolic_cross,
    load_text,
    save_text,
    to_text,
)


def box_scan_cross(d, s):
    """Independent enumeration over the full degree box."""
    out = set()
    for j in itertools.product(range(s), repeat=d):
        prod = 1
        for jk in j:
            prod *= jk + 1
        if prod <= s:
            out.add(j)
    return out


def test_d10_s10_cardinality():
    assert cardinality(hyperbolic_cross(10, 10)) == 571


def test_trivial_order_one():
    ms = hyperbolic_cross(3, 1)
    assert ms.as_tuples() == [(0, 0, 0)]


def test_d2_s3_enumeration():
    ms = hyperbolic_cross(2, 3)
    assert set(ms.as_tuples()) == {(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)}
    assert set(ms.as_tuples()) == box_scan_cross(2, 3)
    assert cardinality(ms) == 5


def test_one_dimensional_count():
    assert cardinality(hyperbolic_cross(1, 7)) == 7


def test_rejects_degenerate_arguments():
    with pytest.raises(ValueError):
        hyperbolic_cross(0, 5)
    with pytest.raises(ValueError):
        hyperbolic_cross(5, 0)


def test_graded_lexicographic_ordering():
    ms = hyperbolic_cross(2, 3)
    assert ms.as_tuples() == [(0, 0), (0, 1), (1, 0), (0, 2), (2, 0)]
    degrees = ms.indices.sum(axis=1)
    assert np.all(np.diff(degrees) >= 0)


def test_order_determinism():
    a = hyperbolic_cross(4, 6)
    b = hyperbolic_cross(4, 6)
    assert np.array_equal(a.indices, b.indices)


@settings(max_examples=40, deadline=None)
@given(d=st.integers(1, 4), s=st.integers(1, 8))
def test_membership_soundness(d, s):
    ms = hyperbolic_cross(d, s)
    assert set(ms.as_tuples()) == box_scan_cross(d, s)
    assert np.all(ms.indices <= s - 1)


@settings(max_examples=30, deadline=None)
@given(d=st.integers(1, 4), s=st.integers(1, 7))
def test_monotone_in_order(d, s):
    small = set(hyperbolic_cross(d, s).as_tuples())
    large = set(hyperbolic_cross(d, s + 1).as_tuples())
    assert small <= large


def test_validation_rejects_bad_index_arrays():
    with pytest.raises(ValueError):
        MultiIndexSet(dimension=2, indices=np.array([[0, 0], [0, 0]]))
    with pytest.raises(ValueError):
        MultiIndexSet(dimension=2, indices=np.array([[0, -1]]))
    with pytest.raises(ValueError):
        MultiIndexSet(dimension=3, indices=np.array([[0, 0]]))


def test_text_round_trip(tmp_path):
    ms = hyperbolic_cross(3, 5)
    text = to_text(ms)
    header = text.splitlines()[0]
    assert header == f"d=3 s=5 N={len(ms)}"
    back = from_text(text)
    assert back.dimension == ms.dimension
    assert back.order_parameter == 5
    assert np.array_equal(back.indices, ms.indices)

    path = tmp_path / "cross.txt"
    save_text(ms, path)
    assert np.array_equal(load_text(path).indices, ms.indices)


def test_text_rejects_truncated_body():
    ms = hyperbolic_cross(2, 4)
    lines = to_text(ms).splitlines()
    with pytest.raises(ValueError):
        from_text("\n".join(lines[:-1]))
