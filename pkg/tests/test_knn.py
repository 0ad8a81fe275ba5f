import json
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx

from friendrec.knn import (
    KnnModel,
    Neighbor,
    classify,
    euclidean,
    load_model,
    nearest,
    save_model,
    sqrt_k_heuristic,
    vote,
)


# Independent oracles: full distance table, plain-Python arithmetic.


def oracle_distances(points, query):
    table = []
    for i, p in enumerate(points):
        d = math.sqrt(sum((float(a) - float(b)) ** 2 for a, b in zip(p, query)))
        table.append((d, i))
    table.sort()
    return table


def oracle_classify(points, labels, query, k):
    votes, sums = {}, {}
    for d, i in oracle_distances(points, query)[:k]:
        label = labels[i]
        votes[label] = votes.get(label, 0) + 1
        sums[label] = sums.get(label, 0.0) + d
    return min(votes, key=lambda lab: (-votes[lab], sums[lab], lab))


# ---------------------------------------------------------------- euclidean


def test_345_triangle():
    assert euclidean((0, 0), (3, 4)) == 5.0


def test_identity():
    for v in [(0,), (1.5, -2.5), (1, 2, 3, 4, 5)]:
        assert euclidean(v, v) == 0.0


def test_hand_expanded_case():
    # (0-1)^2 + (7-4)^2 = 10
    assert euclidean((0, 7), (1, 4)) == approx(math.sqrt(10), abs=1e-9)


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        euclidean((1, 2), (1, 2, 3))


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        euclidean((float("nan"), 0), (0, 0))
    with pytest.raises(ValueError):
        euclidean((0, 0), (float("inf"), 0))


finite_floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=12).flatmap(
    lambda d: st.tuples(
        st.lists(finite_floats, min_size=d, max_size=d),
        st.lists(finite_floats, min_size=d, max_size=d),
        st.lists(finite_floats, min_size=d, max_size=d),
    )
))
def test_metric_axioms(vectors):
    a, b, c = vectors
    assert euclidean(a, b) == approx(euclidean(b, a), abs=1e-9)
    assert euclidean(a, a) == 0.0
    assert euclidean(a, c) <= euclidean(a, b) + euclidean(b, c) + 1e-9


# ---------------------------------------------------------------- nearest


def _model(points, labels=None, k=1):
    if labels is None:
        labels = list(range(len(points)))
    return KnnModel(points, labels, k=k)


def test_nearest_single():
    model = _model([(0, 0), (10, 10)])
    (nb,) = nearest(model, (1, 1), 1)
    assert nb.index == 0
    assert nb.distance == approx(math.sqrt(2), abs=1e-12)


def test_nearest_exhaustive_is_sorted():
    rng = random.Random(4)
    points = [(rng.uniform(-5, 5), rng.uniform(-5, 5)) for _ in range(20)]
    model = _model(points)
    result = nearest(model, (0.3, -0.4), len(points))
    keys = [(nb.distance, nb.index) for nb in result]
    assert keys == sorted(keys)
    assert sorted(nb.index for nb in result) == list(range(20))


def test_nearest_matches_full_sort_oracle():
    rng = random.Random(11)
    points = [(rng.uniform(-10, 10), rng.uniform(-10, 10)) for _ in range(50)]
    model = _model(points)
    query = (rng.uniform(-10, 10), rng.uniform(-10, 10))
    got = [(nb.index, nb.distance) for nb in nearest(model, query, 5)]
    want = [(i, d) for d, i in oracle_distances(points, query)[:5]]
    assert [i for i, _ in got] == [i for i, _ in want]
    for (_, dg), (_, dw) in zip(got, want):
        assert dg == approx(dw, abs=1e-12)


def test_nearest_index_tiebreak_on_duplicates():
    model = _model([(1, 1), (1, 1), (1, 1)])
    result = nearest(model, (1, 1), 2)
    assert [nb.index for nb in result] == [0, 1]
    assert all(nb.distance == 0.0 for nb in result)


def test_nearest_crosses_chunk_boundaries():
    # more rows than one scan chunk; nearest points planted at far indices
    n = 5000
    points = np.full((n, 2), 100.0)
    points[4321] = (0.0, 0.0)
    points[4900] = (0.5, 0.0)
    model = _model(points.tolist())
    result = nearest(model, (0.0, 0.0), 2)
    assert [nb.index for nb in result] == [4321, 4900]


def test_nearest_errors():
    model = _model([(0, 0), (1, 1)])
    with pytest.raises(ValueError):
        nearest(model, (0, 0), 0)
    with pytest.raises(ValueError):
        nearest(model, (0, 0), 3)
    with pytest.raises(ValueError):
        nearest(model, (0, 0, 0), 1)


def test_scaling_leaves_neighbor_order_unchanged():
    rng = random.Random(21)
    points = [(rng.randint(-40, 40), rng.randint(-40, 40)) for _ in range(60)]
    query = (3, -7)
    base = [nb.index for nb in nearest(_model(points), query, 10)]
    for factor in (2.0, 0.5, 4.0):
        scaled = [(x * factor, y * factor) for x, y in points]
        scaled_q = (query[0] * factor, query[1] * factor)
        got = [nb.index for nb in nearest(_model(scaled), scaled_q, 10)]
        assert got == base


# ---------------------------------------------------------------- classify


def test_classify_two_near_one_far():
    model = KnnModel([(0, 0), (1, 1), (5, 5)], ["A", "A", "B"], k=2)
    assert classify(model, (0.5, 0.5)) == "A"


def test_classify_k1_degenerate():
    model = KnnModel([(0, 0), (9, 9)], ["A", "B"], k=1)
    assert classify(model, (8, 8)) == "B"
    assert classify(model, (1, 1)) == "A"


def test_classify_label_tiebreak():
    # equal votes, equal summed distances; smaller label wins
    model = KnnModel([(0, 0), (2, 0)], ["A", "B"], k=2)
    assert classify(model, (1, 0)) == "A"
    model2 = KnnModel([(0, 0), (2, 0)], [5, 3], k=2)
    assert classify(model2, (1, 0)) == 3


def test_classify_summed_distance_tiebreak():
    # votes tie 1-1, B is closer; B wins despite larger label
    model = KnnModel([(0, 0), (0.5, 0)], ["B", "A"], k=2)
    assert classify(model, (0.4, 0)) == "A"


def test_vote_empty_rejected():
    with pytest.raises(ValueError):
        vote([])


def test_classify_matches_oracle_bulk():
    rng = random.Random(99)
    for trial in range(300):
        n = rng.randint(3, 60)
        dim = rng.choice([2, 10])
        # half the trials on an integer grid to force distance ties
        if trial % 2 == 0:
            points = [[rng.randint(0, 6) for _ in range(dim)] for _ in range(n)]
            query = [rng.randint(0, 6) for _ in range(dim)]
        else:
            points = [[rng.uniform(-5, 5) for _ in range(dim)] for _ in range(n)]
            query = [rng.uniform(-5, 5) for _ in range(dim)]
        labels = [rng.randint(0, 4) for _ in range(n)]
        k = rng.randint(1, min(7, n))
        model = KnnModel(points, labels, k=k)
        assert classify(model, query) == oracle_classify(points, labels, query, k)


def test_classify_permutation_invariant_generic_position():
    rng = random.Random(5)
    for _ in range(50):
        n = rng.randint(3, 40)
        points = [[rng.uniform(-5, 5), rng.uniform(-5, 5)] for _ in range(n)]
        labels = [rng.randint(0, 3) for _ in range(n)]
        k = rng.randint(1, min(5, n))
        query = [rng.uniform(-5, 5), rng.uniform(-5, 5)]
        base = classify(KnnModel(points, labels, k=k), query)
        order = list(range(n))
        rng.shuffle(order)
        permuted = classify(
            KnnModel([points[i] for i in order], [labels[i] for i in order], k=k), query
        )
        assert permuted == base


# ---------------------------------------------------------------- sqrt heuristic


@pytest.mark.parametrize("n,expected", [(4031, 63), (1, 1), (100, 10), (2, 1), (3969, 63)])
def test_sqrt_k_heuristic(n, expected):
    assert sqrt_k_heuristic(n) == expected


def test_sqrt_k_heuristic_rejects_zero():
    with pytest.raises(ValueError):
        sqrt_k_heuristic(0)


# ---------------------------------------------------------------- model + persistence


def test_model_validation():
    with pytest.raises(ValueError):
        KnnModel([], [], k=1)
    with pytest.raises(ValueError):
        KnnModel([(0, 0)], ["A", "B"], k=1)
    with pytest.raises(ValueError):
        KnnModel([(0, 0)], ["A"], k=2)
    with pytest.raises(ValueError):
        KnnModel([(0, 0)], ["A"], k=0)
    with pytest.raises(ValueError):
        KnnModel([(0, 0)], ["A"], k=1, metric="cosine")
    with pytest.raises(ValueError):
        KnnModel([(float("nan"), 0)], ["A"], k=1)


def test_model_default_k_is_2():
    model = KnnModel([(0, 0), (1, 1)], ["A", "B"])
    assert model.k == 2


def test_model_points_read_only():
    model = KnnModel([(0, 0), (1, 1)], ["A", "B"])
    with pytest.raises(ValueError):
        model.points[0, 0] = 99.0


def test_save_load_round_trip(tmp_path):
    rng = random.Random(3)
    points = [[rng.uniform(-1, 1) for _ in range(10)] for _ in range(25)]
    labels = [rng.randint(0, 300) for _ in range(25)]
    model = KnnModel(points, labels, k=5)
    path = tmp_path / "model.json"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded == model
    assert loaded.points.tolist() == model.points.tolist()  # bit-exact floats
    assert not list(tmp_path.glob("*.tmp"))


def test_save_is_atomic_overwrite(tmp_path):
    path = tmp_path / "model.json"
    save_model(KnnModel([(0, 0)], [1], k=1), path)
    save_model(KnnModel([(2, 2), (3, 3)], [1, 2], k=2), path)
    assert load_model(path).k == 2


def test_load_rejects_bad_version(tmp_path):
    path = tmp_path / "model.json"
    save_model(KnnModel([(0, 0)], [1], k=1), path)
    doc = json.loads(path.read_text())
    doc["version"] = 99
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="version"):
        load_model(path)


def test_load_rejects_dim_mismatch(tmp_path):
    path = tmp_path / "model.json"
    save_model(KnnModel([(0, 0)], [1], k=1), path)
    doc = json.loads(path.read_text())
    doc["dim"] = 7
    path.write_text(json.dumps(doc))
    with pytest.raises(ValueError, match="dim"):
        load_model(path)


def test_neighbor_fields():
    nb = Neighbor(index=3, distance=1.5, label="A")
    assert (nb.index, nb.distance, nb.label) == (3, 1.5, "A")
