import numpy as np
import pytest

from optdesign.criteria import completely_symmetric
from optdesign.design import information_matrix, is_connected
from optdesign.search import SearchConfig, local_search


def test_fano_by_e_criterion():
    res = local_search(SearchConfig(7, 7, 3, "E", restarts=10, seed=0))
    assert res.score == pytest.approx(7 / 3, abs=1e-9)
    assert completely_symmetric(information_matrix(res.design))


def test_single_block():
    res = local_search(SearchConfig(4, 1, 4, "D", seed=0))
    assert res.design.blocks == ((1, 2, 3, 4),)
    with pytest.raises(ValueError):
        local_search(SearchConfig(5, 1, 3, "D", seed=0))


@pytest.mark.parametrize("kwargs", [
    dict(criterion="F"), dict(criterion="phi"), dict(criterion="phi", p=-1.0),
    dict(restarts=0), dict(k=9), dict(patience=0),
])
def test_config_validation(kwargs):
    base = dict(v=7, b=7, k=3)
    base.update(kwargs)
    with pytest.raises(ValueError):
        SearchConfig(**base)


@pytest.mark.parametrize("criterion,p", [("A", None), ("D", None), ("E", None), ("phi", 2.0)])
def test_results_connected_binary_and_traces_monotone(criterion, p):
    res = local_search(SearchConfig(6, 8, 3, criterion, p=p, restarts=3, max_iterations=1500, seed=4))
    assert is_connected(res.design) and res.design.is_binary
    # within a climb (between kicks) accepted scores never decrease
    segments, current = [], []
    for t in res.trace:
        if t["iteration"] == 0 or t.get("kick"):
            if current:
                segments.append(current)
            current = []
        current.append(t["score"])
    segments.append(current)
    for seg in segments:
        assert all(b >= a - 1e-9 for a, b in zip(seg, seg[1:]))


def test_non_binary_search_allowed():
    res = local_search(SearchConfig(3, 4, 4, "D", binary_only=False, restarts=2, seed=1))
    assert not res.design.is_binary and is_connected(res.design)


def test_same_seed_same_result():
    cfg = SearchConfig(8, 10, 3, "A", restarts=3, max_iterations=1000, seed=42)
    a, b = local_search(cfg), local_search(cfg)
    assert a.design == b.design and a.score == b.score and a.trace == b.trace


def test_exact_certificate_for_graphs():
    res = local_search(SearchConfig(5, 6, 2, "D", restarts=3, seed=2))
    assert "spanning_trees" in res.exact
    eig = np.linalg.eigvalsh(2 * information_matrix(res.design).to_array())[1:]
    assert res.exact["spanning_trees"] * 5 == pytest.approx(np.prod(eig), rel=1e-9)
