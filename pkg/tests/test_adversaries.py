import pytest

from colorlab.adversaries import (BASELINES, BValuePathAdversary, GadgetAdversary,
                                  RectangleAdversary, ReductionWrapper, TorusTwoRowAdversary,
                                  baseline, build_bvalue_path, gadget_adversary,
                                  grid_rectangle_adversary, reduction_wrapper,
                                  torus_two_row_adversary)
from colorlab.analysis import b_value, validate_certificate
from colorlab.engine import (ALGORITHM_LOSES, ALGORITHM_WINS, AlgorithmInterface,
                             DiscoveredView, run_game_concrete, run_game_lazy)
from colorlab.errors import AdversaryError, PreconditionError
from colorlab.graph_core import DirectedWalk
from colorlab.topologies import build_grid, build_layered
from colorlab.unify_color import UnifyColor


def test_baselines():
    view = DiscoveredView()
    view._grow([1, 2, 3], [(1, 2), (1, 3)])
    g = baseline("greedy_first_fit")
    assert g.step(1, 2, view, (2,)) == 1
    assert g.step(2, 3, view, (2, 3)) == 1
    assert g.step(3, 1, view, (2, 3, 1)) == 2
    assert baseline("fixed_pattern").step(1, 5, view, (5,)) == 3
    assert baseline("stubborn", 7).step(1, 5, view, (5,)) == 1
    with pytest.raises(PreconditionError):
        baseline("oracle")
    assert set(BASELINES) == {"greedy_first_fit", "fixed_pattern", "stubborn"}


def test_greedy_falls_back_to_one_when_neighbourhood_is_full():
    view = DiscoveredView()
    view._grow([1, 2, 3], [(1, 2), (1, 3), (2, 3)])
    g = baseline("greedy_first_fit", 2)
    g.step(1, 1, view, ())
    g.step(2, 2, view, ())
    assert g.step(3, 3, view, ()) == 1


@pytest.mark.parametrize("target", [1, 2, 3])
def test_bvalue_path_reaches_target_against_greedy(target):
    region, result = build_bvalue_path(baseline("greedy_first_fit"), 1, target)
    assert result.audit.ok
    assert region is not None and abs(region.b) >= target
    assert region.region_length <= 5 ** (target + 1) * 1
    col = result.transcript.coloring
    assert abs(b_value(col, DirectedWalk(tuple(region.walk_ids())))) == abs(region.b)


def test_bvalue_path_stops_on_conflict():
    adv = BValuePathAdversary(1, 3)
    r = run_game_lazy(adv, baseline("stubborn"), 1)
    assert r.verdict == ALGORITHM_LOSES and r.reason["kind"] == "monochromatic_edge"
    assert r.audit.ok


def test_rectangle_precondition():
    with pytest.raises(PreconditionError):
        RectangleAdversary(T=1, target_k=8)


def test_rectangle_defeats_greedy_with_certificate():
    r = grid_rectangle_adversary(baseline("greedy_first_fit"), T=1, target_k=9)
    assert r.audit.ok
    assert r.verdict == ALGORITHM_LOSES and r.reason["kind"] == "certificate"
    assert r.certificate.kind == "grid_cycle" and r.certificate.payload["b"] != 0
    hcol = {r.embedding[x]: c for x, c in r.transcript.coloring.items()}
    assert validate_certificate(r.certificate, r.host, hcol)


def test_torus_preconditions():
    with pytest.raises(PreconditionError):
        TorusTwoRowAdversary(1, 10)
    with pytest.raises(PreconditionError):
        TorusTwoRowAdversary(2, 11)


@pytest.mark.parametrize("name", ["greedy_first_fit", "fixed_pattern"])
def test_torus_certificate(name):
    r = torus_two_row_adversary(baseline(name), T=1, side=9)
    assert r.audit.ok and r.reason["kind"] == "certificate"
    b1, b2 = r.certificate.payload["b"]
    assert b1 % 2 == 1 and b2 % 2 == 1 and abs(b1 + b2) >= 2


def test_torus_stubborn_loses_by_conflict():
    r = torus_two_row_adversary(baseline("stubborn"), T=1, side=9)
    assert r.verdict == ALGORITHM_LOSES and r.reason["kind"] == "monochromatic_edge"


def test_cylinder_variant_runs():
    r = torus_two_row_adversary(baseline("greedy_first_fit"), T=1, side=9, cylinder=True)
    assert r.audit.ok and r.verdict == ALGORITHM_LOSES


def test_gadget_precondition():
    with pytest.raises(PreconditionError):
        GadgetAdversary(2, 3, 6)


def test_gadget_defeats_greedy():
    adv = GadgetAdversary(2, 3, 20)
    r = run_game_lazy(adv, baseline("greedy_first_fit", 4), 2)
    assert r.audit.ok and r.verdict == ALGORITHM_LOSES
    assert adv.transposed


def test_gadget_function_form():
    r = gadget_adversary(baseline("fixed_pattern", 4), T=2, k=3, n_prime=20)
    assert r.verdict == ALGORITHM_LOSES and r.audit.ok


class _TopTwice(AlgorithmInterface):
    palette = 4

    def step(self, i, v, view, seq):
        return 4


def test_reduction_wrapper_rejects_top_color_twice():
    w = ReductionWrapper(_TopTwice(), 16)
    view = DiscoveredView()
    view._grow([1], [])
    with pytest.raises(AdversaryError):
        w.step(1, 1, view, (1,))


def test_reduction_lifts_views_and_stays_proper():
    top = build_layered(3, 4)
    n = len(top)
    inner = UnifyColor(3, n, oracle_family="layered")
    wrap = reduction_wrapper(inner, top)
    assert wrap.palette == 3
    base = build_grid(4, 4)
    r = run_game_concrete(base, [6, 11, 1, 16, 2, 3, 4, 5, 7, 8, 9, 10, 12, 13, 14, 15],
                          wrap, inner.T_total)
    assert r.verdict == ALGORITHM_WINS
    for x in wrap.lifted.nodes:
        if x <= 16:
            assert wrap.dup(x) in wrap.lifted.neighbors(x)
