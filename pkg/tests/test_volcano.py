import pytest

from conftest import F6007_ASCENT, F6007_CRATER, F6007_FLOOR_SAMPLE, F6007_MIDDLE
from crskex.ff import PrimeField
from crskex.volcano import (VolcanoError, ascend, is_on_crater, parent_step,
                            probe_survival, rational_neighbors, vertex_depth)

F6 = PrimeField(6007)

# v_3(18) = 2: the 3-volcano of this class has a crater, a middle
# layer, and a floor
DEPTH = 2


def test_neighbor_counts_by_layer(rng):
    for j in F6007_CRATER | F6007_MIDDLE:
        assert sum(m for _, m in rational_neighbors(F6(j), 3, rng)) == 4, j
    assert sum(m for _, m in rational_neighbors(F6(607), 3, rng)) == 1


def test_is_on_crater_classifies_all_layers(rng):
    for j in F6007_CRATER:
        assert is_on_crater(F6(j), 3, DEPTH, rng), j
    for j in F6007_MIDDLE | {F6007_FLOOR_SAMPLE}:
        assert not is_on_crater(F6(j), 3, DEPTH, rng), j


def test_depth_zero_is_trivially_crater(rng):
    assert is_on_crater(F6(607), 3, 0, rng)


def test_middle_layer_parents_are_crater(rng):
    for j in sorted(F6007_MIDDLE)[:5]:
        parent = parent_step(F6(j), 3, DEPTH, rng)
        assert parent.canonical_key() in F6007_CRATER, j


def test_floor_parent_is_unique_neighbor(rng):
    parent = parent_step(F6(607), 3, DEPTH, rng)
    assert parent == F6(782)


def test_ascent_path(rng):
    floor, middle, crater = F6007_ASCENT
    top, steps = ascend(F6(floor), 3, DEPTH, rng)
    assert steps == 2 and top.canonical_key() in F6007_CRATER
    assert top == F6(crater)
    assert parent_step(F6(floor), 3, DEPTH, rng) == F6(middle)


def test_vertex_depth(rng):
    floor, middle, crater = F6007_ASCENT
    assert vertex_depth(F6(crater), 3, DEPTH, rng) == 0
    assert vertex_depth(F6(middle), 3, DEPTH, rng) == 1
    assert vertex_depth(F6(floor), 3, DEPTH, rng) == 2


def test_underclaimed_depth_stops_one_level_down(rng):
    # with depth misdeclared as 1 the middle layer is indistinguishable
    # from a depth-1 crater, so a floor start settles there
    top, steps = ascend(F6(607), 3, 1, rng)
    assert steps == 1 and top == F6(782)


def test_wrong_volcano_shape_detected(rng):
    # 5 does not divide the conductor: every vertex has 2 rational
    # 5-neighbors, never the ell + 1 a positive-depth volcano requires
    with pytest.raises(VolcanoError, match="no crater"):
        ascend(F6(1247), 5, 1, rng)


def test_probe_survival_bounds(rng):
    # from a crater vertex every probe survives the full budget
    j = F6(1247)
    for u, _ in rational_neighbors(j, 3, rng):
        assert probe_survival(j, u, 3, DEPTH, rng) >= DEPTH
    # from the floor, the forced path up sticks once it runs back down
    j, parent = F6(607), F6(782)
    assert probe_survival(j, parent, 3, 10, rng) <= 10
