import itertools
import json
from collections import deque

import pytest

from daggerhom.config import CapExceeded
from daggerhom.group import (FiniteGroup, FreeAbelianGroup, FreeGroup, GroupError, combing_eval,
                             combing_profile, cyclic_group, geodesic_combing, late_jump_combing,
                             parse_group, prefix_combing, symmetric_group)

GROUPS = [FreeGroup(2), FreeAbelianGroup(2), symmetric_group(3), cyclic_group(4)]


def bfs_lengths(G, radius):
    # independent oracle: plain BFS on the Cayley graph
    dist = {G.identity(): 0}
    queue = deque([G.identity()])
    while queue:
        g = queue.popleft()
        if dist[g] == radius:
            continue
        for s in G.generators():
            h = G.multiply(g, s)
            if h not in dist:
                dist[h] = dist[g] + 1
                queue.append(h)
    return dist


def test_word_length_examples():
    F = FreeGroup(2)
    assert F.word_length(F.parse_element("abA")) == 3
    Z = FreeAbelianGroup(2)
    assert Z.word_length((2, -1)) == 3 == bfs_lengths(Z, 3)[(2, -1)]
    for G in GROUPS:
        assert G.word_length(G.identity()) == 0


def test_free_words_reduce():
    F = FreeGroup(2)
    assert F.parse_element("abBA") == ()
    assert F.multiply(F.parse_element("ab"), F.parse_element("Ba")) == F.parse_element("aa")
    assert F.format_element(F.parse_element("aBBa")) == "aBBa"


@pytest.mark.parametrize("G,radius,size", [(FreeGroup(2), 1, 5), (FreeGroup(2), 2, 17),
                                           (FreeAbelianGroup(1), 2, 5), (FreeGroup(2), 5, 485),
                                           (FreeAbelianGroup(2), 3, 25)])
def test_ball_sizes(G, radius, size):
    ball = G.ball(radius)
    assert len(ball) == len(set(ball)) == size


def test_free_ball_formula():
    # sphere of radius r in free(k) has 2k (2k - 1)^(r - 1) elements
    for k, r in [(2, 4), (3, 3)]:
        assert len(FreeGroup(k).ball(r)) == 1 + sum(2 * k * (2 * k - 1) ** (j - 1) for j in range(1, r + 1))


def test_zn1_ball_is_interval():
    assert sorted(FreeAbelianGroup(1).ball(2)) == [(-2,), (-1,), (0,), (1,), (2,)]


def test_ball_matches_bfs():
    for G in GROUPS:
        dist = bfs_lengths(G, 3)
        ball = G.ball(3)
        assert set(ball) == set(dist)
        assert all(G.word_length(g) == dist[g] for g in ball)


def test_ball_cap():
    with pytest.raises(CapExceeded):
        FreeGroup(2).ball(6, cap=100)


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.spec)
def test_group_axioms_on_ball(G):
    ball = G.ball(2)
    e = G.identity()
    for x in ball:
        assert G.multiply(x, e) == x == G.multiply(e, x)
        assert G.multiply(x, G.inverse(x)) == e
    for x, y, z in itertools.product(ball, repeat=3):
        assert G.multiply(G.multiply(x, y), z) == G.multiply(x, G.multiply(y, z))


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.spec)
def test_length_function(G):
    ball = G.ball(3)
    for x in ball:
        assert G.word_length(G.inverse(x)) == G.word_length(x)
    for x, y in itertools.product(ball[:60], ball):
        assert G.word_length(G.multiply(x, y)) <= G.word_length(x) + G.word_length(y)


def test_finite_group_validation():
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [1, 1]])
    with pytest.raises(GroupError):
        FiniteGroup([[0, 1], [1, 0]], generators=[0])


def test_finite_group_defaults_to_all_generators():
    S3 = symmetric_group(3)
    assert max(S3.word_length(g) for g in S3.elements()) == 1


def test_conjugacy_classes_bruteforce():
    for G in (symmetric_group(3), symmetric_group(4), cyclic_group(6)):
        classes = {frozenset(G.multiply(G.multiply(h, g), G.inverse(h)) for h in G.elements())
                   for g in G.elements()}
        assert len(G.conjugacy_classes()) == len(classes)
    assert len(symmetric_group(3).conjugacy_classes()) == 3


def test_parse_group_specs(tmp_path):
    assert parse_group("free:2") == FreeGroup(2)
    assert parse_group("zn:2") == FreeAbelianGroup(2)
    assert parse_group("sym:3").order == 6
    assert parse_group("cyclic:4").order == 4
    path = tmp_path / "z3.json"
    path.write_text(json.dumps([[0, 1, 2], [1, 2, 0], [2, 0, 1]]))
    G = parse_group(f"finite:{path}")
    assert G.order == 3 and G.multiply(2, 2) == 1
    for bad in ("free", "nope:3", "free:x"):
        with pytest.raises(GroupError):
            parse_group(bad)


def test_prefix_combing_examples():
    F = FreeGroup(2)
    c = prefix_combing(F)
    g = F.parse_element("aba")
    assert combing_eval(c, 2, g) == F.parse_element("ab")
    assert combing_eval(c, 0, g) == ()
    assert combing_eval(c, 5, g) == g


def test_prefix_combing_stabilises_at_length():
    F = FreeGroup(2)
    c = prefix_combing(F)
    for g in F.ball(4):
        assert all(c(k, g) == g for k in range(F.word_length(g), F.word_length(g) + 4))
        assert c.stabilization(g) == F.word_length(g)


def test_prefix_profile():
    F = FreeGroup(2)
    prof = combing_profile(prefix_combing(F), 4)
    assert prof.ok
    assert all(prof.J[g] == F.word_length(g) for g in F.ball(4))
    assert prof.S_est == 1
    assert prof.D_est == 1
    assert abs(prof.growth_order - 1) < 1e-9


def test_geodesic_combing_on_zn_and_finite():
    for G in (FreeAbelianGroup(2), symmetric_group(3)):
        prof = combing_profile(geodesic_combing(G), 3)
        assert prof.ok
        assert prof.S_est == 1


def test_profile_flags_jump_inside_window():
    F = FreeGroup(2)
    base = prefix_combing(F)
    bad = late_jump_combing(base, stage=3, distance=3)
    prof = combing_profile(bad, 1)
    assert prof.ok is False
    assert prof.S_est > 1
    assert any("declared S" in f for f in prof.failures)
    # a jump past the inspected stages is invisible to the profile
    assert combing_profile(late_jump_combing(base, stage=5, distance=3), 1).ok
