"""Position probing in ell-isogeny volcanoes.

A component of the ell-isogeny graph on ordinary curves with Frobenius
discriminant dpi = d^2 dK is a volcano of depth h = v_ell(d): a crater
cycle of curves with locally maximal endomorphism ring, and below it
h levels of trees.  Away from the floor every vertex has ell+1
rational neighbours (with multiplicity); floor vertices have one.

Everything here works on j-invariants.  Walks are non-backtracking in
the multigraph sense: one copy of the previous vertex is removed from
the neighbour multiset, so parallel edges and short crater cycles are
handled without special cases.

The probe logic rests on two facts.  Below the crater all edges point
down, so a non-backtracking path that leaves a depth-k vertex through a
child is forced to the floor in exactly h - k steps and then sticks.
From a crater vertex no path can reach the floor in fewer than h steps.
Hence a vertex is on the crater iff no probe of length h sticks early,
and the parent of an off-crater vertex is the unique neighbour whose
probe survives the longest.
"""

from __future__ import annotations

import random

from .modpolydb import specialized
from .poly import roots_with_multiplicity


class VolcanoError(RuntimeError):
    pass


def rational_neighbors(j, ell: int, rng: random.Random, data_dir=None):
    """Rational roots of the level-ell modular polynomial at j, with
    multiplicity.  These are the ell-isogenous j-invariants."""
    return roots_with_multiplicity(specialized(ell, j, data_dir=data_dir), rng)


def _continuations(j, prev, ell, rng, data_dir):
    """Neighbour list of j with one copy of prev removed."""
    out = []
    dropped = prev is None
    for r, mult in rational_neighbors(j, ell, rng, data_dir=data_dir):
        if not dropped and r == prev:
            mult -= 1
            dropped = True
        out.extend([r] * mult)
    return out


def probe_survival(j, first, ell: int, budget: int, rng: random.Random,
                   data_dir=None) -> int:
    """Walk j -> first -> ... non-backtracking for up to budget steps.

    Returns the number of steps completed before the walk stuck at a
    degree-one vertex, or budget + 1 if it never stuck.
    """
    prev, cur = j, first
    steps = 1
    while steps < budget:
        nxt = _continuations(cur, prev, ell, rng, data_dir)
        if not nxt:
            return steps
        prev, cur = cur, rng.choice(nxt)
        steps += 1
    nxt = _continuations(cur, prev, ell, rng, data_dir)
    return budget if not nxt else budget + 1


def is_on_crater(j, ell: int, depth: int, rng: random.Random,
                 data_dir=None) -> bool:
    """True iff j sits on the crater of its ell-volcano of known depth.

    depth is v_ell(d) for the conductor d of the Frobenius order; with
    depth 0 the whole component is crater and the answer is trivially
    true.  Off-crater vertices are caught because at least one probe
    runs through a child and sticks within depth - 1 further steps.
    """
    if depth <= 0:
        return True
    nbrs = rational_neighbors(j, ell, rng, data_dir=data_dir)
    if sum(m for _, m in nbrs) < ell + 1:
        return False
    if depth == 1:
        return True
    for u, _ in nbrs:
        if probe_survival(j, u, ell, depth, rng, data_dir=data_dir) < depth:
            return False
    return True


def parent_step(j, ell: int, depth: int, rng: random.Random,
                data_dir=None):
    """The ascending neighbour of an off-crater vertex.

    Probes through a child are forced down and stick after at most
    depth - 1 steps; the probe through the parent lasts at least two
    steps longer, so the survival argmax identifies it uniquely.  Do
    not call this on crater vertices.
    """
    nbrs = rational_neighbors(j, ell, rng, data_dir=data_dir)
    if not nbrs:
        raise VolcanoError("vertex has no rational neighbours")
    if sum(m for _, m in nbrs) == 1:
        return nbrs[0][0]
    budget = depth + 1
    best, best_steps = None, -1
    for u, _ in nbrs:
        steps = probe_survival(j, u, ell, budget, rng, data_dir=data_dir)
        if steps > best_steps:
            best, best_steps = u, steps
    return best


def ascend(j, ell: int, depth: int, rng: random.Random, data_dir=None):
    """Walk ascending ell-isogenies from j until the crater is reached.

    Returns (crater_j, steps_taken).  At most depth steps are needed;
    more than that means the supplied depth was wrong.
    """
    steps = 0
    while not is_on_crater(j, ell, depth, rng, data_dir=data_dir):
        if steps >= depth:
            raise VolcanoError(
                f"no crater within {depth} ascending {ell}-isogeny steps"
            )
        j = parent_step(j, ell, depth, rng, data_dir=data_dir)
        steps += 1
    return j, steps


def vertex_depth(j, ell: int, depth: int, rng: random.Random,
                 data_dir=None) -> int:
    """Distance from j down from the crater (0 = crater)."""
    return ascend(j, ell, depth, rng, data_dir=data_dir)[1]
