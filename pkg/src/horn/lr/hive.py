"""Hive model for Littlewood-Richardson coefficients.

Vertices of a size-n hive are pairs (a, b) with a, b >= 0 and a + b <= n.
The boundary is fixed by the GL(n) partitions:

    h(0, b)     = lambda_1 + ... + lambda_b
    h(a, n - a) = |lambda| + mu_1 + ... + mu_a
    h(a, 0)     = nu_1 + ... + nu_a

and every unit rhombus obeys "obtuse corners >= acute corners".  The
number of integer hives equals c_{lambda mu}^nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from ..spectra import DynkinWeight

# (shared edge, acute corners) for the three rhombus orientations, as
# offsets from the base vertex (a, b); filtered to fit in the triangle below
_ORIENTATIONS = (
    (((1, 0), (0, 1)), ((0, 0), (1, 1))),
    (((0, 0), (1, 0)), ((0, 1), (1, -1))),
    (((0, 0), (0, 1)), ((1, 0), (-1, 1))),
)


def vertices(n: int) -> list:
    return [(a, b) for a in range(n + 1) for b in range(n + 1 - a)]


def _inside(v, n) -> bool:
    return v[0] >= 0 and v[1] >= 0 and v[0] + v[1] <= n


@lru_cache(maxsize=None)
def rhombi(n: int) -> tuple:
    """All unit rhombi as (obtuse pair, acute pair); 3 n (n - 1) / 2 of them."""
    out = []
    for a, b in vertices(n):
        for obt, acu in _ORIENTATIONS:
            o = tuple((a + da, b + db) for da, db in obt)
            c = tuple((a + da, b + db) for da, db in acu)
            if all(_inside(v, n) for v in o + c):
                out.append((o, c))
    return tuple(out)


def edge_key(edge) -> tuple:
    """Doubled midpoint of a unit edge; unique per edge."""
    (a1, b1), (a2, b2) = edge
    return (a1 + a2, b1 + b2)


def interior_vertices(n: int) -> list:
    return [(a, b) for a, b in vertices(n) if a >= 1 and b >= 1 and a + b <= n - 1]


def gl_partitions(lam: DynkinWeight, mu: DynkinWeight, nu: DynkinWeight):
    """GL(n) partitions with |nu| = |lambda| + |mu|, or None if impossible."""
    lp, mp, np_ = lam.partition(), mu.partition(), nu.partition()
    n = len(lp)
    excess = sum(lp) + sum(mp) - sum(np_)
    if excess % n or excess < 0:
        return None
    k = excess // n
    return lp, mp, tuple(x + k for x in np_)


def boundary(n: int, lp, mp, np_=None) -> dict:
    h = {}
    acc = 0
    for b in range(n + 1):
        h[(0, b)] = acc
        if b < n:
            acc += lp[b]
    total_l = acc
    acc = total_l
    for a in range(n + 1):
        h[(a, n - a)] = acc
        if a < n:
            acc += mp[a]
    if np_ is not None:
        acc = 0
        for a in range(n + 1):
            h[(a, 0)] = acc
            if a < n:
                acc += np_[a]
        if h[(n, 0)] != total_l + sum(mp):
            raise ValueError("|nu| != |lambda| + |mu|")
    return h


class LatticeProgram:
    """Integer points of {x : sum_v c_v x_v + const >= 0} by ordered DFS.

    ``order`` lists the free variables in assignment order; every constraint
    is attached to the level of its last free variable, where it becomes an
    interval bound.  Every level must end up bounded on both sides.
    """

    def __init__(self, order, constraints):
        self.order = list(order)
        pos = {v: i for i, v in enumerate(self.order)}
        self.levels = [([], []) for _ in self.order]  # (lower, upper)
        self.closed = []  # constraints without free variables
        for coefs, key in constraints:
            free = [(pos[v], c) for v, c in coefs.items() if v in pos and c]
            fixed = [(v, c) for v, c in coefs.items() if v not in pos and c]
            if not free:
                self.closed.append((fixed, key))
                continue
            last = max(i for i, _ in free)
            c_last = dict(free)[last]
            others = tuple((i, c) for i, c in free if i != last)
            entry = (c_last, others, tuple(fixed), key)
            self.levels[last][0 if c_last > 0 else 1].append(entry)
        for i, (lo, hi) in enumerate(self.levels):
            if not lo or not hi:
                raise ValueError(f"variable {self.order[i]} is not bounded at its level")

    def bind(self, values: dict, consts=None):
        """Resolve fixed vertices to numbers; returns per-level bound tables."""
        consts = consts or {}
        for fixed, key in self.closed:
            tot = sum(c * values[v] for v, c in fixed) + consts.get(key, 0)
            if tot < 0:
                return None
        out = []
        for lo, hi in self.levels:
            out.append(tuple(
                tuple((c, others, sum(cc * values[v] for v, cc in fixed) + consts.get(key, 0)) for c, others, fixed, key in side)
                for side in (lo, hi)
            ))
        return out

    @staticmethod
    def interval(bound, x):
        lo_tab, hi_tab = bound
        lo = -math.inf
        for c, others, k in lo_tab:
            r = k
            for i, cc in others:
                r += cc * x[i]
            v = -((r) // c)  # ceil(-r / c)
            if v > lo:
                lo = v
        hi = math.inf
        for c, others, k in hi_tab:
            r = k
            for i, cc in others:
                r += cc * x[i]
            v = r // (-c)  # floor(r / |c|)
            if v < hi:
                hi = v
        return lo, hi

    def count(self, bound, start: int = 0, x=None) -> int:
        if bound is None:
            return 0
        depth = len(self.order)
        if depth == 0:
            return 1
        x = list(x) if x is not None else [0] * depth
        return self._count(bound, start, x)

    def _count(self, bound, level, x) -> int:
        lo, hi = self.interval(bound[level], x)
        if hi < lo:
            return 0
        if level == len(self.order) - 1:
            return hi - lo + 1
        total = 0
        for v in range(lo, hi + 1):
            x[level] = v
            total += self._count(bound, level + 1, x)
        return total

    def points(self, bound):
        """Yield every integer point as a tuple in ``order``."""
        if bound is None:
            return
        depth = len(self.order)
        x = [0] * depth

        def rec(level):
            if level == depth:
                yield tuple(x)
                return
            lo, hi = self.interval(bound[level], x)
            for v in range(lo, hi + 1):
                x[level] = v
                yield from rec(level + 1)

        yield from rec(0)


def _rhombus_constraints(n):
    out = []
    for obt, acu in rhombi(n):
        coefs = {}
        for v in obt:
            coefs[v] = coefs.get(v, 0) + 1
        for v in acu:
            coefs[v] = coefs.get(v, 0) - 1
        out.append((coefs, None))
    return out


@lru_cache(maxsize=None)
def hive_program(n: int) -> LatticeProgram:
    """Interior vertices free, whole boundary fixed."""
    order = sorted(interior_vertices(n))
    return LatticeProgram(order, _rhombus_constraints(n))


@lru_cache(maxsize=None)
def free_nu_program(n: int) -> LatticeProgram:
    """The nu edge is free as well and constrained to a partition.

    Extra constraints: nu weakly decreasing, nu_n >= 0, h(a,0) >= a |nu| / n
    (concavity above the chord) and nu_1 <= lambda_1 + mu_1.
    """
    edge = [(a, 0) for a in range(1, n)]
    order = sorted(edge + interior_vertices(n))
    cons = _rhombus_constraints(n)
    for a in range(1, n):
        cons.append(({(a, 0): 2, (a - 1, 0): -1, (a + 1, 0): -1}, None))
        cons.append(({(a, 0): n, (n, 0): -a}, None))
    cons.append(({(n, 0): 1, (n - 1, 0): -1}, None))
    cons.append(({(1, 0): -1}, "nu1_max"))
    return LatticeProgram(order, cons)


@dataclass(frozen=True)
class HivePattern:
    n: int
    entries: tuple  # ((a, b), value) pairs over all vertices, sorted

    def as_dict(self) -> dict:
        return dict(self.entries)

    def slacks(self) -> dict:
        """Rhombus slack on every interior edge, keyed by doubled midpoint."""
        h = self.as_dict()
        out = {}
        for obt, acu in rhombi(self.n):
            out[edge_key(obt)] = h[obt[0]] + h[obt[1]] - h[acu[0]] - h[acu[1]]
        return out

    def is_valid(self) -> bool:
        return all(v >= 0 for v in self.slacks().values())

    def boundary_partitions(self) -> tuple:
        h = self.as_dict()
        n = self.n
        lam = tuple(h[(0, b + 1)] - h[(0, b)] for b in range(n))
        mu = tuple(h[(a + 1, n - a - 1)] - h[(a, n - a)] for a in range(n))
        nu = tuple(h[(a + 1, 0)] - h[(a, 0)] for a in range(n))
        return lam, mu, nu


def root_lattice_check(lam: DynkinWeight, mu: DynkinWeight, nu: DynkinWeight) -> bool:
    """Is lambda + mu - nu in the su(n) root lattice?"""
    if not lam.rank == mu.rank == nu.rank:
        raise ValueError("weights of different rank")
    n = lam.n
    return sum((i + 1) * (a + b - c) for i, (a, b, c) in enumerate(zip(lam, mu, nu))) % n == 0


def _check(lam, mu, nu=None):
    ws = [lam, mu] + ([nu] if nu is not None else [])
    ws = [w if isinstance(w, DynkinWeight) else DynkinWeight(tuple(w)) for w in ws]
    if len({w.rank for w in ws}) != 1:
        raise ValueError("weights of different rank")
    if not all(w.dominant for w in ws):
        raise ValueError("weights must be dominant")
    return ws


def lr_coefficient(lam, mu, nu) -> int:
    """N_{lambda mu}^nu by counting integer hives."""
    lam, mu, nu = _check(lam, mu, nu)
    if not root_lattice_check(lam, mu, nu):
        return 0
    parts = gl_partitions(lam, mu, nu)
    if parts is None:
        return 0
    n = lam.n
    prog = hive_program(n)
    return prog.count(prog.bind(boundary(n, *parts)))


def hive_patterns(lam, mu, nu) -> list:
    """Every integer hive with the given boundary."""
    lam, mu, nu = _check(lam, mu, nu)
    parts = gl_partitions(lam, mu, nu)
    if parts is None or not root_lattice_check(lam, mu, nu):
        return []
    n = lam.n
    prog = hive_program(n)
    h = boundary(n, *parts)
    out = []
    for pt in prog.points(prog.bind(h)):
        full = dict(h)
        full.update(zip(prog.order, pt))
        out.append(HivePattern(n, tuple(sorted(full.items()))))
    return out


def tensor_decomposition(lam, mu) -> dict:
    """{nu: N_{lambda mu}^nu} over all constituents of V_lambda x V_mu."""
    lam, mu = _check(lam, mu)
    n = lam.n
    lp, mp = lam.partition(), mu.partition()
    prog = free_nu_program(n)
    h = boundary(n, lp, mp)
    bound = prog.bind(h, {"nu1_max": lp[0] + mp[0]})
    edge_levels = [i for i, v in enumerate(prog.order) if v[1] == 0]
    # the nu edge variables come first in the order (b = 0 sorts before b >= 1 for equal a)
    # so enumerate them by a pruned walk and count the rest
    out = {}
    depth = len(prog.order)
    x = [0] * depth
    edge_set = set(edge_levels)

    def rec(level):
        if level == depth:
            record(1)
            return
        lo, hi = prog.interval(bound[level], x)
        if hi < lo:
            return
        if all(i not in edge_set for i in range(level, depth)):
            record(prog._count(bound, level, x))
            return
        for v in range(lo, hi + 1):
            x[level] = v
            rec(level + 1)

    def record(c):
        if not c:
            return
        hv = dict(h)
        for i in edge_levels:
            hv[prog.order[i]] = x[i]
        parts = [hv[(a + 1, 0)] - hv[(a, 0)] for a in range(n)]
        labels = tuple(parts[i] - parts[i + 1] for i in range(n - 1))
        key = DynkinWeight(labels)
        out[key] = out.get(key, 0) + c

    rec(0)
    return out
