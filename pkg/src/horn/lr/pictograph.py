"""BZ triangles, O-blades and isometric honeycombs from hives.

All three pictographs carry the same integers: the rhombus slack of each
interior edge of the hive (3 n (n - 1) / 2 numbers), keyed by the doubled
midpoint (A, B) of that edge.  They differ in how these integers are read:

* BZ triangle: the slacks sit on vertices; an edge carries the sum of its
  two endpoints, and opposite sides of every hexagon carry equal integers.
* O-blade: the slacks sit on blade edges; angles carry sums of adjacent
  edges, opposite angles of a hexagon agree, and the edges meeting a
  boundary point add up to the external label there.
* isometric honeycomb: the slacks are edge lengths of the hexagon dual to
  an interior hive vertex; the two edges at opposite corners have equal sums.

Around an interior hive vertex the six edges in angular order give
s_k + s_{k+1} = s_{k+3} + s_{k+4}; at a boundary vertex the interior edges
sum to the Dynkin label of that boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..spectra import DynkinWeight
from .hive import hive_patterns, interior_vertices

KINDS = ("BZ-triangle", "O-blade", "isometric-honeycomb")
_MARK = {"BZ-triangle": "o", "O-blade": "*", "isometric-honeycomb": "#"}
_DIRS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


@dataclass(frozen=True)
class Pictograph:
    kind: str
    n: int
    labels: tuple  # ((A, B), value) sorted by key
    external: tuple  # (lambda labels, mu labels, nu labels)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown pictograph kind {self.kind!r}")

    def as_dict(self) -> dict:
        return dict(self.labels)


def _around(v):
    a, b = v
    return [(2 * a + da, 2 * b + db) for da, db in _DIRS]


def _boundary_vertices(n):
    """(vertex, which external weight, label index) for non-corner boundary vertices."""
    out = []
    for k in range(1, n):
        out.append(((0, k), 0, k - 1))
        out.append(((k, n - k), 1, k - 1))
        out.append(((k, 0), 2, k - 1))
    return out


def hexagon_pairs(p: Pictograph) -> list:
    """Per interior vertex, the six adjacent-pair sums in angular order.

    These are the BZ edge integers, the O-blade angles and the honeycomb
    corner sums; opposite entries (k, k + 3) must agree.
    """
    s = p.as_dict()
    out = []
    for v in interior_vertices(p.n):
        ring = [s[k] for k in _around(v)]
        out.append(tuple(ring[k] + ring[(k + 1) % 6] for k in range(6)))
    return out


def check_pictograph(p: Pictograph) -> list:
    """Human-readable violations of the pictograph's constraints (empty if valid)."""
    problems = []
    s = p.as_dict()
    n = p.n
    if len(s) != 3 * n * (n - 1) // 2:
        problems.append(f"expected {3 * n * (n - 1) // 2} integers, found {len(s)}")
    neg = [k for k, v in s.items() if v < 0]
    if neg:
        problems.append(f"negative labels at {neg}")
    if len(interior_vertices(n)) != (n - 1) * (n - 2) // 2:
        problems.append("wrong number of inner vertices")
    word = {"BZ-triangle": "opposite hexagon sides", "O-blade": "opposite angles",
            "isometric-honeycomb": "opposite-corner edge sums"}[p.kind]
    for v, sums in zip(interior_vertices(n), hexagon_pairs(p)):
        if any(sums[k] != sums[k + 3] for k in range(3)):
            problems.append(f"{word} differ at hexagon {v}: {sums}")
    for v, which, idx in _boundary_vertices(n):
        tot = sum(s.get(k, 0) for k in _around(v))
        want = p.external[which][idx]
        if tot != want:
            problems.append(f"boundary {v}: {tot} != external label {want}")
    return problems


def enumerate_pictographs(lam, mu, nu, kind: str = "BZ-triangle") -> list:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    lam, mu, nu = (w if isinstance(w, DynkinWeight) else DynkinWeight(tuple(w)) for w in (lam, mu, nu))
    if lam.n > 7:
        raise ValueError("pictographs are limited to n <= 7")
    ext = (lam.labels, mu.labels, nu.labels)
    return [Pictograph(kind, lam.n, tuple(sorted(h.slacks().items())), ext) for h in hive_patterns(lam, mu, nu)]


# -- text layout ---------------------------------------------------------------


def render_pictograph(p: Pictograph) -> str:
    """Fixed-grid text picture; row B (top first) and column 2A + B of the
    doubled lattice, each cell ``width`` characters wide."""
    s = p.as_dict()
    n = p.n
    width = max(2, max((len(str(v)) for v in s.values()), default=1) + 1)
    names = ("lambda", "mu", "nu")
    lines = [f"kind: {p.kind}", f"n: {n}"]
    for name, lab in zip(names, p.external):
        lines.append(f"{name}: {','.join(str(x) for x in lab)}")
    lines.append(f"cell: {width}")
    lines.append("")
    inner = set(interior_vertices(n))
    for B in range(2 * n, -1, -1):
        cells = [""] * (4 * n + 1)
        for A in range(0, 2 * n - B + 1):
            col = 2 * A + B
            if A % 2 == 0 and B % 2 == 0:
                cells[col] = _MARK[p.kind] if (A // 2, B // 2) in inner else "."
            elif (A, B) in s:
                cells[col] = str(s[(A, B)])
        lines.append("".join(c.rjust(width) for c in cells).rstrip())
    return "\n".join(lines) + "\n"


def parse_pictograph(text: str) -> Pictograph:
    head, _, body = text.partition("\n\n")
    meta = {}
    for line in head.splitlines():
        key, _, val = line.partition(":")
        meta[key.strip()] = val.strip()
    n = int(meta["n"])
    width = int(meta["cell"])

    def labels(v):
        return tuple(int(x) for x in v.split(",")) if v else ()

    ext = tuple(labels(meta[k]) for k in ("lambda", "mu", "nu"))
    rows = body.splitlines()
    out = {}
    for i, line in enumerate(rows[: 2 * n + 1]):
        B = 2 * n - i
        for col in range(4 * n + 1):
            tok = line[col * width:(col + 1) * width].strip()
            if not tok or not (tok.isdigit() or tok.lstrip("-").isdigit()):
                continue
            A = (col - B) // 2
            out[(A, B)] = int(tok)
    return Pictograph(meta["kind"], n, tuple(sorted(out.items())), ext)
