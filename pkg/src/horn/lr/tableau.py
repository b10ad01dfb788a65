"""Littlewood-Richardson skew tableaux, used as an independent oracle."""

from __future__ import annotations

from ..spectra import DynkinWeight


def lr_skew_count(lam, mu, nu) -> int:
    """Number of LR tableaux of shape nu / lam and content mu (partitions)."""
    lam = list(lam) + [0] * (len(nu) - len(lam))
    mu = [m for m in mu if m > 0]
    nu = list(nu)
    if sum(nu) != sum(lam) + sum(mu):
        return 0
    if any(l > v for l, v in zip(lam, nu)):
        return 0
    rows = [(r, lam[r], nu[r]) for r in range(len(nu)) if nu[r] > lam[r]]
    # reading order: rows top to bottom, each right to left
    cells = [(r, c) for r, lo, hi in rows for c in range(hi - 1, lo - 1, -1)]
    filling = {}
    counts = [0] * (len(mu) + 1)

    def rec(idx):
        if idx == len(cells):
            return 1
        r, c = cells[idx]
        hi = len(mu)
        right = filling.get((r, c + 1))
        if right is not None:
            hi = min(hi, right)
        lo = 1
        above = filling.get((r - 1, c))
        if above is not None:
            lo = above + 1
        total = 0
        for v in range(lo, hi + 1):
            if counts[v] >= mu[v - 1]:
                continue
            if v > 1 and counts[v] + 1 > counts[v - 1]:
                continue
            counts[v] += 1
            filling[(r, c)] = v
            total += rec(idx + 1)
            del filling[(r, c)]
            counts[v] -= 1
        return total

    return rec(0)


def lr_tableau_oracle(lam: DynkinWeight, mu: DynkinWeight, nu: DynkinWeight) -> int:
    """N_{lambda mu}^nu from the skew-tableau rule on the GL(n) partitions."""
    lam, mu, nu = (w if isinstance(w, DynkinWeight) else DynkinWeight(tuple(w)) for w in (lam, mu, nu))
    lp, mp, np_ = lam.partition(), mu.partition(), nu.partition()
    n = len(lp)
    excess = sum(lp) + sum(mp) - sum(np_)
    if excess < 0 or excess % n:
        return 0
    k = excess // n
    return lr_skew_count(lp, mp, [x + k for x in np_])
