"""Simplicial homology with GF(2) coefficients.

Chains are spanned by the non-empty simplices; ``k``-chains by those with
``k+1`` colors.  The boundary of a simplex is the sum of its
codimension-one faces.  Rows of the boundary matrices are Python integers
used as bit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cset import Cset, bits, popcount


@dataclass
class ChainComplexGF2:
    basis: list[list[int]]
    # boundary[k][j] is the bitset (over basis[k-1]) of the boundary of basis[k][j]
    boundary: list[list[int]]

    @property
    def top(self) -> int:
        return len(self.basis) - 1


def chain_complex(x: Cset) -> ChainComplexGF2:
    top = max((popcount(c) for c in x.colors), default=0) - 1
    basis: list[list[int]] = [[] for _ in range(max(top + 1, 0))]
    for s, c in enumerate(x.colors):
        if c:
            basis[popcount(c) - 1].append(s)
    pos = [{s: j for j, s in enumerate(b)} for b in basis]
    boundary: list[list[int]] = [[0] * len(basis[0])] if basis else []
    for k in range(1, len(basis)):
        rows = []
        for s in basis[k]:
            c = x.colors[s]
            v = 0
            for i in bits(c):
                v ^= 1 << pos[k - 1][x.face(s, c & ~(1 << i))]
            rows.append(v)
        boundary.append(rows)
    return ChainComplexGF2(basis, boundary)


def rank_gf2(rows: list[int]) -> int:
    """Rank of the matrix whose rows are the given bitsets."""
    pivots: dict[int, int] = {}
    rank = 0
    for r in rows:
        while r:
            p = r.bit_length() - 1
            if p not in pivots:
                pivots[p] = r
                rank += 1
                break
            r ^= pivots[p]
    return rank


def betti(x: Cset) -> tuple[int, ...]:
    """``b_k = dim C_k - rank d_k - rank d_{k+1}``, for ``k = 0..dim``."""
    cc = chain_complex(x)
    ranks = [rank_gf2(rows) for rows in cc.boundary] + [0]
    return tuple(len(cc.basis[k]) - ranks[k] - ranks[k + 1] for k in range(len(cc.basis)))


def boundary_squared_zero(x: Cset) -> bool:
    """``d_{k-1} d_k = 0`` for every ``k``."""
    cc = chain_complex(x)
    for k in range(2, len(cc.basis)):
        lower = cc.boundary[k - 1]
        for row in cc.boundary[k]:
            acc = 0
            for j in bits(row):
                acc ^= lower[j]
            if acc:
                return False
    return True


def euler_characteristic(x: Cset) -> int:
    return sum((-1) ** (popcount(c) - 1) for c in x.colors if c)
