"""Finite partial application tables and the exhaustive finite-pca search."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .fuel import Diverged
from .kernel import Model

MAX_SEARCH_SIZE = 3


@dataclass(frozen=True)
class FiniteTable:
    """``rows[a][b]`` is the index of ``a·b`` or None where undefined."""

    rows: Tuple[Tuple[Optional[int], ...], ...]
    k: int
    s: int

    def __post_init__(self):
        n = len(self.rows)
        if n == 0:
            raise ValueError("empty table")
        for row in self.rows:
            if len(row) != n:
                raise ValueError("table must be square")
            for v in row:
                if v is not None and not 0 <= v < n:
                    raise ValueError(f"entry {v} out of range")
        if not (0 <= self.k < n and 0 <= self.s < n):
            raise ValueError("k/s index out of range")

    @property
    def size(self) -> int:
        return len(self.rows)

    def app(self, a: int, b: int) -> Optional[int]:
        return self.rows[a][b]

    def dumps(self) -> str:
        lines = [f"k={self.k} s={self.s}"]
        for row in self.rows:
            lines.append(" ".join("." if v is None else str(v) for v in row))
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "FiniteTable":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        header = dict(part.split("=") for part in lines[0].split())
        rows = tuple(
            tuple(None if tok == "." else int(tok) for tok in ln.split()) for ln in lines[1:]
        )
        return cls(rows, int(header["k"]), int(header["s"]))


@dataclass(frozen=True)
class AxiomCheck:
    ok: bool
    clause: str = ""
    triple: Tuple[int, ...] = ()

    def __bool__(self):
        return self.ok


def check_pas_axioms(table: FiniteTable) -> AxiomCheck:
    """Do the designated k and s satisfy both combinator clauses everywhere?"""
    n, ap, k, s = table.size, table.app, table.k, table.s
    for a in range(n):
        ka = ap(k, a)
        if ka is None:
            return AxiomCheck(False, "k a defined", (a,))
        for b in range(n):
            if ap(ka, b) != a:
                return AxiomCheck(False, "k a b = a", (a, b))
    for a in range(n):
        sa = ap(s, a)
        for b in range(n):
            sab = None if sa is None else ap(sa, b)
            if sab is None:
                return AxiomCheck(False, "s a b defined", (a, b))
            for c in range(n):
                ac, bc = ap(a, c), ap(b, c)
                rhs = None if ac is None or bc is None else ap(ac, bc)
                if ap(sab, c) != rhs:
                    return AxiomCheck(False, "s a b c = a c (b c)", (a, b, c))
    return AxiomCheck(True)


def all_tables(n: int):
    cells = list(itertools.product(range(n), repeat=2))
    for values in itertools.product([None] + list(range(n)), repeat=len(cells)):
        rows = [[None] * n for _ in range(n)]
        for (a, b), v in zip(cells, values):
            rows[a][b] = v
        yield tuple(tuple(r) for r in rows)


def search_finite_pca(n: int) -> dict:
    """Every table of size ``n`` with a (k, s) designation satisfying the axioms.

    The k row is chosen first; ``k a b = a`` then forces the whole row of
    each ``k a`` to be constant ``a``, which prunes almost everything.  The
    remaining free cells are enumerated and checked in full.
    """
    if not 1 <= n <= MAX_SEARCH_SIZE:
        raise ValueError(f"search size must be in 1..{MAX_SEARCH_SIZE}")
    found: List[FiniteTable] = []
    checked = 0
    for k, s in itertools.product(range(n), repeat=2):
        for krow in itertools.product(range(n), repeat=n):
            forced = {k: tuple(krow)}
            ok = True
            for a, ka in enumerate(krow):
                row = (a,) * n
                if forced.get(ka, row) != row:
                    ok = False
                    break
                forced[ka] = row
            if not ok:
                continue
            free = [(a, b) for a in range(n) if a not in forced for b in range(n)]
            for values in itertools.product([None] + list(range(n)), repeat=len(free)):
                rows = [list(forced.get(a, (None,) * n)) for a in range(n)]
                for (a, b), v in zip(free, values):
                    rows[a][b] = v
                table = FiniteTable(tuple(tuple(r) for r in rows), k, s)
                checked += 1
                if check_pas_axioms(table):
                    found.append(table)
    found.sort(key=lambda t: (t.k, t.s, t.dumps()))
    return {"n": n, "checked": checked, "structures": found}


class FiniteTableModel(Model):
    def __init__(self, table: FiniteTable):
        super().__init__()
        self.table = table
        self.name = f"table{table.size}"
        self.constants = {"k": table.k, "s": table.s}

    def apply_raw(self, a, b, budget):
        budget.charge()
        v = self.table.app(a, b)
        if v is None:
            raise Diverged("undefined table entry")
        return v

    def divergent_pair(self):
        for a, b in itertools.product(range(self.table.size), repeat=2):
            if self.table.app(a, b) is None:
                return a, b
        return None


ONE_POINT = FiniteTable(((0,),), 0, 0)
