"""Jet spaces: derivative coordinates and total derivative operators."""
from __future__ import annotations

from itertools import combinations_with_replacement
from types import SimpleNamespace

from .expr import Expr, as_expr
from .symbols import Kind, Symbol, symbol


class DuplicateName(Exception):
    pass


class OrderExceeded(Exception):
    pass


MultiIndex = tuple  # counts per independent variable, e.g. (1, 0, 2)


def mi_order(mi: MultiIndex) -> int:
    return sum(mi)


def mi_add(mi: MultiIndex, i: int) -> MultiIndex:
    return mi[:i] + (mi[i] + 1,) + mi[i + 1:]


class JetSpace:
    """Independent/dependent variables plus derivative coordinates.

    Symmetric derivatives are identified: one coordinate per unordered
    multiset of independents.  Coordinates beyond max_order exist only when a
    caller explicitly escalates a total derivative.
    """

    def __init__(self, independents, dependents, max_order: int):
        if max_order < 1:
            raise ValueError("order must be at least 1")
        names = [s if isinstance(s, str) else s.name for s in
                 list(independents) + list(dependents)]
        if len(set(names)) != len(names):
            raise DuplicateName(f"duplicate variable name in {names}")
        self.independents = tuple(
            symbol(n, Kind.INDEPENDENT) if isinstance(n, str) else n
            for n in independents)
        self.dependents = tuple(
            symbol(n, Kind.DEPENDENT) if isinstance(n, str) else n
            for n in dependents)
        self.max_order = max_order
        self._jets: dict[tuple[int, MultiIndex], Symbol] = {}
        self._decode: dict[Symbol, tuple[int, MultiIndex]] = {}
        nind = len(self.independents)
        for k in range(1, max_order + 1):
            for d in range(len(self.dependents)):
                for combo in combinations_with_replacement(range(nind), k):
                    mi = tuple(combo.count(i) for i in range(nind))
                    self._mint(d, mi)

    def _mint(self, dep_idx: int, mi: MultiIndex) -> Symbol:
        key = (dep_idx, mi)
        s = self._jets.get(key)
        if s is None:
            name = self._jet_name(dep_idx, mi)
            s = symbol(name, Kind.JET)
            self._jets[key] = s
            self._decode[s] = key
        return s

    def _jet_name(self, dep_idx: int, mi: MultiIndex) -> str:
        suffix = "".join(ind.name * mi[i]
                         for i, ind in enumerate(self.independents))
        return f"{self.dependents[dep_idx].name}_{suffix}"

    # -- coordinate access ---------------------------------------------------

    def coordinate(self, dep, mi: MultiIndex, escalate: bool = False) -> Symbol:
        if isinstance(dep, Symbol):
            dep = self.dependents.index(dep)
        if mi_order(mi) == 0:
            return self.dependents[dep]
        if mi_order(mi) > self.max_order:
            if not escalate:
                raise OrderExceeded(
                    f"order {mi_order(mi)} exceeds declared maximum "
                    f"{self.max_order}")
            return self._mint(dep, mi)
        return self._jets[(dep, mi)]

    def jet(self, dep_name: str, suffix: str) -> Symbol:
        """Coordinate by name parts, e.g. jet('u', 'tr1') for u_tr1."""
        dep_idx = [d.name for d in self.dependents].index(dep_name)
        mi = self.parse_suffix(suffix)
        if mi is None:
            raise KeyError(f"cannot parse derivative suffix {suffix!r}")
        return self.coordinate(dep_idx, mi)

    def parse_suffix(self, suffix: str) -> MultiIndex | None:
        """Greedy longest-match parse of an independent-name sequence."""
        names = sorted(((ind.name, i) for i, ind in
                        enumerate(self.independents)),
                       key=lambda p: -len(p[0]))
        counts = [0] * len(self.independents)

        def walk(rest: str) -> bool:
            if not rest:
                return True
            for name, i in names:
                if rest.startswith(name):
                    counts[i] += 1
                    if walk(rest[len(name):]):
                        return True
                    counts[i] -= 1
            return False

        if not walk(suffix):
            return None
        return tuple(counts)

    def decode(self, s: Symbol):
        """(dependent index, MultiIndex) or None for non-jet symbols."""
        got = self._decode.get(s)
        if got is not None:
            return got
        if s in self.dependents:
            return (self.dependents.index(s),
                    (0,) * len(self.independents))
        return None

    def coordinates(self, order: int | None = None) -> list[Symbol]:
        if order is None:
            order = self.max_order
        out = list(self.independents) + list(self.dependents)
        for k in range(1, order + 1):
            level = [(key, s) for key, s in self._jets.items()
                     if mi_order(key[1]) == k]
            level.sort(key=lambda ks: (ks[0][0], ks[0][1]))
            out.extend(s for _, s in level)
        return out

    def base_coordinates(self) -> list[Symbol]:
        return list(self.independents) + list(self.dependents)

    def jet_order(self, e: Expr) -> int:
        """Highest derivative order appearing in e (0 when none)."""
        top = 0
        for i in e.symbol_ids():
            from .symbols import by_id
            got = self._decode.get(by_id(i))
            if got is not None:
                top = max(top, mi_order(got[1]))
        return top

    def ns(self) -> SimpleNamespace:
        """Expression atoms for every coordinate, by name."""
        return SimpleNamespace(
            **{s.name: as_expr(s) for s in self.coordinates()})

    # -- total derivatives -----------------------------------------------------

    def total_derivative(self, e: Expr, i: int, escalate: bool = False) -> Expr:
        """D_i e = de/dx_i + sum over coordinates u_J of u_{J+e_i} * de/du_J."""
        from .symbols import by_id

        out = e.derivative(self.independents[i])
        for sid in sorted(e.symbol_ids()):
            s = by_id(sid)
            got = self.decode(s)
            if got is None:
                continue
            dep, mi = got
            nxt = self.coordinate(dep, mi_add(mi, i), escalate=escalate)
            out = out + e.derivative(s) * as_expr(nxt)
        return out

    def __repr__(self):
        return (f"JetSpace({', '.join(s.name for s in self.independents)} | "
                f"{', '.join(s.name for s in self.dependents)} | "
                f"order {self.max_order})")


def coordinate_count(n_ind: int, n_dep: int, order: int) -> int:
    """Closed-form count matching JetSpace.coordinates()."""
    from math import comb

    jets = sum(comb(n_ind + k - 1, k) for k in range(1, order + 1))
    return n_ind + n_dep * (1 + jets)
