"""Interned scalar symbols shared by every expression in a session."""
from __future__ import annotations

import threading
from enum import Enum


class Kind(Enum):
    INDEPENDENT = "independent"
    DEPENDENT = "dependent"
    JET = "jet"
    PARAMETER = "parameter"


class SymbolClash(Exception):
    """Same name requested with two different kinds."""


class Symbol:
    __slots__ = ("id", "name", "kind")

    def __init__(self, id: int, name: str, kind: Kind):
        self.id = id
        self.name = name
        self.kind = kind

    def __repr__(self):
        return f"Symbol({self.name})"

    def __hash__(self):
        return self.id

    def __eq__(self, other):
        return self is other

    def __lt__(self, other):
        return self.id < other.id


class _Interner:
    """One symbol per name per session; writes serialized, reads lock-free."""

    def __init__(self):
        self._lock = threading.Lock()
        self._by_name: dict[str, Symbol] = {}
        self._by_id: list[Symbol] = []

    def intern(self, name: str, kind: Kind) -> Symbol:
        sym = self._by_name.get(name)
        if sym is not None:
            if sym.kind is not kind:
                raise SymbolClash(
                    f"symbol {name!r} already interned as {sym.kind.value}, "
                    f"requested {kind.value}"
                )
            return sym
        with self._lock:
            sym = self._by_name.get(name)
            if sym is not None:
                if sym.kind is not kind:
                    raise SymbolClash(name)
                return sym
            sym = Symbol(len(self._by_id), name, kind)
            self._by_id.append(sym)
            self._by_name[name] = sym
            return sym

    def lookup(self, name: str) -> Symbol | None:
        return self._by_name.get(name)

    def by_id(self, id: int) -> Symbol:
        return self._by_id[id]


_INTERNER = _Interner()


def symbol(name: str, kind: Kind = Kind.PARAMETER) -> Symbol:
    return _INTERNER.intern(name, kind)


def parameter(name: str) -> Symbol:
    return _INTERNER.intern(name, Kind.PARAMETER)


def lookup(name: str) -> Symbol | None:
    return _INTERNER.lookup(name)


def by_id(id: int) -> Symbol:
    return _INTERNER.by_id(id)
