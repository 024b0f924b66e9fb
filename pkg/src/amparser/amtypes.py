"""Recursive AM types and the type-level operation arithmetic.

A type maps source names to annotation types.  ``BOTTOM`` is the type of the
dummy constant assigned to semantically empty tokens.  Operations that are
undefined return ``None`` instead of raising, because the decoders branch on
definedness in their inner loops.

Types are interned: two structurally equal types are the same object, so
``is`` comparison and hashing are O(1).
"""

from __future__ import annotations

import re
import threading
from functools import lru_cache
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Tuple, Union

SOURCE_RE = re.compile(r"^[a-z0-9]+$")


class TypeSyntaxError(ValueError):
    pass


def check_source_name(name: str) -> str:
    if not isinstance(name, str) or not SOURCE_RE.match(name):
        raise ValueError(f"illegal source name {name!r}")
    if name == "root":
        raise ValueError("'root' is reserved and cannot be a source name")
    return name


class AmType:
    """Finite map from source names to annotation types (interned)."""

    __slots__ = ("entries", "_map", "_hash", "__weakref__")

    _interned: dict = {}
    _lock = threading.Lock()

    entries: Tuple[Tuple[str, "AmType"], ...]

    def __new__(cls, entries: Union[Mapping[str, "AmType"], Iterable[Tuple[str, "AmType"]]] = ()):
        items = list(entries.items()) if isinstance(entries, Mapping) else list(entries)
        seen = set()
        for name, ann in items:
            check_source_name(name)
            if name in seen:
                raise ValueError(f"duplicate source {name!r} in type")
            seen.add(name)
            if not isinstance(ann, AmType) or ann is BOTTOM:
                raise TypeError(f"annotation of {name!r} must be a non-bottom AmType")
            if occurs_in(ann, name):
                raise ValueError(f"source {name!r} occurs inside its own annotation")
        key = tuple(sorted(items))
        found = cls._interned.get(key)
        if found is not None:
            return found
        with cls._lock:
            found = cls._interned.get(key)
            if found is None:
                found = object.__new__(cls)
                found.entries = key
                found._map = dict(key)
                found._hash = hash(key)
                cls._interned[key] = found
        return found

    def __reduce__(self):
        return (AmType, (self.entries,))

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        return self is other

    def __lt__(self, other: "AmType") -> bool:
        return render_type(self) < render_type(other)

    def __contains__(self, name: str) -> bool:
        return name in self._map

    def __getitem__(self, name: str) -> "AmType":
        return self._map[name]

    def __iter__(self) -> Iterator[str]:
        return (name for name, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def get(self, name: str, default=None):
        return self._map.get(name, default)

    def items(self):
        return self.entries

    def sources(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def without(self, name: str) -> "AmType":
        return AmType((n, t) for n, t in self.entries if n != name)

    def __repr__(self) -> str:
        return f"AmType({render_type(self)})"


class _Bottom:
    """The type of the dummy constant; distinct from the empty type."""

    __slots__ = ()
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = object.__new__(cls)
        return cls._instance

    def __reduce__(self):
        return (_Bottom, ())

    def __repr__(self) -> str:
        return "BOTTOM"

    def __lt__(self, other) -> bool:
        return render_type(self) < render_type(other)

    def __len__(self) -> int:
        return 0


BOTTOM = _Bottom()
EMPTY = AmType()

TypeLike = Union[AmType, _Bottom]


@dataclass(frozen=True, order=True)
class EdgeOp:
    kind: str
    source: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("APP", "MOD", "IGNORE"):
            raise ValueError(f"unknown operation kind {self.kind!r}")
        if self.kind == "IGNORE":
            if self.source is not None:
                raise ValueError("IGNORE takes no source")
        else:
            check_source_name(self.source)

    def __str__(self) -> str:
        return "IGNORE" if self.kind == "IGNORE" else f"{self.kind}_{self.source}"

    @classmethod
    def parse(cls, text: str) -> "EdgeOp":
        text = text.strip()
        if text == "IGNORE":
            return IGNORE
        kind, sep, source = text.partition("_")
        if not sep or kind not in ("APP", "MOD"):
            raise ValueError(f"unknown edge label {text!r}")
        return cls(kind, source)


IGNORE = EdgeOp("IGNORE")


def APP(source: str) -> EdgeOp:
    return EdgeOp("APP", source)


def MOD(source: str) -> EdgeOp:
    return EdgeOp("MOD", source)


# --- syntax -----------------------------------------------------------------


def render_type(t: TypeLike) -> str:
    if t is BOTTOM:
        return "_|_"
    return "(" + ", ".join(_render_entry(n, a) for n, a in t.entries) + ")"


def _render_entry(name: str, ann: AmType) -> str:
    return name if not len(ann) else name + render_type(ann)


def parse_type(text: str) -> TypeLike:
    text = text.strip()
    if text == "_|_":
        return BOTTOM
    t, pos = _parse_type_at(text, 0)
    if text[pos:].strip():
        raise TypeSyntaxError(f"trailing input at position {pos} in {text!r}")
    return t


def _skip_ws(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _parse_type_at(text: str, pos: int) -> Tuple[AmType, int]:
    pos = _skip_ws(text, pos)
    if pos >= len(text) or text[pos] != "(":
        raise TypeSyntaxError(f"expected '(' at position {pos} in {text!r}")
    pos = _skip_ws(text, pos + 1)
    entries = {}
    if pos < len(text) and text[pos] == ")":
        return EMPTY, pos + 1
    while True:
        m = re.compile(r"[A-Za-z0-9]+").match(text, pos)
        if not m:
            raise TypeSyntaxError(f"expected source name at position {pos} in {text!r}")
        name = m.group(0)
        try:
            check_source_name(name)
        except ValueError as exc:
            raise TypeSyntaxError(f"{exc} at position {pos}") from None
        pos = _skip_ws(text, m.end())
        ann = EMPTY
        if pos < len(text) and text[pos] == "(":
            ann, pos = _parse_type_at(text, pos)
            pos = _skip_ws(text, pos)
        if name in entries:
            raise TypeSyntaxError(f"duplicate source {name!r} at position {m.start()} in {text!r}")
        entries[name] = ann
        if pos < len(text) and text[pos] == ",":
            pos = _skip_ws(text, pos + 1)
            continue
        if pos < len(text) and text[pos] == ")":
            try:
                return AmType(entries), pos + 1
            except ValueError as exc:
                raise TypeSyntaxError(f"{exc} in {text!r}") from None
        raise TypeSyntaxError(f"expected ',' or ')' at position {pos} in {text!r}")


# --- operations -------------------------------------------------------------


@lru_cache(maxsize=100_000)
def occurs_in(t: AmType, name: str) -> bool:
    """True if `name` is a source anywhere inside `t`, at any depth."""
    return any(n == name or occurs_in(ann, name) for n, ann in t.entries)


def requested_elsewhere(t: AmType, name: str) -> bool:
    """True if `name` occurs (at any depth) in the annotation of another source of `t`.

    Such a source must stay open until the requesting source is filled,
    otherwise the filler could later reintroduce it.
    """
    return any(other != name and occurs_in(ann, name) for other, ann in t.entries)


@lru_cache(maxsize=200_000)
def apply_type(t1: TypeLike, a: str, t2: TypeLike) -> Optional[AmType]:
    """Result type of APP_a(t1, t2), or None where undefined.

    The argument's sources are unified with same-named head sources, so the
    result is (t1 - a) merged with t2.  A source that some other open source
    still requests in its annotation cannot be filled yet.
    """
    if t1 is BOTTOM or t2 is BOTTOM or a not in t1:
        return None
    if t1[a] is not t2 or requested_elsewhere(t1, a):
        return None
    merged = {n: ann for n, ann in t1.entries if n != a}
    for name, ann in t2.entries:
        prev = merged.get(name)
        if prev is not None and prev is not ann:
            return None
        merged[name] = ann
    return AmType(merged)


@lru_cache(maxsize=200_000)
def modify_type(th: TypeLike, a: str, tm: TypeLike) -> Optional[AmType]:
    if th is BOTTOM or tm is BOTTOM or a not in tm or tm[a] is not EMPTY:
        return None
    for name, ann in tm.entries:
        if name != a and th.get(name) is not ann:
            return None
    return th


def op_result(op: EdgeOp, t1: TypeLike, t2: TypeLike) -> Optional[TypeLike]:
    if op.kind == "IGNORE":
        # also defined on a bottom head, so bottom subtrees can absorb bottom children
        return t1 if t2 is BOTTOM else None
    if op.kind == "APP":
        return apply_type(t1, op.source, t2)
    return modify_type(t1, op.source, t2)


def open_source_count(t: TypeLike) -> int:
    if t is BOTTOM:
        raise ValueError("open_source_count is undefined on BOTTOM")
    return len(t)


def candidate_ops(head: TypeLike, dep: TypeLike) -> Iterator[EdgeOp]:
    """Every operation whose result is defined for a head/dependent pair."""
    if dep is BOTTOM:
        yield IGNORE
        return
    if head is BOTTOM:
        return
    for name, ann in head.entries:
        if ann is dep and apply_type(head, name, dep) is not None:
            yield APP(name)
    for name, ann in dep.entries:
        if ann is EMPTY and modify_type(head, name, dep) is not None:
            yield MOD(name)
