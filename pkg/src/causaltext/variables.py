"""Variable tables: ordered labels plus optional long-name aliases."""

from __future__ import annotations

from typing import Iterable, Mapping

from .errors import ConsistencyError, UnknownVariableError

LETTERS = "ABCDEF"


class VariableTable:
    """Ordered register of variable labels.

    The position of a label defines the row/column index used by adjacency
    matrices and relation sets, so the order is part of the contract. A label
    may carry a long-name alias (for example ``CD`` standing for
    ``central density``); aliases resolve case-insensitively.
    """

    __slots__ = ("_names", "_aliases", "_index", "_alias_index")

    def __init__(self, names: Iterable[str], aliases: Mapping[str, str] | None = None):
        names = tuple(str(n) for n in names)
        if not names:
            raise ConsistencyError("a variable table needs at least one label")
        for name in names:
            if not name or name != name.strip():
                raise ConsistencyError(f"bad variable label: {name!r}")
        if len(set(names)) != len(names):
            raise ConsistencyError(f"duplicate variable labels in {names}")
        aliases = dict(aliases or {})
        for label, long_name in aliases.items():
            if label not in names:
                raise ConsistencyError(f"alias target {label!r} is not a declared label")
            if not long_name or not long_name.strip():
                raise ConsistencyError(f"empty alias for {label!r}")
        lowered = [a.lower() for a in aliases.values()]
        if len(set(lowered)) != len(lowered):
            raise ConsistencyError("alias names collide")
        # an alias may repeat its own label (identity alias) but no other
        for label, long_name in aliases.items():
            for other in names:
                if other != label and long_name.lower() == other.lower():
                    raise ConsistencyError(
                        f"alias {long_name!r} for {label!r} collides with label {other!r}")
        self._names = names
        self._aliases = aliases
        self._index = {n: i for i, n in enumerate(names)}
        self._alias_index = {a.lower(): self._index[l] for l, a in aliases.items()}

    @classmethod
    def letters(cls, n: int) -> "VariableTable":
        """Table of the first ``n`` single-letter labels A, B, C, ..."""
        if not 1 <= n <= len(LETTERS):
            raise ConsistencyError(f"letter tables support 1..{len(LETTERS)} variables, got {n}")
        return cls(LETTERS[:n])

    @property
    def names(self) -> tuple[str, ...]:
        return self._names

    @property
    def aliases(self) -> dict[str, str]:
        return dict(self._aliases)

    def index(self, mention: str) -> int:
        """Resolve a label or alias to its index."""
        mention = mention.strip()
        if mention in self._index:
            return self._index[mention]
        low = mention.lower()
        if low in self._alias_index:
            return self._alias_index[low]
        for name, i in self._index.items():
            if name.lower() == low:
                return i
        raise UnknownVariableError(f"unknown variable mention: {mention!r}")

    def label(self, i: int) -> str:
        return self._names[i]

    def alias_of(self, label: str) -> str | None:
        return self._aliases.get(label)

    def display(self, i: int) -> str:
        """Alias when one exists, otherwise the bare label."""
        label = self._names[i]
        return self._aliases.get(label, label)

    def __len__(self) -> int:
        return len(self._names)

    def __iter__(self):
        return iter(self._names)

    def __contains__(self, mention) -> bool:
        try:
            self.index(mention)
        except UnknownVariableError:
            return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, VariableTable):
            return NotImplemented
        return self._names == other._names and self._aliases == other._aliases

    def __hash__(self) -> int:
        return hash((self._names, tuple(sorted(self._aliases.items()))))

    def __repr__(self) -> str:
        if self._aliases:
            return f"VariableTable({list(self._names)}, aliases={self._aliases})"
        return f"VariableTable({list(self._names)})"
