"""In-memory relational tables with semantically classed columns."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidMapping

SEMANTIC_CLASSES = ("identifier", "categorical", "ordinal", "continuous", "temporal", "text")

# Classes whose values order numerically; topk accepts these.
NUMERIC_CLASSES = ("ordinal", "continuous", "temporal")


@dataclass
class Table:
    name: str
    columns: list[tuple[str, str]]  # (column name, semantic class)
    rows: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        names = [c for c, _ in self.columns]
        if len(set(names)) != len(names):
            raise InvalidMapping(f"duplicate column names in table {self.name}")
        for _, cls in self.columns:
            if cls not in SEMANTIC_CLASSES:
                raise InvalidMapping(f"unknown semantic class {cls!r} in table {self.name}")

    def column_names(self) -> list[str]:
        return [c for c, _ in self.columns]

    def column_class(self, name: str) -> str:
        for col, cls in self.columns:
            if col == name:
                return cls
        raise InvalidMapping(f"table {self.name} has no column {name!r}")

    def col_index(self, name: str) -> int:
        for i, (col, _) in enumerate(self.columns):
            if col == name:
                return i
        raise InvalidMapping(f"table {self.name} has no column {name!r}")

    def values(self, name: str) -> list:
        i = self.col_index(name)
        return [row[i] for row in self.rows]

    def append(self, row: tuple) -> None:
        if len(row) != len(self.columns):
            raise InvalidMapping(
                f"row arity {len(row)} != column arity {len(self.columns)} in {self.name}"
            )
        self.rows.append(tuple(row))

    def distinct_count(self, name: str) -> int:
        return len(set(self.values(name)))

    def as_dicts(self) -> list[dict]:
        names = self.column_names()
        return [dict(zip(names, row)) for row in self.rows]

    def copy(self, name: str | None = None) -> "Table":
        return Table(name or self.name, list(self.columns), [tuple(r) for r in self.rows])

    def __len__(self) -> int:
        return len(self.rows)
