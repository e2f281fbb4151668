from __future__ import annotations

import json
from typing import Any, Iterator

AUX = "aux"


class VarMapError(ValueError):
    pass


class VarMap:
    """Registry of semantic variable families.

    Each family maps an index tuple (e.g. ``(vertex, color)``) to a CNF
    variable.  Variables are handed out densely in allocation order, so the
    encoder decides the numbering simply by the order it calls :meth:`new`.
    """

    def __init__(self, meta: dict[str, Any] | None = None):
        self.families: dict[str, dict[tuple, int]] = {}
        self.meta: dict[str, Any] = dict(meta or {})
        self._next = 1

    @property
    def num_vars(self) -> int:
        return self._next - 1

    def new(self, family: str, *index) -> int:
        fam = self.families.setdefault(family, {})
        if index in fam:
            raise VarMapError(f"{family}{index} already registered")
        var = self._next
        fam[index] = var
        self._next += 1
        return var

    def var(self, family: str, *index) -> int:
        try:
            return self.families[family][index]
        except KeyError:
            raise KeyError(f"no variable {family}{index}") from None

    def get(self, family: str, *index, default=None):
        return self.families.get(family, {}).get(index, default)

    def family(self, family: str) -> dict[tuple, int]:
        return self.families.get(family, {})

    def items(self) -> Iterator[tuple[str, tuple, int]]:
        for name, fam in self.families.items():
            for index, var in fam.items():
                yield name, index, var

    def reverse(self) -> dict[int, tuple[str, tuple]]:
        return {var: (name, index) for name, index, var in self.items()}

    def decision_vars(self) -> list[int]:
        return sorted(v for name, _, v in self.items() if name != AUX)

    def validate(self, num_vars: int | None = None) -> None:
        """Check injectivity, prefix coverage and the trailing ``aux`` block."""
        if num_vars is None:
            num_vars = self.num_vars
        seen: dict[int, str] = {}
        for name, index, var in self.items():
            if var in seen:
                raise VarMapError(f"var {var} registered twice ({seen[var]}, {name}{index})")
            seen[var] = name
        if set(seen) != set(range(1, num_vars + 1)):
            missing = sorted(set(range(1, num_vars + 1)) - set(seen))[:5]
            extra = sorted(set(seen) - set(range(1, num_vars + 1)))[:5]
            raise VarMapError(f"varmap does not cover 1..{num_vars} (missing {missing}, extra {extra})")
        aux = [v for v, name in seen.items() if name == AUX]
        main = [v for v, name in seen.items() if name != AUX]
        if aux and main and min(aux) < max(main):
            raise VarMapError("aux variables must follow all semantic variables")

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "families": {
                name: [[list(index), var] for index, var in fam.items()]
                for name, fam in self.families.items()
            },
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "VarMap":
        vm = cls(data.get("meta"))
        top = 0
        for name, entries in data.get("families", {}).items():
            fam = vm.families.setdefault(name, {})
            for index, var in entries:
                fam[tuple(index)] = int(var)
                top = max(top, int(var))
        vm._next = top + 1
        return vm

    @classmethod
    def from_json(cls, text: str | bytes) -> "VarMap":
        return cls.from_dict(json.loads(text))

    def __eq__(self, other):
        if not isinstance(other, VarMap):
            return NotImplemented
        return self.families == other.families and self.meta == other.meta

    def __repr__(self):
        sizes = {k: len(v) for k, v in self.families.items()}
        return f"VarMap({sizes}, meta={self.meta})"
