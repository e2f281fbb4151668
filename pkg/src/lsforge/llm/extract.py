"""Pull candidate source out of a model response."""

from __future__ import annotations

import ast
import re

ENTRY = "local_search"

_FENCE = re.compile(r"```[ \t]*([A-Za-z0-9_+-]*)[^\n]*\n(.*?)```", re.DOTALL)


class ExtractionError(ValueError):
    pass


def extract_code(response: str) -> str:
    """The fenced block defining ``local_search``; otherwise the largest
    python block; otherwise the whole response if it defines the entry."""
    blocks = [(lang.lower(), body) for lang, body in _FENCE.findall(response)]
    with_entry = [b for _, b in blocks if re.search(rf"^\s*def\s+{ENTRY}\s*\(", b, re.MULTILINE)]
    if with_entry:
        return _clean(with_entry[0])
    py = [b for lang, b in blocks if lang in ("python", "py", "python3", "")]
    if py:
        return _clean(max(py, key=len))
    if re.search(rf"^def\s+{ENTRY}\s*\(", response, re.MULTILINE):
        return _clean(response)
    raise ExtractionError("no code block found in the response")


def _clean(src: str) -> str:
    return src.strip("\n") + "\n"


def summarize(source: str, limit: int = 120) -> str:
    """One-line description of a candidate: its docstring's first line, or
    its first comment, or the helper function names."""
    try:
        tree = ast.parse(source)
    except SyntaxError:
        tree = None
    if tree is not None:
        for node in [tree] + [n for n in tree.body if isinstance(n, ast.FunctionDef) and n.name == ENTRY]:
            doc = ast.get_docstring(node)
            if doc:
                return doc.strip().splitlines()[0][:limit]
    for line in source.splitlines():
        s = line.strip()
        if s.startswith("#") and len(s) > 2:
            return s.lstrip("# ").strip()[:limit]
    if tree is not None:
        names = [n.name for n in tree.body if isinstance(n, ast.FunctionDef)]
        return ("functions: " + ", ".join(names))[:limit]
    return "unparseable source"
