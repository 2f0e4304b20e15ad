"""Global primitive-operation counter for query-cost accounting.

A "primitive operation" is one directory/array read or one loop iteration
inside a query structure.  Structures on the query path report their actual
work through ``add``; the counter is cheap enough to stay always-on.
"""

OPS = 0


def add(k: int) -> None:
    global OPS
    OPS += k


def reset() -> None:
    global OPS
    OPS = 0


def snapshot() -> int:
    return OPS
