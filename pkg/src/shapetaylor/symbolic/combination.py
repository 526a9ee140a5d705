"""Integer linear combinations with powers of i*lambda as the only scalar."""

from __future__ import annotations


class Combination:
    """Finite sum of ``c * (i lambda)**p * item`` with integer ``c``.

    Items must be hashable. Terms with zero coefficient are dropped eagerly,
    so two combinations are equal iff their dictionaries are equal.
    """

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for (p, item), c in terms.items():
                self._put(p, item, c)

    @classmethod
    def single(cls, item, c=1, p=0):
        out = cls()
        out._put(p, item, c)
        return out

    def _put(self, p, item, c):
        key = (p, item)
        total = self.terms.get(key, 0) + c
        if total:
            self.terms[key] = total
        else:
            self.terms.pop(key, None)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, Combination) and self.terms == other.terms

    def items(self):
        """Yield ``(c, p, item)`` triples."""
        for (p, item), c in self.terms.items():
            yield c, p, item

    def __add__(self, other):
        out = Combination(self.terms)
        for c, p, item in other.items():
            out._put(p, item, c)
        return out

    def __neg__(self):
        return self.scaled(-1)

    def __sub__(self, other):
        return self + (-other)

    def scaled(self, c=1, p=0):
        out = Combination()
        if c:
            for ci, pi, item in self.items():
                out._put(pi + p, item, ci * c)
        return out

    def map(self, func):
        """Apply a linear map given on items; ``func(item)`` returns a Combination."""
        out = Combination()
        for c, p, item in self.items():
            for c2, p2, item2 in func(item).items():
                out._put(p + p2, item2, c * c2)
        return out

    def product(self, other, func):
        """Bilinear extension of ``func(item_a, item_b) -> Combination``."""
        out = Combination()
        for ca, pa, a in self.items():
            for cb, pb, b in other.items():
                for c, p, item in func(a, b).items():
                    out._put(pa + pb + p, item, ca * cb * c)
        return out


def coefficient_text(c, p):
    """Magnitude part of a coefficient, e.g. ``"2 i lambda "``; sign excluded."""
    text = f"{abs(c)} " if abs(c) != 1 else ""
    if p == 1:
        text += "i lambda "
    elif p > 1:
        text += f"(i lambda)^{p} "
    return text


def term_line(c, p, body):
    return ("- " if c < 0 else "+ ") + coefficient_text(c, p) + body
