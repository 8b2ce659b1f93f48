"""Exact-rational truncated power series over weighted generators.

Every characteristic class in the package lives in a :class:`GradedSeries`:
a sparse map from exponent vectors to :class:`fractions.Fraction`, truncated
at a weighted total degree ``D``.  Terms of weight above ``D`` are unknown,
not zero, which is why :meth:`GradedSeries.coeff_of` refuses to answer for
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Union

Rat = Fraction
Exps = tuple[int, ...]
Scalar = Union[int, Fraction]

DEFAULT_TRUNCATION = 8


class SeriesError(ValueError):
    """Contract violation in series arithmetic."""


class TableMismatch(SeriesError):
    pass


def parse_rat(value: Any) -> Fraction:
    """Parse ``"p/q"``, ``"n"`` or an int into an exact rational.

    Floats are rejected: nothing in the symbolic layer consumes them.
    """
    if isinstance(value, bool):
        raise SeriesError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise SeriesError(f"not a rational: {value!r}") from exc
    raise SeriesError(f"not an exact rational: {value!r}")


def format_rat(value: Fraction) -> str:
    return str(value)


@dataclass(frozen=True)
class Generator:
    name: str
    weight: int


class GeneratorTable:
    """Ordered, immutable list of named generators with positive weights."""

    __slots__ = ("_gens", "_index", "weights")

    def __init__(self, gens: Iterable[Generator | tuple[str, int]]):
        items = []
        for g in gens:
            if not isinstance(g, Generator):
                g = Generator(*g)
            if not isinstance(g.weight, int) or g.weight < 1:
                raise SeriesError(f"generator {g.name!r} needs a weight >= 1")
            items.append(g)
        self._gens: tuple[Generator, ...] = tuple(items)
        self._index = {g.name: i for i, g in enumerate(self._gens)}
        if len(self._index) != len(self._gens):
            raise SeriesError("generator names must be unique")
        self.weights: tuple[int, ...] = tuple(g.weight for g in self._gens)

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> GeneratorTable:
        return cls(pairs)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(g.name for g in self._gens)

    def __len__(self) -> int:
        return len(self._gens)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self._gens)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GeneratorTable) and self._gens == other._gens

    def __hash__(self) -> int:
        return hash(self._gens)

    def __repr__(self) -> str:
        inner = ", ".join(f"{g.name}:{g.weight}" for g in self._gens)
        return f"GeneratorTable({inner})"

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise SeriesError(f"unknown generator {name!r}") from None

    def weight_of(self, exps: Exps) -> int:
        return sum(e * w for e, w in zip(exps, self.weights))

    def extend(self, gens: Iterable[Generator | tuple[str, int]]) -> GeneratorTable:
        """Append generators; already-present names must agree on weight."""
        merged = list(self._gens)
        for g in gens:
            if not isinstance(g, Generator):
                g = Generator(*g)
            if g.name in self._index:
                if self._gens[self._index[g.name]].weight != g.weight:
                    raise TableMismatch(f"weight clash for generator {g.name!r}")
                continue
            merged.append(g)
        return GeneratorTable(merged)

    def union(self, other: GeneratorTable) -> GeneratorTable:
        return self.extend(other)

    def to_json(self) -> list[dict[str, Any]]:
        return [{"name": g.name, "weight": g.weight} for g in self._gens]

    @classmethod
    def from_json(cls, data: Sequence[Mapping[str, Any]]) -> GeneratorTable:
        return cls((d["name"], int(d["weight"])) for d in data)


class GradedSeries:
    """Truncated commutative power series with exact rational coefficients.

    Instances are treated as immutable values.  ``terms`` maps exponent
    vectors to nonzero coefficients of weighted degree <= ``truncation``.
    """

    __slots__ = ("table", "truncation", "terms")

    def __init__(self, table: GeneratorTable, truncation: int, terms: Mapping[Exps, Scalar] | None = None):
        if truncation < 0:
            raise SeriesError("truncation must be non-negative")
        self.table = table
        self.truncation = truncation
        n = len(table)
        clean: dict[Exps, Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != n:
                raise SeriesError(f"exponent vector {exps} has wrong length for {table!r}")
            if any(e < 0 for e in exps):
                raise SeriesError(f"negative exponent in {exps}")
            if table.weight_of(exps) > truncation:
                continue
            c = Fraction(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
        self.terms = {k: v for k, v in clean.items() if v}

    @classmethod
    def _raw(cls, table: GeneratorTable, truncation: int, terms: dict[Exps, Fraction]) -> GradedSeries:
        # caller guarantees canonical terms
        obj = object.__new__(cls)
        obj.table = table
        obj.truncation = truncation
        obj.terms = terms
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, table: GeneratorTable, truncation: int = DEFAULT_TRUNCATION) -> GradedSeries:
        return cls._raw(table, truncation, {})

    @classmethod
    def constant(cls, table: GeneratorTable, value: Scalar, truncation: int = DEFAULT_TRUNCATION) -> GradedSeries:
        value = Fraction(value)
        terms = {(0,) * len(table): value} if value else {}
        return cls._raw(table, truncation, terms)

    @classmethod
    def one(cls, table: GeneratorTable, truncation: int = DEFAULT_TRUNCATION) -> GradedSeries:
        return cls.constant(table, 1, truncation)

    @classmethod
    def generator(cls, table: GeneratorTable, name: str, truncation: int = DEFAULT_TRUNCATION) -> GradedSeries:
        i = table.index(name)
        exps = tuple(1 if j == i else 0 for j in range(len(table)))
        return cls(table, truncation, {exps: 1})

    @classmethod
    def monomial(cls, table: GeneratorTable, exps: Sequence[int], coeff: Scalar = 1,
                 truncation: int = DEFAULT_TRUNCATION) -> GradedSeries:
        return cls(table, truncation, {tuple(exps): coeff})

    # -- basic queries ----------------------------------------------------

    def weight(self, exps: Exps) -> int:
        return self.table.weight_of(exps)

    @property
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.table), Fraction(0))

    def is_zero(self) -> bool:
        return not self.terms

    def min_weight(self) -> int | None:
        """Smallest weight carrying a nonzero term, or None for zero."""
        if not self.terms:
            return None
        return min(self.weight(e) for e in self.terms)

    def coeff_of(self, monomial: Sequence[int]) -> Fraction:
        exps = tuple(monomial)
        if len(exps) != len(self.table):
            raise SeriesError(f"exponent vector {exps} has wrong length")
        if self.weight(exps) > self.truncation:
            raise SeriesError(
                f"monomial {exps} has weight {self.weight(exps)} above truncation {self.truncation}"
            )
        return self.terms.get(exps, Fraction(0))

    def __getitem__(self, monomial: Sequence[int]) -> Fraction:
        return self.coeff_of(monomial)

    def sorted_terms(self) -> list[tuple[Exps, Fraction]]:
        return sorted(self.terms.items())

    def homogeneous_part(self, w: int) -> GradedSeries:
        return GradedSeries._raw(
            self.table, self.truncation, {e: c for e, c in self.terms.items() if self.weight(e) == w}
        )

    def weight_parts(self) -> dict[int, dict[Exps, Fraction]]:
        parts: dict[int, dict[Exps, Fraction]] = {}
        for e, c in self.terms.items():
            parts.setdefault(self.weight(e), {})[e] = c
        return parts

    def is_homogeneous(self, w: int) -> bool:
        return all(self.weight(e) == w for e in self.terms)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other: Any) -> GradedSeries:
        if isinstance(other, GradedSeries):
            if other.table != self.table:
                raise TableMismatch(f"{self.table!r} vs {other.table!r}")
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return GradedSeries.constant(self.table, other, self.truncation)
        return NotImplemented

    def __add__(self, other: Any) -> GradedSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = min(self.truncation, other.truncation)
        out = {e: c for e, c in self.terms.items() if self.weight(e) <= d}
        for e, c in other.terms.items():
            if other.weight(e) > d:
                continue
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return GradedSeries._raw(self.table, d, out)

    __radd__ = __add__

    def __neg__(self) -> GradedSeries:
        return GradedSeries._raw(self.table, self.truncation, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other: Any) -> GradedSeries:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> GradedSeries:
        return (-self) + other

    def scale(self, k: Scalar) -> GradedSeries:
        k = Fraction(k)
        if not k:
            return GradedSeries.zero(self.table, self.truncation)
        return GradedSeries._raw(self.table, self.truncation, {e: k * c for e, c in self.terms.items()})

    def __mul__(self, other: Any) -> GradedSeries:
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d = min(self.truncation, other.truncation)
        a = sorted(((self.weight(e), e, c) for e, c in self.terms.items()), key=lambda t: t[0])
        b = sorted(((other.weight(e), e, c) for e, c in other.terms.items()), key=lambda t: t[0])
        out: dict[Exps, Fraction] = {}
        for wa, ea, ca in a:
            if wa > d:
                break
            room = d - wa
            for wb, eb, cb in b:
                if wb > room:
                    break
                e = tuple(x + y for x, y in zip(ea, eb))
                out[e] = out.get(e, 0) + ca * cb
        return GradedSeries._raw(self.table, d, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> GradedSeries:
        if not isinstance(k, int) or k < 0:
            raise SeriesError("only non-negative integer powers")
        result = GradedSeries.one(self.table, self.truncation)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def invert(self) -> GradedSeries:
        """Multiplicative inverse, solved weight by weight."""
        a0 = self.constant_term
        if not a0:
            raise SeriesError("cannot invert a series with zero constant term")
        d = self.truncation
        parts = self.weight_parts()
        inv0 = 1 / a0
        zero = (0,) * len(self.table)
        solved: dict[int, dict[Exps, Fraction]] = {0: {zero: inv0}}
        for w in range(1, d + 1):
            acc: dict[Exps, Fraction] = {}
            for j in range(1, w + 1):
                pa = parts.get(j)
                pb = solved.get(w - j)
                if not pa or not pb:
                    continue
                for ea, ca in pa.items():
                    for eb, cb in pb.items():
                        e = tuple(x + y for x, y in zip(ea, eb))
                        acc[e] = acc.get(e, 0) + ca * cb
            solved[w] = {e: -inv0 * c for e, c in acc.items() if c}
        terms = {e: c for part in solved.values() for e, c in part.items()}
        return GradedSeries._raw(self.table, d, terms)

    def truncate(self, d: int) -> GradedSeries:
        if d > self.truncation:
            raise SeriesError(f"cannot raise truncation from {self.truncation} to {d}")
        return GradedSeries._raw(self.table, d, {e: c for e, c in self.terms.items() if self.weight(e) <= d})

    def map_coefficients(self, fn: Callable[[Exps, Fraction], Scalar]) -> GradedSeries:
        return GradedSeries(self.table, self.truncation, {e: fn(e, c) for e, c in self.terms.items()})

    # -- change of ring ---------------------------------------------------

    def embed(self, table: GeneratorTable, truncation: int | None = None) -> GradedSeries:
        """Re-express over a table containing all of this series' generators."""
        idx = [table.index(g.name) for g in self.table]
        for g, j in zip(self.table, idx):
            if table.weights[j] != g.weight:
                raise TableMismatch(f"weight clash for generator {g.name!r}")
        d = self.truncation if truncation is None else min(truncation, self.truncation)
        n = len(table)
        out = {}
        for e, c in self.terms.items():
            new = [0] * n
            for j, k in zip(idx, e):
                new[j] = k
            out[tuple(new)] = c
        return GradedSeries(table, d, out)

    def compose(self, images: Mapping[str, GradedSeries], table: GeneratorTable | None = None,
                truncation: int | None = None) -> GradedSeries:
        """Substitute series for generators.

        Generators absent from ``images`` are carried over unchanged into
        ``table`` (which then must contain them).  Each image must have no
        terms of weight below its generator's weight, so truncation is
        respected.
        """
        if table is None:
            if not images:
                return self
            table = next(iter(images.values())).table
        d = self.truncation if truncation is None else truncation
        for img in images.values():
            if img.table != table:
                raise TableMismatch("images must share the target table")
            d = min(d, img.truncation)
        gens: list[GradedSeries] = []
        for g in self.table:
            if g.name in images:
                img = images[g.name]
                mw = img.min_weight()
                if mw is not None and mw < g.weight:
                    raise SeriesError(
                        f"image of {g.name!r} has weight-{mw} terms below generator weight {g.weight}"
                    )
                gens.append(img)
            else:
                if table.weights[table.index(g.name)] != g.weight:
                    raise TableMismatch(f"weight clash for generator {g.name!r}")
                gens.append(GradedSeries.generator(table, g.name, d))
        powers: list[list[GradedSeries]] = [[GradedSeries.one(table, d)] for _ in gens]

        def power(i: int, k: int) -> GradedSeries:
            cache = powers[i]
            while len(cache) <= k:
                cache.append(cache[-1] * gens[i])
            return cache[k]

        acc: dict[Exps, Fraction] = {}
        for e, c in self.sorted_terms():
            if self.weight(e) > d:
                continue
            term: GradedSeries | None = None
            for i, k in enumerate(e):
                if k:
                    p = power(i, k)
                    term = p if term is None else term * p
            if term is None:
                term = GradedSeries.one(table, d)
            for te, tc in term.terms.items():
                acc[te] = acc.get(te, 0) + c * tc
        return GradedSeries(table, d, acc)

    # -- comparison / display ---------------------------------------------

    def __eq__(self, other: object) -> bool:
        if isinstance(other, GradedSeries):
            return (self.table == other.table and self.truncation == other.truncation
                    and self.terms == other.terms)
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == GradedSeries.constant(self.table, other, self.truncation).terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.table, self.truncation, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        return f"GradedSeries({self}, D={self.truncation})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for e, c in sorted(self.terms.items(), key=lambda t: (self.weight(t[0]), [-x for x in t[0]])):
            mono = "*".join(
                g.name if k == 1 else f"{g.name}^{k}" for g, k in zip(self.table, e) if k
            )
            if not mono:
                pieces.append(str(c))
            elif c == 1:
                pieces.append(mono)
            elif c == -1:
                pieces.append(f"-{mono}")
            else:
                pieces.append(f"{c}*{mono}")
        return " + ".join(pieces).replace("+ -", "- ")

    # -- JSON -------------------------------------------------------------

    def to_json(self) -> dict[str, Any]:
        return {
            "generators": self.table.to_json(),
            "truncation": self.truncation,
            "terms": [{"exps": list(e), "coeff": format_rat(c)} for e, c in self.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> GradedSeries:
        table = GeneratorTable.from_json(data["generators"])
        d = int(data["truncation"])
        terms: dict[Exps, Fraction] = {}
        for t in data.get("terms", []):
            e = tuple(int(x) for x in t["exps"])
            if e in terms:
                raise SeriesError(f"duplicate term {e}")
            if len(e) != len(table):
                raise SeriesError(f"exponent vector {e} has wrong length")
            if table.weight_of(e) > d:
                raise SeriesError(f"term {e} above truncation {d}")
            terms[e] = parse_rat(t["coeff"])
        return cls(table, d, terms)


@dataclass(frozen=True)
class OneVarSeries:
    """Dense one-variable series ``sum coeffs[k] x^k`` known through degree ``order``.

    ``polynomial=True`` asserts the coefficients past ``order`` vanish, which
    lets :func:`substitute` accept arguments with a nonzero constant term.
    """

    coeffs: tuple[Fraction, ...]
    polynomial: bool = False

    def __post_init__(self):
        if not self.coeffs:
            raise SeriesError("a one-variable series needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(parse_rat(c) for c in self.coeffs))

    @classmethod
    def of(cls, coeffs: Iterable[Scalar | str], polynomial: bool = False) -> OneVarSeries:
        return cls(tuple(parse_rat(c) for c in coeffs), polynomial)

    @classmethod
    def from_function(cls, fn: Callable[[int], Scalar], order: int) -> OneVarSeries:
        return cls(tuple(Fraction(fn(k)) for k in range(order + 1)))

    @classmethod
    def zero(cls, order: int) -> OneVarSeries:
        return cls((Fraction(0),) * (order + 1))

    @classmethod
    def monomial(cls, k: int, order: int, coeff: Scalar = 1) -> OneVarSeries:
        return cls.from_function(lambda n: coeff if n == k else 0, order)

    @classmethod
    def exp(cls, order: int, scale: Scalar = 1) -> OneVarSeries:
        """``exp(scale * x)``."""
        s = Fraction(scale)
        return cls.from_function(lambda k: s**k / math.factorial(k), order)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> OneVarSeries:
        if order > self.order:
            if self.polynomial:
                return OneVarSeries(self.coeffs + (Fraction(0),) * (order - self.order), True)
            raise SeriesError(f"series only known through degree {self.order}")
        return OneVarSeries(self.coeffs[: order + 1], self.polynomial)

    def _align(self, other: OneVarSeries) -> tuple[OneVarSeries, OneVarSeries, bool]:
        poly = self.polynomial and other.polynomial
        if poly:
            n = max(self.order, other.order)
        else:
            n = min(self.order if not self.polynomial else other.order,
                    other.order if not other.polynomial else self.order)
        return self.truncate(n), other.truncate(n), poly

    def __add__(self, other: OneVarSeries) -> OneVarSeries:
        a, b, poly = self._align(other)
        return OneVarSeries(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), poly)

    def __neg__(self) -> OneVarSeries:
        return OneVarSeries(tuple(-c for c in self.coeffs), self.polynomial)

    def __sub__(self, other: OneVarSeries) -> OneVarSeries:
        return self + (-other)

    def scale(self, k: Scalar) -> OneVarSeries:
        k = Fraction(k)
        return OneVarSeries(tuple(k * c for c in self.coeffs), self.polynomial)

    def __mul__(self, other: OneVarSeries | Scalar) -> OneVarSeries:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if self.polynomial and other.polynomial:
            n = self.order + other.order
            out = [Fraction(0)] * (n + 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
            return OneVarSeries(tuple(out), True)
        a, b, _ = self._align(other)
        n = a.order
        out = [Fraction(0)] * (n + 1)
        for i, x in enumerate(a.coeffs):
            if x:
                for j in range(n + 1 - i):
                    out[i + j] += x * b.coeffs[j]
        return OneVarSeries(tuple(out))

    __rmul__ = __mul__

    def invert(self) -> OneVarSeries:
        if not self.coeffs[0]:
            raise SeriesError("cannot invert a series with zero constant term")
        a = self.coeffs
        inv0 = 1 / a[0]
        out = [inv0]
        for n in range(1, self.order + 1):
            s = sum((a[j] * out[n - j] for j in range(1, n + 1)), Fraction(0))
            out.append(-inv0 * s)
        return OneVarSeries(tuple(out))

    def shift(self, k: int = 1) -> OneVarSeries:
        """Multiply by ``x^k``; the known range grows by ``k``."""
        return OneVarSeries((Fraction(0),) * k + self.coeffs, self.polynomial)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_graded(self, name: str = "x", truncation: int | None = None) -> GradedSeries:
        d = self.order if truncation is None else truncation
        table = GeneratorTable.of((name, 1))
        return substitute(self, GradedSeries.generator(table, name, d))

    def to_json(self) -> list[str]:
        return [format_rat(c) for c in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Any]) -> OneVarSeries:
        return cls(tuple(parse_rat(c) for c in data))

    def __str__(self) -> str:
        return "[" + ", ".join(str(c) for c in self.coeffs) + "]"


def add(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    return a + b


def mul(a: GradedSeries, b: GradedSeries) -> GradedSeries:
    return a * b


def invert(a: GradedSeries) -> GradedSeries:
    return a.invert()


def coeff_of(s: GradedSeries, monomial: Sequence[int]) -> Fraction:
    return s.coeff_of(monomial)


def substitute(f: OneVarSeries, s: GradedSeries) -> GradedSeries:
    """Evaluate ``sum f_k s^k`` in the truncated ring of ``s``.

    When ``s`` has no constant term its lowest weight ``m`` bounds the number
    of powers needed; the result is exact through weight
    ``min(D, (f.order + 1) * m - 1)``.
    """
    c0 = s.constant_term
    if c0 and not f.polynomial:
        raise SeriesError("substituting a series with nonzero constant term into a non-polynomial series")
    d = s.truncation
    if c0:
        top = f.order
    else:
        m = s.min_weight()
        if m is None:
            return GradedSeries.constant(s.table, f.coeffs[0], d)
        if not f.polynomial:
            d = min(d, (f.order + 1) * m - 1)
        top = min(f.order, d // m)
    result = GradedSeries.constant(s.table, f.coeffs[top], d)
    s = s.truncate(d) if d < s.truncation else s
    for k in range(top - 1, -1, -1):
        result = result * s + f.coeffs[k]
    return result
