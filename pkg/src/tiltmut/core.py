"""Bound quivers over the rationals.

A presentation is a finite quiver together with a list of relations, each a
rational linear combination of parallel paths.  Paths store their arrows in
traversal order: ``Path(source="1", target="3", arrows=("a", "b"))`` is the
walk that first traverses ``a`` and then ``b``.  Rendered text follows the
usual right-to-left composition convention instead, so the same path prints
as ``b.a``.

All coefficients are ``fractions.Fraction``; nothing in the package ever
rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

VertexId = str

Scalar = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Arrow:
    name: str
    source: VertexId
    target: VertexId


@dataclass(frozen=True)
class Path:
    """A directed walk, possibly trivial.  Arrows are named in traversal order."""

    source: VertexId
    target: VertexId
    arrows: tuple[str, ...]

    def __len__(self):
        return len(self.arrows)

    def is_trivial(self):
        return not self.arrows

    def word_key(self):
        """Sort key realising the length-then-lex order on parallel paths."""
        return (len(self.arrows), self.arrows)


def trivial_path(v: VertexId) -> Path:
    return Path(v, v, ())


@dataclass(frozen=True, eq=False)
class PathExpr:
    """A rational combination of pairwise parallel paths.

    The zero expression keeps explicit endpoints so that quotient and
    composition operators stay total on their domains.
    """

    source: VertexId
    target: VertexId
    terms: Mapping[Path, Fraction]

    def __post_init__(self):
        for path, coef in self.terms.items():
            if path.source != self.source or path.target != self.target:
                raise ValueError(
                    f"term {path} is not parallel to the {self.source}->{self.target} expression"
                )
            if coef == 0:
                raise ValueError("PathExpr must not store zero coefficients")

    def __eq__(self, other):
        if not isinstance(other, PathExpr):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and dict(self.terms) == dict(other.terms)
        )

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.terms.items())))

    def is_zero(self):
        return not self.terms

    def leading_path(self) -> Path:
        """Largest term under length-then-lex order.  Undefined on zero."""
        return max(self.terms, key=Path.word_key)

    def coefficient(self, path: Path) -> Fraction:
        return self.terms.get(path, ZERO)

    def sorted_terms(self) -> list[tuple[Path, Fraction]]:
        """Terms from largest to smallest word, for stable rendering."""
        return sorted(self.terms.items(), key=lambda pc: pc[0].word_key(), reverse=True)

    def scaled(self, c: Fraction) -> "PathExpr":
        if c == 0:
            return zero_expr(self.source, self.target)
        return PathExpr(self.source, self.target, {p: c * k for p, k in self.terms.items()})

    def __neg__(self):
        return self.scaled(Fraction(-1))

    def __add__(self, other):
        if not isinstance(other, PathExpr):
            return NotImplemented
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("cannot add expressions with different endpoints")
        terms = dict(self.terms)
        for path, coef in other.terms.items():
            acc = terms.get(path, ZERO) + coef
            if acc == 0:
                terms.pop(path, None)
            else:
                terms[path] = acc
        return PathExpr(self.source, self.target, terms)

    def __sub__(self, other):
        return self + (-other)


def zero_expr(source: VertexId, target: VertexId) -> PathExpr:
    return PathExpr(source, target, {})


def path_expr(terms, source=None, target=None) -> PathExpr:
    """Build a PathExpr from (path, coefficient) pairs, merging duplicates.

    Accepts a mapping or an iterable of pairs.  Endpoints are taken from the
    first path unless given explicitly, which is required for the zero
    expression.
    """
    if isinstance(terms, Mapping):
        terms = terms.items()
    acc: dict[Path, Fraction] = {}
    for path, coef in terms:
        if source is None:
            source, target = path.source, path.target
        c = acc.get(path, ZERO) + Fraction(coef)
        if c == 0:
            acc.pop(path, None)
        else:
            acc[path] = c
    if source is None:
        raise ValueError("endpoints of an empty expression must be given explicitly")
    return PathExpr(source, target, acc)


def unit_expr(path: Path) -> PathExpr:
    return PathExpr(path.source, path.target, {path: ONE})


def compose(p: Path, q: Path) -> Path:
    """The path `first q, then p`, defined when q ends where p starts."""
    if q.target != p.source:
        raise ValueError(f"cannot compose: {q.source}->{q.target} then {p.source}->{p.target}")
    return Path(q.source, p.target, q.arrows + p.arrows)


def compose_expr(x: PathExpr, y: PathExpr) -> PathExpr:
    """Bilinear extension of compose: `first y, then x`."""
    if y.target != x.source:
        raise ValueError(f"cannot compose: {y.source}->{y.target} then {x.source}->{x.target}")
    acc: dict[Path, Fraction] = {}
    for p, c in x.terms.items():
        for q, d in y.terms.items():
            path = compose(p, q)
            k = acc.get(path, ZERO) + c * d
            if k == 0:
                acc.pop(path, None)
            else:
                acc[path] = k
    return PathExpr(y.source, x.target, acc)


def left_quotient(r: PathExpr, a: Arrow) -> PathExpr:
    """Terms of r whose first-traversed arrow is a, with that arrow removed.

    Defined when r and a share their source.  Summing compose_expr(r/a, a)
    over all arrows a out of the source recovers every positive-length term
    of r.
    """
    if r.source != a.source:
        raise ValueError(f"left quotient needs source(r) = source(a), got {r.source} vs {a.source}")
    acc = {}
    for p, c in r.terms.items():
        if p.arrows and p.arrows[0] == a.name:
            acc[Path(a.target, p.target, p.arrows[1:])] = c
    return PathExpr(a.target, r.target, acc)


def right_quotient(r: PathExpr, b: Arrow) -> PathExpr:
    """Terms of r whose last-traversed arrow is b, with that arrow removed."""
    if r.target != b.target:
        raise ValueError(f"right quotient needs target(r) = target(b), got {r.target} vs {b.target}")
    acc = {}
    for p, c in r.terms.items():
        if p.arrows and p.arrows[-1] == b.name:
            acc[Path(p.source, b.source, p.arrows[:-1])] = c
    return PathExpr(r.source, b.source, acc)


def format_path(p: Path) -> str:
    """Canonical text for a path: arrow names right to left, dot separated."""
    if not p.arrows:
        return f"e_{p.source}"
    return ".".join(reversed(p.arrows))


def format_expr(x: PathExpr, compact: bool = False) -> str:
    """Canonical text for an expression, terms in descending path order.

    Unit coefficients are left implicit; others are printed as rationals
    with a `*`.  compact=True drops the spaces around plus and minus, which
    keeps the text usable inside generated arrow names.
    """
    if not x.terms:
        return "0"
    sep = "" if compact else " "
    parts: list[str] = []
    for path, coef in x.sorted_terms():
        word = format_path(path)
        mag = abs(coef)
        body = word if mag == 1 else f"{mag}*{word}"
        if not parts:
            parts.append(body if coef > 0 else f"-{body}")
        else:
            sign = "+" if coef > 0 else "-"
            parts.append(f"{sep}{sign}{sep}{body}")
    return "".join(parts)


@dataclass(frozen=True)
class Presentation:
    """A quiver plus relations.  Vertex and arrow order is preserved as given."""

    vertices: tuple[VertexId, ...]
    arrows: tuple[Arrow, ...]
    relations: tuple[PathExpr, ...]
    name: str = ""

    @cached_property
    def arrow_by_name(self) -> dict[str, Arrow]:
        return {a.name: a for a in self.arrows}

    @cached_property
    def arrows_out(self) -> dict[VertexId, tuple[Arrow, ...]]:
        out: dict[VertexId, list[Arrow]] = {v: [] for v in self.vertices}
        for a in self.arrows:
            if a.source in out:
                out[a.source].append(a)
        return {v: tuple(lst) for v, lst in out.items()}

    @cached_property
    def arrows_in(self) -> dict[VertexId, tuple[Arrow, ...]]:
        acc: dict[VertexId, list[Arrow]] = {v: [] for v in self.vertices}
        for a in self.arrows:
            if a.target in acc:
                acc[a.target].append(a)
        return {v: tuple(lst) for v, lst in acc.items()}

    def path(self, arrow_names: Iterable[str], at: VertexId | None = None) -> Path:
        """Build a Path from arrow names in traversal order, checking composability."""
        names = tuple(arrow_names)
        if not names:
            if at is None:
                raise ValueError("a trivial path needs its vertex")
            return trivial_path(at)
        first = self.arrow_by_name[names[0]]
        here = first.target
        for name in names[1:]:
            arrow = self.arrow_by_name[name]
            if arrow.source != here:
                raise ValueError(f"arrows {names} do not compose at {name}")
            here = arrow.target
        return Path(first.source, here, names)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self):
        return not self.violations


def _check_path(p: Presentation, path: Path, where: str, out: list[Violation]):
    by_name = p.arrow_by_name
    here = path.source
    for name in path.arrows:
        arrow = by_name.get(name)
        if arrow is None:
            out.append(Violation("unknown-arrow", f"{where}: no arrow named {name!r}"))
            return
        if arrow.source != here:
            out.append(Violation("broken-path", f"{where}: arrow {name!r} does not start at {here!r}"))
            return
        here = arrow.target
    if here != path.target:
        out.append(Violation("broken-path", f"{where}: walk ends at {here!r}, not {path.target!r}"))


def validate(p: Presentation, require_admissible_shape: bool = True) -> ValidationReport:
    """Shape checks: unique names, endpoints in range, relations well formed.

    With require_admissible_shape the relation terms must all have length at
    least two.  Raw mutation output legitimately violates that, so cleanup
    entry points re-validate with the flag off.
    """
    out: list[Violation] = []
    seen_v: set[VertexId] = set()
    for v in p.vertices:
        if v in seen_v:
            out.append(Violation("duplicate-vertex", f"vertex {v!r} listed twice"))
        seen_v.add(v)
    seen_a: set[str] = set()
    for a in p.arrows:
        if a.name in seen_a:
            out.append(Violation("duplicate-arrow-name", f"arrow {a.name!r} declared twice"))
        seen_a.add(a.name)
        for end in (a.source, a.target):
            if end not in seen_v:
                out.append(Violation("dangling-endpoint", f"arrow {a.name!r} touches unknown vertex {end!r}"))
    for idx, r in enumerate(p.relations):
        where = f"relation #{idx}"
        if r.is_zero():
            out.append(Violation("empty-relation", f"{where} has no terms"))
            continue
        if r.source not in seen_v or r.target not in seen_v:
            out.append(Violation("dangling-endpoint", f"{where} joins unknown vertices"))
            continue
        for path in r.terms:
            _check_path(p, path, where, out)
            if len(path) == 0:
                out.append(Violation("trivial-relation-term", f"{where} contains a trivial path"))
            elif len(path) == 1 and require_admissible_shape:
                out.append(
                    Violation(
                        "non-admissible-term",
                        f"{where} contains the bare arrow {path.arrows[0]!r}",
                    )
                )
    return ValidationReport(tuple(out))


def require_valid(p: Presentation, require_admissible_shape: bool = True):
    """Raise InvalidPresentation when validation reports anything."""
    from .errors import InvalidPresentation

    report = validate(p, require_admissible_shape=require_admissible_shape)
    if not report.ok:
        raise InvalidPresentation(
            "presentation failed validation: "
            + "; ".join(v.message for v in report.violations),
            violations=[{"code": v.code, "message": v.message} for v in report.violations],
        )
    return report
