"""Normal forms in quotients of rational path algebras.

The relations of a presentation are completed to a confluent rewrite
system on paths, ordered by length and then lexicographically on arrow
names in traversal order.  Completion is the word-algebra version of
Buchberger's procedure: resolve every proper overlap between leading
words, reduce the resulting difference, and keep the residual as a new
rule until nothing new appears.  A degree cap bounds the leading words we
are willing to accept; hitting it means the ideal is not (or at least
cannot be confirmed) admissible below the cap.

The completed system answers everything downstream needs exactly: normal
forms, a path basis of the quotient, its nil index, Hom-space bases,
Cartan counts, minimal relation generators at a vertex, and membership of
an element in the ideal spanned by a subset of relations.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Arrow,
    Path,
    PathExpr,
    Presentation,
    VertexId,
    compose,
    compose_expr,
    path_expr,
    require_valid,
    trivial_path,
    unit_expr,
    zero_expr,
)
from .errors import NotAdmissibleWithinCap
from .linalg import complement_basis, nullspace

DEFAULT_DEGREE_CAP = 32
DEGREE_CAP_ENV = "TILTMUT_DEGREE_CAP"

ZERO = Fraction(0)
ONE = Fraction(1)


def resolve_degree_cap(value: int | None = None) -> int:
    """Explicit argument wins, then the TILTMUT_DEGREE_CAP variable, then 32."""
    if value is not None:
        cap = int(value)
    else:
        raw = os.environ.get(DEGREE_CAP_ENV)
        cap = int(raw) if raw else DEFAULT_DEGREE_CAP
    if cap < 2:
        raise ValueError(f"degree cap must be at least 2, got {cap}")
    return cap


@dataclass(frozen=True)
class RewriteRule:
    """lhs rewrites to rhs; every word of rhs is smaller than lhs."""

    lhs: Path
    rhs: PathExpr

    def as_element(self) -> PathExpr:
        return unit_expr(self.lhs) - self.rhs


def _append_word(expr: PathExpr, tail: tuple[str, ...], target: VertexId) -> PathExpr:
    if not tail:
        return expr
    return PathExpr(
        expr.source,
        target,
        {Path(p.source, target, p.arrows + tail): c for p, c in expr.terms.items()},
    )


def _prepend_word(head: tuple[str, ...], source: VertexId, expr: PathExpr) -> PathExpr:
    if not head:
        return expr
    return PathExpr(
        source,
        expr.target,
        {Path(source, p.target, head + p.arrows): c for p, c in expr.terms.items()},
    )


class RewriteEngine:
    """A fixed rule set plus memoised reduction to normal form."""

    def __init__(self, presentation: Presentation, rules: list[RewriteRule]):
        self.presentation = presentation
        self.rules = sorted(rules, key=lambda r: r.lhs.word_key())
        self._by_first: dict[str, list[RewriteRule]] = {}
        for rule in self.rules:
            self._by_first.setdefault(rule.lhs.arrows[0], []).append(rule)
        self._nf_cache: dict[Path, PathExpr] = {}

    def find_rewrite(self, path: Path):
        """Leftmost, then smallest-rule occurrence of a rule lhs in the word."""
        word = path.arrows
        for pos in range(len(word)):
            bucket = self._by_first.get(word[pos])
            if not bucket:
                continue
            for rule in bucket:
                lhs = rule.lhs.arrows
                if word[pos : pos + len(lhs)] == lhs:
                    return pos, rule
        return None

    def is_irreducible(self, path: Path) -> bool:
        return self.find_rewrite(path) is None

    def normal_form_path(self, path: Path) -> PathExpr:
        cached = self._nf_cache.get(path)
        if cached is not None:
            return cached
        hit = self.find_rewrite(path)
        if hit is None:
            result = unit_expr(path)
        else:
            pos, rule = hit
            width = len(rule.lhs.arrows)
            acc = zero_expr(path.source, path.target)
            for q, d in rule.rhs.terms.items():
                child = Path(path.source, path.target, path.arrows[:pos] + q.arrows + path.arrows[pos + width :])
                acc = acc + self.normal_form_path(child).scaled(d)
            result = acc
        self._nf_cache[path] = result
        return result

    def reduce(self, x: PathExpr) -> PathExpr:
        acc = zero_expr(x.source, x.target)
        for p, c in x.terms.items():
            acc = acc + self.normal_form_path(p).scaled(c)
        return acc

    def reduces_to_zero(self, x: PathExpr) -> bool:
        return self.reduce(x).is_zero()


def _normal_form_during_completion(expr, rules_by_first):
    """Worklist reduction against a mutable rule index (no caching)."""
    out: dict[Path, Fraction] = {}
    stack = list(expr.terms.items())
    while stack:
        path, coef = stack.pop()
        word = path.arrows
        hit = None
        for pos in range(len(word)):
            bucket = rules_by_first.get(word[pos])
            if not bucket:
                continue
            for rule in bucket:
                lhs = rule.lhs.arrows
                if word[pos : pos + len(lhs)] == lhs:
                    hit = (pos, rule)
                    break
            if hit:
                break
        if hit is None:
            acc = out.get(path, ZERO) + coef
            if acc == 0:
                out.pop(path, None)
            else:
                out[path] = acc
        else:
            pos, rule = hit
            width = len(rule.lhs.arrows)
            for q, d in rule.rhs.terms.items():
                child = Path(path.source, path.target, word[:pos] + q.arrows + word[pos + width :])
                stack.append((child, coef * d))
    return PathExpr(expr.source, expr.target, out)


def _overlap_exprs(r1: RewriteRule, r2: RewriteRule):
    """Critical differences from proper overlaps: a suffix of r1.lhs equals a prefix of r2.lhs."""
    w1, w2 = r1.lhs.arrows, r2.lhs.arrows
    results = []
    for k in range(1, min(len(w1), len(w2))):
        if w1[len(w1) - k :] != w2[:k]:
            continue
        tail = w2[k:]
        head = w1[: len(w1) - k]
        # rewrite the superposition word w1 + tail at both positions
        left = _append_word(r1.rhs, tail, r2.lhs.target)
        right = _prepend_word(head, r1.lhs.source, r2.rhs)
        results.append(left - right)
    return results


def complete(
    presentation: Presentation,
    generators,
    degree_cap: int,
    max_rules: int = 4000,
) -> list[RewriteRule]:
    """Knuth-Bendix style completion of the generators under length-then-lex.

    Raises NotAdmissibleWithinCap when a leading word would exceed the cap
    or the procedure fails to settle within its rule budget.
    """
    rules: dict[tuple[str, ...], RewriteRule] = {}
    by_first: dict[str, list[RewriteRule]] = {}

    def index_add(rule):
        rules[rule.lhs.arrows] = rule
        bucket = by_first.setdefault(rule.lhs.arrows[0], [])
        bucket.append(rule)
        bucket.sort(key=lambda r: r.lhs.word_key())

    def index_remove(rule):
        del rules[rule.lhs.arrows]
        by_first[rule.lhs.arrows[0]].remove(rule)

    agenda = deque(generators)
    added = 0
    while agenda:
        expr = _normal_form_during_completion(agenda.popleft(), by_first)
        if expr.is_zero():
            continue
        lead = expr.leading_path()
        if len(lead) > degree_cap:
            raise NotAdmissibleWithinCap(
                f"completion needs a rule of degree {len(lead)}, above the cap {degree_cap}",
                degree_cap=degree_cap,
            )
        coef = expr.terms[lead]
        rhs = unit_expr(lead) - expr.scaled(ONE / coef)
        new_rule = RewriteRule(lead, rhs)
        # keep the system interreduced: any rule whose lhs contains the new
        # lhs as a factor goes back on the agenda
        displaced = []
        for word, rule in rules.items():
            if len(word) >= len(lead.arrows):
                for pos in range(len(word) - len(lead.arrows) + 1):
                    if word[pos : pos + len(lead.arrows)] == lead.arrows:
                        displaced.append(rule)
                        break
        for rule in displaced:
            index_remove(rule)
            agenda.append(rule.as_element())
        index_add(new_rule)
        added += 1
        if added > max_rules:
            raise NotAdmissibleWithinCap(
                f"completion exceeded its {max_rules}-rule budget",
                degree_cap=degree_cap,
            )
        for other in sorted(rules.values(), key=lambda r: r.lhs.word_key()):
            for s in _overlap_exprs(new_rule, other):
                agenda.append(s)
            if other is not new_rule:
                for s in _overlap_exprs(other, new_rule):
                    agenda.append(s)
    # normalise right-hand sides against the final system
    final = []
    for rule in sorted(rules.values(), key=lambda r: r.lhs.word_key()):
        rhs = _normal_form_during_completion(rule.rhs, by_first)
        final.append(RewriteRule(rule.lhs, rhs))
    return final


@dataclass(frozen=True)
class HomBasis:
    source: VertexId
    target: VertexId
    paths: tuple[Path, ...]

    def __iter__(self):
        return iter(self.paths)

    def __len__(self):
        return len(self.paths)

    def __getitem__(self, k):
        return self.paths[k]


class NormalFormTable:
    """Completed rewrite data for an admissible presentation.

    basis holds every irreducible path, graded by length; nil_index is the
    least N for which every path of length N reduces to zero.
    """

    def __init__(self, presentation, degree_cap, engine, basis, nil_index):
        self.presentation = presentation
        self.degree_cap = degree_cap
        self.engine = engine
        self.basis = basis
        self.nil_index = nil_index
        self._by_pair: dict[tuple[VertexId, VertexId], list[Path]] = {}
        self._by_source: dict[VertexId, list[Path]] = {}
        for p in basis:
            self._by_pair.setdefault((p.source, p.target), []).append(p)
            self._by_source.setdefault(p.source, []).append(p)

    @property
    def rules(self):
        return self.engine.rules

    def reduce(self, x: PathExpr) -> PathExpr:
        return self.engine.reduce(x)

    def basis_from(self, v: VertexId) -> list[Path]:
        return self._by_source.get(v, [])

    def hom_basis(self, frm: VertexId, to: VertexId) -> HomBasis:
        return HomBasis(frm, to, tuple(self._by_pair.get((frm, to), [])))

    def dimension(self) -> int:
        return len(self.basis)

    def cartan_matrix(self) -> list[list[int]]:
        verts = self.presentation.vertices
        return [
            [len(self._by_pair.get((j, i), [])) for j in verts]
            for i in verts
        ]

    def arrow_path(self, name: str) -> Path:
        a = self.presentation.arrow_by_name[name]
        return Path(a.source, a.target, (a.name,))


def build_table(p: Presentation, degree_cap: int | None = None) -> NormalFormTable:
    """Validate, complete, and enumerate the basis of kQ/I up to the cap."""
    cap = resolve_degree_cap(degree_cap)
    require_valid(p)
    rules = complete(p, list(p.relations), cap)
    engine = RewriteEngine(p, rules)
    basis: list[Path] = []
    frontier = [trivial_path(v) for v in p.vertices]
    for path in frontier:
        basis.append(path)
    nil_index = None
    length = 0
    while frontier:
        length += 1
        if length > cap:
            raise NotAdmissibleWithinCap(
                f"paths of length {cap} still do not reduce to zero",
                degree_cap=cap,
            )
        nxt = []
        for stem in frontier:
            for arrow in p.arrows_out.get(stem.target, ()):
                word = Path(stem.source, arrow.target, stem.arrows + (arrow.name,))
                nf = engine.normal_form_path(word)
                if nf.is_zero():
                    continue
                nxt.append(word)
                if engine.is_irreducible(word):
                    basis.append(word)
        frontier = nxt
    nil_index = length if p.vertices else 0
    basis.sort(key=lambda q: (len(q.arrows), q.arrows, q.source))
    return NormalFormTable(p, cap, engine, tuple(basis), nil_index)


def reduce(t: NormalFormTable, x: PathExpr) -> PathExpr:
    return t.reduce(x)


def hom_basis(t: NormalFormTable, frm: VertexId, to: VertexId) -> HomBasis:
    return t.hom_basis(frm, to)


def cartan_matrix(t: NormalFormTable) -> list[list[int]]:
    return t.cartan_matrix()


def minimal_kernel_generators(t: NormalFormTable, summands, image_fn, tag_key):
    """Minimal generators of a kernel of modules spanned by normal-form paths.

    summands is a list of (tag, source vertex) pairs; the module is the
    direct sum over tags of the spans of basis paths out of the paired
    vertex, and image_fn(tag, path) gives the coordinates of the tested
    linear map as a {test key: Fraction} dict.  Returned generators are a
    canonical basis of the kernel modulo arrow-postcomposed kernel
    elements, each as a list of (tag, path, coefficient) triples.

    tag_key orders the summand tags inside the coordinate sort so the
    output is reproducible.
    """
    pres = t.presentation
    coords: list[tuple[object, Path]] = []
    for tag, src in summands:
        for w in t.basis_from(src):
            coords.append((tag, w))
    coords.sort(
        key=lambda tw: (len(tw[1].arrows), tw[1].arrows, tag_key(tw[0])),
        reverse=True,
    )
    if not coords:
        return []
    index = {c: k for k, c in enumerate(coords)}
    images = [image_fn(tag, w) for tag, w in coords]
    test_index: dict[object, int] = {}
    for im in images:
        for key in im:
            if key not in test_index:
                test_index[key] = len(test_index)
    rows = [[ZERO] * len(coords) for _ in range(len(test_index))]
    for col, im in enumerate(images):
        for key, val in im.items():
            rows[test_index[key]][col] = val
    kernel = nullspace(rows, len(coords))
    if not kernel:
        return []
    # arrow postcomposition sends a kernel vector to another kernel vector;
    # their span carries everything generated in lower degree
    rad_rows = []
    for vec in kernel:
        for b in pres.arrows:
            out = [ZERO] * len(coords)
            touched = False
            for col, val in enumerate(vec):
                if val == 0:
                    continue
                tag, w = coords[col]
                if w.target != b.source:
                    continue
                longer = Path(w.source, b.target, w.arrows + (b.name,))
                for w2, c2 in t.engine.normal_form_path(longer).terms.items():
                    k = index.get((tag, w2))
                    if k is None:
                        continue
                    out[k] += val * c2
                    touched = True
            if touched and any(x != 0 for x in out):
                rad_rows.append(out)
    gens = complement_basis(rad_rows, kernel)
    result = []
    for row in gens:
        triples = [
            (coords[k][0], coords[k][1], val)
            for k, val in enumerate(row)
            if val != 0
        ]
        result.append(triples)
    return result


def minimal_relations_at(t: NormalFormTable, i: VertexId) -> list[PathExpr]:
    """Canonical minimal generating set of the relations starting at i.

    A relation out of i is a vector (f_a) over the arrows a out of i with
    sum f_a . a = 0 in the quotient; generators are kernel elements not
    reachable by postcomposing lower ones with arrows, canonicalised by
    row reduction under the path order.
    """
    pres = t.presentation
    outs = pres.arrows_out.get(i, ())
    if not outs:
        return []
    order = {a.name: k for k, a in enumerate(outs)}
    summands = [(a, a.target) for a in outs]

    def image(a: Arrow, w: Path):
        composed = Path(i, w.target, (a.name,) + w.arrows)
        return {p: c for p, c in t.engine.normal_form_path(composed).terms.items()}

    triples = minimal_kernel_generators(t, summands, image, lambda a: order[a.name])
    relations = []
    for gen in triples:
        terms = [
            (Path(i, w.target, (a.name,) + w.arrows), c)
            for a, w, c in gen
        ]
        relations.append(path_expr(terms))
    relations.sort(key=lambda r: (r.target, r.leading_path().word_key()))
    return relations


def membership_engine(p: Presentation, gens, degree_cap: int | None = None) -> RewriteEngine:
    """Completed rewrite system for the sub-ideal spanned by gens.

    No admissibility is demanded of the sub-ideal; only completion must fit
    under the cap.
    """
    cap = resolve_degree_cap(degree_cap)
    rules = complete(p, list(gens), cap)
    return RewriteEngine(p, rules)


def ideal_membership(t: NormalFormTable, x: PathExpr, gens) -> bool:
    """Does x lie in the two-sided ideal of the free path algebra spanned by gens?"""
    engine = membership_engine(t.presentation, gens, t.degree_cap)
    return engine.reduces_to_zero(x)
