"""Right tilting mutation of a bound quiver presentation at a vertex.

Mutation replaces vertex i by a star vertex i* and rewrites the quiver so
that the presented algebra matches the endomorphism algebra of the complex
obtained by exchanging the projective at i for the two-term complex
[sum of P over arrow targets -> P_i].  The rewrite is purely combinatorial
and happens in seven stages:

1. every composition (arrow into i, arrow out of i) becomes a new arrow;
2. every arrow a out of i flips to an arrow a*: t(a) -> i*;
3. every minimal relation r out of i becomes an arrow out of i* (for a
   cycle relation, one composite arrow per arrow out of i, since the bare
   bar arrow would end at the removed vertex);
4. the combination sum over a of a*.a vanishes; precomposing it with each
   arrow into i, and with each cycle bar composite, gives the relations
   ending at i*;
5. each composition through i*, flip followed by bar, equals the matching
   quotient of the bar's relation;
6. each presented relation ending at i survives composed with each arrow
   out of i;
7. each minimal combination of the bars that vanishes against every arrow
   out of i gives a relation out of i*.

Relations not touching i are carried over, with any passage through i
rewritten into the stage-1 composite arrows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .core import (
    Arrow,
    Path,
    PathExpr,
    Presentation,
    VertexId,
    compose_expr,
    format_expr,
    left_quotient,
    path_expr,
    unit_expr,
    zero_expr,
)
from .engine import (
    NormalFormTable,
    minimal_kernel_generators,
    minimal_relations_at,
)
from .errors import InfeasibleMutation, InvalidPresentation
from .linalg import nullspace

ZERO = Fraction(0)

LOOP_AT_VERTEX = "loop-at-vertex"
NO_OUTGOING_ARROWS = "no-outgoing-arrows"
NONZERO_SHIFTED_HOM = "nonzero-shifted-hom"


@dataclass(frozen=True)
class Obstruction:
    """One reason a vertex cannot be mutated."""

    code: str
    message: str
    witness: PathExpr | None = None


@dataclass(frozen=True)
class FeasibilityReport:
    vertex: VertexId
    feasible: bool
    obstructions: tuple[Obstruction, ...]


@dataclass(frozen=True)
class ProvenanceEntry:
    """Which stage produced an arrow or relation, and from which inputs."""

    step: str
    inputs: tuple[str, ...]


@dataclass(frozen=True)
class MutationProvenance:
    arrows: Mapping[str, ProvenanceEntry]
    relations: tuple[ProvenanceEntry, ...]


@dataclass(frozen=True)
class MutationOutcome:
    result: Presentation
    vertex: VertexId
    star: VertexId
    feasibility: FeasibilityReport
    provenance: MutationProvenance


def shifted_hom_kernel(t: NormalFormTable, vertex: VertexId, j: VertexId) -> PathExpr | None:
    """A nonzero combination of paths j -> vertex killed by every arrow out.

    Returns None when no such combination exists.  A nonzero value is
    exactly a nonzero morphism from the shifted mutation complex at vertex
    to the simple-projective stalk at j, so it witnesses infeasibility.
    """
    p = t.presentation
    cols = list(t.hom_basis(j, vertex))
    if not cols:
        return None
    test_index: dict[tuple[str, Path], int] = {}
    images = []
    for w in cols:
        im: dict[tuple[str, Path], Fraction] = {}
        for a in p.arrows_out[vertex]:
            longer = Path(w.source, a.target, w.arrows + (a.name,))
            for w2, c in t.engine.normal_form_path(longer).terms.items():
                im[(a.name, w2)] = im.get((a.name, w2), ZERO) + c
        images.append(im)
        for key in im:
            if key not in test_index:
                test_index[key] = len(test_index)
    rows = [[ZERO] * len(cols) for _ in range(len(test_index))]
    for col, im in enumerate(images):
        for key, val in im.items():
            rows[test_index[key]][col] = val
    kernel = nullspace(rows, len(cols))
    if not kernel:
        return None
    vec = kernel[0]
    return path_expr(
        {w: c for w, c in zip(cols, vec) if c != 0}, source=j, target=vertex
    )


def check_feasible(t: NormalFormTable, vertex: VertexId) -> FeasibilityReport:
    """Decide whether mutation at vertex is defined, with reasons if not."""
    p = t.presentation
    if vertex not in p.vertices:
        raise InvalidPresentation(f"unknown vertex {vertex!r}")
    obstructions: list[Obstruction] = []
    outs = p.arrows_out[vertex]
    for a in outs:
        if a.target == vertex:
            obstructions.append(
                Obstruction(LOOP_AT_VERTEX, f"arrow {a.name} is a loop at {vertex}")
            )
    if not outs:
        obstructions.append(
            Obstruction(NO_OUTGOING_ARROWS, f"no arrows leave vertex {vertex}")
        )
    if not obstructions:
        for j in p.vertices:
            witness = shifted_hom_kernel(t, vertex, j)
            if witness is not None:
                obstructions.append(
                    Obstruction(
                        NONZERO_SHIFTED_HOM,
                        f"a nonzero combination of paths {j} -> {vertex} is"
                        f" killed by every arrow out of {vertex}",
                        witness=witness,
                    )
                )
    return FeasibilityReport(vertex, not obstructions, tuple(obstructions))


def _fresh(base: str, taken: set[str]) -> str:
    name = base
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def _fresh_star(p: Presentation, vertex: VertexId) -> VertexId:
    star = f"{vertex}*"
    while star in p.vertices:
        star += "*"
    return star


def mutate(t: NormalFormTable, vertex: VertexId) -> MutationOutcome:
    """Mutate at vertex, returning the raw presentation with provenance.

    The result is not simplified: superfluous arrows introduced by stage 1
    and redundant relations are left in place so every stage is visible.
    Raises InfeasibleMutation when check_feasible reports an obstruction.
    """
    p = t.presentation
    report = check_feasible(t, vertex)
    if not report.feasible:
        raise InfeasibleMutation(
            f"mutation at vertex {vertex} is not defined",
            details={"obstructions": [o.code for o in report.obstructions]},
        )
    outs = list(p.arrows_out[vertex])
    ins = list(p.arrows_in[vertex])
    minrels = minimal_relations_at(t, vertex)
    noncycle = [r for r in minrels if r.target != vertex]
    cycles = [r for r in minrels if r.target == vertex]

    star = _fresh_star(p, vertex)
    new_vertices = tuple(star if v == vertex else v for v in p.vertices)

    taken = {a.name for a in p.arrows}
    arrows: list[Arrow] = []
    arrow_prov: dict[str, ProvenanceEntry] = {}

    def add_arrow(name: str, source: VertexId, target: VertexId, step: str, inputs):
        arrows.append(Arrow(name, source, target))
        arrow_prov[name] = ProvenanceEntry(step, tuple(inputs))

    for a in p.arrows:
        if vertex not in (a.source, a.target):
            add_arrow(a.name, a.source, a.target, "carried", (a.name,))

    comp_name: dict[tuple[str, str], str] = {}
    for b in ins:
        for a in outs:
            nm = _fresh(f"{a.name}·{b.name}", taken)
            comp_name[(b.name, a.name)] = nm
            add_arrow(nm, b.source, a.target, "composite", (b.name, a.name))
    flip_name: dict[str, str] = {}
    for a in outs:
        nm = _fresh(f"{a.name}*", taken)
        flip_name[a.name] = nm
        add_arrow(nm, a.target, star, "flip", (a.name,))
    bar_name: dict[PathExpr, str] = {}
    for r in noncycle:
        text = format_expr(r, compact=True)
        nm = _fresh(f"bar({text})", taken)
        bar_name[r] = nm
        add_arrow(nm, star, r.target, "bar", (text,))
    cyc_name: dict[tuple[str, PathExpr], str] = {}
    for r in cycles:
        text = format_expr(r, compact=True)
        for a in outs:
            nm = _fresh(f"{a.name}·bar({text})", taken)
            cyc_name[(a.name, r)] = nm
            add_arrow(nm, star, a.target, "bar-composite", (a.name, text))

    arrow_of = p.arrow_by_name

    def phi_path(q: Path) -> Path:
        # rewrite a path that neither starts nor ends at the mutated vertex,
        # replacing each passage through it by the stage-1 composite arrow
        names: list[str] = []
        k = 0
        while k < len(q.arrows):
            a = arrow_of[q.arrows[k]]
            if a.target == vertex:
                names.append(comp_name[(a.name, q.arrows[k + 1])])
                k += 2
            else:
                names.append(a.name)
                k += 1
        return Path(q.source, q.target, tuple(names))

    def phi(x: PathExpr) -> PathExpr:
        return path_expr(
            [(phi_path(q), c) for q, c in x.terms.items()], x.source, x.target
        )

    def arrow_unit(a: Arrow) -> PathExpr:
        return unit_expr(Path(a.source, a.target, (a.name,)))

    def psi(x: PathExpr, rc: PathExpr) -> PathExpr:
        # rewrite an expression out of the mutated vertex, bar composite of
        # rc first, then the quotiented remainder
        acc = zero_expr(star, x.target)
        for a in outs:
            q = left_quotient(x, a)
            if not q.terms:
                continue
            head = unit_expr(Path(star, a.target, (cyc_name[(a.name, rc)],)))
            acc = acc + compose_expr(phi(q), head)
        return acc

    def bar_translate(eps: PathExpr, r: PathExpr) -> PathExpr:
        # the expression eps composed after the bar arrow of r
        if r.target != vertex:
            head = unit_expr(Path(star, r.target, (bar_name[r],)))
            return compose_expr(phi(eps), head)
        return psi(eps, r)

    relations: list[PathExpr] = []
    relation_prov: list[ProvenanceEntry] = []
    seen: set[PathExpr] = set()

    def emit(expr: PathExpr, step: str, inputs):
        if not expr.terms or expr in seen:
            return
        seen.add(expr)
        relations.append(expr)
        relation_prov.append(ProvenanceEntry(step, tuple(inputs)))

    # stage 4: relations ending at the star vertex
    for b in ins:
        expr = zero_expr(b.source, star)
        for a in outs:
            expr = expr + unit_expr(
                Path(b.source, star, (comp_name[(b.name, a.name)], flip_name[a.name]))
            )
        emit(expr, "relations-into-star", (b.name,))
    for r in cycles:
        expr = zero_expr(star, star)
        for a in outs:
            expr = expr + unit_expr(
                Path(star, star, (cyc_name[(a.name, r)], flip_name[a.name]))
            )
        emit(expr, "relations-into-star", (format_expr(r, compact=True),))

    # stage 5: compositions through the star vertex
    for r in noncycle:
        text = format_expr(r, compact=True)
        for a2 in outs:
            lhs = unit_expr(
                Path(a2.target, r.target, (flip_name[a2.name], bar_name[r]))
            )
            emit(
                lhs - phi(left_quotient(r, a2)),
                "compositions-through-star",
                (text, a2.name),
            )
    for r in cycles:
        text = format_expr(r, compact=True)
        for a in outs:
            for a2 in outs:
                lhs = unit_expr(
                    Path(a2.target, a.target, (flip_name[a2.name], cyc_name[(a.name, r)]))
                )
                rhs = phi(compose_expr(arrow_unit(a), left_quotient(r, a2)))
                emit(
                    lhs - rhs,
                    "compositions-through-star",
                    (text, a.name, a2.name),
                )

    # stage 6: presented relations ending at the mutated vertex
    for rho in p.relations:
        if rho.target != vertex:
            continue
        text = format_expr(rho, compact=True)
        for a in outs:
            x = compose_expr(arrow_unit(a), rho)
            if rho.source != vertex:
                emit(phi(x), "relations-composed-out", (text, a.name))
            else:
                for rc in cycles:
                    emit(
                        psi(x, rc),
                        "relations-composed-out",
                        (text, a.name, format_expr(rc, compact=True)),
                    )

    # stage 7: relations between the minimal relations
    order = {r: k for k, r in enumerate(minrels)}
    gens = minimal_kernel_generators(
        t,
        [(r, r.target) for r in minrels],
        lambda r, w: _quotient_image(t, r, w, outs),
        lambda r: order[r],
    )
    for gen in gens:
        target = gen[0][1].target
        label = tuple(
            f"{c}*{format_expr(unit_expr(w), compact=True)}@{format_expr(r, compact=True)}"
            for r, w, c in gen
        )
        if target != vertex:
            expr = zero_expr(star, target)
            for r, w, c in gen:
                expr = expr + bar_translate(unit_expr(w), r).scaled(c)
            emit(expr, "relations-between-relations", label)
        else:
            for a in outs:
                expr = zero_expr(star, a.target)
                for r, w, c in gen:
                    expr = expr + bar_translate(
                        compose_expr(arrow_unit(a), unit_expr(w)), r
                    ).scaled(c)
                emit(expr, "relations-between-relations", label + (a.name,))

    # untouched relations carry over with passages through the vertex rewritten
    for rho in p.relations:
        if vertex in (rho.source, rho.target):
            continue
        emit(phi(rho), "carried", (format_expr(rho, compact=True),))

    name = f"{p.name}@{vertex}" if p.name else ""
    result = Presentation(new_vertices, tuple(arrows), tuple(relations), name=name)
    return MutationOutcome(
        result=result,
        vertex=vertex,
        star=star,
        feasibility=report,
        provenance=MutationProvenance(dict(arrow_prov), tuple(relation_prov)),
    )


def _quotient_image(t: NormalFormTable, r: PathExpr, w: Path, outs) -> dict:
    """Coordinates of w composed after each quotient of r, in normal form."""
    im: dict[tuple[str, Path], Fraction] = {}
    for a in outs:
        q = left_quotient(r, a)
        if not q.terms:
            continue
        for w2, c in t.reduce(compose_expr(unit_expr(w), q)).terms.items():
            key = (a.name, w2)
            acc = im.get(key, ZERO) + c
            if acc == 0:
                im.pop(key, None)
            else:
                im[key] = acc
    return im
