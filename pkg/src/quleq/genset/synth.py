"""Assembly of small generating sets for the filter of quasiorders above a poset order.

The generating set is built from four parts:

* ``G``: one element per strip (``qum(S)``) or, on forests, the Boolean family ``qum(X)``;
* ``H``: for every thread ``D`` a generating set of Quo(D) transported by ``phi_D``;
* ``F1``/``F2``: the full relation on each selector component plus its extra set ``Y``.

Chains use the Boolean family on their reversed edges alone.
"""

from __future__ import annotations

import json
import warnings as _warnings
from dataclasses import dataclass, field

from ..errors import BadInput
from ..poset import Poset, PosetParams, compute_params
from ..quolattice import (
    close_with_witnesses,
    count_quleq,
    nabla_plus,
    phi_embed,
    qum_set,
)
from ..relation import QuasiRel
from .functions import boolean_generators, f_card, lasp
from .search import QuoGenerators, SearchFailed, search_quo_generators, tree_parameter

__all__ = [
    "Part",
    "GenPlan",
    "make_strips",
    "make_threads",
    "generator_bound",
    "synthesize",
    "verify_full",
]


@dataclass(frozen=True)
class Part:
    tag: str  # "F1", "F2", "G" or "H"
    source: str  # which strip / thread / selector produced the element


@dataclass
class SelectorInfo:
    component: int
    ntp: int
    elements: tuple[int, ...]
    nabla: int | None = None  # index of the full relation on the component in E
    y_indices: list[int] = field(default_factory=list)
    y_local: list[QuasiRel] = field(default_factory=list)


@dataclass
class GenPlan:
    poset: Poset
    mode: str
    bound: int
    params: PosetParams
    E: list[QuasiRel] = field(default_factory=list)
    parts: list[Part] = field(default_factory=list)
    strips: list[list[tuple[int, int]]] = field(default_factory=list)
    threads: list[tuple[int, ...]] = field(default_factory=list)
    g0: list[frozenset[int]] = field(default_factory=list)
    g_indices: list[int] = field(default_factory=list)
    h_sets: list[QuoGenerators] = field(default_factory=list)
    h_indices: list[list[int]] = field(default_factory=list)
    selectors: list[SelectorInfo] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    certificates: dict = field(default_factory=dict)
    steps: dict = field(default_factory=dict)
    extra_certificates: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.E)

    def add(self, rel: QuasiRel, part: Part) -> int:
        """Append ``rel`` unless already present; return its index in ``E``."""
        for i, r in enumerate(self.E):
            if r == rel:
                return i
        self.E.append(rel)
        self.parts.append(part)
        return len(self.E) - 1

    def to_dict(self) -> dict:
        from ..latterm import to_text

        return {
            "mode": self.mode,
            "bound": self.bound,
            "size": self.size,
            "poset": self.poset.to_dict(),
            "params": self.params.to_dict(),
            "E": [r.to_b64() for r in self.E],
            "parts": [{"tag": p.tag, "source": p.source} for p in self.parts],
            "warnings": list(self.warnings),
            "certificates": {f"{a},{b}": to_text(t) for (a, b), t in sorted(self.certificates.items())},
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)


def make_strips(p: Poset) -> list[list[tuple[int, int]]]:
    """Partition of the reversed covers into ``ncedge`` strips.

    Inside each component the reversed covers are sorted and the ``j``-th one goes to
    strip ``j``, so a strip never holds two reversed covers of one component.
    """
    width = max((len(c.edges) for c in p.components), default=0)
    strips: list[list[tuple[int, int]]] = [[] for _ in range(width)]
    for comp in p.components:
        for j, e in enumerate(comp.iedges):
            strips[j].append(e)
    return strips


def make_threads(p: Poset) -> list[tuple[int, ...]]:
    """``ncextr`` threads; thread ``i`` takes the ``(i mod |Extr T|)``-th extremal of each
    component ``T``, listed in component order."""
    width = max((len(c.extremals) for c in p.components), default=0)
    return [tuple(c.extremals[i % len(c.extremals)] for c in p.components) for i in range(width)]


def generator_bound(params: PosetParams, mode: str) -> int:
    if mode == "C":
        return lasp(params.ncedge)
    if params.ncorr is None:
        raise BadInput("modes A and B need at least three components")
    h = params.ncextr * f_card(params.ncmp)
    if mode == "A":
        return h + params.ncedge + params.ncorr
    if mode == "B":
        return h + lasp(params.ncedge) + params.ncorr
    raise BadInput(f"unknown mode {mode!r}")


def _pick_mode(p: Poset, params: PosetParams, mode: str) -> str:
    if mode == "auto":
        if p.is_chain:
            return "C"
        if params.ncmp < 3:
            raise BadInput("posets with fewer than three components are covered only when they are chains")
        return "B" if p.is_forest else "A"
    if mode == "C" and not p.is_chain:
        raise BadInput("mode C needs a nonempty chain")
    if mode in ("A", "B") and params.ncmp < 3:
        raise BadInput(f"mode {mode} needs at least three components")
    if mode == "B" and not p.is_forest:
        raise BadInput("mode B needs a forest")
    if mode not in ("A", "B", "C"):
        raise BadInput(f"unknown mode {mode!r}")
    return mode


def synthesize(
    p: Poset,
    mode: str = "auto",
    seed: int = 0,
    search_secs: float = 120.0,
    params: PosetParams | None = None,
) -> GenPlan:
    """Build the generating set for ``p``.  See the module docstring for the parts."""
    params = params or compute_params(p)
    mode = _pick_mode(p, params, mode)
    plan = GenPlan(p, mode, generator_bound(params, mode), params)
    if mode == "C":
        _chain_part(plan)
        return plan

    plan.strips = make_strips(p)
    plan.threads = make_threads(p)
    comps = p.components

    # selector parts first so that their elements lead E
    for i, cidx in enumerate(params.selectors):
        comp = comps[cidx]
        ntp = params.ntp1 if i == 0 else params.ntp2
        info = SelectorInfo(cidx, ntp, comp.elements)
        tag = f"F{i + 1}"
        if ntp >= 1:
            info.nabla = plan.add(nabla_plus(p, comp.elements), Part(tag, f"full relation on component {cidx}"))
        if ntp >= 2:
            local = tree_parameter(p.subposet(comp.elements), size_bound=None).Y
            for k, y in enumerate(local):
                pairs = [(comp.elements[a], comp.elements[b]) for a, b in y.pairs() if a != b]
                info.y_indices.append(plan.add(qum_set(p, pairs), Part(tag, f"Y[{k}] of component {cidx}")))
                info.y_local.append(y)
        plan.selectors.append(info)

    if mode == "A":
        for j, strip in enumerate(plan.strips):
            plan.g_indices.append(plan.add(qum_set(p, strip), Part("G", f"strip {j}")))
    else:
        if plan.strips:
            plan.g0 = boolean_generators(len(plan.strips))
        for j, X in enumerate(plan.g0):
            pairs = [e for s in sorted(X) for e in plan.strips[s]]
            plan.g_indices.append(plan.add(qum_set(p, pairs), Part("G", f"strips {sorted(X)}")))

    m = params.ncmp
    for t, thread in enumerate(plan.threads):
        hset = _thread_generators(plan, m, seed, search_secs)
        plan.h_sets.append(hset)
        idx = [plan.add(phi_embed(p, thread, rho), Part("H", f"thread {t}")) for rho in hset.generators]
        plan.h_indices.append(idx)
    if plan.size > plan.bound:
        plan.warnings.append(f"generating set has {plan.size} elements, above the bound {plan.bound}")
    return plan


_SEARCH_CACHE: dict = {}


def _thread_generators(plan: GenPlan, m: int, seed: int, search_secs: float) -> QuoGenerators:
    key = (m, seed, search_secs)
    if key in _SEARCH_CACHE:
        hset = _SEARCH_CACHE[key]
    else:
        target = f_card(m)
        try:
            hset = search_quo_generators(m, target, budget_secs=search_secs, seed=seed)
        except SearchFailed as exc:
            atoms = [QuasiRel.from_pairs(m, [(x, y)]).closure() for x in range(m) for y in range(m) if x != y]
            closure = close_with_witnesses(atoms, targets=atoms, max_elements=None)
            hset = QuoGenerators(m, atoms, target, closure, relaxed=True, method="atoms")
            _warnings.warn(f"{exc}; using all {len(atoms)} atoms of Quo({m})", RuntimeWarning, stacklevel=3)
        _SEARCH_CACHE[key] = hset
    if hset.relaxed:
        msg = f"Quo({m}) generators: {hset.size} elements ({hset.method}), target was {hset.target_size}"
        if msg not in plan.warnings:
            plan.warnings.append(msg)
    return hset


def _chain_part(plan: GenPlan) -> None:
    p = plan.poset
    iedges = list(p.iedges)
    plan.strips = [[e] for e in iedges]
    if not iedges:
        return
    plan.g0 = boolean_generators(len(iedges))
    for X in plan.g0:
        pairs = [iedges[j] for j in sorted(X)]
        plan.g_indices.append(plan.add(qum_set(p, pairs), Part("G", f"reversed covers {sorted(X)}")))


def verify_full(plan: GenPlan, max_elements: int | None = 10**6, max_seconds: float | None = None) -> dict:
    """Close ``E`` (with the lattice bounds) and compare with the enumerated filter."""
    p = plan.poset
    mu = p.order
    top = QuasiRel.full(p.n)
    quleq_size = count_quleq(p, max_elements=max_elements)
    if not plan.E:
        closure_size = 1 if mu == top else 2
        complete = True
    else:
        res = close_with_witnesses(
            plan.E, constants={"bot": mu, "top": top}, max_elements=max_elements, max_seconds=max_seconds
        )
        closure_size = len(res.snapshot)
        complete = res.complete
    return {
        "method": "full-closure",
        "closure_size": closure_size,
        "quleq_size": quleq_size,
        "complete": complete,
        "ok": complete and closure_size == quleq_size,
    }

