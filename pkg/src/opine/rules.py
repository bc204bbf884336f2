"""The default inference rules and the control loop.

Rules have the shape  preconditions : assumptions / conclusions.  A rule fires
when its preconditions hold, every assumption has a basis, and no evidence
contradicts an assumption or conclusion; space extension then places the
assumptions and conclusions into every private-state space shared by the
preconditions.  Rules are applied in a fixed order, repeatedly, until an
entire pass adds no new node.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .annotations import AnnotationDoc, Lexicon, SentenceAnnotation, WRITER
from .composition import run_composition
from .errors import InvariantViolation, IterationLimitExceeded, NoCommonSpace
from .graph import (
    AGREEMENT,
    ANIM,
    BELIEVES_SHOULD,
    BELIEVES_TRUE,
    GFBF,
    IDEA_OF,
    INTENDS,
    NEGATIVE,
    POSITIVE,
    PRIVATE_STATE,
    SENTIMENT,
    SUBSTANTIAL,
    THING,
    AgrSpec,
    BlockReport,
    EvidenceFact,
    Graph,
    IdAllocator,
    IdeaOfSpec,
    Node,
    PSSpec,
    PxSpec,
    TraceEvent,
    build_input_graph,
    effect_sign,
    polarity_of,
    sign,
    spec_exists,
    spec_matches,
)
from .spaces import (
    EPSILON,
    belief_variant,
    extend_spaces,
    format_space,
    place,
    space_index,
    would_contradict,
)

DEFAULT_RULE_ORDER = (
    "rule8",
    "rule1",
    "rule2",
    "rule3.1",
    "rule3.2",
    "rule3.3",
    "rule4",
    "rule6",
    "rule7",
    "rule9",
    "rule10",
    "rule5source",
    "rule5agent",
)

# Legal p(x) contents for the isGood/isBad judgements of rule3.1; events are
# coerced through ideaOf before they can be judged good or bad.
_JUDGEABLE = (ANIM, THING, IDEA_OF, AGREEMENT, PRIVATE_STATE)


@dataclass
class Config:
    rule_order: tuple[str, ...] = DEFAULT_RULE_ORDER
    fire_once: bool = True
    extended_belief_spaces: bool = False
    max_iterations: int = 50


@dataclass
class Binding:
    rule: str
    ps: list[Node]
    assumptions: list[PSSpec]
    conclusions: list
    fire_key: tuple = ()

    def __post_init__(self):
        if not self.fire_key:
            self.fire_key = (self.rule, tuple(p.node_id for p in self.ps))


@dataclass(frozen=True)
class Rule:
    name: str
    matcher: Callable
    input_only: bool = False
    fire_once: bool = False


def _mul(p1: str, p2: str) -> str:
    return polarity_of(sign(p1) * sign(p2))


def _live(g: Graph):
    return [n for n in g.nodes if not n.retired]


def _live_private_states(g: Graph, att_type=None):
    for node in g.nodes:
        if node.retired or node.node_type != PRIVATE_STATE:
            continue
        if att_type is not None and node.att_type != att_type:
            continue
        if node.target is not None and node.target.retired:
            continue
        yield node


# -- matchers ---------------------------------------------------------------

def _match_rule8(g: Graph, cfg: Config):
    bindings = []
    sentiments = list(_live_private_states(g, SENTIMENT))
    for belief in _live_private_states(g, BELIEVES_TRUE):
        if belief.polarity != POSITIVE:
            continue
        event = belief.target
        if event.node_type != GFBF:
            continue
        for sent in sentiments:
            if sent.source is not belief.source or sent.target is not event.object:
                continue
            q = PSSpec(
                belief.source_name,
                SENTIMENT,
                polarity_of(sign(sent.polarity) * effect_sign(event.effect)),
                event,
            )
            bindings.append(Binding("rule8", [belief, sent], [], [q]))
    return bindings


def _match_rule1(g: Graph, cfg: Config):
    bindings = []
    for sent in _live_private_states(g, SENTIMENT):
        event = sent.target
        if event.node_type != GFBF:
            continue
        q = PSSpec(sent.source_name, SENTIMENT, sent.polarity, IdeaOfSpec(event))
        bindings.append(Binding("rule1", [sent], [], [q]))
    return bindings


def _match_rule2(g: Graph, cfg: Config):
    bindings = []
    for sent in _live_private_states(g, SENTIMENT):
        idea = sent.target
        if idea.node_type != IDEA_OF or idea.idea_object.retired:
            continue
        event = idea.idea_object
        q = PSSpec(
            sent.source_name,
            SENTIMENT,
            polarity_of(sign(sent.polarity) * effect_sign(event.effect)),
            event.object,
        )
        bindings.append(Binding("rule2", [sent], [], [q]))
    return bindings


def _match_rule31(g: Graph, cfg: Config):
    bindings = []
    for outer in _live_private_states(g, SENTIMENT):
        inner = outer.target
        if inner.node_type != PRIVATE_STATE or inner.att_type != SENTIMENT:
            continue
        z = inner.target
        if z.retired or z.node_type not in _JUDGEABLE + (GFBF,):
            continue
        conclusions = []
        if z.node_type in _JUDGEABLE:
            judgement = "isGood" if inner.polarity == POSITIVE else "isBad"
            conclusions.append(
                AgrSpec(outer.source_name, outer.polarity, inner.source_name,
                        PxSpec(judgement, z))
            )
        conclusions.append(
            PSSpec(outer.source_name, SENTIMENT, _mul(outer.polarity, inner.polarity), z)
        )
        bindings.append(Binding("rule3.1", [outer], [], conclusions))
    return bindings


def _match_rule32(g: Graph, cfg: Config):
    bindings = []
    for outer in _live_private_states(g, SENTIMENT):
        inner = outer.target
        if (
            inner.node_type != PRIVATE_STATE
            or inner.att_type != BELIEVES_TRUE
            or inner.property != SUBSTANTIAL
        ):
            continue
        z = inner.target
        if z.retired:
            continue
        verdict = "isTrue" if inner.polarity == POSITIVE else "isFalse"
        conclusions = [
            AgrSpec(outer.source_name, outer.polarity, inner.source_name, PxSpec(verdict, z)),
            PSSpec(outer.source_name, BELIEVES_TRUE, _mul(outer.polarity, inner.polarity),
                   z, substantial=True),
        ]
        bindings.append(Binding("rule3.2", [outer], [], conclusions))
    return bindings


def _match_rule33(g: Graph, cfg: Config):
    bindings = []
    for outer in _live_private_states(g, SENTIMENT):
        inner = outer.target
        if inner.node_type != PRIVATE_STATE or inner.att_type != BELIEVES_SHOULD:
            continue
        z = inner.target
        if z.retired:
            continue
        deontic = "should" if inner.polarity == POSITIVE else "shouldNot"
        conclusions = [
            AgrSpec(outer.source_name, outer.polarity, inner.source_name, PxSpec(deontic, z)),
            PSSpec(outer.source_name, BELIEVES_SHOULD, _mul(outer.polarity, inner.polarity), z),
        ]
        bindings.append(Binding("rule3.3", [outer], [], conclusions))
    return bindings


def _match_rule4(g: Graph, cfg: Config):
    bindings = []
    for agr in _live(g):
        if agr.node_type != AGREEMENT:
            continue
        q = PSSpec(agr.source_name, SENTIMENT, agr.polarity, agr.with_whom)
        bindings.append(Binding("rule4", [agr], [], [q]))
    return bindings


def _match_rule6(g: Graph, cfg: Config):
    bindings = []
    for event in _live(g):
        if event.node_type != GFBF or event.agent.node_type != ANIM:
            continue
        q = PSSpec(event.agent.name, INTENDS, POSITIVE, event)
        bindings.append(Binding("rule6", [event], [], [q]))
    return bindings


def _match_rule7(g: Graph, cfg: Config):
    bindings = []
    for intend in _live_private_states(g, INTENDS):
        if intend.polarity != POSITIVE:
            continue
        event = intend.target
        if event.node_type != GFBF or intend.source is not event.agent:
            continue
        q = PSSpec(intend.source_name, SENTIMENT, POSITIVE, IdeaOfSpec(event))
        bindings.append(Binding("rule7", [intend], [], [q]))
    return bindings


def _match_rule9(g: Graph, cfg: Config):
    bindings = []
    for sent in _live_private_states(g, SENTIMENT):
        event = sent.target
        if event.node_type != GFBF or event.agent.node_type != THING:
            continue
        assumption = PSSpec(sent.source_name, BELIEVES_TRUE, POSITIVE, event,
                            substantial=True)
        q = PSSpec(sent.source_name, SENTIMENT, sent.polarity, event.agent)
        bindings.append(Binding("rule9", [sent], [assumption], [q]))
    return bindings


def _match_rule10(g: Graph, cfg: Config):
    bindings = []
    for event in _live(g):
        if event.node_type != GFBF or not event.from_input:
            continue
        key = g.entity_lex_key(event.object)
        connotation = g.lexicon.connotation.get(key) if key else None
        if connotation is None:
            continue
        assumption = PSSpec(WRITER, BELIEVES_TRUE, POSITIVE, event)
        q = PSSpec(WRITER, SENTIMENT, connotation, event.object)
        bindings.append(
            Binding("rule10", [], [assumption], [q], fire_key=("rule10", event.node_id))
        )
    return bindings


def _match_rule5source(g: Graph, cfg: Config):
    bindings = []
    for outer in _live_private_states(g, SENTIMENT):
        if not outer.from_input:
            continue
        holder = outer.target
        if holder.node_type != ANIM:
            continue
        for inner in _live_private_states(g):
            if not inner.from_input or inner is outer:
                continue
            if inner.source_name != holder.name:
                continue
            assumption = PSSpec(outer.source_name, BELIEVES_TRUE, POSITIVE, inner)
            q = PSSpec(outer.source_name, SENTIMENT, outer.polarity, inner)
            bindings.append(
                Binding("rule5source", [outer], [assumption], [q],
                        fire_key=("rule5source", outer.node_id))
            )
    return bindings


def _match_rule5agent(g: Graph, cfg: Config):
    bindings = []
    for outer in _live_private_states(g, SENTIMENT):
        if not outer.from_input:
            continue
        agent = outer.target
        if agent.node_type != ANIM:
            continue
        for event in _live(g):
            if event.node_type != GFBF or not event.from_input:
                continue
            if event.agent is not agent:
                continue
            spec = PSSpec(outer.source_name, SENTIMENT, outer.polarity, event)
            bindings.append(
                Binding("rule5agent", [outer], [spec], [spec],
                        fire_key=("rule5agent", outer.node_id))
            )
    return bindings


RULES: dict[str, Rule] = {
    "rule8": Rule("rule8", _match_rule8),
    "rule1": Rule("rule1", _match_rule1),
    "rule2": Rule("rule2", _match_rule2),
    "rule3.1": Rule("rule3.1", _match_rule31),
    "rule3.2": Rule("rule3.2", _match_rule32),
    "rule3.3": Rule("rule3.3", _match_rule33),
    "rule4": Rule("rule4", _match_rule4),
    "rule6": Rule("rule6", _match_rule6),
    "rule7": Rule("rule7", _match_rule7),
    "rule9": Rule("rule9", _match_rule9),
    "rule10": Rule("rule10", _match_rule10, input_only=True),
    "rule5source": Rule("rule5source", _match_rule5source, input_only=True, fire_once=True),
    "rule5agent": Rule("rule5agent", _match_rule5agent, input_only=True, fire_once=True),
}


def match(rule: Rule, g: Graph, cfg: Config | None = None) -> list[Binding]:
    return rule.matcher(g, cfg or Config())


# -- assumption bases and evidence blocking ----------------------------------

def assumption_basis(g: Graph, spec: PSSpec) -> Node | None:
    """The node licensing an assumption, or None.

    In order: the assumed attitude already exists; the writer positively
    believes the bare proposition (with any required property); or the source
    holds an attitude of a different type toward the same target, that
    attitude not being a negative believesTrue.  A substantial requirement is
    only met by the first two.
    """
    existing = spec_exists(g, spec)
    if existing is not None and not existing.retired:
        return existing
    target = spec_exists(g, spec.target)
    if target is None:
        return None
    for root in g.roots:
        if (
            root.source_name == WRITER
            and root.att_type == BELIEVES_TRUE
            and root.polarity == POSITIVE
            and root.target is target
            and (not spec.substantial or root.property == SUBSTANTIAL)
        ):
            return root
    if spec.substantial:
        return None
    for node in _live_private_states(g):
        if node.source_name != spec.source or node.att_type == spec.att_type:
            continue
        if node.att_type == BELIEVES_TRUE and node.polarity == NEGATIVE:
            continue
        if node.target is target:
            return node
    return None


def blocked_by_evidence(g: Graph, spec) -> EvidenceFact | None:
    """The evidence fact ruling out an assumption or conclusion, if any."""
    if not isinstance(spec, PSSpec):
        return None
    required = SUBSTANTIAL if spec.substantial else None
    for fact in g.evidence:
        if fact.retired or fact.att_type != spec.att_type:
            continue
        if fact.polarity == spec.polarity or fact.property != required:
            continue
        if fact.holder is not None and fact.holder != spec.source:
            continue
        if spec_matches(fact.target, spec.target):
            return fact
    return None


# -- firing -------------------------------------------------------------------

@dataclass
class FireOutcome:
    fired: bool
    created: list[Node] = field(default_factory=list)
    existing: list[Node] = field(default_factory=list)
    assumptions: list[Node] = field(default_factory=list)
    blocks: list[BlockReport] = field(default_factory=list)


class EngineState:
    def __init__(self):
        self.consumed: set[tuple] = set()
        self.logged: set[tuple] = set()


def fire(rule: Rule, binding: Binding, g: Graph, cfg: Config,
         state: EngineState | None = None, iteration: int = 0) -> FireOutcome:
    state = state or EngineState()
    binding_ids = tuple(p.node_id for p in binding.ps)

    def report(cause: str, detail: str, space=None) -> FireOutcome:
        block = BlockReport(rule.name, binding_ids, cause, detail, space)
        outcome = FireOutcome(False, blocks=[block])
        _log(g, state, rule, binding, iteration, outcome)
        return outcome

    for spec in list(binding.assumptions) + list(binding.conclusions):
        fact = blocked_by_evidence(g, spec)
        if fact is not None:
            return report("evidence", f"evidence {fact.fact_id}")
    for spec in binding.assumptions:
        if assumption_basis(g, spec) is None:
            return report("no-assumption-basis", _describe_spec(spec))

    try:
        extension = extend_spaces(
            g, binding.ps, binding.assumptions, binding.conclusions,
            extended_belief_spaces=cfg.extended_belief_spaces,
        )
    except NoCommonSpace:
        return FireOutcome(False)

    blocks = [
        BlockReport(rule.name, binding_ids, cause, detail, space)
        for space, cause, detail in extension.blocked
    ]
    assumed = [spec_exists(g, spec) for spec in binding.assumptions]
    outcome = FireOutcome(
        fired=extension.fired,
        created=extension.created,
        existing=extension.existing,
        assumptions=[n for n in assumed if n is not None],
        blocks=blocks,
    )
    _log(g, state, rule, binding, iteration, outcome)
    return outcome


def _describe_spec(spec) -> str:
    if isinstance(spec, PSSpec):
        prop = " substantial" if spec.substantial else ""
        return f"assume {spec.source} {spec.polarity} {spec.att_type}{prop}"
    return str(spec)


def _log(g: Graph, state: EngineState, rule: Rule, binding: Binding,
         iteration: int, outcome: FireOutcome) -> None:
    created_ids = [n.node_id for n in outcome.created]
    existing_ids = [n.node_id for n in outcome.existing]
    block_sig = tuple((b.cause, b.detail, b.space) for b in outcome.blocks)
    if not created_ids:
        signature = (rule.name, binding.fire_key, tuple(existing_ids), block_sig)
        if signature in state.logged:
            return
        state.logged.add(signature)
        if not existing_ids and not outcome.blocks:
            return
    g.trace.append(
        TraceEvent(
            kind="fire",
            rule=rule.name,
            iteration=iteration,
            preconditions=[p.node_id for p in binding.ps],
            assumptions=[n.node_id for n in outcome.assumptions],
            created=created_ids,
            existing=existing_ids,
            blocks=outcome.blocks,
        )
    )


# -- control ------------------------------------------------------------------

@dataclass
class InferenceResult:
    graph: Graph
    iterations: int

    @property
    def trace(self):
        return self.graph.trace

    def block_reports(self) -> list[BlockReport]:
        return [b for event in self.graph.trace for b in event.blocks]


def run_to_fixpoint(g: Graph, cfg: Config | None = None) -> InferenceResult:
    cfg = cfg or Config()
    state = EngineState()
    rules = [RULES[name] for name in cfg.rule_order]
    iterations = 0
    for iteration in range(1, cfg.max_iterations + 1):
        iterations = iteration
        before = len(g.nodes)
        for rule in rules:
            for binding in match(rule, g, cfg):
                if rule.fire_once and cfg.fire_once and binding.fire_key in state.consumed:
                    continue
                outcome = fire(rule, binding, g, cfg, state, iteration)
                if outcome.fired and rule.fire_once and cfg.fire_once:
                    state.consumed.add(binding.fire_key)
        if cfg.extended_belief_spaces:
            _expected_space_closure(g)
        if len(g.nodes) == before:
            break
    else:
        raise IterationLimitExceeded(
            f"no fixpoint after {cfg.max_iterations} iterations"
        )
    check_consistency(g)
    return InferenceResult(graph=g, iterations=iterations)


def _expected_space_closure(g: Graph) -> None:
    """Optional closure: every member of a sentiment-bearing space is also
    believed, i.e. placed into the space's positive-belief variant."""
    changed = True
    while changed:
        changed = False
        index = space_index(g)
        for steps, inst in list(index.spaces.items()):
            variant = belief_variant(steps)
            if variant == steps:
                continue
            for member in list(inst.members):
                if member.retired:
                    continue
                if would_contradict(variant, member, g) is not None:
                    continue
                _, created = place(g, member, variant)
                if created:
                    changed = True


def check_consistency(g: Graph) -> None:
    """No space may hold the same source/attitude/target with both polarities."""
    index = space_index(g)
    groups: dict[tuple, list[Node]] = {}

    def add(space_key, node: Node) -> None:
        if node.node_type == PRIVATE_STATE:
            key = (space_key, PRIVATE_STATE, node.source_name, node.att_type,
                   node.target.node_id)
        elif node.node_type == AGREEMENT:
            key = (space_key, AGREEMENT, node.source_name, node.with_whom.name,
                   node.target.node_id)
        else:
            return
        groups.setdefault(key, []).append(node)

    for steps, inst in index.spaces.items():
        for member in inst.members:
            add(steps, member)
    for node in list(g.roots) + list(g.top_level):
        add(EPSILON, node)
    for key, nodes in groups.items():
        polarities = {n.polarity for n in nodes}
        if len(polarities) > 1:
            ids = [n.node_id for n in nodes]
            raise InvariantViolation(
                f"space {format_space(key[0])} holds contradictory attitudes: nodes {ids}"
            )


# -- pipeline -----------------------------------------------------------------

def process_sentence(sent: SentenceAnnotation, lex: Lexicon,
                     ids: IdAllocator | None = None,
                     cfg: Config | None = None) -> InferenceResult:
    g = build_input_graph(sent, lex, ids)
    run_composition(g)
    return run_to_fixpoint(g, cfg)


def process_document(doc: AnnotationDoc, lex: Lexicon,
                     cfg: Config | None = None) -> list[InferenceResult]:
    ids = IdAllocator()
    return [process_sentence(sent, lex, ids, cfg) for sent in doc.sentences]
