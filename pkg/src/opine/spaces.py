"""Private-state spaces: membership, extension, and in-space blocking.

A space is named by the step list of a chain of sentiment/believesTrue nodes
rooted at the writer: each step is (source, attitude type, polarity).  A node
is in a space when it is the target of the rightmost node of a chain carrying
those steps.  Two chains with the same step list are the same space.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import NoCommonSpace
from .graph import (
    AGREEMENT,
    BELIEVES_TRUE,
    NEGATIVE,
    POSITIVE,
    PRIVATE_STATE,
    SENTIMENT,
    WRITER,
    AgrSpec,
    Graph,
    Node,
    PSSpec,
    spec_intern,
    spec_matches,
)

Step = tuple[str, str, str]  # (source name, attitude type, polarity)
EPSILON: tuple[Step, ...] = ()


def step_of(node: Node) -> Step:
    return (node.source_name, node.att_type, node.polarity)


@dataclass
class SpaceInstance:
    steps: tuple[Step, ...]
    paths: list[tuple[Node, ...]] = field(default_factory=list)  # chain node sequences
    members: list[Node] = field(default_factory=list)


class SpaceIndex:
    """All chains of the graph, grouped by step list; rebuilt when it mutates."""

    def __init__(self, g: Graph):
        self.spaces: dict[tuple[Step, ...], SpaceInstance] = {}
        self.memberships: dict[int, dict[tuple[Step, ...], tuple[Node, ...]]] = {}
        for root in g.roots:
            path: list[Node] = []
            node = root
            while node is not None and node.is_chain_node():
                path.append(node)
                steps = tuple(step_of(n) for n in path)
                member = node.target
                inst = self.spaces.setdefault(steps, SpaceInstance(steps))
                inst.paths.append(tuple(path))
                if member not in inst.members:
                    inst.members.append(member)
                self.memberships.setdefault(member.node_id, {}).setdefault(
                    steps, tuple(path)
                )
                if member.node_type == "gfbf" and "role2" in member.children:
                    derived = member.children["role2"]
                    if derived not in inst.members:
                        inst.members.append(derived)
                    self.memberships.setdefault(derived.node_id, {}).setdefault(
                        steps, tuple(path)
                    )
                node = member


def space_index(g: Graph) -> SpaceIndex:
    cached = getattr(g, "_space_index", None)
    if cached is not None and cached[0] == g.version:
        return cached[1]
    index = SpaceIndex(g)
    g._space_index = (g.version, index)
    return index


def spaces_of(node: Node, g: Graph) -> set[tuple[Step, ...]]:
    """Spaces containing the node.  A root defines spaces but is in none."""
    return set(space_index(g).memberships.get(node.node_id, ()))


def members_of(steps: tuple[Step, ...], g: Graph) -> list[Node]:
    if steps == EPSILON:
        return list(g.roots) + list(g.top_level)
    inst = space_index(g).spaces.get(steps)
    return list(inst.members) if inst else []


def rightmost_nodes(steps: tuple[Step, ...], g: Graph) -> list[Node]:
    inst = space_index(g).spaces.get(steps)
    if inst is None:
        return []
    return [path[-1] for path in inst.paths]


def placement_spaces(node: Node, g: Graph) -> set[tuple[Step, ...]]:
    """Spaces a precondition counts as occupying, including the writer level."""
    spaces = spaces_of(node, g)
    if g.is_writer_level(node):
        spaces = spaces | {EPSILON}
    return spaces


def has_negative_belief(steps: tuple[Step, ...]) -> bool:
    return any(att == BELIEVES_TRUE and pol == NEGATIVE for _, att, pol in steps)


def belief_variant(steps: tuple[Step, ...]) -> tuple[Step, ...]:
    """Replace every sentiment step with positive belief by the same source."""
    return tuple(
        (src, BELIEVES_TRUE, POSITIVE) if att == SENTIMENT else (src, att, pol)
        for src, att, pol in steps
    )


def format_space(steps: tuple[Step, ...]) -> str:
    abbrev = {BELIEVES_TRUE: "B", SENTIMENT: "S"}
    inner = " ".join(
        f"{src} {'+' if pol == POSITIVE else '-'}{abbrev.get(att, att)}"
        for src, att, pol in steps
    )
    return f"[{inner}]" if inner else "[]"


# -- contradiction checks ----------------------------------------------------

def _same_target(target: Node, spec_target) -> bool:
    if isinstance(spec_target, Node):
        return target is spec_target
    return spec_matches(target, spec_target)


def _conflicts(existing: Node, spec) -> bool:
    """Opposite-polarity clash: same source, attitude type and target structure.

    Properties (substantial) are deliberately not compared.
    """
    if isinstance(spec, Node):
        if spec.node_type == PRIVATE_STATE:
            spec = PSSpec(
                spec.source_name, spec.att_type, spec.polarity, spec.target,
                substantial=spec.property is not None,
            )
        elif spec.node_type == AGREEMENT:
            return (
                existing.node_type == AGREEMENT
                and existing.source_name == spec.source_name
                and existing.with_whom is spec.with_whom
                and existing.polarity != spec.polarity
                and existing.target is spec.target
            )
        else:
            return False
    if isinstance(spec, PSSpec):
        return (
            existing.node_type == PRIVATE_STATE
            and existing.source_name == spec.source
            and existing.att_type == spec.att_type
            and existing.polarity != spec.polarity
            and _same_target(existing.target, spec.target)
        )
    if isinstance(spec, AgrSpec):
        return (
            existing.node_type == AGREEMENT
            and existing.source_name == spec.source
            and existing.with_whom.name == spec.with_whom
            and existing.polarity != spec.polarity
            and _same_target(existing.target, spec.px)
        )
    return False


def would_contradict(steps: tuple[Step, ...], prop, g: Graph):
    """Why adding prop to the space would be invalid, or None.

    Invalid if (a) a chain instance of the space ends in a negative
    believesTrue whose target is the prop, or (b) the space (at any wrapping
    level) already holds the same source/attitude/target with the opposite
    polarity.
    """
    for last in rightmost_nodes(steps, g):
        if last.att_type == BELIEVES_TRUE and last.polarity == NEGATIVE:
            if _same_target(last.target, prop):
                return last
    # Check the prop itself and every wrapper the placement would create.
    level_spec = prop
    for depth in range(len(steps), -1, -1):
        prefix = steps[:depth]
        for existing in members_of(prefix, g):
            if _conflicts(existing, level_spec):
                return existing
        if depth > 0:
            src, att, pol = steps[depth - 1]
            level_spec = PSSpec(src, att, pol, level_spec)
    return None


@dataclass
class ExtensionOutcome:
    fired: bool
    created: list[Node] = field(default_factory=list)
    existing: list[Node] = field(default_factory=list)
    blocked: list[tuple[tuple[Step, ...], str, str]] = field(default_factory=list)
    spaces: list[tuple[Step, ...]] = field(default_factory=list)


def _order_key(steps: tuple[Step, ...], g: Graph) -> tuple:
    inst = space_index(g).spaces.get(steps)
    first_root = min((p[0].node_id for p in inst.paths), default=0) if inst else 0
    return (first_root, len(steps), steps)


def place(g: Graph, node: Node, steps: tuple[Step, ...]) -> tuple[Node, list[Node]]:
    """Intern the chain wrapping node in the space's steps.

    Returns the top node and every node newly created by the wrapping.
    """
    created: list[Node] = []
    current = node
    for src, att, pol in reversed(steps):
        before = g.version
        current = g.private_state(src, att, pol, current)
        if g.version != before:
            created.append(current)
    if current.is_chain_node() and current.source_name == WRITER:
        g.add_root(current)
    elif not steps:
        g.add_top_level(current)
    return current, created


def extend_spaces(g: Graph, ps: list[Node], assumptions: list, conclusions: list,
                  *, extended_belief_spaces: bool = False) -> ExtensionOutcome:
    """Place assumptions and conclusions into every space holding all the ps.

    Spaces whose defining path carries a negative believesTrue are skipped and
    reported; spaces where any addition would contradict are skipped and
    reported.  Spaces with sentiment steps propagate additions into their
    positive-belief variants, where only propositions are placed unless
    extended_belief_spaces is set.
    """
    if ps:
        base: set[tuple[Step, ...]] | None = None
        for p in ps:
            ours = placement_spaces(p, g)
            base = ours if base is None else (base & ours)
        base = base or set()
    else:
        base = {EPSILON}
    if not base:
        raise NoCommonSpace("preconditions share no private-state space")

    outcome = ExtensionOutcome(fired=False)
    ordered = sorted(base, key=lambda s: _order_key(s, g))
    candidates: list[tuple[tuple[Step, ...], bool]] = []
    for steps in ordered:
        if has_negative_belief(steps):
            outcome.blocked.append((steps, "negative-belief-path", format_space(steps)))
            continue
        candidates.append((steps, False))
    for steps, _ in list(candidates):
        if any(att == SENTIMENT for _, att, _ in steps):
            variant = belief_variant(steps)
            if all(variant != s for s, _ in candidates):
                candidates.append((variant, True))

    additions = list(assumptions) + list(conclusions)
    accepted: list[tuple[tuple[Step, ...], bool]] = []
    for steps, is_variant in candidates:
        clash = None
        for spec in additions:
            clash = would_contradict(steps, spec, g)
            if clash is not None:
                break
        if clash is not None:
            outcome.blocked.append(
                (steps, "space-contradiction", f"node {clash.node_id}")
            )
            continue
        accepted.append((steps, is_variant))
    if not accepted:
        return outcome

    outcome.fired = True
    outcome.spaces = [steps for steps, _ in accepted]

    def record(node: Node, is_new: bool) -> None:
        if node in outcome.created or node in outcome.existing:
            return
        (outcome.created if is_new else outcome.existing).append(node)

    # Intern the bare propositions first so conclusions can nest assumptions.
    # Sub-structures (ideaOf, p(x)) interned on the way count as created too.
    bare: list[Node] = []
    for spec in additions:
        start = len(g.nodes)
        node = spec_intern(g, spec)
        for fresh in g.nodes[start:]:
            record(fresh, True)
        record(node, False)
        bare.append(node)

    for steps, is_variant in accepted:
        for node in bare:
            top, wrappers = place(g, node, steps)
            for w in wrappers:
                record(w, True)
            record(top, False)
        if is_variant:
            for p in ps:
                if p.is_proposition() or extended_belief_spaces:
                    top, wrappers = place(g, p, steps)
                    for w in wrappers:
                        record(w, True)
                    record(top, False)
    return outcome
