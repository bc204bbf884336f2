"""Text displays, machine-readable export, and the what-if diff.

Two text formats: the indented node display (one line per node, children
indented below), and the "by spaces" summary that lists, for every
space-resident node, the spaces containing it.  JSON is the contract surface;
the text mimics the node-display conventions without promising byte equality
with any particular listing.
"""

from __future__ import annotations

import json

from .annotations import AnnotationDoc, Lexicon
from .graph import (
    AGREEMENT,
    ANIM,
    BELIEVES_TRUE,
    EVENT,
    GFBF,
    IDEA_OF,
    INFLUENCER,
    INTENDS,
    P_X,
    POSITIVE,
    PRIVATE_STATE,
    SENTIMENT,
    STATE,
    SUBSTANTIAL,
    THING,
    EvidenceFact,
    Graph,
    IdAllocator,
    Node,
)
from .rules import Config, InferenceResult, process_document
from .spaces import space_index

_INDENT = "  "


def render_node(node: Node, indent: int = 0) -> str:
    pad = _INDENT * indent
    t = node.node_type
    if t in (ANIM, THING):
        return f"{pad}{node.node_id} {node.name}"
    if t == GFBF:
        word = node.anchor or node.effect
        lines = [f"{pad}{node.node_id} {node.agent.name} {word} {node.object.name}"]
        if "role2" in node.children:
            derived = node.children["role2"]
            lines.append(
                f"{pad}{_INDENT}{derived.node_id} {derived.agent.name};"
                f" which is {derived.effect} {derived.object.name}"
            )
        return "\n".join(lines)
    if t == IDEA_OF:
        return f"{pad}{node.node_id} ideaOf\n" + render_node(node.idea_object, indent + 1)
    if t == P_X:
        return f"{pad}{node.node_id} {node.property}\n" + render_node(node.children["x"], indent + 1)
    if t == AGREEMENT:
        verb = "agrees" if node.polarity == POSITIVE else "disagrees"
        head = f"{pad}{node.node_id} {node.source.name} {verb} with {node.with_whom.name} that"
        return head + "\n" + render_node(node.target, indent + 1)
    if t == PRIVATE_STATE:
        prop = f" {node.property}" if node.property else ""
        head = f"{pad}{node.node_id} {node.source.name} {node.polarity} {node.att_type}{prop}"
        return head + "\n" + render_node(node.target, indent + 1)
    if t == INFLUENCER:
        head = f"{pad}{node.node_id} {node.agent.name} <{node.property}>"
        return head + "\n" + render_node(node.target, indent + 1)
    if t in (STATE, EVENT):
        lines = [f"{pad}{node.node_id} {t}"]
        for label in sorted(node.children):
            lines.append(f"{pad}{_INDENT}{label}:")
            lines.append(render_node(node.children[label], indent + 2))
        return "\n".join(lines)
    raise ValueError(f"unrenderable node type {t!r}")


def render_evidence(fact: EvidenceFact) -> str:
    if fact.att_type == INTENDS:
        qualifier = "intentional" if fact.polarity == POSITIVE else "not intentional"
        head = f"{fact.fact_id} There is evidence that the following is {qualifier}:"
    elif fact.att_type == BELIEVES_TRUE:
        qualifier = "substantial" if fact.polarity == POSITIVE else "not substantial"
        head = f"{fact.fact_id} There is evidence that the following is {qualifier}"
    else:
        head = f"{fact.fact_id} (evidence,{fact.holder},{fact.polarity},{fact.att_type})"
    return head + "\n" + render_node(fact.target, 1)


def _space_label(path: tuple[Node, ...]) -> str:
    abbrev = {BELIEVES_TRUE: "B", SENTIMENT: "S"}
    steps = " ".join(
        f"{n.source.name} {'+' if n.polarity == POSITIVE else '-'}{abbrev[n.att_type]}"
        for n in path
    )
    return f"[{path[0].node_id} {steps}]"


_BY_SPACES_TYPES = (ANIM, THING, GFBF, IDEA_OF, AGREEMENT)


def _shown_in_by_spaces(node: Node) -> bool:
    if node.retired:
        return False
    if node.node_type in _BY_SPACES_TYPES:
        return True
    return node.node_type == PRIVATE_STATE and node.att_type in (INTENDS, "believesShould")


def render_by_spaces(result: InferenceResult | Graph) -> str:
    """Space-membership summary: each resident node under its space lines."""
    g = result.graph if isinstance(result, InferenceResult) else result
    index = space_index(g)
    chunks = []
    shown = [
        node
        for node in g.nodes
        if _shown_in_by_spaces(node) and node.node_id in index.memberships
    ]
    for node in sorted(shown, key=lambda n: n.node_id):
        paths = sorted(index.memberships[node.node_id].values(), key=lambda p: p[0].node_id)
        lines = []
        for path in paths:
            prefix = "From Input: " if all(n.from_input for n in path) else ""
            lines.append(prefix + _space_label(path))
        lines.append(render_node(node))
        chunks.append("\n".join(lines))
    return "\n\n".join(chunks) + ("\n" if chunks else "")


def render_graph(g: Graph) -> str:
    """Top-level view: every root chain and writer-level fact, in id order."""
    tops = sorted(list(g.roots) + list(g.top_level), key=lambda n: n.node_id)
    parts = [render_node(n) for n in tops]
    parts.extend(render_evidence(f) for f in g.evidence if not f.retired)
    return "\n".join(parts) + ("\n" if parts else "")


def render_trace(result: InferenceResult) -> str:
    lines = []
    for event in result.trace:
        if event.kind == "composition":
            lines.append(f"[composition] {event.rule}")
        else:
            lines.append(f"[iteration {event.iteration}] {event.rule}")
        if event.preconditions:
            lines.append("  preconditions: " + ", ".join(map(str, event.preconditions)))
        if event.assumptions:
            lines.append("  assumptions: " + ", ".join(map(str, event.assumptions)))
        if event.created:
            lines.append("  created: " + ", ".join(map(str, event.created)))
        if event.existing:
            lines.append("  existing: " + ", ".join(map(str, event.existing)))
        for block in event.blocks:
            space = f" in space {_steps_text(block.space)}" if block.space else ""
            lines.append(f"  blocked{space}: {block.cause} ({block.detail})")
    return "\n".join(lines) + ("\n" if lines else "")


def _steps_text(steps) -> str:
    abbrev = {BELIEVES_TRUE: "B", SENTIMENT: "S"}
    inner = " ".join(
        f"{src} {'+' if pol == POSITIVE else '-'}{abbrev.get(att, att)}"
        for src, att, pol in steps
    )
    return f"[{inner}]"


# -- JSON ---------------------------------------------------------------------

def _node_to_json(node: Node) -> dict:
    return {
        "id": node.node_id,
        "type": node.node_type,
        "attType": node.att_type,
        "polarity": node.polarity,
        "property": node.property,
        "name": node.name,
        "anchor": node.anchor,
        "fromInput": node.from_input,
        "retired": node.retired,
        "children": {label: child.node_id for label, child in sorted(node.children.items())},
    }


def _block_to_json(block) -> dict:
    return {
        "rule": block.rule,
        "binding": list(block.binding),
        "cause": block.cause,
        "detail": block.detail,
        "space": [list(step) for step in block.space] if block.space else None,
    }


def sentence_to_json(result: InferenceResult, text: str | None = None) -> dict:
    g = result.graph
    index = space_index(g)
    spaces = []
    for steps in sorted(index.spaces, key=lambda s: (len(s), s)):
        inst = index.spaces[steps]
        spaces.append(
            {
                "steps": [list(step) for step in steps],
                "members": sorted(n.node_id for n in inst.members),
            }
        )
    trace = []
    for event in g.trace:
        trace.append(
            {
                "kind": event.kind,
                "rule": event.rule,
                "iteration": event.iteration,
                "preconditions": list(event.preconditions),
                "assumptions": list(event.assumptions),
                "created": list(event.created),
                "existing": list(event.existing),
                "blocks": [_block_to_json(b) for b in event.blocks],
            }
        )
    return {
        "text": text if text is not None else g.text,
        "nodes": [_node_to_json(n) for n in g.nodes],
        "roots": [n.node_id for n in g.roots],
        "topLevel": [n.node_id for n in g.top_level],
        "evidence": [
            {
                "id": f.fact_id,
                "holder": f.holder,
                "attType": f.att_type,
                "polarity": f.polarity,
                "property": f.property,
                "target": f.target.node_id,
                "fromInput": f.from_input,
                "retired": f.retired,
            }
            for f in g.evidence
        ],
        "spaces": spaces,
        "trace": trace,
        "blocks": [_block_to_json(b) for b in result.block_reports()],
    }


def document_to_json(results: list[InferenceResult]) -> dict:
    return {
        "format_version": 1,
        "sentences": [sentence_to_json(r) for r in results],
    }


def dumps(results: list[InferenceResult]) -> str:
    return json.dumps(document_to_json(results), indent=2, ensure_ascii=False) + "\n"


def graph_from_json(sentence: dict) -> Graph:
    """Rebuild a graph from its JSON form (ids are reassigned)."""
    g = Graph(IdAllocator(), text=sentence.get("text", ""))
    by_old_id: dict[int, Node] = {}
    # Second-role relations are attached to an earlier node, so defer them.
    pending_role2: list[tuple[int, int]] = []
    for obj in sorted(sentence["nodes"], key=lambda o: o["id"]):
        children = {
            label: by_old_id[cid]
            for label, cid in obj["children"].items()
            if not (label == "role2" and cid not in by_old_id)
        }
        t = obj["type"]
        if t in (ANIM, THING):
            node = g.entity(obj["name"], thing=t == THING)
        elif t == GFBF:
            effect = "goodFor" if "goodFor" in children else "badFor"
            node = g.gfbf(children["agent"], effect, children["object"], anchor=obj["anchor"])
            if "role2" in children:
                node = g.attach_role2(node, children["role2"])
            elif "role2" in obj["children"]:
                pending_role2.append((obj["id"], obj["children"]["role2"]))
        elif t == IDEA_OF:
            node = g.idea_of(children["ideaObject"])
        elif t == P_X:
            node = g.p_x(obj["property"], children["x"])
        elif t == AGREEMENT:
            node = g.agreement(children["source"], obj["polarity"], children["withWhom"],
                               children["target"])
        elif t == PRIVATE_STATE:
            node = g.private_state(
                children["source"], obj["attType"], obj["polarity"], children["target"],
                substantial=obj["property"] == SUBSTANTIAL, anchor=obj["anchor"],
            )
        elif t == INFLUENCER:
            node = g.influencer(children["agent"], obj["property"], children["target"],
                                anchor=obj["anchor"])
        elif t == STATE:
            node = g.state_node(children["experiencer"], children["object"])
        elif t == EVENT:
            node = g.event_node(children["agent"], children["object"], anchor=obj["anchor"])
        else:
            raise ValueError(f"unknown node type in JSON: {t!r}")
        node.from_input = obj["fromInput"]
        node.retired = obj["retired"]
        by_old_id[obj["id"]] = node
    for event_id, derived_id in pending_role2:
        g.attach_role2(by_old_id[event_id], by_old_id[derived_id])
    for old_id in sentence["roots"]:
        g.add_root(by_old_id[old_id])
    for old_id in sentence["topLevel"]:
        g.add_top_level(by_old_id[old_id])
    for ev in sentence["evidence"]:
        g.add_evidence(
            ev["attType"], ev["polarity"], by_old_id[ev["target"]],
            holder=ev["holder"], property=ev["property"], from_input=ev["fromInput"],
        ).retired = ev["retired"]
    return g


def structural_inventory(g: Graph) -> list[str]:
    """Sorted structural keys of every node plus root/evidence markers."""
    keys = sorted(n.structural_key() for n in g.nodes)
    keys.extend(sorted("root " + n.structural_key() for n in g.roots))
    keys.extend(sorted("top " + n.structural_key() for n in g.top_level))
    keys.extend(
        sorted(
            f"(ev {f.holder} {f.att_type} {f.polarity} {f.property} {f.target.structural_key()})"
            for f in g.evidence
        )
    )
    return keys


# -- what-if ------------------------------------------------------------------

def writer_fact_keys(g: Graph) -> set[str]:
    """Structural keys of the writer-level facts (roots and top-level nodes)."""
    return {n.structural_key() for n in list(g.roots) + list(g.top_level)}


def whatif_diff(doc: AnnotationDoc, lex: Lexicon, line_id: str, polarity: str,
                cfg: Config | None = None) -> list[tuple[list[str], list[str]]]:
    """Run the document and its polarity-flipped variant; diff conclusions.

    Returns one (only_in_original, only_in_variant) pair per sentence, as
    sorted structural keys of writer-level facts.
    """
    base = process_document(doc, lex, cfg)
    flipped = process_document(doc.with_polarity(line_id, polarity), lex, cfg)
    diffs = []
    for b, f in zip(base, flipped):
        base_keys = writer_fact_keys(b.graph)
        flip_keys = writer_fact_keys(f.graph)
        diffs.append((sorted(base_keys - flip_keys), sorted(flip_keys - base_keys)))
    return diffs
