import pytest

from opine import (
    Config,
    Graph,
    IterationLimitExceeded,
    assumption_basis,
    blocked_by_evidence,
    build_input_graph,
    match,
    run_to_fixpoint,
)
from opine.graph import PSSpec
from opine.rules import RULES

from conftest import load_doc


def keys_of(g):
    return {n.structural_key() for n in g.nodes}


def test_rule8_matches_belief_plus_sentiment(run_sentence):
    doc = load_doc("skyrocket")
    g = build_input_graph(doc.sentences[0], run_sentence("moveon").graph.lexicon)
    bindings = match(RULES["rule8"], g)
    assert len(bindings) == 1
    belief, sentiment = bindings[0].ps
    assert belief.att_type == "believesTrue"
    assert sentiment.target.name == "skyrocketing-health-care-costs"
    q = bindings[0].conclusions[0]
    # negative sentiment toward the object of a badFor event -> positive toward the event
    assert q.polarity == "positive"


def test_rule9_requires_thing_agent(lexicon):
    doc = load_doc("moveon")
    g = build_input_graph(doc.sentences[0], lexicon)
    assert match(RULES["rule9"], g) == []  # MoveOn is animate
    doc = load_doc("tree")
    g = build_input_graph(doc.sentences[0], lexicon)
    assert len(match(RULES["rule9"], g)) == 1


def test_rule6_binds_every_animate_gfbf(lexicon):
    doc = load_doc("wars")
    g = build_input_graph(doc.sentences[0], lexicon)
    bindings = match(RULES["rule6"], g)
    assert len(bindings) == 2  # trigger wars, revive industry
    assert all(b.ps[0].node_type == "gfbf" for b in bindings)


def test_assumption_basis_from_writer_belief(lexicon):
    doc = load_doc("tree")
    g = build_input_graph(doc.sentences[0], lexicon)
    event = next(n for n in g.nodes if n.node_type == "gfbf")
    basis = assumption_basis(
        g, PSSpec("mother", "believesTrue", "positive", event, substantial=True)
    )
    assert basis is not None and basis.property == "substantial"


def test_assumption_basis_negative_writer_belief_fails(lexicon):
    doc = load_doc("tree_didnt")
    g = build_input_graph(doc.sentences[0], lexicon)
    event = next(n for n in g.nodes if n.node_type == "gfbf")
    basis = assumption_basis(
        g, PSSpec("mother", "believesTrue", "positive", event, substantial=True)
    )
    assert basis is None


def test_assumption_basis_from_other_attitude_type():
    g = Graph()
    event = g.gfbf(g.entity("a"), "goodFor", g.entity("b"))
    inner = g.private_state("S", "sentiment", "positive", event)
    g.add_root(g.private_state("writer", "believesTrue", "positive", inner))
    basis = assumption_basis(g, PSSpec("S", "believesTrue", "positive", event))
    assert basis is inner  # the sentiment grounds a belief of a different type


def test_blocked_by_evidence_cases(lexicon):
    g = Graph()
    virus = g.entity("the virus")
    event = g.gfbf(g.entity("the tech staff"), "goodFor", virus)
    g.add_root(g.private_state("writer", "sentiment", "negative", event))
    g.add_evidence("intends", "negative", event, from_input=True)
    blocked = blocked_by_evidence(g, PSSpec("the tech staff", "intends", "positive", event))
    assert blocked is not None
    # different attitude type untouched
    assert blocked_by_evidence(g, PSSpec("the tech staff", "sentiment", "positive", event)) is None
    # holder restriction
    g2 = Graph()
    event2 = g2.gfbf(g2.entity("ins"), "goodFor", g2.entity("care"))
    idea = g2.idea_of(event2)
    g2.add_evidence("sentiment", "negative", idea, holder="ins", from_input=True)
    assert blocked_by_evidence(g2, PSSpec("ins", "sentiment", "positive", idea)) is not None
    assert blocked_by_evidence(g2, PSSpec("writer", "sentiment", "positive", idea)) is None


def test_no_evidence_never_blocks():
    g = Graph()
    event = g.gfbf(g.entity("a"), "goodFor", g.entity("b"))
    assert blocked_by_evidence(g, PSSpec("a", "intends", "positive", event)) is None


def test_fire_records_existing_on_refire(run_sentence):
    result = run_sentence("moveon")
    refires = [
        e for e in result.trace
        if e.rule == "rule4" and e.existing and not e.created
    ]
    assert refires, "rule4's second firing should resolve to the existing node"


def test_rule10_conclusion_is_writer_root(run_sentence):
    g = run_sentence("wars").graph
    keys = {n.structural_key() for n in g.roots}
    assert "(ps writer sentiment negative wars)" in keys


def test_rule5source_fire_once(lexicon):
    # Two input attitudes by the same holder: with fire-once the rule uses
    # only the first; without it, both.
    text = (
        '"Two attitudes."\n'
        "E1 gfbf <a, goodFor (x), b>\n"
        "E2 gfbf <a, badFor (y), c>\n"
        "S1 subjectivity <Mayor, positive sentiment (p), E1>\n"
        "S2 subjectivity <Mayor, negative sentiment (q), E2>\n"
        "B1 privateState <writer, positive believesTrue (\"\"), S1>\n"
        "B2 privateState <writer, positive believesTrue (\"\"), S2>\n"
        "S3 subjectivity <writer, negative sentiment (r), Mayor>\n"
    )
    from opine import parse_document, process_document

    first = "(ps writer sentiment negative (ps Mayor sentiment positive (gfbf a goodFor b)))"
    second = "(ps writer sentiment negative (ps Mayor sentiment negative (gfbf a badFor c)))"

    doc = parse_document(text)
    once = {n.structural_key() for n in process_document(doc, lexicon, Config())[0].graph.nodes}
    assert first in once and second not in once

    free_cfg = Config(fire_once=False)
    free = {n.structural_key() for n in process_document(doc, lexicon, free_cfg)[0].graph.nodes}
    assert first in free and second in free


def test_rule5agent_assumption_equals_conclusion(run_sentence):
    result = run_sentence("orders")
    events = [e for e in result.trace if e.rule == "rule5agent" and e.created]
    assert events
    event = events[0]
    assert event.assumptions  # the assumed sentiment is recorded
    g = result.graph
    keys = keys_of(g)
    assert "(ps writer believesTrue positive (ps Muslims sentiment negative (gfbf Obama badFor Osama bin Laden)))" in keys


def test_explicit_attitude_blocks_default(lexicon):
    # An explicit "did not intend" private state keeps rule6 from adding the
    # default intention to the same space, and rule7 never gets going.
    text = (
        '"He did not mean to hurt Bill."\n'
        "E1 gfbf <He, badFor (hurt), Bill>\n"
        "I1 privateState <He, negative intends (accident), E1>\n"
        "B1 privateState <writer, positive believesTrue (\"\"), I1>\n"
        "B2 privateState <writer, positive believesTrue (\"\"), E1>\n"
    )
    from opine import parse_document, process_document

    result = process_document(parse_document(text), lexicon)[0]
    keys = keys_of(result.graph)
    assert "(ps He intends positive (gfbf He badFor Bill))" not in keys
    assert "(ps He sentiment positive (ideaOf (gfbf He badFor Bill)))" not in keys
    assert any(
        b.rule == "rule6" and b.cause == "space-contradiction"
        for b in result.block_reports()
    )


def test_run_to_fixpoint_empty(lexicon):
    from opine import SentenceAnnotation

    g = build_input_graph(SentenceAnnotation(text="quiet"), lexicon)
    result = run_to_fixpoint(g, Config())
    assert result.iterations == 1
    assert g.nodes == []


def test_iteration_limit_raises(lexicon):
    doc = load_doc("taxes")
    g = build_input_graph(doc.sentences[0], lexicon)
    with pytest.raises(IterationLimitExceeded):
        run_to_fixpoint(g, Config(max_iterations=1))


def test_monotone_growth(lexicon):
    doc = load_doc("blooming")
    g = build_input_graph(doc.sentences[0], lexicon)
    result = run_to_fixpoint(g, Config())
    ids = [n.node_id for n in g.nodes]
    assert ids == sorted(ids)
    assert len(set(ids)) == len(ids)
    assert result.iterations < 50


def test_every_created_node_in_exactly_one_event(lexicon, corpus_files):
    from opine import parse_document
    from opine.composition import run_composition

    for path in corpus_files:
        if path.stem == "empty":
            continue
        doc = parse_document(path.read_text(), path.name)
        for sent in doc.sentences:
            g = build_input_graph(sent, lexicon)
            input_ids = {n.node_id for n in g.nodes}
            input_ids |= {f.fact_id for f in g.evidence}
            run_composition(g)
            result = run_to_fixpoint(g, Config())
            created = [i for e in result.trace for i in e.created]
            derived = {n.node_id for n in g.nodes} - input_ids
            derived |= {f.fact_id for f in g.evidence} - input_ids
            assert len(created) == len(set(created)), path.name
            assert derived == set(created), path.name


def test_rule_order_override(lexicon):
    doc = load_doc("moveon")
    g = build_input_graph(doc.sentences[0], lexicon)
    reversed_order = tuple(reversed(Config().rule_order))
    result = run_to_fixpoint(g, Config(rule_order=reversed_order))
    keys = keys_of(result.graph)
    assert "(ps writer sentiment positive Senator McCain)" in keys


def test_order_robustness_on_corpus(lexicon, corpus_files, recwarn):
    # Diagnostic, not a gate: reversed rule order with fire-once off should
    # leave the structural node set unchanged; report any divergence.
    import warnings

    from opine import parse_document, process_document
    from opine.render import structural_inventory

    for path in corpus_files:
        if path.stem == "empty":
            continue
        doc = parse_document(path.read_text(), path.name)
        default = process_document(doc, lexicon, Config(fire_once=False))
        flipped = process_document(
            doc, lexicon,
            Config(rule_order=tuple(reversed(Config().rule_order)), fire_once=False),
        )
        for a, b in zip(default, flipped):
            if structural_inventory(a.graph) != structural_inventory(b.graph):
                warnings.warn(f"rule-order divergence on {path.name}")
