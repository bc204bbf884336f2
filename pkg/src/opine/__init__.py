"""Inference of default opinion implicatures from annotated sentences.

Pipeline: parse annotations and a lexicon, build the per-sentence node graph,
compose influencer chains and lexical second roles, then run the default rules
to fixpoint inside private-state spaces.
"""

from .annotations import (
    AnnotationDoc,
    AnnotationLine,
    EntityRef,
    Lexicon,
    SentenceAnnotation,
    parse_document,
    parse_lexicon,
    render_document,
)
from .composition import expand_extra_roles, resolve_chains, run_composition
from .errors import (
    CyclicChain,
    DanglingReference,
    DuplicateId,
    DuplicateKey,
    IllFormedNode,
    InputError,
    InvariantViolation,
    IterationLimitExceeded,
    MalformedLine,
    MalformedRecord,
    NoCommonSpace,
    OpineError,
    RootConstraintViolation,
)
from .graph import (
    EvidenceFact,
    Graph,
    IdAllocator,
    Node,
    build_input_graph,
    structural_signature,
)
from .render import (
    dumps,
    graph_from_json,
    render_by_spaces,
    render_graph,
    render_node,
    render_trace,
    sentence_to_json,
    whatif_diff,
)
from .rules import (
    DEFAULT_RULE_ORDER,
    RULES,
    Config,
    InferenceResult,
    assumption_basis,
    blocked_by_evidence,
    check_consistency,
    fire,
    match,
    process_document,
    process_sentence,
    run_to_fixpoint,
)
from .spaces import extend_spaces, spaces_of, would_contradict

__all__ = [name for name in dir() if not name.startswith("_")]
