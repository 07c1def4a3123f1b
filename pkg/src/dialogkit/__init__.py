"""dialogkit: goal-oriented dialogue agents from a handful of seed dialogues.

Pipeline: annotate a few seed dialogues against a domain schema, blow them up
into thousands of simulated training dialogues by dual-agent self-play, train
entity-recognition / action-prediction / argument-filling models on the
result, and serve the trained bundle in a runtime action loop.
"""

from .dialogue import (
    AnnotatedDialogue,
    ApiCall,
    Binding,
    DialogueError,
    EndDialogue,
    EndTurn,
    EntityAnnotation,
    NlgCall,
    UserUtterance,
    ValidationReport,
    Variable,
    load_corpus,
    parse_dialogue,
    resolve_references,
    save_corpus,
    serialize_dialogue,
    turns,
    validate_dialogue,
)
from .schema import (
    ApiDef,
    ArgDef,
    DomainSchema,
    EntityTypeDef,
    NlgDef,
    SchemaError,
    UserTemplateDef,
    load_domain,
    parse_domain,
    schema_fingerprint,
    serialize_domain,
)

__version__ = "0.1.0"
