"""Method-level bug severity toolkit.

Computes ten lexical/structural metrics from Java method bodies, manages
labeled method corpora, trains and scores multi-class severity classifiers,
and exports the text/vector fusion records consumed by encoder fine-tuning.
"""

__version__ = "0.1.0"
