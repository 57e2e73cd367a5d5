"""Offline annotation sidecar for the stylo toolkit.

Produces the two inputs the toolkit cannot generate itself: CoNLL-U
annotations (UPOS + morphological features) and contextual embedding
files. A batch CLI only; the file formats are the entire contract with
the consumer.
"""

__version__ = "0.1.0"
