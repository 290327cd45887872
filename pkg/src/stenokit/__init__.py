"""Toolkit for handwritten stenography recognition pipelines.

Submodules:

- codec: reversible single-codepoint encodings of transliterated text
- metrics: edit distance, character/word error rates, significance testing
- ctc: best-path decoding and the binary logits file format
- preproc: line-image preprocessing (value channel, inversion, stretch)
- synth: synthetic line composition from segmented word images
- corpus: manifests, splits, line types, TF-IDF corpus analysis
- cli: the ``stenokit`` command
"""

__version__ = "0.1.0"

from .codec import SCHEMES, SymbolTable, build_symbol_table, decode, encode
from .ctc import best_path_decode, read_logits, write_logits
from .errors import StenokitError
from .metrics import EditSummary, edit_distance, evaluate, wilcoxon_bonferroni
from .preproc import PreprocessConfig, preprocess
from .synth import SynthSpec, build_word_pool, generate
from .corpus import LineRecord, load_manifest, split_stats, tfidf_cosine

__all__ = [
    "__version__",
    "SCHEMES", "SymbolTable", "build_symbol_table", "decode", "encode",
    "best_path_decode", "read_logits", "write_logits",
    "StenokitError",
    "EditSummary", "edit_distance", "evaluate", "wilcoxon_bonferroni",
    "PreprocessConfig", "preprocess",
    "SynthSpec", "build_word_pool", "generate",
    "LineRecord", "load_manifest", "split_stats", "tfidf_cosine",
]
