"""Training companion for the stenokit toolkit.

Trains a Gated-CNN-BGRU line recognizer with CTC loss on preprocessed line
images and scheme-encoded transliterations, then exports per-line logit
files (plus a charset sidecar) in the exact format the toolkit's
``decode-logits`` command consumes.  The two packages share file formats,
never code: this one neither imports stenokit nor decodes anything itself.
"""

__version__ = "0.1.0"

from .charset import CharsetBinding, CharsetError
from .config import TrainConfig
from .model import GatedCNNBGRU
from .training import train
from .export import export_logits

__all__ = ["__version__", "CharsetBinding", "CharsetError", "TrainConfig",
           "GatedCNNBGRU", "train", "export_logits"]
