"""HTTP inference server for masked-word prediction, sentence embeddings,
and translation quality estimation.

Wraps three transformer models behind a small JSON protocol: POST
/fill_mask proposes whole-word replacements for one masked position, POST
/embed returns unit-norm sentence vectors, POST /qe scores a translation
pair, and GET /health describes what is loaded.
"""

from .app import create_app
from .config import ServerConfig
from .inference import (
    Embedder,
    InferenceFailure,
    MaskFiller,
    ModelBundle,
    ModelMissing,
    QualityEstimator,
    RequestError,
    load_bundle,
)

__version__ = "0.1.0"
