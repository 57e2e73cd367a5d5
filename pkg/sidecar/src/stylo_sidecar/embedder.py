"""Contextual sentence embeddings via a transformer encoder.

Model identifiers:

* a Hugging Face model id (default ``bert-base-cased``): loaded with
  AutoTokenizer/AutoModel; failure to load (offline, missing weights)
  exits with a message.
* ``random:<dim>[@seed]``: a small randomly initialized BERT-style encoder
  with hidden size <dim>, built locally with a seeded RNG and a hashing
  tokenizer. No downloads; meant for offline pipelines and tests, where
  only the interchange contract (dimension, determinism, coverage)
  matters, not embedding quality.

Pooling over the final hidden layer: ``mean`` (attention-masked average,
the default) or ``first`` (first-token vector). Inputs are truncated to
the encoder's maximum sequence length.
"""

from __future__ import annotations

import hashlib
import re

from .dataset import SidecarError

_RANDOM_ID = re.compile(r"random:(\d+)(?:@(\d+))?$")


class _HashTokenizer:
    """Deterministic whitespace tokenizer hashing tokens into a fixed id
    space: 0=PAD, 1=CLS, 2=SEP, 3.. hashed tokens."""

    def __init__(self, vocab_size: int, max_length: int):
        self.vocab_size = vocab_size
        self.max_length = max_length

    def encode(self, text: str) -> list[int]:
        ids = [1]
        for token in text.split():
            digest = hashlib.sha256(token.encode("utf-8")).digest()
            ids.append(3 + int.from_bytes(digest[:8], "little") % (self.vocab_size - 3))
            if len(ids) >= self.max_length - 1:
                break
        ids.append(2)
        return ids


def _pick_heads(dim: int) -> int:
    for heads in (12, 8, 6, 4, 2, 1):
        if dim % heads == 0:
            return heads
    return 1


class Embedder:
    def __init__(self, model_id: str = "bert-base-cased", pooling: str = "mean",
                 max_length: int = 512):
        if pooling not in ("mean", "first"):
            raise SidecarError(f"unknown pooling {pooling!r} (use mean or first)")
        self.pooling = pooling
        self.max_length = max_length
        import torch  # local import keeps CLI start fast for annotate-only jobs

        self._torch = torch
        match = _RANDOM_ID.match(model_id)
        if match:
            self._init_random(int(match.group(1)), int(match.group(2) or 0))
        else:
            self._init_pretrained(model_id)
        self.model.eval()

    def _init_random(self, dim: int, seed: int):
        from transformers import BertConfig, BertModel

        torch = self._torch
        torch.manual_seed(seed)
        config = BertConfig(
            vocab_size=8192,
            hidden_size=dim,
            num_hidden_layers=2,
            num_attention_heads=_pick_heads(dim),
            intermediate_size=2 * dim,
            max_position_embeddings=self.max_length,
        )
        self.model = BertModel(config)
        self.tokenizer = _HashTokenizer(config.vocab_size, self.max_length)
        self.dim = dim
        self._hash_mode = True

    def _init_pretrained(self, model_id: str):
        from transformers import AutoModel, AutoTokenizer

        try:
            self.tokenizer = AutoTokenizer.from_pretrained(model_id)
            self.model = AutoModel.from_pretrained(model_id)
        except Exception as e:
            raise SidecarError(f"could not load encoder {model_id!r}: {e}") from None
        self.dim = int(self.model.config.hidden_size)
        self.max_length = min(self.max_length,
                              int(getattr(self.model.config, "max_position_embeddings", 512)))
        self._hash_mode = False

    def embed(self, text: str):
        torch = self._torch
        with torch.no_grad():
            if self._hash_mode:
                ids = torch.tensor([self.tokenizer.encode(text)], dtype=torch.long)
                mask = torch.ones_like(ids)
                hidden = self.model(input_ids=ids, attention_mask=mask).last_hidden_state
            else:
                batch = self.tokenizer(text, return_tensors="pt", truncation=True,
                                       max_length=self.max_length)
                hidden = self.model(**batch).last_hidden_state
                mask = batch["attention_mask"]
            if self.pooling == "first":
                vector = hidden[0, 0]
            else:
                weights = mask[0].unsqueeze(-1).to(hidden.dtype)
                vector = (hidden[0] * weights).sum(dim=0) / weights.sum()
        return [float(v) for v in vector]
