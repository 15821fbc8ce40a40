"""Similarity and loss scoring.

Both scorers accept injectable model callables so tests can use stubs and
real mode can plug in actual checkpoints:

  image_encoder(image_path) -> 1-D feature vector
  text_encoder(text) -> 1-D feature vector
  loss_model(image_path, conversations) -> per-target-token log-probabilities
      over the assistant-turn tokens only (prompt tokens are already masked
      out by the model wrapper)
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .config import ScorerConfig, assemble_text

ImageEncoder = Callable[[str], np.ndarray]
TextEncoder = Callable[[str], np.ndarray]
LossModel = Callable[[str, Sequence[tuple[str, str]]], Sequence[float]]


class ScoringError(Exception):
    """Per-sample scoring failure; batch scoring logs and continues."""


def score_similarity(
    image: str,
    text: str,
    config: ScorerConfig,
    image_encoder: ImageEncoder,
    text_encoder: TextEncoder,
) -> float:
    """Cosine of unit-normalized image and text embeddings, in [-1, 1]."""
    if not text:
        raise ScoringError("empty text")
    u = np.asarray(image_encoder(image), dtype=np.float64)
    v = np.asarray(text_encoder(text), dtype=np.float64)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise ScoringError("zero-norm embedding")
    value = float(np.dot(u / nu, v / nv))
    return min(1.0, max(-1.0, value))


def score_loss(
    image: str,
    conversations: Sequence[tuple[str, str]],
    config: ScorerConfig,
    loss_model: LossModel,
) -> tuple[float, int]:
    """Summed per-token negative log-likelihood over the target tokens, plus
    the target token count."""
    logprobs = list(loss_model(image, conversations))
    if not logprobs:
        raise ScoringError("model produced no target tokens")
    loss = -float(sum(logprobs))
    return max(0.0, loss), len(logprobs)


def similarity_text(conversations, config: ScorerConfig) -> str:
    """Assemble and truncate the text fed to the similarity encoder.

    Truncation is approximate (4 characters per token) since the encoder
    applies its own exact limit; this just bounds the payload size.
    """
    text = assemble_text(conversations, config)
    return text[: config.truncation_length * 4]


# --- real-mode model loading (heavyweight deps imported lazily) -----------


def load_real_encoders(config: ScorerConfig) -> tuple[ImageEncoder, TextEncoder]:
    """Build CLIP-style encoders from the configured checkpoints."""
    try:
        import torch
        from PIL import Image
        from transformers import CLIPModel, CLIPProcessor
    except ImportError as exc:
        raise ScoringError(
            "real mode needs torch, transformers and Pillow installed"
        ) from exc

    model = CLIPModel.from_pretrained(config.image_encoder).to(config.device)
    processor = CLIPProcessor.from_pretrained(config.image_encoder)
    model.eval()

    def image_encoder(path: str) -> np.ndarray:
        try:
            image = Image.open(path).convert("RGB")
        except OSError as exc:
            raise ScoringError(f"undecodable image {path}: {exc}") from exc
        with torch.no_grad():
            inputs = processor(images=image, return_tensors="pt").to(config.device)
            features = model.get_image_features(**inputs)
        return features[0].cpu().numpy()

    def text_encoder(text: str) -> np.ndarray:
        with torch.no_grad():
            inputs = processor(
                text=[text], return_tensors="pt", truncation=True,
                max_length=config.truncation_length,
            ).to(config.device)
            features = model.get_text_features(**inputs)
        return features[0].cpu().numpy()

    return image_encoder, text_encoder


def load_real_loss_model(config: ScorerConfig) -> LossModel:
    """Build a loss model over a vision-language checkpoint.

    Returns per-token log-probabilities for assistant-turn target tokens
    only; human/prompt tokens are masked from the objective.
    """
    try:
        import torch
        from PIL import Image
        from transformers import AutoModelForImageTextToText, AutoProcessor
    except ImportError as exc:
        raise ScoringError(
            "real mode needs torch, transformers and Pillow installed"
        ) from exc

    model = AutoModelForImageTextToText.from_pretrained(
        config.language_model
    ).to(config.device)
    processor = AutoProcessor.from_pretrained(config.language_model)
    model.eval()

    def loss_model(path: str, conversations) -> list[float]:
        try:
            image = Image.open(path).convert("RGB")
        except OSError as exc:
            raise ScoringError(f"undecodable image {path}: {exc}") from exc
        messages = [
            {"role": "user" if sp == "human" else "assistant",
             "content": text}
            for sp, text in conversations
        ]
        prompt = processor.apply_chat_template(messages, tokenize=False)
        inputs = processor(text=prompt, images=image, return_tensors="pt")
        input_ids = inputs["input_ids"]
        if input_ids.shape[1] > getattr(model.config, "max_position_embeddings",
                                        1 << 30):
            raise ScoringError("context-length overflow")
        with torch.no_grad():
            logits = model(**inputs.to(config.device)).logits[0]
        logprobs = torch.log_softmax(logits[:-1], dim=-1)
        targets = input_ids[0, 1:]
        token_logprobs = logprobs.gather(1, targets.unsqueeze(1)).squeeze(1)
        # approximate assistant masking: keep only tokens that appear inside
        # assistant turns, located by re-tokenizing each turn
        keep = torch.zeros_like(token_logprobs, dtype=torch.bool)
        for sp, text in conversations:
            if sp != "assistant":
                continue
            turn_ids = processor.tokenizer(text,
                                           add_special_tokens=False)["input_ids"]
            if not turn_ids:
                continue
            seq = targets.tolist()
            for start in range(len(seq) - len(turn_ids) + 1):
                if seq[start:start + len(turn_ids)] == turn_ids:
                    keep[start:start + len(turn_ids)] = True
                    break
        kept = token_logprobs[keep]
        if kept.numel() == 0:
            raise ScoringError("no assistant target tokens located")
        return kept.cpu().tolist()

    return loss_model
