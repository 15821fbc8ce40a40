"""Scorer configuration."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class ScorerConfig:
    mode: str = "mock"  # "real" | "mock"
    image_encoder: str | None = None
    text_encoder: str | None = None
    language_model: str | None = None
    batch_size: int = 16
    device: str = "cpu"
    text_assembly: str = "all_turns"  # or "assistant_turns"
    truncation_length: int = 77  # CLIP-style context limit, in tokens
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.mode not in ("real", "mock"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.text_assembly not in ("all_turns", "assistant_turns"):
            raise ValueError(f"unknown text_assembly {self.text_assembly!r}")
        if self.mode == "real":
            missing = [name for name, value in (
                ("image_encoder", self.image_encoder),
                ("text_encoder", self.text_encoder),
                ("language_model", self.language_model),
            ) if not value]
            if missing:
                raise ValueError(f"real mode requires {', '.join(missing)}")
        if self.mode == "mock" and self.seed is None:
            raise ValueError("mock mode requires a seed")


def assemble_text(conversations, config: ScorerConfig) -> str:
    """Concatenate conversation turns into the similarity-encoder text."""
    if config.text_assembly == "assistant_turns":
        parts = [text for speaker, text in conversations if speaker == "assistant"]
    else:
        parts = [text for _speaker, text in conversations]
    return " ".join(parts)
