"""Checkpoint persistence: parameter blob plus a JSON manifest."""

from __future__ import annotations

import json
from pathlib import Path

import torch

from ..data.preprocess import PreprocessConfig
from ..data.records import parse_attribute
from ..models.backbones import BackboneConfig
from ..models.scorer import ScoringModel

WEIGHTS_FILE = "weights.pt"
MANIFEST_FILE = "manifest.json"


def save_checkpoint(
    model: ScoringModel,
    out_dir,
    epoch: int,
    val_accuracy: float | None = None,
    train_config=None,
    preprocess_config: PreprocessConfig | None = None,
) -> Path:
    """Write ``weights.pt`` and ``manifest.json`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out_dir / WEIGHTS_FILE)
    manifest = {
        "backbone_kind": model.backbone_kind,
        "backbone_config": model.backbone_config.to_json(),
        "attribute": model.attribute.value,
        "preprocess": (preprocess_config or PreprocessConfig()).to_json(),
        "train_config": train_config.to_json() if train_config is not None else None,
        "epoch": epoch,
        "val_accuracy": val_accuracy,
    }
    (out_dir / MANIFEST_FILE).write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return out_dir


def load_checkpoint(checkpoint_dir) -> tuple[ScoringModel, dict]:
    """Reconstruct the model from a checkpoint directory; returns (model, manifest)."""
    checkpoint_dir = Path(checkpoint_dir)
    manifest_path = checkpoint_dir / MANIFEST_FILE
    weights_path = checkpoint_dir / WEIGHTS_FILE
    if not manifest_path.exists() or not weights_path.exists():
        raise FileNotFoundError(
            f"checkpoint directory {checkpoint_dir} must contain {MANIFEST_FILE} and {WEIGHTS_FILE}"
        )
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    backbone_config = BackboneConfig.from_json(manifest["backbone_config"])
    # Weights come from the blob; never re-download pretrained initializers.
    backbone_config.pretrained = False
    model = ScoringModel(backbone_config, parse_attribute(manifest["attribute"]))
    model.load_state_dict(torch.load(weights_path, map_location="cpu", weights_only=True))
    model.eval()
    return model, manifest
