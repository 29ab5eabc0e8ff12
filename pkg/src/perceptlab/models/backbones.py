"""Backbone networks producing a pooled feature vector per image.

Three families are supported:

* ``tiny_conv`` - a two-layer convolutional net small enough that its
  forward pass and gradients can be recomputed by hand; the test backbone.
* ``conv_residual`` - torchvision ResNet50, optionally ImageNet-pretrained.
* ``attention_transformer`` - a ViT implemented here so that per-layer
  attention probabilities are first-class (required for attention rollout);
  optionally initialized from torchvision's pretrained ViT-B/16.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import torch
from torch import nn

BACKBONE_KINDS = ("conv_residual", "attention_transformer", "tiny_conv")


@dataclass
class BackboneConfig:
    """Architecture knobs; defaults reproduce the standard configuration per kind."""

    kind: str = "tiny_conv"
    pretrained: bool = False
    # tiny_conv
    channels: tuple[int, int] = (8, 8)
    # attention_transformer
    image_size: int = 224
    patch_size: int = 16
    dim: int = 768
    depth: int = 12
    heads: int = 12
    mlp_ratio: float = 4.0

    def __post_init__(self):
        if self.kind not in BACKBONE_KINDS:
            raise ValueError(f"unknown backbone kind {self.kind!r}; expected one of {BACKBONE_KINDS}")

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "pretrained": self.pretrained,
            "channels": list(self.channels),
            "image_size": self.image_size,
            "patch_size": self.patch_size,
            "dim": self.dim,
            "depth": self.depth,
            "heads": self.heads,
            "mlp_ratio": self.mlp_ratio,
        }

    @classmethod
    def from_json(cls, data: dict) -> "BackboneConfig":
        data = dict(data)
        data["channels"] = tuple(data.get("channels", (8, 8)))
        return cls(**data)


class TinyConv(nn.Module):
    """Two 3x3 convolutions with ReLUs and global average pooling.

    Stride 1 and padding 1 keep the feature grid at input resolution, so a
    hand computation over a small synthetic image stays tractable.
    """

    def __init__(self, channels: tuple[int, int] = (8, 8)):
        super().__init__()
        c1, c2 = channels
        self.conv1 = nn.Conv2d(3, c1, kernel_size=3, padding=1)
        self.act1 = nn.ReLU()
        self.conv2 = nn.Conv2d(c1, c2, kernel_size=3, padding=1)
        self.act2 = nn.ReLU()
        self.feature_dim = c2

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        features = self.act2(self.conv2(self.act1(self.conv1(x))))
        return features.mean(dim=(2, 3))

    @property
    def capture_module(self) -> nn.Module:
        return self.act2

    capture_kind = "conv"


class ResNetBackbone(nn.Module):
    """torchvision ResNet50 up to its final convolutional stage."""

    def __init__(self, pretrained: bool = False):
        super().__init__()
        from torchvision import models

        weights = models.ResNet50_Weights.IMAGENET1K_V2 if pretrained else None
        resnet = models.resnet50(weights=weights)
        self.stem = nn.Sequential(resnet.conv1, resnet.bn1, resnet.relu, resnet.maxpool)
        self.layer1 = resnet.layer1
        self.layer2 = resnet.layer2
        self.layer3 = resnet.layer3
        self.layer4 = resnet.layer4
        self.feature_dim = 2048

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        features = self.layer4(self.layer3(self.layer2(self.layer1(self.stem(x)))))
        return features.mean(dim=(2, 3))

    @property
    def capture_module(self) -> nn.Module:
        return self.layer4

    capture_kind = "conv"


class SelfAttention(nn.Module):
    """Multi-head self-attention that keeps its last attention probabilities.

    ``last_attention`` holds the (batch, heads, tokens, tokens) softmax
    output from the most recent forward, detached from the graph; rollout
    only needs the values.
    """

    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads != 0:
            raise ValueError(f"dim {dim} not divisible by heads {heads}")
        self.heads = heads
        self.head_dim = dim // heads
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)
        self.last_attention: torch.Tensor | None = None

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b, t, d = x.shape
        qkv = self.qkv(x).reshape(b, t, 3, self.heads, self.head_dim).permute(2, 0, 3, 1, 4)
        q, k, v = qkv[0], qkv[1], qkv[2]
        attn = torch.softmax(q @ k.transpose(-2, -1) / math.sqrt(self.head_dim), dim=-1)
        self.last_attention = attn.detach()
        out = (attn @ v).transpose(1, 2).reshape(b, t, d)
        return self.proj(out)


class EncoderBlock(nn.Module):
    def __init__(self, dim: int, heads: int, mlp_ratio: float):
        super().__init__()
        hidden = int(dim * mlp_ratio)
        self.norm1 = nn.LayerNorm(dim)
        self.attn = SelfAttention(dim, heads)
        self.norm2 = nn.LayerNorm(dim)
        self.mlp = nn.Sequential(nn.Linear(dim, hidden), nn.GELU(), nn.Linear(hidden, dim))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.norm1(x))
        return x + self.mlp(self.norm2(x))


class VisionTransformer(nn.Module):
    """Pre-norm ViT with a CLS token; pooled output is the CLS embedding."""

    def __init__(self, image_size=224, patch_size=16, dim=768, depth=12, heads=12, mlp_ratio=4.0):
        super().__init__()
        if image_size % patch_size != 0:
            raise ValueError(f"image size {image_size} not divisible by patch size {patch_size}")
        self.patch_size = patch_size
        self.grid = image_size // patch_size
        num_tokens = self.grid * self.grid + 1
        self.patch_embed = nn.Conv2d(3, dim, kernel_size=patch_size, stride=patch_size)
        self.cls_token = nn.Parameter(torch.zeros(1, 1, dim))
        self.pos_embedding = nn.Parameter(torch.empty(1, num_tokens, dim).normal_(std=0.02))
        self.blocks = nn.ModuleList(EncoderBlock(dim, heads, mlp_ratio) for _ in range(depth))
        self.norm = nn.LayerNorm(dim)
        self.feature_dim = dim

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        b = x.shape[0]
        tokens = self.patch_embed(x).flatten(2).transpose(1, 2)
        tokens = torch.cat([self.cls_token.expand(b, -1, -1), tokens], dim=1)
        tokens = tokens + self.pos_embedding
        for block in self.blocks:
            tokens = block(tokens)
        return self.norm(tokens)[:, 0]

    def attention_maps(self) -> list[torch.Tensor]:
        """Per-layer attention from the most recent forward pass."""
        maps = []
        for i, block in enumerate(self.blocks):
            if block.attn.last_attention is None:
                raise RuntimeError(f"no attention recorded for block {i}; run a forward pass first")
            maps.append(block.attn.last_attention)
        return maps

    @property
    def capture_module(self) -> nn.Module:
        # Captured via pre-hook: the token sequence entering the final block
        # (the same tensor its first normalization receives). Hooking the
        # block rather than the norm keeps channel ablation consistent - the
        # residual path must see the ablated tokens too.
        return self.blocks[-1]

    capture_kind = "tokens"


def build_backbone(config: BackboneConfig) -> nn.Module:
    if config.kind == "tiny_conv":
        # No pretrained weights exist for the test backbone; the flag is moot.
        return TinyConv(channels=config.channels)
    if config.kind == "conv_residual":
        return ResNetBackbone(pretrained=config.pretrained)
    vit = VisionTransformer(
        image_size=config.image_size,
        patch_size=config.patch_size,
        dim=config.dim,
        depth=config.depth,
        heads=config.heads,
        mlp_ratio=config.mlp_ratio,
    )
    if config.pretrained:
        _load_pretrained_vit(vit, config)
    return vit


def _load_pretrained_vit(vit: VisionTransformer, config: BackboneConfig) -> None:
    """Map torchvision's pretrained ViT-B/16 weights onto our layout."""
    if (config.image_size, config.patch_size, config.dim, config.depth, config.heads) != (224, 16, 768, 12, 12):
        raise ValueError(
            "pretrained transformer weights are only available for the default "
            "224/16 ViT-B configuration; use pretrained=False for custom sizes"
        )
    from torchvision import models

    source = models.vit_b_16(weights=models.ViT_B_16_Weights.IMAGENET1K_V1).state_dict()
    mapped = {
        "patch_embed.weight": source["conv_proj.weight"],
        "patch_embed.bias": source["conv_proj.bias"],
        "cls_token": source["class_token"],
        "pos_embedding": source["encoder.pos_embedding"],
        "norm.weight": source["encoder.ln.weight"],
        "norm.bias": source["encoder.ln.bias"],
    }
    for i in range(12):
        src = f"encoder.layers.encoder_layer_{i}"
        dst = f"blocks.{i}"
        mapped[f"{dst}.norm1.weight"] = source[f"{src}.ln_1.weight"]
        mapped[f"{dst}.norm1.bias"] = source[f"{src}.ln_1.bias"]
        mapped[f"{dst}.attn.qkv.weight"] = source[f"{src}.self_attention.in_proj_weight"]
        mapped[f"{dst}.attn.qkv.bias"] = source[f"{src}.self_attention.in_proj_bias"]
        mapped[f"{dst}.attn.proj.weight"] = source[f"{src}.self_attention.out_proj.weight"]
        mapped[f"{dst}.attn.proj.bias"] = source[f"{src}.self_attention.out_proj.bias"]
        mapped[f"{dst}.norm2.weight"] = source[f"{src}.ln_2.weight"]
        mapped[f"{dst}.norm2.bias"] = source[f"{src}.ln_2.bias"]
        mapped[f"{dst}.mlp.0.weight"] = source[f"{src}.mlp.0.weight"]
        mapped[f"{dst}.mlp.0.bias"] = source[f"{src}.mlp.0.bias"]
        mapped[f"{dst}.mlp.2.weight"] = source[f"{src}.mlp.3.weight"]
        mapped[f"{dst}.mlp.2.bias"] = source[f"{src}.mlp.3.bias"]
    vit.load_state_dict(mapped)
