"""Forward/backward capture of activations at a model's explanation layer."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
from torch import nn

from ..data.preprocess import PreprocessedImage
from ..models.scorer import ScoringModel
from .maps import SIGNS


class LayerNotFoundError(ValueError):
    """Requested capture layer does not exist; message lists what does."""


@dataclass
class ActivationCapture:
    """Activations, gradients, and (for transformers) attention matrices.

    ``activations``/``gradients`` are batch-squeezed numpy arrays of equal
    shape: (channels, h, w) for convolutional captures, (tokens, dim) for
    token captures. Gradients are of ``sign * f(x)`` with respect to the
    captured activations. ``score`` is the plain model output f(x).
    """

    layer_name: str
    kind: str
    activations: np.ndarray
    gradients: np.ndarray
    target_sign: str
    score: float
    target_score: float
    input_hw: tuple[int, int]
    image_id: str
    attribute: str
    attentions: list[np.ndarray] | None = None
    module: nn.Module | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.activations.shape != self.gradients.shape:
            raise ValueError(
                f"gradient shape {self.gradients.shape} must equal activation shape {self.activations.shape}"
            )
        if self.attentions is not None:
            for i, attn in enumerate(self.attentions):
                if np.any(attn < 0):
                    raise ValueError(f"attention matrix for layer {i} has negative entries")

    def spatial(self) -> tuple[np.ndarray, np.ndarray]:
        """Activations and gradients as (channels, h, w) spatial stacks.

        Token captures drop the CLS token and fold the remaining tokens onto
        a square grid; a non-square token count is an error.
        """
        if self.kind == "conv":
            return self.activations, self.gradients
        acts, grads = self.activations[1:], self.gradients[1:]
        side = int(round(np.sqrt(acts.shape[0])))
        if side * side != acts.shape[0]:
            raise ValueError(
                f"token count {acts.shape[0]} after dropping CLS is not a square grid"
            )
        dim = acts.shape[1]
        return (
            acts.T.reshape(dim, side, side),
            grads.T.reshape(dim, side, side),
        )


def _resolve_layer(model: ScoringModel, layer: str | None) -> tuple[nn.Module, str, str]:
    if layer is None:
        module = model.capture_module
        name = next(n for n, m in model.named_modules() if m is module)
        return module, name, model.capture_kind
    modules = dict(model.named_modules())
    if layer not in modules:
        available = ", ".join(sorted(n for n in modules if n))
        raise LayerNotFoundError(f"layer {layer!r} not found; available layers: {available}")
    # Named overrides capture the module output directly, which only makes
    # sense for feature-map shaped outputs.
    return modules[layer], layer, "conv"


def capture(
    model: ScoringModel,
    image: PreprocessedImage | torch.Tensor,
    target_sign: str = "positive",
    layer: str | None = None,
) -> ActivationCapture:
    """Run forward and backward passes, capturing at the explanation layer.

    The backward target is ``sign * f(x)`` with sign +1 for ``positive`` and
    -1 for ``negative``, so gradients for the negative sign are the exact
    negation of the positive ones.
    """
    if target_sign not in SIGNS:
        raise ValueError(f"target_sign must be one of {SIGNS}, got {target_sign!r}")
    sign = 1.0 if target_sign == "positive" else -1.0
    module, layer_name, kind = _resolve_layer(model, layer)

    tensor = image.tensor if isinstance(image, PreprocessedImage) else image
    image_id = image.image_id if isinstance(image, PreprocessedImage) else ""

    stash: dict[str, torch.Tensor] = {}
    handles = []

    def _grab(t: torch.Tensor) -> None:
        stash["activations"] = t
        t.register_hook(lambda grad: stash.__setitem__("gradients", grad))

    if kind == "tokens":
        handles.append(module.register_forward_pre_hook(lambda _m, args: _grab(args[0])))
    else:
        handles.append(module.register_forward_hook(lambda _m, _args, out: _grab(out)))

    was_training = model.training
    model.eval()
    try:
        model.zero_grad(set_to_none=True)
        output = model(tensor.unsqueeze(0))
        score = output[0]
        (sign * score).backward()
    finally:
        for handle in handles:
            handle.remove()
        model.train(was_training)

    if "activations" not in stash:
        raise RuntimeError(f"layer {layer_name!r} was never reached during the forward pass")
    if "gradients" not in stash:
        raise RuntimeError(f"no gradient flowed back to layer {layer_name!r}")
    if kind == "conv" and stash["activations"].ndim != 4:
        raise ValueError(
            f"layer {layer_name!r} produced a {stash['activations'].ndim - 1}-d activation per "
            "image; conv-style capture needs a (channels, h, w) feature map"
        )

    attentions = None
    if kind == "tokens":
        # One (heads, tokens, tokens) matrix per layer; head-averaging is
        # rollout's job, not capture's.
        attentions = [np.asarray(a[0].numpy(), dtype=np.float64) for a in model.backbone.attention_maps()]

    activations = stash["activations"].detach()[0].numpy().astype(np.float64)
    gradients = stash["gradients"].detach()[0].numpy().astype(np.float64)
    return ActivationCapture(
        layer_name=layer_name,
        kind=kind,
        activations=activations,
        gradients=gradients,
        target_sign=target_sign,
        score=float(score.detach()),
        target_score=sign * float(score.detach()),
        input_hw=(int(tensor.shape[-2]), int(tensor.shape[-1])),
        image_id=image_id,
        attribute=model.attribute.value,
        attentions=attentions,
        module=module,
    )


class _AblateChannel:
    """Context manager zeroing one channel of the captured layer during forward."""

    def __init__(self, module: nn.Module, kind: str, channel: int):
        self.module = module
        self.kind = kind
        self.channel = channel
        self._handle = None

    def __enter__(self):
        if self.kind == "tokens":

            def pre_hook(_m, args):
                tokens = args[0].clone()
                tokens[..., self.channel] = 0.0
                return (tokens,) + tuple(args[1:])

            self._handle = self.module.register_forward_pre_hook(pre_hook)
        else:

            def hook(_m, _args, out):
                ablated = out.clone()
                ablated[:, self.channel] = 0.0
                return ablated

            self._handle = self.module.register_forward_hook(hook)
        return self

    def __exit__(self, *exc):
        self._handle.remove()
        return False


@torch.no_grad()
def ablated_score(model: ScoringModel, tensor: torch.Tensor, capture_: ActivationCapture, channel: int) -> float:
    """f_k(x): the model's score with channel ``channel`` zeroed at the capture layer."""
    if capture_.module is None:
        raise ValueError("capture does not reference its module; re-run capture() on the model")
    was_training = model.training
    model.eval()
    try:
        with _AblateChannel(capture_.module, capture_.kind, channel):
            return float(model(tensor.unsqueeze(0))[0])
    finally:
        model.train(was_training)
