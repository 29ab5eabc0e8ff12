"""Command-line interface: train, rank, explain, serve, tally, demo-data."""

from __future__ import annotations

import json
from pathlib import Path

import click

from .analysis.annotations import load_records
from .analysis.ranking import rank_corpus, write_extremes
from .analysis.tally import export_markdown_grid, save_tables, tally
from .data.corpus import load_comparisons, load_corpus, write_rejection_report
from .data.preprocess import ImageTensorCache, PreprocessConfig
from .data.records import parse_attribute
from .data.splits import split
from .models.backbones import BACKBONE_KINDS
from .models.scorer import build_model
from .saliency.capture import capture
from .saliency.maps import SALIENCY_METHODS
from .saliency.methods import ablationcam, attention_rollout, eigencam, gradcam
from .saliency.overlay import upsample_and_overlay, write_heatmap
from .training.checkpoint import load_checkpoint
from .training.config import TrainConfig
from .training.trainer import train as run_training


def _resolve_manifest(images: str) -> Path:
    path = Path(images)
    if path.is_dir():
        path = path / "manifest.csv"
    if not path.exists():
        raise click.ClickException(f"image manifest not found at {path}")
    return path


@click.group()
def main():
    """Train, explain, and annotate urban-perception scoring models."""


@main.command()
@click.option("--comparisons", "comparisons_path", required=True, type=click.Path(exists=True))
@click.option("--images", required=True, help="Image manifest CSV, or a directory containing manifest.csv.")
@click.option("--attribute", required=True)
@click.option("--backbone", type=click.Choice(BACKBONE_KINDS), default="conv_residual", show_default=True)
@click.option("--epochs", default=20, show_default=True)
@click.option("--lr", default=1e-3, show_default=True)
@click.option("--batch-size", default=32, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--pretrained/--no-pretrained", default=True, show_default=True)
@click.option("--side", default=224, show_default=True, help="Square input size images are resized to.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def train(comparisons_path, images, attribute, backbone, epochs, lr, batch_size, seed, pretrained, side, out_dir):
    """Fine-tune a scoring model on pairwise comparisons."""
    manifest = _resolve_manifest(images)
    corpus = load_corpus(manifest)
    attribute = parse_attribute(attribute)
    comparisons, rejected = load_comparisons(comparisons_path, corpus)
    comparisons = [c for c in comparisons if c.attribute == attribute]
    if not comparisons:
        raise click.ClickException(f"no usable comparisons for attribute {attribute.value!r}")

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if rejected:
        write_rejection_report(rejected, out_dir / "rejected_rows.json")
        click.echo(f"rejected {len(rejected)} rows (see rejected_rows.json)")

    preprocess_config = PreprocessConfig(side=side)
    images_cache = ImageTensorCache(corpus, preprocess_config)
    data_split = split(comparisons, seed=seed)
    model = build_model(backbone, attribute, pretrained=pretrained)
    config = TrainConfig(learning_rate=lr, epochs=epochs, batch_size=batch_size, seed=seed, pretrained=pretrained)
    report = run_training(model, data_split, images_cache, config,
                          out_dir=out_dir / "checkpoint", preprocess_config=preprocess_config)
    (out_dir / "train_report.json").write_text(json.dumps(report.to_json(), indent=2) + "\n", encoding="utf-8")
    click.echo(f"best epoch {report.best_epoch}: validation accuracy {report.best_val_accuracy:.4f}")
    click.echo(f"checkpoint written to {report.checkpoint_dir}")


@main.command()
@click.option("--checkpoint", "checkpoint_dir", required=True, type=click.Path(exists=True))
@click.option("--images", required=True)
@click.option("--k", default=50, show_default=True)
@click.option("--out", "out_path", required=True, type=click.Path(), help="extremes.json to write/update.")
def rank(checkpoint_dir, images, k, out_path):
    """Rank the corpus with a trained model and persist the k extremes."""
    model, manifest = load_checkpoint(checkpoint_dir)
    corpus = load_corpus(_resolve_manifest(images))
    cache = ImageTensorCache(corpus, PreprocessConfig.from_json(manifest["preprocess"]))
    ranked = rank_corpus(model, corpus, cache, model_checkpoint=str(checkpoint_dir))
    write_extremes(ranked, k, out_path)
    click.echo(f"wrote top/bottom {k} for {ranked.attribute} to {out_path}")


@main.command()
@click.option("--checkpoint", "checkpoint_dir", required=True, type=click.Path(exists=True))
@click.option("--images", required=True)
@click.option("--ids", default=None, help="Comma-separated image ids (default: every corpus image).")
@click.option("--method", type=click.Choice(SALIENCY_METHODS), default="gradcam", show_default=True)
@click.option("--sign", type=click.Choice(["positive", "negative"]), default="positive", show_default=True)
@click.option("--alpha", default=0.5, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def explain(checkpoint_dir, images, ids, method, sign, alpha, out_dir):
    """Write heatmaps, sidecars, and blended overlays for the chosen images."""
    model, manifest = load_checkpoint(checkpoint_dir)
    corpus = load_corpus(_resolve_manifest(images))
    cache = ImageTensorCache(corpus, PreprocessConfig.from_json(manifest["preprocess"]))
    wanted = set(ids.split(",")) if ids else {r.image_id for r in corpus}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    for record in corpus:
        if record.image_id not in wanted:
            continue
        snapshot = capture(model, cache[record.image_id], target_sign=sign)
        if method == "gradcam":
            smap = gradcam(snapshot)
        elif method == "eigencam":
            smap = eigencam(snapshot)
        elif method == "ablationcam":
            smap = ablationcam(model, cache[record.image_id], snapshot)
        else:
            smap = attention_rollout(snapshot)
        write_heatmap(smap, out_dir, model_checkpoint=str(checkpoint_dir))
        overlay_path = out_dir / f"{record.image_id}_{method}_{sign}_overlay.png"
        upsample_and_overlay(smap, record, alpha=alpha, out_path=overlay_path)
        click.echo(f"explained {record.image_id} ({method}, {sign})")


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True))
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
def serve(run_dir, port, host):
    """Serve the annotation API (and tasks/media) for a prepared run directory."""
    import uvicorn

    from .service.app import create_app
    from .service.runs import RunDirectory

    app = create_app(RunDirectory.open(run_dir))
    uvicorn.run(app, host=host, port=port)


@main.command("tally")
@click.option("--store", "store_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--format", "fmt", type=click.Choice(["csv", "markdown"]), default="csv", show_default=True)
def tally_cmd(store_path, out_dir, fmt):
    """Export tally tables from an annotation store."""
    tables = tally(load_records(store_path))
    written = save_tables(tables, out_dir, fmt)
    if fmt == "markdown":
        grid_path = Path(out_dir) / "tally_grid.md"
        grid_path.write_text(export_markdown_grid(tables), encoding="utf-8")
        written.append(grid_path)
    for path in written:
        click.echo(f"wrote {path}")


@main.command("demo-data")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--n-images", default=200, show_default=True)
@click.option("--n-pairs", default=2000, show_default=True)
@click.option("--side", default=64, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--attribute", default="safety", show_default=True)
def demo_data(out_dir, n_images, n_pairs, side, seed, attribute):
    """Generate the synthetic bright-rectangle benchmark corpus."""
    from .synthetic import make_comparisons, make_rectangle_corpus, write_comparisons_csv

    out_dir = Path(out_dir)
    corpus = make_rectangle_corpus(out_dir / "images", n_images=n_images, side=side, seed=seed)
    comparisons = make_comparisons(corpus.latents, n_pairs=n_pairs,
                                   attribute=parse_attribute(attribute), seed=seed)
    csv_path = write_comparisons_csv(comparisons, out_dir / "comparisons.csv")
    click.echo(f"wrote {n_images} images to {out_dir / 'images'} and {n_pairs} comparisons to {csv_path}")


if __name__ == "__main__":
    main()
