import csv

import numpy as np
import pytest
import torch
from PIL import Image

from perceptlab.data.preprocess import PreprocessConfig, PreprocessedImage, preprocess
from perceptlab.data.records import ImageRecord


def write_png(path, array):
    """Write an (H, W) grayscale or (H, W, 3) RGB uint8 array as a PNG."""
    array = np.asarray(array)
    if array.ndim == 2:
        array = np.repeat(array[:, :, None], 3, axis=2)
    Image.fromarray(array.astype(np.uint8)).save(path)


def write_manifest(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["image_id", "file_path", "city"])
        writer.writerows(rows)
    return path


def write_comparison_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "left_image", "right_image", "attribute", "choice"])
        writer.writerows(rows)
    return path


@pytest.fixture
def tiny_corpus(tmp_path):
    """Six 8x8 images with distinct mean brightness, plus their manifest."""
    rng = np.random.default_rng(42)
    rows = []
    records = []
    for i in range(6):
        image_id = f"img{i}"
        name = f"{image_id}.png"
        level = 30 + 35 * i
        pixels = np.clip(rng.normal(level, 5, size=(8, 8)), 0, 255)
        write_png(tmp_path / name, pixels)
        rows.append((image_id, name, "testville"))
        records.append(ImageRecord(image_id=image_id, file_path=tmp_path / name, city="testville"))
    manifest = write_manifest(tmp_path / "manifest.csv", rows)
    return manifest, records


def preprocessed_from_array(image_id, array, config=None):
    """PreprocessedImage for an in-memory float array in [0, 1], shape (H, W) or (H, W, 3)."""
    config = config or PreprocessConfig(side=array.shape[0], mean=(0.0, 0.0, 0.0), std=(1.0, 1.0, 1.0))
    array = np.asarray(array, dtype=np.float32)
    if array.ndim == 2:
        array = np.repeat(array[:, :, None], 3, axis=2)
    mean = np.asarray(config.mean, dtype=np.float32)
    std = np.asarray(config.std, dtype=np.float32)
    tensor = torch.from_numpy(((array - mean) / std).transpose(2, 0, 1).copy())
    return PreprocessedImage(image_id=image_id, tensor=tensor, mean=config.mean, std=config.std)


@pytest.fixture
def preprocess_fn():
    return preprocess
