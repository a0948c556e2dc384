"""Noise augmentation and detection evaluation for strawberry truss/runner data.

Images are H x W x 3 uint8 numpy arrays. File-level operations take paths to
the same manifest and predictions JSON files the ``agrieval`` command uses.
"""

import json
import os

from ._agrieval import (
    Error,
    InvalidParameter,
    IoError,
    ValidationError,
    apply_noise,
    f1,
    gaussian_noise,
    iou_bbox,
    poisson_noise,
    polygon_to_mask,
    precision,
    read_png,
    recall,
    rle_decode,
    rle_encode,
    salt_pepper_noise,
    speckle_noise,
    write_png,
)
from . import _agrieval

__all__ = [
    "Error", "InvalidParameter", "IoError", "ValidationError",
    "apply_noise", "gaussian_noise", "speckle_noise", "poisson_noise",
    "salt_pepper_noise", "read_png", "write_png", "polygon_to_mask",
    "rle_encode", "rle_decode", "iou_bbox", "recall", "precision", "f1",
    "dataset_stats", "import_annotations", "augment", "evaluate", "render",
]


def dataset_stats(manifest):
    return _agrieval._dataset_stats(os.fspath(manifest))


def import_annotations(in_dir, out_manifest, split="test"):
    """Convert per-image polygon JSON files; returns the number of images."""
    return _agrieval._import_annotations(os.fspath(in_dir), os.fspath(out_manifest), split)


def augment(manifest, out_dir, noise, param=None, seed=0, threads=0):
    """Noise every image of a manifest; returns the path of the new manifest."""
    return _agrieval._augment(os.fspath(manifest), os.fspath(out_dir), noise, param,
                              seed, threads)


def evaluate(manifest, predictions, iou=0.5, iou_kind="box", table=False):
    """Metrics report as a dict (plus the text table when ``table`` is true)."""
    report, text = _agrieval._evaluate(os.fspath(manifest), os.fspath(predictions),
                                       iou, iou_kind)
    report = json.loads(report)
    return (report, text) if table else report


def render(input_json, image_dir, out_dir, thickness=2, labels=True):
    """Draw ground truth (manifest) or predictions onto images."""
    with open(input_json, encoding="utf-8") as f:
        doc = json.load(f)
    fn = (_agrieval._render_predictions if "predictions" in doc
          else _agrieval._render_ground_truth)
    return fn(os.fspath(input_json), os.fspath(image_dir), os.fspath(out_dir),
              thickness, labels)
