"""Model backends behind a small uniform interface.

A mask backend maps an RGB image (H, W, 3) uint8 to a list of
(score, binary mask) pairs; a line backend maps an image to a list of
(x1, y1, x2, y2, score) tuples. Two implementations exist per kind:

* reference — classical CV, no checkpoint, fully deterministic. Masks come
  from an excess-green Otsu threshold plus connected components; lines from
  Canny edges plus the probabilistic Hough transform.
* torchscript — a TorchScript export loaded from a checkpoint path. The
  mask export must map a float [3, H, W] tensor (values in [0, 1]) to a
  (scores [N], masks [N, H, W]) tuple with mask probabilities; the line
  export must return an [N, 5] tensor of x1, y1, x2, y2, score rows. Any
  trained detector can be wrapped to this contract when exporting.
"""

import numpy as np

from .config import AdapterConfig
from .errors import StartupError

# Reference line-detector tuning (pixels / Canny gradient thresholds).
CANNY_LOW = 50
CANNY_HIGH = 150
HOUGH_THRESHOLD = 30
HOUGH_MIN_LINE_PX = 20
HOUGH_MAX_GAP_PX = 5
# Plant pixels must clear this excess-green level; soil and sensor noise on
# vegetation-free frames stays below it, so Otsu alone cannot hallucinate a
# foreground there.
MIN_EXCESS_GREEN = 40


class ReferenceMaskModel:
    """Foreground plant segmentation via excess-green threshold."""

    def __init__(self, min_component_px: int = 200):
        self.min_component_px = min_component_px

    def predict(self, image: np.ndarray) -> list[tuple[float, np.ndarray]]:
        import cv2

        rgb = image.astype(np.int32)
        excess_green = 2 * rgb[:, :, 1] - rgb[:, :, 0] - rgb[:, :, 2]
        excess_green = np.clip(excess_green, 0, 255).astype(np.uint8)
        if int(excess_green.max()) < MIN_EXCESS_GREEN:
            return []
        otsu_level, _ = cv2.threshold(
            excess_green, 0, 255, cv2.THRESH_BINARY + cv2.THRESH_OTSU
        )
        level = max(float(otsu_level), float(MIN_EXCESS_GREEN))
        binary = (excess_green >= level).astype(np.uint8) * 255
        kernel = cv2.getStructuringElement(cv2.MORPH_ELLIPSE, (5, 5))
        cleaned = cv2.morphologyEx(binary, cv2.MORPH_CLOSE, kernel)
        cleaned = cv2.morphologyEx(cleaned, cv2.MORPH_OPEN, kernel)

        n_labels, labels, stats, _ = cv2.connectedComponentsWithStats(cleaned, connectivity=8)
        areas = [
            (int(stats[i, cv2.CC_STAT_AREA]), i)
            for i in range(1, n_labels)
            if stats[i, cv2.CC_STAT_AREA] >= self.min_component_px
        ]
        if not areas:
            return []
        largest = max(area for area, _ in areas)
        detections = []
        for area, label in sorted(areas, reverse=True):
            score = 0.5 + 0.5 * area / largest
            detections.append((min(score, 1.0), labels == label))
        return detections


class ReferenceLineModel:
    """Line segments via Canny edges and the probabilistic Hough transform."""

    def predict(self, image: np.ndarray) -> list[tuple[float, float, float, float, float]]:
        import cv2

        gray = cv2.cvtColor(image, cv2.COLOR_RGB2GRAY)
        edges = cv2.Canny(gray, CANNY_LOW, CANNY_HIGH, L2gradient=True)
        lines = cv2.HoughLinesP(
            edges,
            rho=1,
            theta=np.pi / 180.0,
            threshold=HOUGH_THRESHOLD,
            minLineLength=HOUGH_MIN_LINE_PX,
            maxLineGap=HOUGH_MAX_GAP_PX,
        )
        if lines is None:
            return []
        segments = []
        for x1, y1, x2, y2 in lines.reshape(-1, 4):
            length = float(np.hypot(float(x2) - float(x1), float(y2) - float(y1)))
            score = min(1.0, 0.3 + length / 100.0)
            segments.append((float(x1), float(y1), float(x2), float(y2), score))
        # Hough output order is backend-defined; sort for reproducible documents.
        return sorted(segments)


class TorchScriptMaskModel:
    def __init__(self, checkpoint, device: str):
        self.module, self.torch = _load_torchscript(checkpoint, device)
        self.device = device

    def predict(self, image: np.ndarray) -> list[tuple[float, np.ndarray]]:
        tensor = (
            self.torch.from_numpy(np.ascontiguousarray(image))
            .permute(2, 0, 1)
            .float()
            .div(255.0)
            .to(self.device)
        )
        with self.torch.no_grad():
            scores, masks = self.module(tensor)
        bits = (masks > 0.5).cpu().numpy().astype(bool)
        return [(float(s), bits[i]) for i, s in enumerate(scores.cpu().tolist())]


class TorchScriptLineModel:
    def __init__(self, checkpoint, device: str):
        self.module, self.torch = _load_torchscript(checkpoint, device)
        self.device = device

    def predict(self, image: np.ndarray) -> list[tuple[float, float, float, float, float]]:
        tensor = (
            self.torch.from_numpy(np.ascontiguousarray(image))
            .permute(2, 0, 1)
            .float()
            .div(255.0)
            .to(self.device)
        )
        with self.torch.no_grad():
            rows = self.module(tensor)
        return [tuple(float(v) for v in row) for row in rows.cpu().tolist()]


def _load_torchscript(checkpoint, device: str):
    try:
        import torch
    except ImportError as exc:
        raise StartupError(
            f"checkpoint {checkpoint} needs torch installed (pip install torch)"
        ) from exc
    try:
        module = torch.jit.load(str(checkpoint), map_location=device)
        module.eval()
    except Exception as exc:
        raise StartupError(f"cannot load TorchScript checkpoint {checkpoint}: {exc}") from exc
    return module, torch


def load_models(config: AdapterConfig):
    """Instantiate the (mask, line) backends the config asks for."""
    if config.mask_checkpoint is not None:
        mask_model = TorchScriptMaskModel(config.mask_checkpoint, config.device)
    else:
        mask_model = ReferenceMaskModel(min_component_px=config.min_component_px)
    if config.line_checkpoint is not None:
        line_model = TorchScriptLineModel(config.line_checkpoint, config.device)
    else:
        line_model = ReferenceLineModel()
    return mask_model, line_model
