import json

import numpy as np
from PIL import Image

from imagegen import bare_soil_image, plant_image
from leafangle_adapter import AdapterConfig, infer_batch, infer_image
from leafangle_adapter.backends import load_models
from leafangle_adapter.cli import main


def write_images(directory, specs):
    directory.mkdir(parents=True, exist_ok=True)
    for name, image in specs:
        Image.fromarray(image).save(directory / f"{name}.png")


def test_infer_batch_emits_one_document_per_image(tmp_path):
    images = tmp_path / "images"
    write_images(
        images,
        [(f"plant{i}", plant_image(i, 20.0 + 15.0 * i)) for i in range(3)],
    )
    documents = dict(infer_batch(images, AdapterConfig()))
    assert sorted(documents) == ["plant0", "plant1", "plant2"]
    for image_id, doc in documents.items():
        assert doc["image_id"] == image_id
        assert doc["instances"] and doc["segments"]
        assert sum(doc["instances"][0]["mask"]["rle"]) == doc["width"] * doc["height"]


def test_roi_frame_record_declares_offset(tmp_path):
    images = tmp_path / "images"
    write_images(images, [("plant", plant_image(5, 40.0))])
    (_, doc), = infer_batch(images, AdapterConfig())
    assert doc["width"] < 640 and doc["height"] < 640
    assert "frame=roi" in doc["source"]
    assert "offset=(" in doc["source"]


def test_full_frame_mode(tmp_path):
    image = plant_image(6, 40.0)
    config = AdapterConfig(run_lines_on_roi=False)
    mask_model, line_model = load_models(config)
    doc = infer_image("plant", image, mask_model, line_model, config)
    assert (doc["width"], doc["height"]) == (640, 640)
    assert "frame=full" in doc["source"]


def test_no_plant_gives_empty_instances(tmp_path):
    config = AdapterConfig()
    mask_model, line_model = load_models(config)
    doc = infer_image("soil", bare_soil_image(2), mask_model, line_model, config)
    assert doc["instances"] == []
    assert (doc["width"], doc["height"]) == (320, 320)  # full frame without a ROI


def test_inference_is_deterministic(tmp_path):
    images = tmp_path / "images"
    write_images(images, [("plant", plant_image(11, 33.0))])
    first = [json.dumps(doc, sort_keys=True) for _, doc in infer_batch(images, AdapterConfig())]
    second = [json.dumps(doc, sort_keys=True) for _, doc in infer_batch(images, AdapterConfig())]
    assert first == second


def test_corrupt_image_is_skipped(tmp_path):
    images = tmp_path / "images"
    write_images(images, [("good", plant_image(12, 30.0))])
    (images / "broken.png").write_bytes(b"definitely not a png")
    documents = dict(infer_batch(images, AdapterConfig()))
    assert sorted(documents) == ["good"]


def test_cli_infer_writes_documents(tmp_path, capsys):
    images = tmp_path / "images"
    write_images(images, [("plant", plant_image(13, 30.0))])
    out = tmp_path / "records"
    assert main(["infer", str(images), "-o", str(out)]) == 0
    assert (out / "plant.json").exists()
    doc = json.loads((out / "plant.json").read_text())
    assert doc["image_id"] == "plant"


def test_cli_infer_empty_directory_exit_code(tmp_path):
    images = tmp_path / "images"
    images.mkdir()
    assert main(["infer", str(images), "-o", str(tmp_path / "records")]) == 2


def test_cli_missing_checkpoint_exit_code(tmp_path):
    images = tmp_path / "images"
    images.mkdir()
    code = main(
        ["infer", str(images), "-o", str(tmp_path / "out"),
         "--mask-checkpoint", str(tmp_path / "absent.pt")]
    )
    assert code == 1
