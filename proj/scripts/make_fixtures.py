#!/usr/bin/env python3
"""Writes the test fixtures under tests/data.

mini_canonical.json / mini_hico.json: the same 20 images in both input
formats. The hico version carries one object box past the image edge; after
clamping it equals the canonical one.
"""
import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "data"
VOCAB = json.loads((ROOT / "data" / "hico_vocabulary.json").read_text())
OBJECTS = VOCAB["objects"]
VERBS = VOCAB["verbs"]
TRIPLES = [tuple(t) for t in VOCAB["hoi_triples"]]
COCO_IDS = VOCAB["object_category_ids"]
W, H = 640, 480

# Each pair: (human slot, object slot, object, verbs). Pairs sharing a slot
# share the box.
IMAGES = [
    [(0, 0, "bicycle", ["ride", "hold"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "dog", ["walk"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "cup", ["hold"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "cup", ["hold", "drink_with"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "dog", ["walk", "pet"])],
    [(0, 0, "bicycle", ["ride", "hold"]), (1, 1, "kite", ["fly"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "chair", ["sit_on"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "horse", ["ride"])],
    [(0, 0, "bicycle", ["ride"]), (0, 1, "umbrella", ["hold"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "sports_ball", ["kick"])],
    [(0, 0, "bicycle", ["ride", "hold"]), (1, 1, "surfboard", ["carry"])],
    [(0, 0, "bicycle", ["ride"]), (1, 1, "laptop", ["hold"]), (1, 2, "keyboard", ["type_on"])],
    [(0, 1, "horse", ["ride"]), (2, 1, "horse", ["feed"])],
    [(0, 1, "frisbee", ["throw"]), (2, 1, "frisbee", ["catch"])],
    [(0, 0, "pizza", ["eat", "hold"])],
    [(0, 0, "skateboard", ["ride"]), (1, 1, "motorcycle", ["ride"])],
    [(0, 0, "kite", ["fly", "hold"]), (1, 1, "dog", ["walk"])],
    [(0, 0, "surfboard", ["ride", "carry"])],
    [(0, 0, "chair", ["sit_on"]), (1, 1, "cup", ["hold"]), (2, 2, "laptop", ["hold"])],
    [(0, 0, "umbrella", ["hold"]), (1, 1, "dog", ["walk"])],
]

# Hand-audited totals.
EXPECTED_PAIRS = 39
EXPECTED_INSTANCES = 47
EXPECTED_RIDE_BICYCLE = 12
OOB_IMAGE = 5


def human_box(img, slot):
    x0 = 10 + 210 * slot + (img * 7) % 13
    return [x0, 40 + (img * 5) % 11, x0 + 90 + (img * 3) % 17, 400 - (img * 11) % 19]


def object_box(img, slot):
    x0 = 60 + 210 * slot + (img * 5) % 9
    return [x0, 200 + (img * 3) % 7, x0 + 120 + (img * 7) % 15, 460 - (img * 2) % 5]


def image_id(i):
    return f"fx_{i:03d}"


def build():
    canonical, hico = [], []
    pairs_total = instances_total = ride_bicycle = 0
    for i, spec in enumerate(IMAGES):
        pairs = []
        annotations, hois = [], []
        human_ann, object_ann = {}, {}
        for hslot, oslot, obj, verbs in spec:
            hb, ob = human_box(i, hslot), object_box(i, oslot)
            for v in verbs:
                assert (VERBS.index(v), OBJECTS.index(obj)) in TRIPLES, (v, obj)
            verbs_sorted = sorted(verbs, key=VERBS.index)
            pairs.append({"human": hb, "object": ob, "object_class": obj, "verb_classes": verbs_sorted})
            pairs_total += 1
            instances_total += len(verbs)
            ride_bicycle += obj == "bicycle" and "ride" in verbs

            if hslot not in human_ann:
                human_ann[hslot] = len(annotations)
                annotations.append({"bbox": hb, "category_id": 1})
            if (oslot, obj) not in object_ann:
                object_ann[(oslot, obj)] = len(annotations)
                box = list(ob)
                if i == OOB_IMAGE and obj == "kite":
                    box[2] = W + 75
                annotations.append({"bbox": box, "category_id": COCO_IDS[OBJECTS.index(obj)]})
            for v in verbs:
                hois.append({"subject_id": human_ann[hslot], "object_id": object_ann[(oslot, obj)],
                             "category_id": VERBS.index(v) + 1})
        canonical.append({"image_id": image_id(i), "width": W, "height": H, "pairs": pairs})
        hico.append({"file_name": image_id(i), "width": W, "height": H, "annotations": annotations,
                     "hoi_annotation": hois})

    # The importer clamps the out-of-bounds box to the image edge.
    for p in canonical[OOB_IMAGE]["pairs"]:
        if p["object_class"] == "kite":
            p["object"][2] = W

    assert pairs_total == EXPECTED_PAIRS, pairs_total
    assert instances_total == EXPECTED_INSTANCES, instances_total
    assert ride_bicycle == EXPECTED_RIDE_BICYCLE, ride_bicycle
    return canonical, hico


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    canonical, hico = build()
    doc = {"schema_version": 1, "split": "test", "images": canonical}
    (OUT / "mini_canonical.json").write_text(json.dumps(doc, indent=1) + "\n")
    (OUT / "mini_hico.json").write_text(json.dumps(hico, indent=1) + "\n")
    (OUT / "mini_config.json").write_text(json.dumps({"paths": {"dataset": "mini_canonical.json"}}, indent=2) + "\n")


if __name__ == "__main__":
    main()
