#!/usr/bin/env python3
"""Builds the 3-image mAP fixture and computes its expected report.

Independent of the C++ evaluator: AP here is the mean, over true positives,
of the best precision at that rank or later, divided by n_gt.
"""
import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "tests" / "data" / "golden"
VOCAB = json.loads((ROOT / "data" / "hico_vocabulary.json").read_text())
OBJECTS, VERBS = VOCAB["objects"], VOCAB["verbs"]
TRIPLES = [tuple(t) for t in VOCAB["hoi_triples"]]

H1, H2 = [10, 10, 110, 310], [300, 20, 400, 300]
BIKE = [60, 150, 260, 400]
CUP = [380, 120, 430, 180]
DOG_A, DOG_B = [380, 200, 600, 420], [150, 200, 400, 450]
BAD = [500, 400, 600, 470]

GT = [
    ("g1", [(H1, BIKE, "bicycle", ["hold", "ride"]), (H2, CUP, "cup", ["hold"])]),
    ("g2", [(H1, BIKE, "bicycle", ["ride"]), (H2, DOG_A, "dog", ["walk"])]),
    ("g3", [(H1, DOG_B, "dog", ["walk"]), (H2, CUP, "cup", ["hold"])]),
]

PREDS = [
    ("g1", H1, BIKE, "ride", "bicycle", 0.9),
    ("g3", H1, BIKE, "ride", "bicycle", 0.8),
    ("g2", H1, BAD, "ride", "bicycle", 0.7),
    ("g2", H1, BIKE, "ride", "bicycle", 0.6),
    ("g1", H1, BIKE, "hold", "bicycle", 0.95),
    ("g3", H2, CUP, "hold", "cup", 0.9),
    ("g1", H2, BAD, "hold", "cup", 0.8),
    ("g1", H2, CUP, "hold", "cup", 0.7),
    ("g3", H2, CUP, "hold", "cup", 0.65),
    ("g2", H2, BAD, "walk", "dog", 0.9),
    ("g3", H1, DOG_B, "walk", "dog", 0.8),
    ("g1", H1, BIKE, "ride", "horse", 0.5),
]


def cat(verb, obj):
    return TRIPLES.index((VERBS.index(verb), OBJECTS.index(obj)))


RARE = sorted([cat("hold", "bicycle"), cat("walk", "dog")])


def iou(a, b):
    iw = min(a[2], b[2]) - max(a[0], b[0])
    ih = min(a[3], b[3]) - max(a[1], b[1])
    inter = iw * ih if iw > 0 and ih > 0 else 0.0
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def ap(flags, n_gt):
    total = 0.0
    hits = 0
    precisions = []
    for k, f in enumerate(flags):
        hits += f
        precisions.append(hits / (k + 1))
    for k, f in enumerate(flags):
        if f:
            total += max(precisions[k:])
    return total / n_gt


def evaluate():
    gt_by_cat = {}
    objects_in = {img: {obj for _, _, obj, _ in pairs} for img, pairs in GT}
    for img, pairs in GT:
        for h, o, obj, verbs in pairs:
            for v in verbs:
                gt_by_cat.setdefault(cat(v, obj), []).append((img, h, o))
    per = []
    for c in sorted(gt_by_cat):
        gts = gt_by_cat[c]
        preds = [p for p in PREDS if cat(p[3], p[4]) == c]
        preds.sort(key=lambda p: -p[5])
        used = set()
        flags = []
        for img, h, o, *_ in preds:
            best, best_i = -1.0, None
            for i, (gimg, gh, go) in enumerate(gts):
                if gimg != img or i in used:
                    continue
                hi, oi = iou(h, gh), iou(o, go)
                if hi >= 0.5 and oi >= 0.5 and (hi + oi) / 2 > best:
                    best, best_i = (hi + oi) / 2, i
            if best_i is not None:
                used.add(best_i)
            flags.append(best_i is not None)
        obj = OBJECTS[TRIPLES[c][1]]
        known = [f for f, p in zip(flags, preds) if obj in objects_in[p[0]]]
        per.append((c, len(gts), ap(flags, len(gts)), ap(known, len(gts))))
    return per


def mean(xs):
    return sum(xs) / len(xs) if xs else None


def cell(x):
    return None if x is None else round(x * 100 * 1e6) / 1e6


def cells(per, idx):
    return {
        "full": cell(mean([p[idx] for p in per])),
        "rare": cell(mean([p[idx] for p in per if p[0] in RARE])),
        "non_rare": cell(mean([p[idx] for p in per if p[0] not in RARE])),
    }


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    images = [{"image_id": img, "width": 640, "height": 480,
               "pairs": [{"human": h, "object": o, "object_class": obj, "verb_classes": verbs}
                         for h, o, obj, verbs in pairs]} for img, pairs in GT]
    (OUT / "gt.json").write_text(json.dumps({"schema_version": 1, "split": "test", "images": images}, indent=1) + "\n")
    with open(OUT / "predictions.jsonl", "w") as f:
        for img, h, o, verb, obj, score in PREDS:
            f.write(json.dumps({"image_id": img, "human": h, "object": o, "verb": verb, "object_class": obj,
                                "score": score}) + "\n")
    (OUT / "rare.json").write_text(json.dumps(RARE) + "\n")

    per = evaluate()
    report = {
        "iou_threshold": 0.5,
        "default": cells(per, 2),
        "known_object": cells(per, 3),
        "evaluated_categories": len(per),
        "evaluated_rare": sum(1 for p in per if p[0] in RARE),
        "per_category": [{"category": c, "verb": VERBS[TRIPLES[c][0]], "object": OBJECTS[TRIPLES[c][1]],
                          "n_gt": n, "rare": c in RARE, "ap": round(a * 1e9) / 1e9,
                          "ap_known": round(k * 1e9) / 1e9} for c, n, a, k in per],
    }
    (OUT / "expected_report.json").write_text(json.dumps(report, separators=(",", ":")) + "\n")
    print(json.dumps(report["default"]), json.dumps(report["known_object"]))


if __name__ == "__main__":
    main()
