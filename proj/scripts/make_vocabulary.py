"""Writes data/hico_vocabulary.json: HICO-DET objects (COCO order), verbs, and the 600 verb-object categories."""
import json
import pathlib

# (name, COCO category id) in COCO order.
OBJECTS = [
    ("person", 1), ("bicycle", 2), ("car", 3), ("motorcycle", 4), ("airplane", 5), ("bus", 6),
    ("train", 7), ("truck", 8), ("boat", 9), ("traffic_light", 10), ("fire_hydrant", 11),
    ("stop_sign", 13), ("parking_meter", 14), ("bench", 15), ("bird", 16), ("cat", 17), ("dog", 18),
    ("horse", 19), ("sheep", 20), ("cow", 21), ("elephant", 22), ("bear", 23), ("zebra", 24),
    ("giraffe", 25), ("backpack", 27), ("umbrella", 28), ("handbag", 31), ("tie", 32),
    ("suitcase", 33), ("frisbee", 34), ("skis", 35), ("snowboard", 36), ("sports_ball", 37),
    ("kite", 38), ("baseball_bat", 39), ("baseball_glove", 40), ("skateboard", 41),
    ("surfboard", 42), ("tennis_racket", 43), ("bottle", 44), ("wine_glass", 46), ("cup", 47),
    ("fork", 48), ("knife", 49), ("spoon", 50), ("bowl", 51), ("banana", 52), ("apple", 53),
    ("sandwich", 54), ("orange", 55), ("broccoli", 56), ("carrot", 57), ("hot_dog", 58),
    ("pizza", 59), ("donut", 60), ("cake", 61), ("chair", 62), ("couch", 63), ("potted_plant", 64),
    ("bed", 65), ("dining_table", 67), ("toilet", 70), ("tv", 72), ("laptop", 73), ("mouse", 74),
    ("remote", 75), ("keyboard", 76), ("cell_phone", 77), ("microwave", 78), ("oven", 79),
    ("toaster", 80), ("sink", 81), ("refrigerator", 82), ("book", 84), ("clock", 85), ("vase", 86),
    ("scissors", 87), ("teddy_bear", 88), ("hair_drier", 89), ("toothbrush", 90),
]

VERBS = """adjust assemble block blow board break brush_with buy carry catch chase check clean control
cook cut cut_with direct drag dribble drink_with drive dry eat eat_at exit feed fill flip flush fly
greet grind groom herd hit hold hop_on hose hug hunt inspect install jump kick kiss lasso launch lick
lie_on lift light load lose make milk move no_interaction open operate pack paint park pay peel pet
pick pick_up point pour pull push race read release repair ride row run sail scratch serve set shear
sign sip sit_at sit_on slide smell spin squeeze stab stand_on stand_under stick stir stop_at straddle
swing tag talk_on teach text_on throw tie toast train turn type_on walk wash watch wave wear wield
zip""".split()

# HICO-DET category order: grouped by object, verbs in the benchmark's listing order.
HOI = [
    ("airplane", "board direct exit fly inspect load ride sit_on wash no_interaction"),
    ("bicycle", "carry hold inspect jump hop_on park push repair ride sit_on straddle walk wash no_interaction"),
    ("bird", "chase feed hold pet release watch no_interaction"),
    ("boat", "board drive exit inspect jump launch repair ride row sail sit_on stand_on tie wash no_interaction"),
    ("bottle", "carry drink_with hold inspect lick open pour no_interaction"),
    ("bus", "board direct drive exit inspect load ride sit_on wash wave no_interaction"),
    ("car", "board direct drive hose inspect jump load park ride wash no_interaction"),
    ("cat", "dry feed hold hug kiss pet scratch wash chase no_interaction"),
    ("chair", "carry hold lie_on sit_on stand_on no_interaction"),
    ("couch", "carry lie_on sit_on no_interaction"),
    ("cow", "feed herd hold hug kiss lasso milk pet ride walk no_interaction"),
    ("dining_table", "clean eat_at sit_at no_interaction"),
    ("dog", "carry dry feed groom hold hose hug inspect kiss pet run scratch straddle train walk wash chase no_interaction"),
    ("horse", "feed groom hold hug jump kiss load hop_on pet race ride run straddle train walk wash no_interaction"),
    ("motorcycle", "hold inspect jump hop_on park push race ride sit_on straddle turn walk wash no_interaction"),
    ("person", "carry greet hold hug kiss stab tag teach lick no_interaction"),
    ("potted_plant", "carry hold hose no_interaction"),
    ("sheep", "carry feed herd hold hug kiss pet ride shear walk wash no_interaction"),
    ("train", "board drive exit load ride sit_on wash no_interaction"),
    ("tv", "control repair watch no_interaction"),
    ("apple", "buy cut eat hold inspect peel pick smell wash no_interaction"),
    ("backpack", "carry hold inspect open wear no_interaction"),
    ("banana", "buy carry cut eat hold inspect peel pick smell no_interaction"),
    ("baseball_bat", "break carry hold sign swing throw wield no_interaction"),
    ("baseball_glove", "hold wear no_interaction"),
    ("bear", "feed hunt watch no_interaction"),
    ("bed", "clean lie_on sit_on no_interaction"),
    ("bench", "inspect lie_on sit_on no_interaction"),
    ("book", "carry hold open read no_interaction"),
    ("bowl", "hold stir wash lick no_interaction"),
    ("broccoli", "cut eat hold smell stir wash no_interaction"),
    ("cake", "blow carry cut eat hold light make pick_up no_interaction"),
    ("carrot", "carry cook cut eat hold peel smell stir wash no_interaction"),
    ("cell_phone", "carry hold read repair talk_on text_on no_interaction"),
    ("clock", "check hold repair set no_interaction"),
    ("cup", "carry drink_with hold inspect pour sip smell fill wash no_interaction"),
    ("donut", "buy carry eat hold make pick_up smell no_interaction"),
    ("elephant", "feed hold hose hug kiss hop_on pet ride walk wash watch no_interaction"),
    ("fire_hydrant", "hug inspect open paint no_interaction"),
    ("fork", "hold lift stick lick wash no_interaction"),
    ("frisbee", "block catch hold spin throw no_interaction"),
    ("giraffe", "feed kiss pet ride watch no_interaction"),
    ("hair_drier", "hold operate repair no_interaction"),
    ("handbag", "carry hold inspect no_interaction"),
    ("hot_dog", "carry cook cut eat hold make no_interaction"),
    ("keyboard", "carry clean hold type_on no_interaction"),
    ("kite", "assemble carry fly hold inspect launch pull no_interaction"),
    ("knife", "cut_with hold stick wash wield lick no_interaction"),
    ("laptop", "hold open read repair type_on no_interaction"),
    ("microwave", "clean open operate no_interaction"),
    ("mouse", "control hold repair no_interaction"),
    ("orange", "buy cut eat hold inspect peel pick squeeze wash no_interaction"),
    ("oven", "clean hold inspect open repair operate no_interaction"),
    ("parking_meter", "check pay repair no_interaction"),
    ("pizza", "buy carry cook cut eat hold make pick_up slide smell no_interaction"),
    ("refrigerator", "clean hold move open no_interaction"),
    ("remote", "hold point swing no_interaction"),
    ("sandwich", "carry cook cut eat hold make no_interaction"),
    ("scissors", "cut_with hold open no_interaction"),
    ("sink", "clean repair wash no_interaction"),
    ("skateboard", "carry flip grind hold jump pick_up ride sit_on stand_on no_interaction"),
    ("skis", "adjust carry hold inspect jump pick_up repair ride stand_on wear no_interaction"),
    ("snowboard", "adjust carry grind hold jump ride stand_on wear no_interaction"),
    ("spoon", "hold lick wash sip no_interaction"),
    ("sports_ball", "block carry catch dribble hit hold inspect kick pick_up serve sign spin throw no_interaction"),
    ("stop_sign", "hold stand_under stop_at no_interaction"),
    ("suitcase", "carry drag hold hug load open pack pick_up zip no_interaction"),
    ("surfboard", "carry drag hold inspect jump lie_on load ride stand_on sit_on wash no_interaction"),
    ("teddy_bear", "carry hold hug kiss no_interaction"),
    ("tennis_racket", "carry hold inspect swing no_interaction"),
    ("tie", "adjust cut hold inspect pull tie wear no_interaction"),
    ("toaster", "hold operate repair no_interaction"),
    ("toilet", "clean flush open repair sit_on stand_on wash no_interaction"),
    ("toothbrush", "brush_with hold wash no_interaction"),
    ("traffic_light", "install repair stand_under stop_at no_interaction"),
    ("truck", "direct drive inspect load repair ride sit_on wash no_interaction"),
    ("umbrella", "carry hold lose open repair set stand_under no_interaction"),
    ("vase", "hold make paint no_interaction"),
    ("wine_glass", "fill hold sip toast lick wash no_interaction"),
    ("zebra", "feed hold pet watch no_interaction"),
]


def main():
    objects = [name for name, _ in OBJECTS]
    assert len(objects) == 80 and len(set(objects)) == 80
    assert len(VERBS) == 117 and len(set(VERBS)) == 117
    obj_index = {n: i for i, n in enumerate(objects)}
    verb_index = {n: i for i, n in enumerate(VERBS)}
    triples = []
    for obj, verbs in HOI:
        for v in verbs.split():
            triples.append([verb_index[v], obj_index[obj]])
    assert len(triples) == 600, len(triples)
    assert len({tuple(t) for t in triples}) == 600
    assert {o for _, o in triples} == set(range(80))
    assert {v for v, _ in triples} == set(range(117))
    out = {
        "objects": objects,
        "verbs": VERBS,
        "hoi_triples": triples,
        "object_category_ids": [cid for _, cid in OBJECTS],
    }
    path = pathlib.Path(__file__).resolve().parent.parent / "data" / "hico_vocabulary.json"
    path.write_text(json.dumps(out, separators=(",", ":")) + "\n")
    print(f"wrote {path}: {len(objects)} objects, {len(VERBS)} verbs, {len(triples)} categories")


if __name__ == "__main__":
    main()
