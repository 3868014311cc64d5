"""Regenerate the bundled JSON examples in src/stokeskit/data from stokeskit.corpus."""
import json
from pathlib import Path

from stokeskit import corpus
from stokeskit import io as sio
from stokeskit.functors import VectFunctor
from stokeskit.linalg import QMatrix
from stokeskit.poset import Poset

OUT = Path(__file__).resolve().parents[1] / "src" / "stokeskit" / "data"


def dump(name, obj):
    (OUT / name).write_text(json.dumps(obj, indent=1) + "\n")
    print("wrote", name)


def main():
    OUT.mkdir(exist_ok=True)
    dump("point_chain.json", sio.poset_to_json(corpus.chain_ab()))
    for name in ("one_dimensional", "one_dimensional_W1", "one_dimensional_W-1"):
        dump(f"{name}.json", sio.space_to_json(corpus.SPACES[name]()))
    for name in ("interval_intro", "three_element_interval", "three_element_interval_shadowed", "square"):
        dump(f"{name}.json", sio.polyhedral_to_json(corpus.SPACES[name]()))
    for name, make in corpus.CLASSES.items():
        dump(f"{name}.json", sio.irregular_to_json(make()))
    space, _ = corpus.rank11_stokes_functor()
    d0, d1 = space.meta["directions"]
    dump("rank11_functor.json", {"stokes": {"dims": {"0": 1, "z^-1": 1},
                                            "matrices": {d0: [["1", "1"], ["0", "1"]], d1: [["1", "0"], ["0", "1"]]}}})
    circle = Poset(["D0", "D1", "A0", "A1"], [("D0", "A0"), ("D0", "A1"), ("D1", "A0"), ("D1", "A1")])
    dump("circle_local_system.json", {"local_system": sio.poset_to_json(circle)})
    triv = VectFunctor.constant(circle, 1)
    dump("trivial_rank1.json", {"dims": {x: 1 for x in circle},
                                "maps": {f"{a}->{b}": sio.matrix_to_json(m) for (a, b), m in triv.cover_maps.items()}})
    dump("empty_fiber.json", {"base": {"elements": ["x"], "leq": []}, "fibers": {"x": {"elements": []}},
                              "transitions": {}})


if __name__ == "__main__":
    main()
