import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from stokeskit import corpus, io as sio
from stokeskit.cli import CORPUS, EXIT, data_dir, main
from stokeskit.functors import iso_exists
from stokeskit.generators import random_functor, random_irregular_class, random_poset, random_stokes
from stokeskit.irregular import circle_space

seeds = st.integers(0, 10 ** 6)


@pytest.mark.parametrize("name", sorted(corpus.SPACES))
def test_space_round_trip(name):
    s = corpus.SPACES[name]()
    back = sio.space_from_json(json.loads(json.dumps(sio.space_to_json(s))))
    assert back.base == s.base and back.total == s.total


def test_polyhedral_round_trip():
    s = corpus.three_element_interval()
    back = sio.polyhedral_from_json(json.loads(json.dumps(sio.polyhedral_to_json(s))))
    assert back.total == s.total


@given(seeds)
def test_irregular_round_trip(seed):
    cls = random_irregular_class(random.Random(seed))
    back = sio.irregular_from_json(json.loads(json.dumps(sio.irregular_to_json(cls))))
    assert [q.key() for q in back.exponentials] == [q.key() for q in cls.exponentials]


@settings(max_examples=20)
@given(seeds)
def test_functor_round_trip(seed):
    rng = random.Random(seed)
    p = random_poset(rng, rng.randint(1, 5))
    F = random_functor(p, {a: rng.randint(0, 2) for a in p}, rng)
    G = sio.functor_from_json(json.loads(json.dumps(sio.functor_to_json(F))), domain=p)
    assert G == F
    s = corpus.one_dimensional()
    F = random_stokes(s, rng, max_dim=2)
    G = sio.functor_from_json(json.loads(json.dumps(sio.functor_to_json(F, s))), space=s)
    assert G == F


def test_schema_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"base": {"elements": ["x"],}')
    with pytest.raises(sio.SchemaError, match=r"1:\d+"):
        sio.load_json(bad)
    with pytest.raises(sio.SchemaError):
        sio.space_from_json({"base": {"elements": ["x"]}, "fibers": {}})
    with pytest.raises(sio.SchemaError):
        sio.functor_from_json({"dims": {"nope": 1}}, space=corpus.point_chain())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def d(name):
    return str(data_dir() / name)


def test_build(capsys):
    code, out, _ = run(capsys, "build", d("one_dimensional.json"), "--json", "--no-timing")
    rep = json.loads(out)
    assert code == 0 and rep["verdict"] == "valid"
    assert rep["witness"]["counts"]["total"] == 8
    assert set(rep) == {"command", "verdict", "witness", "seed", "elapsed_ms", "input_digest"}


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "check", d("one_dimensional.json"), "--which", "elementary", "--json")[0] == 1
    assert run(capsys, "check", d("one_dimensional_W1.json"), "--which", "elementary", "--json")[0] == 0
    assert run(capsys, "check", d("zero_one.json"), "--functor", d("rank11_functor.json"),
               "--which", "stokes")[0] == 0
    assert run(capsys, "build", d("empty_fiber.json"))[0] == 64
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    code, _, err = run(capsys, "build", str(bad))
    assert code == 64 and "error" in err
    assert run(capsys, "build", str(tmp_path / "missing.json"))[0] == 64
    assert run(capsys, "check", d("zero_one.json"), "--which", "stokes")[0] == 64
    assert EXIT["inconclusive"] == 2


def test_directions_output(capsys):
    code, out, _ = run(capsys, "directions", d("zero_one.json"), "--json")
    assert code == 0
    assert json.loads(out)["witness"]["directions"] == {"(0,1)": ["1/2π", "3/2π"]}


def test_tangent_output(capsys):
    code, out, _ = run(capsys, "tangent", d("circle_local_system.json"), "--functor", d("trivial_rank1.json"),
                       "--json")
    w = json.loads(out)["witness"]
    assert code == 0 and w["euler_characteristic"] == 0 and w["ext"] == {"0": 1, "1": 1}


def test_no_timing_is_byte_stable(capsys):
    args = ("check", d("two_level.json"), "--which", "devissage", "--trials", "2", "--json", "--no-timing")
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b and json.loads(a)["elapsed_ms"] == 0


@pytest.mark.slow
def test_corpus(capsys):
    code, out, _ = run(capsys, "--corpus", "--json", "--no-timing")
    rep = json.loads(out)
    assert code == 0 and len(rep["witness"]) == len(CORPUS)
    assert all(r["ok"] for r in rep["witness"])
