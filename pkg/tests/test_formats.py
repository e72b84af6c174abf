import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tmodules.algebra import ParseError
from tmodules.formats import (
    dump_bider,
    dump_tmodule,
    load_morphism,
    load_tmodule,
    parse_bider,
    parse_tmodule,
)
from tmodules.samples import random_strictly_pure
from tmodules.tmodule import NotATModule


@pytest.mark.parametrize("name", [
    "carlitz.tm", "drinfeld_rank2.tm", "example_d2n3.tm", "nilpotent_d3n3.tm",
    "conjugated_rank2.tm",
])
def test_fixture_roundtrip(data_dir, name):
    phi = load_tmodule(data_dir / name)
    text = dump_tmodule(phi)
    assert parse_tmodule(text) == phi
    assert dump_tmodule(parse_tmodule(text)) == text


@settings(max_examples=30)
@given(seed=st.integers(0, 10**6), nilpotent=st.booleans())
def test_random_roundtrip(seed, nilpotent):
    import random

    rng = random.Random(seed)
    phi = random_strictly_pure(rng, rng.choice([2, 3, 5]), rng.randint(1, 3),
                               rng.randint(1, 3), nilpotent=nilpotent)
    assert parse_tmodule(dump_tmodule(phi)) == phi


def test_explicit_m0(data_dir):
    with pytest.raises(NotATModule):
        load_tmodule(data_dir / "not_a_tmodule.tm")


def test_errors_carry_lines():
    text = "p: 3\nd: 1\nn: 1\nM0: theta*I\nM1:\n  - [\"T^\"]\n"
    with pytest.raises(ParseError) as info:
        parse_tmodule(text, source="x.tm")
    assert info.value.line == 6 and "x.tm:6" in str(info.value)


@pytest.mark.parametrize("text", [
    "p: 4\nd: 1\nn: 0\nM0: theta*I\n",
    "p: 3\nd: 1\nn: 1\nM0: theta*I\n",
    "p: 3\nd: 2\nn: 1\nM0: theta*I\nM1:\n  - [\"1\"]\n",
    "p: 3\nd: 1\nn: 1\nM0: theta*I + N\nM1:\n  - [\"1\"]\n",
    "p: 3\nd: 1\nn: 1\nM0: theta*I\nM1:\n  - [\"1\"]\nextra: 1\n",
    "p: 3\nd: 1\nn: 1\nM0: theta*I\nM1:\n  - [\"0\"]\n",
    "[1, 2]",
    "p: [",
])
def test_rejects(text):
    with pytest.raises(ParseError):
        parse_tmodule(text)


def test_bider_roundtrip(data_dir):
    state = parse_bider((data_dir / "dual_state.bd").read_text())
    assert state.width == 4
    assert parse_bider(dump_bider(state)) == state
    with pytest.raises(ParseError):
        parse_bider("p: 3\nD: 2\nentries: [\"(1)\"]\n")


def test_morphism_file(data_dir):
    f = load_morphism(data_dir / "conjugation.hom")
    assert f.source.dim == 1 and f.target.dim == 1


def test_morphism_file_rejects_non_morphism(tmp_path, data_dir):
    hom = tmp_path / "bad.hom"
    src = (data_dir / "drinfeld_rank2.tm").resolve()
    hom.write_text(f'source: "{src}"\ntarget: "{src}"\nmatrix:\n  - ["(T)"]\n')
    with pytest.raises(ParseError):
        load_morphism(hom)
