import json
from fractions import Fraction

import jsonschema
import pytest
from hypothesis import given, strategies as st

from zklab.protocols import (
    build_counterexample,
    build_demo_interactive,
    build_ideal_nizk,
    build_planted_interactive,
    build_trivial_protocol,
    measure_interactive_errors,
    measure_nizk_errors,
)
from zklab.spec_io import (
    INTERACTIVE_SCHEMA,
    NIZK_SCHEMA,
    decode_token,
    dump,
    dumps,
    encode_token,
    hex_tape,
    load,
    loads,
)

NIZK = [
    build_counterexample(Fraction(1, 2), Fraction(1, 4), Fraction(1, 64)),
    build_counterexample(Fraction(1, 2), Fraction(1, 4), 0, "randomized"),
    build_trivial_protocol(Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)),
    build_ideal_nizk(),
]
INTERACTIVE = [
    build_demo_interactive(3, (0, Fraction(1, 4), Fraction(1, 2))),
    build_demo_interactive(3, (Fraction(1, 4), Fraction(1, 4), Fraction(1, 2))),
    build_planted_interactive(Fraction(1, 64)),
]

tokens = st.recursive(st.one_of(st.integers(-5, 5), st.text(max_size=3), st.none(), st.booleans()),
                      lambda inner: st.tuples(inner, inner), max_leaves=6)


class TestTokens:
    @given(tokens)
    def test_round_trip(self, t):
        assert decode_token(json.loads(json.dumps(encode_token(t)))) == t

    def test_hex_width(self):
        assert hex_tape(5, 256) == "05" and hex_tape(0, 1) == "0" and hex_tape(300, 4096) == "12c"


class TestRoundTrip:
    @pytest.mark.parametrize("spec", NIZK, ids=lambda s: s.name)
    def test_nizk(self, spec):
        doc = dump(spec)
        jsonschema.validate(doc, NIZK_SCHEMA)
        back = loads(dumps(spec))
        assert measure_nizk_errors(back).as_tuple() == measure_nizk_errors(spec).as_tuple()
        assert back.gen_law() == spec.gen_law()
        for i in spec.instances:
            assert back.sim_law(i.label) == spec.sim_law(i.label)
        assert dumps(back) == dumps(spec)

    @pytest.mark.parametrize("spec", INTERACTIVE, ids=lambda s: s.name)
    def test_interactive(self, spec):
        doc = dump(spec)
        jsonschema.validate(doc, INTERACTIVE_SCHEMA)
        back = load(json.loads(json.dumps(doc)))
        assert measure_interactive_errors(back).as_tuple() == measure_interactive_errors(spec).as_tuple()
        assert back.honest_law("x_in") == spec.honest_law("x_in")
        assert dumps(back) == dumps(spec)

    def test_hex_keys(self):
        doc = dump(NIZK[0])
        assert all(len(k) == len(next(iter(doc["gen"]))) for k in doc["gen"])
        int(next(iter(doc["gen"])), 16)


class TestErrors:
    def test_version_required(self):
        doc = dump(NIZK[3])
        del doc["schema_version"]
        with pytest.raises(ValueError, match="schema_version"):
            load(doc)

    def test_wrong_version(self):
        doc = dump(NIZK[3])
        doc["schema_version"] = 99
        with pytest.raises(jsonschema.ValidationError):
            load(doc)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            load({"schema_version": 1, "kind": "other"})

    def test_not_a_spec(self):
        with pytest.raises(TypeError):
            dump(object())
