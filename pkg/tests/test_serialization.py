"""
Tests for the JSON codecs used by the command line.
"""
import io
import json

import numpy as np
import pytest

from fockbundle import serialization as codec
from fockbundle.clifford import COMPRESSED, random_orthogonal, random_word
from fockbundle.errors import ParameterError
from fockbundle.fock import FockVector
from fockbundle.gerbe import Nerve, obstructed_example
from fockbundle.implementer import implement_general
from fockbundle.lagrangian import hs_distance, standard_lagrangian
from fockbundle.loopgroup import ROTATION_GENERATOR, random_algebra_loop, wave


class TestComplex:

    def test_pairs_and_plain_numbers(self):
        assert codec.encode_complex(1 - 2j) == [1.0, -2.0]
        assert codec.decode_complex([0.5, 3]) == 0.5 + 3j
        assert codec.decode_complex(2) == 2 + 0j

    @pytest.mark.parametrize("bad", [[1], ["a", 1], None, True, {"re": 1}])
    def test_malformed(self, bad):
        with pytest.raises(ParameterError):
            codec.decode_complex(bad)

    def test_array_shape_is_checked(self):
        with pytest.raises(ParameterError):
            codec.decode_array([[[1, 0]], [[1, 0], [2, 0]]], 2)
        with pytest.raises(ParameterError):
            codec.decode_array([[1, 0], [0, 1]], 2)
        assert codec.decode_array([], 2).shape == (0, 0)

    def test_real_matrix_accepts_both_forms(self):
        assert np.array_equal(codec.decode_real_matrix([[0, -1], [1, 0]]), ROTATION_GENERATOR)
        pairs = [[[0, 0], [-1, 0]], [[1, 0], [0, 0]]]
        assert np.array_equal(codec.decode_real_matrix(pairs), ROTATION_GENERATOR)
        with pytest.raises(ParameterError):
            codec.decode_real_matrix([[[0, 1], [0, 0]], [[0, 0], [0, 0]]])


class TestObjects:

    def test_space(self, even_space):
        assert codec.space_from_dict(codec.space_to_dict(even_space)) == even_space
        with pytest.raises(ParameterError):
            codec.space_from_dict({'parity': 'odd', 'd': 2})
        with pytest.raises(ParameterError):
            codec.space_from_dict({'parity': 'neither', 'd': 2, 'N': 1})

    def test_vector_through_json_text(self, odd_space, rng):
        v = odd_space.random_vector(rng)
        decoded = codec.vector_from_dict(json.loads(codec.dumps(codec.vector_to_dict(v))))
        assert decoded.allclose(v)

    def test_lagrangian(self, odd_space):
        L = standard_lagrangian(odd_space)
        decoded = codec.lagrangian_from_dict(codec.lagrangian_to_dict(L))
        assert hs_distance(decoded, L) < 1e-12

    def test_orthogonal_map(self, odd_space, rng):
        g = random_orthogonal(odd_space, rng)
        decoded = codec.orthogonal_from_dict(codec.orthogonal_to_dict(g))
        assert np.allclose(decoded.matrix, g.matrix)
        with pytest.raises(ParameterError):
            codec.orthogonal_from_dict({**codec.orthogonal_to_dict(g), 'regime': 'approximate'})

    def test_compressed_regime_is_kept(self, odd_space):
        data = {'space': codec.space_to_dict(odd_space), 'matrix': codec.encode_array(0.5 * np.eye(odd_space.dim)),
                'regime': COMPRESSED}
        assert codec.orthogonal_from_dict(data).regime == COMPRESSED

    def test_word(self, odd_space, rng):
        word = random_word(odd_space, rng)
        decoded = codec.word_from_list(codec.word_to_list(word), odd_space)
        assert len(decoded.terms) == len(word.terms)
        for (s1, l1), (s2, l2) in zip(decoded.terms, word.terms):
            assert s1 == pytest.approx(s2)
            assert all(a.allclose(b) for a, b in zip(l1, l2))
        with pytest.raises(ParameterError):
            codec.word_from_list({'scalar': [1, 0]}, odd_space)

    def test_fock_vector(self, odd_fock, small_fock, rng):
        x = FockVector.random(odd_fock, rng)
        data = codec.fock_vector_to_dict(x)
        assert np.allclose(codec.fock_vector_from_dict(data, odd_fock).coeffs, x.coeffs)
        with pytest.raises(ParameterError):
            codec.fock_vector_from_dict(data, small_fock)

    def test_implementer(self, odd_fock, rng):
        U = implement_general(random_orthogonal(odd_fock.space, rng), odd_fock)
        decoded = codec.implementer_from_dict(json.loads(codec.dumps(codec.implementer_to_dict(U))), odd_fock)
        assert np.allclose(decoded.matrix, U.matrix)
        assert decoded.phase_rule == U.phase_rule

    def test_loop(self, rng):
        f = random_algebra_loop(3, 2, rng)
        decoded = codec.loop_from_dict(codec.loop_to_dict(f))
        assert np.allclose(decoded.evaluate(0.9), f.evaluate(0.9))
        with pytest.raises(ParameterError):
            codec.loop_from_dict({'d': 2, 'coeffs': {'one': [[0, 0], [0, 0]]}})
        with pytest.raises(ParameterError):
            codec.loop_from_dict({'d': 2, 'coeffs': [[0, 0], [0, 0]]})

    def test_loop_flavor_can_be_forced(self):
        data = codec.loop_to_dict(wave(ROTATION_GENERATOR, 1))
        assert codec.loop_from_dict({**data, 'flavor': 'group'}, 'algebra').flavor == 'algebra'

    def test_nerve_and_cochain(self):
        c = obstructed_example()
        nerve = codec.nerve_from_dict(c.nerve.to_dict())
        assert nerve == c.nerve
        decoded = codec.cochain_from_dict(c.to_dict(), nerve)
        assert np.allclose(decoded.as_array(), c.as_array())
        with pytest.raises(ParameterError):
            codec.cochain_from_dict({'degree': 1, 'values': {'0-1': 0.1}}, Nerve.complete(2))


class TestText:

    def test_dumps_handles_numpy(self):
        text = codec.dumps({'a': np.float64(1.5), 'b': np.arange(3), 'z': 1j, 'ok': np.bool_(True)})
        assert json.loads(text) == {'a': 1.5, 'b': [0, 1, 2], 'z': [0.0, 1.0], 'ok': True}

    def test_dumps_is_deterministic(self):
        assert codec.dumps({'b': 1, 'a': 2}) == codec.dumps({'a': 2, 'b': 1})
        assert codec.dumps({'b': 1, 'a': 2}).index('"a"') < codec.dumps({'b': 1, 'a': 2}).index('"b"')

    def test_dumps_uses_to_dict(self):
        data = json.loads(codec.dumps({'nerve': Nerve.complete(2)}))
        assert data['nerve'] == Nerve.complete(2).to_dict()

    def test_unserializable(self):
        with pytest.raises(TypeError):
            codec.dumps({'x': object()})

    def test_dump_and_load_file(self, temp_dir):
        path = temp_dir / "report.json"
        codec.dump({'pass': True}, path)
        assert codec.load(path) == {'pass': True}
        assert path.read_text(encoding='utf-8').endswith('\n')

    def test_dump_to_stream(self):
        buffer = io.StringIO()
        codec.dump([1, 2], buffer)
        assert codec.load(io.StringIO(buffer.getvalue())) == [1, 2]

    def test_malformed_json(self):
        with pytest.raises(ParameterError, match="malformed JSON"):
            codec.loads("{not json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParameterError):
            codec.load(tmp_path / "absent.json")
