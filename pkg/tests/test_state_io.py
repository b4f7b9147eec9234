import struct

import numpy as np
import pytest

from simulation.errors import InvalidArgumentError
from simulation.hilbert import domain_wall_state
from utils.state_io import HEADER, MAGIC, decode_state, encode_state, read_state, write_state


def test_write_and_read(tmp_path, random_state):
    state = random_state(3)
    path = write_state(state, str(tmp_path / "states" / "psi.qbsv"))
    loaded = read_state(path)
    assert loaded.n_sites == 3
    np.testing.assert_allclose(loaded.amplitudes, state.amplitudes, rtol=0, atol=1e-15)


def test_layout_is_little_endian_pairs():
    payload = encode_state(domain_wall_state(1))
    assert payload[:4] == MAGIC
    assert struct.unpack_from("<HH", payload, 4) == (1, 2)
    body = np.frombuffer(payload, dtype="<f8", offset=HEADER.size)
    # |charger up, battery down> is basis index 1
    np.testing.assert_array_equal(body, [0, 0, 1, 0, 0, 0, 0, 0])


@pytest.mark.parametrize("mutate", [
    lambda payload: payload[:5],
    lambda payload: b"XXXX" + payload[4:],
    lambda payload: payload[:4] + struct.pack("<H", 2) + payload[6:],
    lambda payload: payload[:-8],
])
def test_malformed_payloads(mutate):
    with pytest.raises(InvalidArgumentError):
        decode_state(mutate(encode_state(domain_wall_state(1))))


def test_unnormalized_payload():
    body = np.array([1.0, 0.0, 1.0, 0.0], dtype="<f8")
    with pytest.raises(InvalidArgumentError):
        decode_state(HEADER.pack(MAGIC, 1, 1) + body.tobytes())


def test_norm_within_file_tolerance_is_accepted():
    scale = np.sqrt(1.0 + 5e-9)
    body = np.array([scale, 0.0, 0.0, 0.0], dtype="<f8")
    state = decode_state(HEADER.pack(MAGIC, 1, 1) + body.tobytes())
    assert state.norm_sq() == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(state.amplitudes, [1.0, 0.0], atol=1e-15)
