"""
QBSV binary state files.

Layout: magic ``b"QBSV"``, version ``u16`` (1), ``N`` ``u16``, then 2^N
little-endian ``float64`` pairs (real, imag) in the little-endian basis order.
"""
import os
import struct

import numpy as np

from simulation.errors import InvalidArgumentError
from simulation.hilbert import StateVector

MAGIC = b"QBSV"
VERSION = 1
HEADER = struct.Struct("<4sHH")
NORM_TOLERANCE = 1e-8


def encode_state(state: StateVector) -> bytes:
    body = np.empty(2 * state.dim, dtype="<f8")
    body[0::2] = state.amplitudes.real
    body[1::2] = state.amplitudes.imag
    return HEADER.pack(MAGIC, VERSION, state.n_sites) + body.tobytes()


def decode_state(payload: bytes) -> StateVector:
    """Parse a QBSV payload, rejecting malformed headers, short bodies and unnormalized states."""
    if len(payload) < HEADER.size:
        raise InvalidArgumentError(f"QBSV payload too short for a header ({len(payload)} bytes)")
    magic, version, n_sites = HEADER.unpack_from(payload)
    if magic != MAGIC:
        raise InvalidArgumentError(f"not a QBSV file (magic {magic!r})")
    if version != VERSION:
        raise InvalidArgumentError(f"unsupported QBSV version {version}")
    expected = HEADER.size + 16 * (2 ** n_sites)
    if len(payload) != expected:
        raise InvalidArgumentError(f"QBSV body for N={n_sites} needs {expected} bytes, got {len(payload)}")
    body = np.frombuffer(payload, dtype="<f8", offset=HEADER.size)
    amplitudes = body[0::2] + 1j * body[1::2]
    norm_sq = float(np.vdot(amplitudes, amplitudes).real)
    if abs(norm_sq - 1.0) > NORM_TOLERANCE:
        raise InvalidArgumentError(f"state norm^2 is {norm_sq:.12f}, expected 1")
    return StateVector.from_amplitudes(amplitudes, normalize=True)


def write_state(state: StateVector, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as handle:
        handle.write(encode_state(state))
    return path


def read_state(path: str) -> StateVector:
    with open(path, "rb") as handle:
        return decode_state(handle.read())
