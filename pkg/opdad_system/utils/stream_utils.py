"""
Stream Utilities
Binary observation stream files and their ground-truth label sidecars.
"""

import logging
import os
import struct
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

import constants
from ..models.scenario_model import Observation
from .validation_utils import StreamFormatError

logger = logging.getLogger('opdad.stream')

HEADER_SIZE = struct.calcsize(constants.STREAM_HEADER_FORMAT)


def labels_path(path: str) -> str:
    return f"{path}.labels.csv"


def write_stream(path: str, observations: Sequence[Observation], write_labels: bool = True) -> int:
    """
    Write observations as little-endian float32 (re, im) pairs after a 16-byte header.

    Returns the number of blocks written.
    """
    if not observations:
        raise StreamFormatError("Refusing to write an empty observation stream")
    antennas = observations[0].antenna_count
    body = np.empty((len(observations), 2 * antennas), dtype='<f4')
    for i, obs in enumerate(observations):
        if obs.antenna_count != antennas:
            raise StreamFormatError(f"Block {obs.block_index} has {obs.antenna_count} antennas, expected {antennas}")
        body[i, 0::2] = obs.complex_vector.real
        body[i, 1::2] = obs.complex_vector.imag

    header = struct.pack(constants.STREAM_HEADER_FORMAT, constants.STREAM_MAGIC, constants.STREAM_VERSION,
                         antennas, len(observations), 0)
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'wb') as f:
        f.write(header)
        f.write(body.tobytes())

    if write_labels:
        pd.DataFrame({
            'block': [obs.block_index for obs in observations],
            'truth': [int(obs.truth_attacked) for obs in observations],
        }).to_csv(labels_path(path), index=False)
    logger.info(f"Wrote {len(observations)} blocks (M={antennas}) to {path}")
    return len(observations)


def read_header(data: bytes) -> Tuple[int, int]:
    """(M, L) from a stream header"""
    if len(data) < HEADER_SIZE:
        raise StreamFormatError(f"File is shorter than the {HEADER_SIZE}-byte header")
    magic, version, antennas, blocks, _ = struct.unpack(constants.STREAM_HEADER_FORMAT, data[:HEADER_SIZE])
    if magic != constants.STREAM_MAGIC:
        raise StreamFormatError(f"Bad magic {magic!r}, expected {constants.STREAM_MAGIC!r}")
    if version != constants.STREAM_VERSION:
        raise StreamFormatError(f"Unsupported stream version {version}")
    if antennas == 0:
        raise StreamFormatError("Header declares zero antennas")
    return antennas, blocks


def read_labels(path: str, blocks: int) -> Optional[np.ndarray]:
    """Truth flags from the sidecar, or None when there is no sidecar"""
    sidecar = labels_path(path)
    if not os.path.exists(sidecar):
        return None
    try:
        table = pd.read_csv(sidecar)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise StreamFormatError(f"Unreadable label file {sidecar}: {e}")
    if 'truth' not in table.columns or len(table) != blocks:
        raise StreamFormatError(f"Label file {sidecar} does not match the {blocks}-block stream")
    return table['truth'].to_numpy().astype(bool)


def read_stream(path: str) -> List[Observation]:
    """Observations from a stream file, truth labels attached when a sidecar exists"""
    try:
        with open(path, 'rb') as f:
            data = f.read()
    except OSError as e:
        raise StreamFormatError(f"Cannot read stream {path}: {e}")

    antennas, blocks = read_header(data)
    expected = blocks * 2 * antennas * 4
    if len(data) - HEADER_SIZE != expected:
        raise StreamFormatError(
            f"Body has {len(data) - HEADER_SIZE} bytes, header implies {expected} (M={antennas}, L={blocks})"
        )
    body = np.frombuffer(data, dtype='<f4', offset=HEADER_SIZE).reshape(blocks, 2 * antennas)
    vectors = body[:, 0::2].astype(float) + 1j * body[:, 1::2].astype(float)

    truth = read_labels(path, blocks)
    observations = [
        Observation(complex_vector=vectors[i], block_index=i + 1,
                    truth_attacked=bool(truth[i]) if truth is not None else False)
        for i in range(blocks)
    ]
    logger.info(f"Read {blocks} blocks (M={antennas}) from {path}")
    return observations
