"""
Complementary Golay pairs and channel estimation from a CE field.

Pairs come from the recursive concatenation construction (a, b) -> (a|b, a|-b),
which keeps the complementarity R_a(k) + R_b(k) = 2N*delta(k) exact in integer
arithmetic. The simulated CE field is laid out as

    [ seq_a | N_T zeros | seq_b | N_T zeros ]

so that every channel delay up to N_T-1 taps stays inside its own segment.
"""

from dataclasses import dataclass
import logging

import numpy as np

from gesture_radar.exceptions import FramingError, InvalidArgumentError
from gesture_radar.radar.framing import ChannelBonding, TapFrame

logger = logging.getLogger(__name__)

SUPPORTED_LENGTHS = (2, 4, 8, 16, 32, 64, 128)
CB1_SAMPLE_PERIOD = 1.0 / ChannelBonding.CB1.bandwidth_hz


@dataclass(frozen=True, eq=False)
class GolayPair:
    seq_a: np.ndarray
    seq_b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.seq_a, dtype=np.int64).reshape(-1)
        b = np.asarray(self.seq_b, dtype=np.int64).reshape(-1)
        if a.size != b.size:
            raise InvalidArgumentError("Golay pair sequences must have equal length")
        if not (np.all(np.abs(a) == 1) and np.all(np.abs(b) == 1)):
            raise InvalidArgumentError("Golay sequences must be +/-1 valued")
        object.__setattr__(self, "seq_a", a)
        object.__setattr__(self, "seq_b", b)

    @property
    def length(self) -> int:
        return self.seq_a.size


@dataclass(frozen=True, eq=False)
class CorrelationOutput:
    lags: np.ndarray
    sample_period: float = CB1_SAMPLE_PERIOD

    def __len__(self) -> int:
        return self.lags.size

    @property
    def peak_lag(self) -> int:
        return int(np.argmax(np.abs(self.lags)))


def generate_golay_pair(length: int) -> GolayPair:
    if length not in SUPPORTED_LENGTHS:
        raise InvalidArgumentError(
            f"Golay length must be a power of two in {SUPPORTED_LENGTHS}, got {length}"
        )
    a = np.array([1], dtype=np.int64)
    b = np.array([1], dtype=np.int64)
    while a.size < length:
        a, b = np.concatenate([a, b]), np.concatenate([a, -b])
    return GolayPair(seq_a=a, seq_b=b)


def aperiodic_autocorrelation(seq: np.ndarray) -> np.ndarray:
    """Lags -(N-1)..N-1, integer valued for integer input"""
    seq = np.asarray(seq)
    return np.correlate(seq, seq, mode="full")


def is_complementary(pair: GolayPair) -> bool:
    total = aperiodic_autocorrelation(pair.seq_a) + aperiodic_autocorrelation(pair.seq_b)
    expected = np.zeros_like(total)
    expected[pair.length - 1] = 2 * pair.length
    return bool(np.array_equal(total, expected))


def correlate(received, seq, sample_period: float = CB1_SAMPLE_PERIOD) -> CorrelationOutput:
    """Full-overlap cross-correlation: lag k = sum_m received[k+m] * seq[m]"""
    received = np.asarray(received, dtype=np.complex128).reshape(-1)
    seq = np.asarray(seq).reshape(-1)
    if seq.size == 0:
        raise InvalidArgumentError("Reference sequence is empty")
    if received.size < seq.size:
        raise InvalidArgumentError(
            f"Received block ({received.size}) shorter than reference ({seq.size})"
        )
    # seq is real, so numpy's conjugation of the second argument is a no-op
    lags = np.correlate(received, seq.astype(np.complex128), mode="valid")
    return CorrelationOutput(lags=lags, sample_period=sample_period)


def ce_field_length(pair: GolayPair, n_taps: int) -> int:
    return 2 * (pair.length + n_taps)


def build_ce_field(pair: GolayPair, n_taps: int) -> np.ndarray:
    """Transmitted CE template for the simulation layout"""
    if n_taps < 1:
        raise InvalidArgumentError("n_taps must be at least 1")
    guard = np.zeros(n_taps, dtype=np.complex128)
    return np.concatenate([pair.seq_a, guard, pair.seq_b, guard]).astype(np.complex128)


def channel_estimate(
    rx_ce_field,
    pair: GolayPair,
    timestamp: float = 0.0,
    tap_spacing: float = ChannelBonding.CB1.tap_spacing,
) -> TapFrame:
    """Sum the Ga- and Gb-segment correlations so the sidelobes cancel.

    The number of taps follows from the field length, 2*(N + N_T). For a
    noise-free channel h, tap d of the result equals 2N*h[d].
    """
    rx = np.asarray(rx_ce_field, dtype=np.complex128).reshape(-1)
    n = pair.length
    if rx.size % 2 or rx.size // 2 <= n:
        raise FramingError(
            f"CE field of {rx.size} samples does not match 2*(N + N_T) with N={n}"
        )
    n_taps = rx.size // 2 - n
    segment = n + n_taps
    corr_a = correlate(rx[:segment], pair.seq_a).lags[:n_taps]
    corr_b = correlate(rx[segment:], pair.seq_b).lags[:n_taps]
    return TapFrame(taps=corr_a + corr_b, timestamp=timestamp, tap_spacing=tap_spacing)
