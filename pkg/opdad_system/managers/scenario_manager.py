"""
Scenario Manager
Builds attack schedules and generates the per-block received signal of the uplink.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from ..models.channel_model import ChannelGeometry, TransmitterKind
from ..models.scenario_model import AttackSchedule, Observation, ScenarioConfig
from ..utils.validation_utils import ConfigurationError
from ..utils.channel_utils import (
    complex_normal, covariance_factor, dbm_to_watts, one_ring_covariance,
    path_loss_gain, place_transmitters,
)

logger = logging.getLogger('opdad.scenario')


@dataclass
class BlockChannels:
    """Channels of one block, each row already scaled by sqrt(P g)"""

    users: np.ndarray
    jammers: np.ndarray


def _markov_window(rng: np.random.Generator, length: int, p_on: float, q_stay: float) -> np.ndarray:
    """
    Two-state chain with stationary on-probability p_on and lag-1 correlation q_stay.

    P(on | on) = p + q (1 - p), P(on | off) = p (1 - q); the first state is
    drawn from the stationary law.
    """
    if p_on <= 0.0:
        return np.zeros(length, dtype=np.int8)
    if p_on >= 1.0:
        return np.ones(length, dtype=np.int8)
    stay_on = p_on + q_stay * (1.0 - p_on)
    turn_on = p_on * (1.0 - q_stay)
    draws = rng.random(length)
    states = np.empty(length, dtype=np.int8)
    state = draws[0] < p_on
    states[0] = state
    for i in range(1, length):
        state = draws[i] < (stay_on if state else turn_on)
        states[i] = state
    return states


def _single_schedule(cfg: ScenarioConfig, rng: np.random.Generator) -> AttackSchedule:
    activity = np.zeros(cfg.L, dtype=np.int8)
    g, h = cfg.window

    if cfg.schedule_mode == 'constant':
        activity[:] = 1
        return AttackSchedule(activity=activity, window_start=1, window_end=cfg.L, burst_count=cfg.L)

    length = cfg.window_length
    if cfg.schedule_mode == 'burst_exact_count':
        chosen = rng.choice(length, size=cfg.n_r, replace=False)
        activity[g - 1 + chosen] = 1
    else:
        activity[g - 1:h] = _markov_window(rng, length, cfg.n_r / length, cfg.q_stay)
    return AttackSchedule(activity=activity, window_start=g, window_end=h, burst_count=cfg.n_r)


def build_schedule(cfg: ScenarioConfig, rng_stream: np.random.Generator) -> List[AttackSchedule]:
    """
    One activity schedule per jammer.

    With shared_schedule (the default) every jammer follows the same schedule,
    i.e. a coordinated attack; otherwise each jammer draws its own.
    """
    cfg.validate()
    if cfg.N == 0:
        return []
    if cfg.shared_schedule:
        schedule = _single_schedule(cfg, rng_stream)
        return [schedule] * cfg.N
    return [_single_schedule(cfg, rng_stream) for _ in range(cfg.N)]


def silent_schedules(cfg: ScenarioConfig) -> List[AttackSchedule]:
    """All-zero schedules, one per jammer"""
    g, h = cfg.window
    return [AttackSchedule(activity=np.zeros(cfg.L, dtype=np.int8), window_start=g, window_end=h, burst_count=0)
            for _ in range(cfg.N)]


def generate_block(cfg: ScenarioConfig, block_index: int, channels: BlockChannels,
                   schedules: Sequence[AttackSchedule], rng_stream: np.random.Generator) -> Observation:
    """
    Received vector y = sum_k sqrt(P_U g_k) h_k x_k + sum_n a_n sqrt(P_J g_n) h_n s_n + w.

    Symbols are unit-power circular Gaussian, noise is CN(0, sigma^2 I).
    A block past the end of a schedule counts as inactive.
    """
    antennas = cfg.M
    y = np.zeros(antennas, dtype=complex)

    if channels.users.shape[0]:
        x = complex_normal(rng_stream, channels.users.shape[0])
        y += x @ channels.users

    active = np.array([0 < block_index <= s.activity.shape[0] and s.is_active(block_index) for s in schedules],
                      dtype=bool)
    if channels.jammers.shape[0]:
        s = complex_normal(rng_stream, channels.jammers.shape[0])
        y += (s * active) @ channels.jammers

    noise_std = np.sqrt(dbm_to_watts(cfg.noise_power))
    y += noise_std * complex_normal(rng_stream, antennas)

    return Observation(complex_vector=y, block_index=block_index, truth_attacked=bool(active.any()))


class ScenarioGenerator:
    """Places transmitters once and draws block-fading observations for one trial"""

    def __init__(self, cfg: ScenarioConfig, rng: np.random.Generator,
                 users: Optional[Sequence[ChannelGeometry]] = None,
                 jammers: Optional[Sequence[ChannelGeometry]] = None):
        self.cfg = cfg.validate()
        self.rng = rng

        if users is None:
            users = place_transmitters(rng, cfg.K, TransmitterKind.LEGITIMATE, cfg.user_annulus,
                                       angular_spread=cfg.angular_spread)
        if jammers is None:
            jammers = place_transmitters(rng, cfg.N, TransmitterKind.JAMMER, cfg.jammer_annulus,
                                         angular_spread=cfg.angular_spread, avoid=users,
                                         min_separation=cfg.min_separation)
        self.users: List[ChannelGeometry] = list(users)
        self.jammers: List[ChannelGeometry] = list(jammers)

        self._user_factors = self._scaled_factors(self.users, cfg.P_U)
        self._jammer_factors = self._scaled_factors(self.jammers, cfg.P_J)
        logger.debug(f"Scenario placed {len(self.users)} users and {len(self.jammers)} jammers at M={cfg.M}")

    def _scaled_factors(self, geometries: Sequence[ChannelGeometry], power_dbm: float) -> np.ndarray:
        """(count, M, M) factors F with F F^H = P g R"""
        factors = np.zeros((len(geometries), self.cfg.M, self.cfg.M), dtype=complex)
        power = dbm_to_watts(power_dbm)
        for i, geom in enumerate(geometries):
            cov = one_ring_covariance(geom, self.cfg.M)
            gain = path_loss_gain(geom.distance, self.cfg.path_loss_exponent)
            factors[i] = np.sqrt(power * gain) * covariance_factor(cov)
        return factors

    @property
    def received_power(self) -> float:
        """Expected per-antenna power with every jammer active"""
        users = sum(dbm_to_watts(self.cfg.P_U) * path_loss_gain(g.distance, self.cfg.path_loss_exponent)
                    for g in self.users)
        jammers = sum(dbm_to_watts(self.cfg.P_J) * path_loss_gain(g.distance, self.cfg.path_loss_exponent)
                      for g in self.jammers)
        return users + jammers + dbm_to_watts(self.cfg.noise_power)

    def covariance(self, jammers_active: bool = False) -> np.ndarray:
        """Exact received covariance E[y y^H] of one block"""
        Q = dbm_to_watts(self.cfg.noise_power) * np.eye(self.cfg.M, dtype=complex)
        for factor in self._user_factors:
            Q += factor @ factor.conj().T
        if jammers_active:
            for factor in self._jammer_factors:
                Q += factor @ factor.conj().T
        return 0.5 * (Q + Q.conj().T)

    def draw_channels(self) -> BlockChannels:
        """Fresh i.i.d. realizations for one block"""
        def draw(factors):
            if not factors.shape[0]:
                return np.zeros((0, self.cfg.M), dtype=complex)
            z = complex_normal(self.rng, (factors.shape[0], self.cfg.M))
            return np.einsum('nij,nj->ni', factors, z)

        return BlockChannels(users=draw(self._user_factors), jammers=draw(self._jammer_factors))

    def observe(self, block_index: int, schedules: Sequence[AttackSchedule]) -> Observation:
        return generate_block(self.cfg, block_index, self.draw_channels(), schedules, self.rng)

    def stream(self, schedules: Sequence[AttackSchedule], blocks: Optional[int] = None) -> Iterator[Observation]:
        """Observations for blocks 1..L, generated lazily"""
        for block_index in range(1, (blocks or self.cfg.L) + 1):
            yield self.observe(block_index, schedules)


def training_phase(cfg: ScenarioConfig, rng_stream: np.random.Generator, n_train: int,
                   generator: Optional[ScenarioGenerator] = None) -> List[Observation]:
    """
    Legitimate-only observations used to seed the normal-state centroid.

    Pass the trial's generator so training shares its transmitter layout.
    """
    if n_train < 1:
        raise ConfigurationError(f"n_train must be at least 1, got {n_train}")
    if generator is None:
        generator = ScenarioGenerator(cfg, rng_stream)
    silent = silent_schedules(cfg)
    return [generator.observe(block_index, silent) for block_index in range(1, n_train + 1)]
