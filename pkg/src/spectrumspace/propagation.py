"""Log-distance path loss and point-to-point link gains.

The deterministic log-distance model is the only one built in; free-space is
the same curve with the exponent pinned to 2. Everything downstream consumes
gains through the functions here, so swapping in a measured-gain table later
only means replacing this module's lookups.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import OMNI, AntennaPattern, Grid, db_to_linear, linear_to_db

__all__ = [
    "FREE_SPACE",
    "LOG_DISTANCE",
    "PropagationConfig",
    "bearing_deg",
    "entrant_gain_field_linear",
    "link_gain_db",
    "link_gain_linear",
    "path_loss_db",
    "received_power_dbm",
    "tx_gain_db_field",
]

FREE_SPACE = "free-space"
LOG_DISTANCE = "log-distance"


@dataclass(frozen=True)
class PropagationConfig:
    """Parameters of the log-distance path-loss curve.

    PL(d) = reference_loss_db + 10 * n * log10(max(d, clamp) / d0).
    The clamp keeps the near-field singularity out of co-located links.
    """

    model: str = LOG_DISTANCE
    path_loss_exponent: float = 2.0
    reference_distance_m: float = 1.0
    reference_loss_db: float = 40.0
    min_distance_clamp_m: float = 1.0

    @property
    def exponent(self) -> float:
        return 2.0 if self.model == FREE_SPACE else self.path_loss_exponent


def path_loss_db(distance_m, config: PropagationConfig):
    """Path loss in dB at a distance (scalar or array), never below zero slope.

    Distances under the clamp are treated as the clamp distance.
    """
    d = np.maximum(np.asarray(distance_m, dtype=float), config.min_distance_clamp_m)
    loss = config.reference_loss_db + 10.0 * config.exponent * np.log10(
        d / config.reference_distance_m
    )
    return float(loss) if np.ndim(distance_m) == 0 else loss


def bearing_deg(from_pos: tuple[float, float], to_pos: tuple[float, float]) -> float:
    """Bearing from one point toward another, degrees CCW from +x."""
    return math.degrees(math.atan2(to_pos[1] - from_pos[1], to_pos[0] - from_pos[0]))


def link_gain_db(tx, rx_point: tuple[float, float], config: PropagationConfig,
                 rx_pattern: AntennaPattern = OMNI) -> float:
    """Directional link gain in dB between a transmitter and a point.

    Args:
      tx: anything with ``position`` and ``pattern`` attributes.
      rx_point: receiving location.
      config: propagation parameters.
      rx_pattern: receiving antenna pattern; omni for a bare probe point.

    Returns:
      tx pattern gain toward the point, plus rx pattern gain back toward the
      transmitter, minus path loss. Always negative in practice.
    """
    dist = math.hypot(rx_point[0] - tx.position[0], rx_point[1] - tx.position[1])
    g = float(tx.pattern.gain_db(bearing_deg(tx.position, rx_point)))
    g += float(rx_pattern.gain_db(bearing_deg(rx_point, tx.position)))
    return g - path_loss_db(dist, config)


def link_gain_linear(tx, rx_point: tuple[float, float], config: PropagationConfig,
                     rx_pattern: AntennaPattern = OMNI) -> float:
    """Linear power gain of a link; multiply by linear tx power to get rx power."""
    return db_to_linear(link_gain_db(tx, rx_point, config, rx_pattern))


def received_power_dbm(tx, point: tuple[float, float], config: PropagationConfig,
                       rx_pattern: AntennaPattern = OMNI) -> float:
    """Received power in dBm at a point, unclipped."""
    return tx.tx_power_dbm + link_gain_db(tx, point, config, rx_pattern)


def tx_gain_db_field(tx, grid: Grid, config: PropagationConfig) -> np.ndarray:
    """Gain in dB from a transmitter to every cell center, omni probe at the cell.

    Returns an (n_y, n_x) array aligned with the grid.
    """
    cx, cy = grid.center_arrays()
    x, y = tx.position
    dist = np.hypot(cx - x, cy - y)
    gain = tx.pattern.gain_db(np.degrees(np.arctan2(cy - y, cx - x)))
    return gain - path_loss_db(dist, config)


def entrant_gain_field_linear(rx_position: tuple[float, float], rx_pattern: AntennaPattern,
                              grid: Grid, config: PropagationConfig) -> np.ndarray:
    """Linear gain from an omni entrant at each cell center to one receiver.

    The receiver's own pattern weights each arrival direction, so a sectored
    receiver is harder to disturb from behind.
    """
    cx, cy = grid.center_arrays()
    rx_x, rx_y = rx_position
    dist = np.hypot(cx - rx_x, cy - rx_y)
    gain_db = rx_pattern.gain_db(np.degrees(np.arctan2(cy - rx_y, cx - rx_x)))
    return db_to_linear(gain_db - path_loss_db(dist, config))
