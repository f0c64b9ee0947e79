"""2D LIDAR sensor model.

Rays are cast from the ego center against axis-aligned vehicle rectangles
(top-down view). Each ray reports the distance to the first obstacle face it
crosses, or r_max if nothing is hit. Per-ray relative speeds are obtained by
finite-differencing consecutive distance readings. Everything here is a pure
function of its inputs; the batched kernels are shared with the vectorized
simulator so scalar and batch paths agree bit for bit.
"""

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SensorConfig:
    ray_count: int = 24
    fov_min: float = 0.0
    fov_max: float = TWO_PI
    r_max: float = 100.0
    include_ego_speed: bool = True
    include_lane_offset: bool = True
    # clamp for finite-differenced relative speeds; 2x the default ego speed cap
    rel_speed_clamp: float = 60.0
    # lane geometry needed only for the lane_offset feature
    lane_width: float = 4.0

    def validate(self):
        if self.ray_count < 1:
            raise ValueError("ray_count must be >= 1")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")
        if self.fov_max <= self.fov_min:
            raise ValueError("fov_max must exceed fov_min")
        if self.rel_speed_clamp <= 0:
            raise ValueError("rel_speed_clamp must be positive")
        if self.lane_width <= 0:
            raise ValueError("lane_width must be positive")
        return self

    def ray_angles(self) -> np.ndarray:
        k = np.arange(self.ray_count, dtype=np.float64)
        return self.fov_min + k * (self.fov_max - self.fov_min) / self.ray_count

    def ray_directions(self) -> np.ndarray:
        """(K, 2) unit vectors, ray k at fov_min + k*(fov_max-fov_min)/K."""
        ang = self.ray_angles()
        return np.stack([np.cos(ang), np.sin(ang)], axis=1)

    @property
    def obs_dim(self) -> int:
        n = 2 * self.ray_count
        n += 1 if self.include_ego_speed else 0
        n += 1 if self.include_lane_offset else 0
        return n


@dataclass
class Observation:
    """Sensor output, flattened as [distances; rel_speeds; ego_speed?; lane_offset?]."""

    distances: np.ndarray
    rel_speeds: np.ndarray
    ego_speed: float | None = None
    lane_offset: float | None = None

    def vector(self) -> np.ndarray:
        tail = []
        if self.ego_speed is not None:
            tail.append(self.ego_speed)
        if self.lane_offset is not None:
            tail.append(self.lane_offset)
        return np.concatenate([self.distances, self.rel_speeds, np.asarray(tail)])


def _slab_interval(o, d, lo, hi):
    """Parameter interval [tlo, thi] where o + t*d lies within [lo, hi].

    Handles d == 0 (ray parallel to the slab): the interval is all of R when
    the origin coordinate is inside the slab, empty otherwise.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        t1 = (lo - o) / d
        t2 = (hi - o) / d
    tlo = np.minimum(t1, t2)
    thi = np.maximum(t1, t2)
    zero = d == 0.0
    if np.any(zero):
        inside = (o >= lo) & (o <= hi)
        tlo = np.where(zero, np.where(inside, -np.inf, np.inf), tlo)
        thi = np.where(zero, np.where(inside, np.inf, -np.inf), thi)
    return tlo, thi


def cast_rays_batch(ego_x, ego_y, rects, dirs, r_max) -> np.ndarray:
    """Exact ray/axis-aligned-rectangle intersection for a batch of scenes.

    ego_x, ego_y: (B,) ray origins
    rects: (B, V, 4) as [xmin, xmax, ymin, ymax]
    dirs: (K, 2) unit ray directions
    returns (B, K) distances, r_max where no rectangle is hit
    """
    B = ego_x.shape[0]
    K = dirs.shape[0]
    if rects.shape[1] == 0:
        return np.full((B, K), r_max, dtype=np.float64)
    ox = ego_x[:, None, None]
    oy = ego_y[:, None, None]
    dx = dirs[None, :, 0, None]
    dy = dirs[None, :, 1, None]
    xlo, xhi = _slab_interval(ox, dx, rects[:, None, :, 0], rects[:, None, :, 1])
    ylo, yhi = _slab_interval(oy, dy, rects[:, None, :, 2], rects[:, None, :, 3])
    tmin = np.maximum(xlo, ylo)
    tmax = np.minimum(xhi, yhi)
    # origin is outside every rectangle by precondition, so entry is at tmin > 0
    hit = (tmax >= tmin) & (tmin > 0.0)
    t = np.where(hit, tmin, np.inf)
    return np.minimum(t.min(axis=2), r_max)


def _vehicle_rects(traffic) -> np.ndarray:
    rects = np.empty((len(traffic), 4), dtype=np.float64)
    for i, v in enumerate(traffic):
        hl = 0.5 * v.length
        hw = 0.5 * v.width
        rects[i] = (v.x - hl, v.x + hl, v.y - hw, v.y + hw)
    return rects


def cast_rays(ego, traffic, cfg: SensorConfig) -> np.ndarray:
    """Distances from ego center to the nearest vehicle along each ray."""
    rects = _vehicle_rects(traffic)[None]
    out = cast_rays_batch(
        np.asarray([ego.x]), np.asarray([ego.y]), rects, cfg.ray_directions(), cfg.r_max
    )
    return out[0]


def relative_speeds(dist_now, dist_prev, dt: float, cfg: SensorConfig) -> np.ndarray:
    """Per-ray closing speed; 0 on rays that miss at either sampling instant."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    dist_now = np.asarray(dist_now, dtype=np.float64)
    dist_prev = np.asarray(dist_prev, dtype=np.float64)
    seen = (dist_now < cfg.r_max) & (dist_prev < cfg.r_max)
    rel = np.where(seen, (dist_now - dist_prev) / dt, 0.0)
    return np.clip(rel, -cfg.rel_speed_clamp, cfg.rel_speed_clamp)


def lane_offset_of(y: float, lane_width: float) -> float:
    """Offset from the nearest lane center, in lane widths; always in [-0.5, 0.5]."""
    q = y / lane_width
    return q - np.round(q)


def assemble(dist, rel, ego, cfg: SensorConfig) -> Observation:
    """Build the policy observation from raw sensor channels."""
    dist = np.asarray(dist, dtype=np.float64)
    rel = np.asarray(rel, dtype=np.float64)
    if dist.shape != (cfg.ray_count,) or rel.shape != (cfg.ray_count,):
        raise ValueError("channel length must equal ray_count")
    ego_speed = float(ego.v) if cfg.include_ego_speed else None
    offset = (
        float(lane_offset_of(ego.y, cfg.lane_width)) if cfg.include_lane_offset else None
    )
    return Observation(dist, rel, ego_speed, offset)
