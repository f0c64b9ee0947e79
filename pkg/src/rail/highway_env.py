"""Deterministic discrete-time multi-lane highway world.

The ego vehicle is driven through the 5-action interface; surrounding traffic
cruises at per-vehicle sampled speeds, brakes behind slower leaders, makes
random gap-checked lane changes, and is recycled ahead of the ego once it
falls out of the sensing window.

Two views of the same dynamics are exposed. `WorldState` plus the functional
`reset`/`step`/`advance_traffic` operations form the scalar interface; the
`ArrayWorlds` engine advances B independent worlds in lockstep with numpy and
is what the trainer drives. The scalar operations are batch-of-1 calls into
the engine, so both paths evolve bit-identically.

Conventions: x grows forward, lane 0 is the leftmost lane, lane centers sit at
lane * lane_width. A lane change is a fixed-length maneuver whose lateral
position is linearly interpolated; a vehicle's `lane` field stays at the
maneuver source until completion. All randomness flows through one
per-world numpy Generator with a fixed draw order per step.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError
from .policy import Action

VEHICLE_LENGTH = 4.5
VEHICLE_WIDTH = 2.0


@dataclass(frozen=True)
class EnvConfig:
    lane_count: int = 5
    lane_width: float = 4.0
    dt: float = 0.1
    v_min: float = 0.0
    v_max: float = 30.0
    vel_acc: float = 1.0
    vel_dec: float = 1.0
    lane_change_duration: int = 20
    spawn_gap_min: float = 15.0
    traffic_density: float = 1.0  # vehicles per 100 m per lane
    traffic_speed_min: float = 12.0
    traffic_speed_max: float = 24.0
    horizon: int = 1000
    sensing_window: float = 200.0
    c_lat: float = 0.1
    safe_gap: float = 10.0
    p_lc: float = 0.002

    def validate(self):
        if self.lane_count < 2:
            raise ConfigError("lane_count must be >= 2")
        if self.dt <= 0:
            raise ConfigError("dt must be positive")
        if not (0 <= self.v_min < self.v_max):
            raise ConfigError("need 0 <= v_min < v_max")
        if self.vel_acc <= 0 or self.vel_dec <= 0:
            raise ConfigError("speed increments must be positive")
        if self.spawn_gap_min <= VEHICLE_LENGTH:
            raise ConfigError("spawn_gap_min must exceed the vehicle length")
        if self.lane_change_duration < 1:
            raise ConfigError("lane_change_duration must be >= 1")
        if self.traffic_density < 0:
            raise ConfigError("traffic_density must be nonnegative")
        if not (self.traffic_speed_min <= self.traffic_speed_max):
            raise ConfigError("traffic speed range is inverted")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if self.sensing_window <= 0:
            raise ConfigError("sensing_window must be positive")
        if self.c_lat < 0 or self.safe_gap < 0 or not (0 <= self.p_lc <= 1):
            raise ConfigError("bad traffic behavior constants")
        return self

    def lane_center(self, lane: int) -> float:
        return lane * self.lane_width

    @property
    def traffic_count(self) -> int:
        span_hundreds = 2.0 * self.sensing_window / 100.0
        return int(round(self.traffic_density * span_hundreds * self.lane_count))


@dataclass
class VehicleState:
    x: float
    y: float
    v: float
    lane: int
    # maneuver bookkeeping: dir 0 = none, -1 = toward lower lane index (left)
    man_dir: int = 0
    man_steps: int = 0
    man_total: int = 0
    man_orig: int = 0
    length: float = VEHICLE_LENGTH
    width: float = VEHICLE_WIDTH
    vid: int = 0
    cruise: float = 0.0
    spawn_tick: int = 0

    @property
    def maneuver(self) -> str:
        if self.man_dir == 0:
            return "none"
        return "changing_left" if self.man_dir < 0 else "changing_right"

    @property
    def progress(self) -> float:
        if self.man_dir == 0 or self.man_total == 0:
            return 0.0
        return self.man_steps / self.man_total

    def rect(self) -> tuple[float, float, float, float]:
        hl, hw = 0.5 * self.length, 0.5 * self.width
        return (self.x - hl, self.x + hl, self.y - hw, self.y + hw)


def rects_overlap(a: VehicleState, b: VehicleState) -> bool:
    return abs(a.x - b.x) < 0.5 * (a.length + b.length) and abs(a.y - b.y) < 0.5 * (
        a.width + b.width
    )


@dataclass
class WorldState:
    config: EnvConfig
    ego: VehicleState
    traffic: list[VehicleState]
    tick: int
    rng: np.random.Generator
    overtake_count: int = 0
    lane_change_count: int = 0
    collided: bool = False
    ego_maneuver_end_tick: int = -(10**9)

    @property
    def terminated(self) -> bool:
        return self.collided or self.tick >= self.config.horizon


@dataclass(frozen=True)
class StepInfo:
    r_long: float
    r_lat: float
    collided: bool
    overtakes_delta: int
    lane_change_completed: bool
    terminated: bool


def _copy_rng(rng: np.random.Generator) -> np.random.Generator:
    out = np.random.Generator(np.random.PCG64())
    out.bit_generator.state = rng.bit_generator.state
    return out


def world_signature(state: WorldState) -> bytes:
    """Canonical byte serialization, used by determinism checks."""
    parts = [repr(state.config).encode()]
    for v in [state.ego] + state.traffic:
        parts.append(
            np.asarray(
                [v.x, v.y, v.v, v.lane, v.man_dir, v.man_steps, v.man_total,
                 v.man_orig, v.length, v.width, v.vid, v.cruise, v.spawn_tick]
            ).tobytes()
        )
    parts.append(
        np.asarray(
            [state.tick, state.overtake_count, state.lane_change_count,
             int(state.collided), state.ego_maneuver_end_tick]
        ).tobytes()
    )
    parts.append(repr(state.rng.bit_generator.state).encode())
    return b"|".join(parts)


def _spawn_positions(rng: np.random.Generator, count: int, window: float, gap: float):
    """Longitudinal spawn slots on [-window, window] minus a protected zone
    around the ego at x=0; jittered but never closer than `gap` center-to-center."""
    if count == 0:
        return np.zeros(0)
    seg_len = window - gap
    n_behind = count // 2
    n_ahead = count - n_behind
    xs = []
    for n_seg, lo in ((n_behind, -window), (n_ahead, gap)):
        if n_seg == 0:
            continue
        cap = int(seg_len // gap)
        n_seg = min(n_seg, max(cap, 1))
        spacing = seg_len / n_seg
        jitter_amp = max(0.0, 0.5 * (spacing - gap))
        centers = lo + (np.arange(n_seg) + 0.5) * spacing
        xs.append(centers + rng.uniform(-jitter_amp, jitter_amp, n_seg))
    return np.concatenate(xs) if xs else np.zeros(0)


class ArrayWorlds:
    """B highway worlds advanced in lockstep. All per-vehicle state lives in
    (B, V) arrays; per-world generators keep every world's evolution a pure
    function of its own seed regardless of batch composition."""

    def __init__(self, cfg: EnvConfig, seeds):
        cfg.validate()
        self.cfg = cfg
        seeds = list(seeds)
        self.B = len(seeds)
        self.V = cfg.traffic_count
        self.rngs = [np.random.Generator(np.random.PCG64(int(s))) for s in seeds]
        B, V = self.B, self.V
        mid_lane = cfg.lane_count // 2
        self.ego_x = np.zeros(B)
        self.ego_y = np.full(B, cfg.lane_center(mid_lane))
        self.ego_v = np.full(B, 0.5 * (cfg.traffic_speed_min + cfg.traffic_speed_max))
        self.ego_lane = np.full(B, mid_lane, dtype=np.int64)
        self.ego_man_dir = np.zeros(B, dtype=np.int64)
        self.ego_man_steps = np.zeros(B, dtype=np.int64)
        self.ego_man_orig = np.full(B, mid_lane, dtype=np.int64)
        self.ego_man_end_tick = np.full(B, -(10**9), dtype=np.int64)
        self.tr_x = np.zeros((B, V))
        self.tr_y = np.zeros((B, V))
        self.tr_v = np.zeros((B, V))
        self.tr_lane = np.zeros((B, V), dtype=np.int64)
        self.tr_man_dir = np.zeros((B, V), dtype=np.int64)
        self.tr_man_steps = np.zeros((B, V), dtype=np.int64)
        self.tr_man_orig = np.zeros((B, V), dtype=np.int64)
        self.tr_cruise = np.zeros((B, V))
        self.tr_vid = np.tile(np.arange(V, dtype=np.int64), (B, 1))
        self.tr_spawn_tick = np.zeros((B, V), dtype=np.int64)
        self.tick = np.zeros(B, dtype=np.int64)
        self.collided = np.zeros(B, dtype=bool)
        self.done = np.zeros(B, dtype=bool)
        self.overtakes = np.zeros(B, dtype=np.int64)
        self.lane_changes = np.zeros(B, dtype=np.int64)
        for b in range(B):
            self._spawn_traffic(b)

    def _spawn_traffic(self, b: int):
        cfg = self.cfg
        rng = self.rngs[b]
        xs = _spawn_positions(rng, self.V, cfg.sensing_window, cfg.spawn_gap_min)
        n = len(xs)
        lanes = rng.integers(0, cfg.lane_count, size=n)
        cruise = rng.uniform(cfg.traffic_speed_min, cfg.traffic_speed_max, size=n)
        self.tr_x[b, :n] = xs
        self.tr_lane[b, :n] = lanes
        self.tr_y[b, :n] = lanes * cfg.lane_width
        self.tr_cruise[b, :n] = cruise
        self.tr_v[b, :n] = cruise
        self.tr_man_orig[b, :n] = lanes
        # spawn capacity shortfall (extreme densities): park leftovers far behind
        if n < self.V:
            self.tr_x[b, n:] = -cfg.sensing_window - cfg.spawn_gap_min * np.arange(
                1, self.V - n + 1
            )
            self.tr_lane[b, n:] = 0
            self.tr_y[b, n:] = 0.0
            self.tr_cruise[b, n:] = cfg.traffic_speed_min
            self.tr_v[b, n:] = cfg.traffic_speed_min

    # -- traffic kernel -------------------------------------------------

    def _occupied_lanes(self, lane, man_dir):
        return lane, lane + man_dir

    def _advance_traffic(self, ego_x, ego_v, ego_lane, ego_man_dir, spawn_tick):
        """One traffic update against the supplied ego snapshot. Draw order per
        world: lane-change uniforms (V), side picks (V), then per-respawn
        (lane permutation, cruise)."""
        cfg = self.cfg
        B, V = self.B, self.V
        if V == 0:
            return
        # entity tables: traffic rows 0..V-1 plus the ego in the last column
        ax = np.concatenate([self.tr_x, ego_x[:, None]], axis=1)
        av = np.concatenate([self.tr_v, ego_v[:, None]], axis=1)
        l1 = np.concatenate([self.tr_lane, ego_lane[:, None]], axis=1)
        l2 = np.concatenate(
            [self.tr_lane + self.tr_man_dir, (ego_lane + ego_man_dir)[:, None]], axis=1
        )
        fl1 = self.tr_lane[:, :, None]
        fl2 = (self.tr_lane + self.tr_man_dir)[:, :, None]
        share = (
            (l1[:, None, :] == fl1) | (l1[:, None, :] == fl2)
            | (l2[:, None, :] == fl1) | (l2[:, None, :] == fl2)
        )
        gap = ax[:, None, :] - self.tr_x[:, :, None]
        ahead = share & (gap > 0.0)
        gap_ahead = np.where(ahead, gap, np.inf)
        j_lead = np.argmin(gap_ahead, axis=2)
        lead_gap = np.take_along_axis(gap_ahead, j_lead[:, :, None], axis=2)[:, :, 0]
        lead_v = np.take_along_axis(av[:, None, :], j_lead[:, :, None], axis=2)[:, :, 0]
        braking = lead_gap - VEHICLE_LENGTH < cfg.safe_gap
        self.tr_v = np.where(braking, np.minimum(self.tr_cruise, lead_v), self.tr_cruise)

        # random, gap-checked lane-change initiation
        u = np.empty((B, V))
        side = np.empty((B, V), dtype=np.int64)
        for b in range(B):
            u[b] = self.rngs[b].random(V)
            side[b] = self.rngs[b].integers(0, 2, size=V) * 2 - 1
        target = self.tr_lane + side
        valid = (target >= 0) & (target < cfg.lane_count) & (self.tr_man_dir == 0)
        want = (u < cfg.p_lc) & valid
        if np.any(want):
            in_target = (l1[:, None, :] == target[:, :, None]) | (
                l2[:, None, :] == target[:, :, None]
            )
            gap_t_ahead = np.where(in_target & (gap > 0.0), gap, np.inf)
            gap_t_behind = np.where(in_target & (gap < 0.0), -gap, np.inf)
            clear = cfg.safe_gap + VEHICLE_LENGTH
            ok = (gap_t_ahead.min(axis=2) >= clear) & (gap_t_behind.min(axis=2) >= clear)
            start = want & ok
            self.tr_man_orig = np.where(start, self.tr_lane, self.tr_man_orig)
            self.tr_man_dir = np.where(start, side, self.tr_man_dir)
            self.tr_man_steps = np.where(start, 0, self.tr_man_steps)

        # maneuver advance with linear lateral interpolation
        active = self.tr_man_dir != 0
        self.tr_man_steps = np.where(active, self.tr_man_steps + 1, self.tr_man_steps)
        complete = active & (self.tr_man_steps >= cfg.lane_change_duration)
        frac = self.tr_man_steps / cfg.lane_change_duration
        src_y = self.tr_lane * cfg.lane_width
        tgt_y = (self.tr_lane + self.tr_man_dir) * cfg.lane_width
        self.tr_y = np.where(active, src_y + frac * (tgt_y - src_y), self.tr_y)
        self.tr_lane = np.where(complete, self.tr_lane + self.tr_man_dir, self.tr_lane)
        self.tr_y = np.where(complete, self.tr_lane * cfg.lane_width, self.tr_y)
        self.tr_man_dir = np.where(complete, 0, self.tr_man_dir)
        self.tr_man_steps = np.where(complete, 0, self.tr_man_steps)

        self.tr_x += self.tr_v * cfg.dt

        # recycle vehicles that dropped out of the window behind the ego
        behind = self.tr_x < ego_x - cfg.sensing_window
        for b, i in zip(*np.nonzero(behind)):
            self._respawn(int(b), int(i), float(ego_x[b]), spawn_tick[b])

    def _respawn(self, b: int, i: int, ego_x: float, spawn_tick: int):
        cfg = self.cfg
        rng = self.rngs[b]
        x = ego_x + cfg.sensing_window
        for _ in range(8):
            for lane in rng.permutation(cfg.lane_count):
                same = self.tr_lane[b] == lane
                same[i] = False
                if not np.any(same & (np.abs(self.tr_x[b] - x) < cfg.spawn_gap_min)):
                    cruise = rng.uniform(cfg.traffic_speed_min, cfg.traffic_speed_max)
                    self.tr_x[b, i] = x
                    self.tr_lane[b, i] = int(lane)
                    self.tr_y[b, i] = lane * cfg.lane_width
                    self.tr_cruise[b, i] = cruise
                    self.tr_v[b, i] = cruise
                    self.tr_man_dir[b, i] = 0
                    self.tr_man_steps[b, i] = 0
                    self.tr_man_orig[b, i] = int(lane)
                    self.tr_spawn_tick[b, i] = spawn_tick
                    return
            x += cfg.spawn_gap_min
        raise RuntimeError("no respawn slot found")  # unreachable at sane densities

    # -- full step ------------------------------------------------------

    def step(self, actions: np.ndarray):
        """Advance every world by one tick. Returns per-world StepInfo arrays.

        Worlds already done keep evolving (the trainer slices episodes by
        first-done tick); the scalar API never steps a terminated world.
        """
        cfg = self.cfg
        actions = np.asarray(actions, dtype=np.int64)
        prev_ego_x = self.ego_x.copy()
        prev_ego_v = self.ego_v.copy()
        prev_ego_lane = self.ego_lane.copy()
        prev_ego_man_dir = self.ego_man_dir.copy()
        prev_tr_x = self.tr_x.copy()
        prev_tick = self.tick.copy()

        # ego speed actions
        self.ego_v = np.where(
            actions == Action.ACCELERATE,
            np.minimum(self.ego_v + cfg.vel_acc, cfg.v_max),
            self.ego_v,
        )
        self.ego_v = np.where(
            actions == Action.DECELERATE,
            np.maximum(self.ego_v - cfg.vel_dec, cfg.v_min),
            self.ego_v,
        )

        # ego lane actions: begin when idle, reverse when issued against an
        # active maneuver's direction, otherwise ignore
        for intent, delta in ((Action.LANE_LEFT, -1), (Action.LANE_RIGHT, 1)):
            sel = actions == intent
            tgt = self.ego_lane + delta
            begin = sel & (self.ego_man_dir == 0) & (tgt >= 0) & (tgt < cfg.lane_count)
            self.ego_man_orig = np.where(begin, self.ego_lane, self.ego_man_orig)
            self.ego_man_dir = np.where(begin, delta, self.ego_man_dir)
            self.ego_man_steps = np.where(begin, 0, self.ego_man_steps)
            rev = sel & (self.ego_man_dir == -delta)
            self.ego_lane = np.where(rev, self.ego_lane - delta, self.ego_lane)
            self.ego_man_steps = np.where(
                rev, cfg.lane_change_duration - self.ego_man_steps, self.ego_man_steps
            )
            self.ego_man_dir = np.where(rev, delta, self.ego_man_dir)

        active = self.ego_man_dir != 0
        r_lat = np.where(active, -cfg.c_lat, 0.0)
        self.ego_man_steps = np.where(active, self.ego_man_steps + 1, self.ego_man_steps)
        complete = active & (self.ego_man_steps >= cfg.lane_change_duration)
        frac = self.ego_man_steps / cfg.lane_change_duration
        src_y = self.ego_lane * cfg.lane_width
        tgt_y = (self.ego_lane + self.ego_man_dir) * cfg.lane_width
        self.ego_y = np.where(active, src_y + frac * (tgt_y - src_y), self.ego_y)
        self.ego_lane = np.where(complete, self.ego_lane + self.ego_man_dir, self.ego_lane)
        self.ego_y = np.where(complete, self.ego_lane * cfg.lane_width, self.ego_y)
        lane_change_done = complete & (self.ego_lane != self.ego_man_orig)
        self.lane_changes += lane_change_done
        self.ego_man_dir = np.where(complete, 0, self.ego_man_dir)
        self.ego_man_steps = np.where(complete, 0, self.ego_man_steps)
        self.ego_man_end_tick = np.where(complete, self.tick + 1, self.ego_man_end_tick)

        self.ego_x = self.ego_x + self.ego_v * cfg.dt

        # traffic reacts to the pre-step ego snapshot (simultaneous move)
        self._advance_traffic(
            prev_ego_x, prev_ego_v, prev_ego_lane, prev_ego_man_dir, self.tick + 1
        )

        # overtakes: traffic the ego passed this step, respawns excluded
        if self.V:
            passed = (
                (prev_tr_x >= prev_ego_x[:, None])
                & (self.tr_x < self.ego_x[:, None])
                & (self.tr_spawn_tick <= prev_tick[:, None])
            )
            overtake_delta = passed.sum(axis=1)
        else:
            overtake_delta = np.zeros(self.B, dtype=np.int64)
        self.overtakes += overtake_delta

        if self.V:
            hit = (
                np.abs(self.tr_x - self.ego_x[:, None]) < VEHICLE_LENGTH
            ) & (np.abs(self.tr_y - self.ego_y[:, None]) < VEHICLE_WIDTH)
            collided_now = hit.any(axis=1)
        else:
            collided_now = np.zeros(self.B, dtype=bool)
        self.tick = self.tick + 1
        self.collided |= collided_now
        terminated = self.collided | (self.tick >= cfg.horizon)
        self.done |= terminated

        return {
            "r_long": self.ego_v / cfg.v_max,
            "r_lat": r_lat,
            "collided": collided_now,
            "overtakes_delta": overtake_delta,
            "lane_change_completed": lane_change_done,
            "terminated": terminated,
        }

    # -- dataclass bridge -----------------------------------------------

    def to_world_state(self, b: int) -> WorldState:
        traffic = [
            VehicleState(
                x=float(self.tr_x[b, i]), y=float(self.tr_y[b, i]),
                v=float(self.tr_v[b, i]), lane=int(self.tr_lane[b, i]),
                man_dir=int(self.tr_man_dir[b, i]), man_steps=int(self.tr_man_steps[b, i]),
                man_total=self.cfg.lane_change_duration if self.tr_man_dir[b, i] else 0,
                man_orig=int(self.tr_man_orig[b, i]),
                vid=int(self.tr_vid[b, i]), cruise=float(self.tr_cruise[b, i]),
                spawn_tick=int(self.tr_spawn_tick[b, i]),
            )
            for i in range(self.V)
        ]
        ego = VehicleState(
            x=float(self.ego_x[b]), y=float(self.ego_y[b]), v=float(self.ego_v[b]),
            lane=int(self.ego_lane[b]), man_dir=int(self.ego_man_dir[b]),
            man_steps=int(self.ego_man_steps[b]),
            man_total=self.cfg.lane_change_duration if self.ego_man_dir[b] else 0,
            man_orig=int(self.ego_man_orig[b]), vid=-1,
        )
        return WorldState(
            config=self.cfg, ego=ego, traffic=traffic, tick=int(self.tick[b]),
            rng=_copy_rng(self.rngs[b]), overtake_count=int(self.overtakes[b]),
            lane_change_count=int(self.lane_changes[b]), collided=bool(self.collided[b]),
            ego_maneuver_end_tick=int(self.ego_man_end_tick[b]),
        )

    @classmethod
    def from_world_states(cls, states: list[WorldState]) -> "ArrayWorlds":
        cfg = states[0].config
        worlds = cls.__new__(cls)
        worlds.cfg = cfg
        worlds.B = len(states)
        worlds.V = len(states[0].traffic)
        worlds.rngs = [_copy_rng(s.rng) for s in states]
        B, V = worlds.B, worlds.V

        def fill(attr, getter, dtype=np.float64):
            setattr(worlds, attr, np.asarray([getter(s) for s in states], dtype=dtype))

        fill("ego_x", lambda s: s.ego.x)
        fill("ego_y", lambda s: s.ego.y)
        fill("ego_v", lambda s: s.ego.v)
        fill("ego_lane", lambda s: s.ego.lane, np.int64)
        fill("ego_man_dir", lambda s: s.ego.man_dir, np.int64)
        fill("ego_man_steps", lambda s: s.ego.man_steps, np.int64)
        fill("ego_man_orig", lambda s: s.ego.man_orig, np.int64)
        fill("ego_man_end_tick", lambda s: s.ego_maneuver_end_tick, np.int64)
        fill("tick", lambda s: s.tick, np.int64)
        fill("collided", lambda s: s.collided, bool)
        fill("overtakes", lambda s: s.overtake_count, np.int64)
        fill("lane_changes", lambda s: s.lane_change_count, np.int64)
        worlds.done = np.asarray([s.terminated for s in states], dtype=bool)

        def tfill(attr, getter, dtype=np.float64):
            arr = np.asarray([[getter(v) for v in s.traffic] for s in states], dtype=dtype)
            setattr(worlds, attr, arr.reshape(B, V))

        tfill("tr_x", lambda v: v.x)
        tfill("tr_y", lambda v: v.y)
        tfill("tr_v", lambda v: v.v)
        tfill("tr_lane", lambda v: v.lane, np.int64)
        tfill("tr_man_dir", lambda v: v.man_dir, np.int64)
        tfill("tr_man_steps", lambda v: v.man_steps, np.int64)
        tfill("tr_man_orig", lambda v: v.man_orig, np.int64)
        tfill("tr_cruise", lambda v: v.cruise)
        tfill("tr_vid", lambda v: v.vid, np.int64)
        tfill("tr_spawn_tick", lambda v: v.spawn_tick, np.int64)
        return worlds


# -- scalar operations --------------------------------------------------


def reset(config: EnvConfig, seed: int) -> WorldState:
    """Fresh world: ego centered in lane lane_count//2 at x=0, traffic placed
    at lane centers with pairwise center gaps >= spawn_gap_min."""
    config.validate()
    return ArrayWorlds(config, [seed]).to_world_state(0)


def step(state: WorldState, action: Action) -> tuple[WorldState, StepInfo]:
    if state.terminated:
        raise ValueError("cannot step a terminated episode")
    worlds = ArrayWorlds.from_world_states([state])
    info = worlds.step(np.asarray([int(action)]))
    return worlds.to_world_state(0), StepInfo(
        r_long=float(info["r_long"][0]),
        r_lat=float(info["r_lat"][0]),
        collided=bool(info["collided"][0]),
        overtakes_delta=int(info["overtakes_delta"][0]),
        lane_change_completed=bool(info["lane_change_completed"][0]),
        terminated=bool(info["terminated"][0]),
    )


def advance_traffic(state: WorldState) -> WorldState:
    """Traffic-only update against the current ego; tick is unchanged."""
    worlds = ArrayWorlds.from_world_states([state])
    worlds._advance_traffic(
        worlds.ego_x, worlds.ego_v, worlds.ego_lane, worlds.ego_man_dir, worlds.tick
    )
    return worlds.to_world_state(0)


def count_overtake(prev: WorldState, next_state: WorldState) -> int:
    """Traffic vehicles the ego passed between two consecutive states;
    despawn/respawn transitions are excluded via spawn ticks."""
    prev_by_vid = {v.vid: v for v in prev.traffic}
    count = 0
    for v in next_state.traffic:
        if v.spawn_tick > prev.tick or v.vid not in prev_by_vid:
            continue
        before = prev_by_vid[v.vid]
        if before.x >= prev.ego.x and v.x < next_state.ego.x:
            count += 1
    return count
