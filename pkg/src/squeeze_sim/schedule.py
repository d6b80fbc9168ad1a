"""Pulse schedules as explicit event timelines.

A schedule alternates finite free-evolution intervals with instantaneous
rotation pulses.  The squeezing phase repeats the four-pulse angle pattern
(phi, s*pi - phi, phi, s*pi - phi) with interval t0; the freezing phase keeps
the angle pattern but stretches the interval to t'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import UnstableRegime
from .params import SystemParams

FREE = "free"
PULSE = "pulse"


@dataclass(frozen=True)
class ScheduleEvent:
    kind: str           # FREE or PULSE
    start_time: float
    duration: float = 0.0   # > 0 for FREE, 0 for PULSE
    angle: float | None = None  # set for PULSE


@dataclass(frozen=True)
class PulseSchedule:
    events: tuple[ScheduleEvent, ...]
    total_time: float
    switch_time: float | None = None

    def pulse_angles(self) -> np.ndarray:
        return np.array([e.angle for e in self.events if e.kind == PULSE])

    def intervals(self) -> np.ndarray:
        return np.array([e.duration for e in self.events if e.kind == FREE])


def _period_angles(phi: float) -> list[float]:
    s = 1.0 if phi >= 0 else -1.0
    return [phi, s * math.pi - phi, phi, s * math.pi - phi]


def four_pulse_schedule(phi: float, t0: float, n_periods: int) -> PulseSchedule:
    """n_periods repetitions of [evolve t0, pulse]*4 with the standard angles."""
    if t0 <= 0:
        raise ValueError(f"t0 must be > 0, got {t0}")
    if n_periods < 1:
        raise ValueError(f"n_periods must be >= 1, got {n_periods}")
    angles = _period_angles(phi)
    events = []
    t = 0.0
    for _ in range(n_periods):
        for theta in angles:
            events.append(ScheduleEvent(FREE, t, duration=t0))
            t += t0
            events.append(ScheduleEvent(PULSE, t, angle=theta))
    return PulseSchedule(tuple(events), total_time=t)


def frozen_interval(params: SystemParams) -> float:
    """Stretched interval t' that freezes the maximally squeezed state."""
    return 2.0 * params.t0 * (
        1.0 + params.G**2 * params.t0 * math.sin(params.phi) / params.omega_m
    )


def freeze_schedule(
    params: SystemParams,
    n_pre_periods: int | None = None,
    n_post_periods: int = 100,
) -> PulseSchedule:
    """Four-pulse squeezing until ~t_s, then the same angles at interval t'.

    n_pre_periods=None switches at the four-pulse period boundary nearest to
    t_s = pi/(2*omega_s); switching mid-period would leave residual optical
    correlations.
    """
    from .analytics import effective_model  # local import to avoid a cycle

    model = effective_model(params)
    if model.regime != "Stable":
        raise UnstableRegime(
            f"freeze requires sigma > -omega_m/4, got sigma = {model.sigma}"
        )
    period = 4.0 * params.t0
    if n_pre_periods is None:
        n_pre_periods = max(1, round(model.t_s / period))
    pre = four_pulse_schedule(params.phi, params.t0, n_pre_periods)
    switch_time = pre.total_time

    t_prime = frozen_interval(params)
    angles = _period_angles(params.phi)
    events = list(pre.events)
    t = switch_time
    for _ in range(n_post_periods):
        for theta in angles:
            events.append(ScheduleEvent(FREE, t, duration=t_prime))
            t += t_prime
            events.append(ScheduleEvent(PULSE, t, angle=theta))
    return PulseSchedule(tuple(events), total_time=t, switch_time=switch_time)


def perturb_schedule(
    schedule: PulseSchedule,
    angle_sigma_frac: float,
    interval_sigma_frac: float,
    seed: int,
) -> PulseSchedule:
    """Gaussian jitter on pulse angles and/or intervals, deterministic in seed.

    Angles: Normal(nominal, frac*|nominal|).  Intervals: Normal(nominal,
    frac*nominal), redrawn while non-positive (redrawing, not clamping, keeps
    the distribution shape; at frac = 0.1 a redraw has probability < 1e-22).
    """
    if angle_sigma_frac < 0 or interval_sigma_frac < 0:
        raise ValueError("sigma fractions must be >= 0")
    if angle_sigma_frac == 0 and interval_sigma_frac == 0:
        return schedule

    rng = np.random.default_rng(seed)
    events = []
    t = 0.0
    switch_time = schedule.switch_time
    for ev in schedule.events:
        if ev.kind == FREE:
            if schedule.switch_time is not None and ev.start_time == schedule.switch_time:
                switch_time = t
            dur = ev.duration
            if interval_sigma_frac > 0:
                dur = rng.normal(ev.duration, interval_sigma_frac * ev.duration)
                while dur <= 0:
                    dur = rng.normal(ev.duration, interval_sigma_frac * ev.duration)
            events.append(replace(ev, start_time=t, duration=dur))
            t += dur
        else:
            angle = ev.angle
            if angle_sigma_frac > 0:
                angle = rng.normal(ev.angle, angle_sigma_frac * abs(ev.angle))
            events.append(replace(ev, start_time=t, angle=angle))
    return PulseSchedule(tuple(events), total_time=t, switch_time=switch_time)


def schedule_to_text(schedule: PulseSchedule) -> str:
    """Audit/replay serialization: one event per line."""
    lines = ["# squeeze-sim schedule v1"]
    if schedule.switch_time is not None:
        lines.append(f"switch_time = {schedule.switch_time!r}")
    lines.append(f"total_time = {schedule.total_time!r}")
    for ev in schedule.events:
        if ev.kind == FREE:
            lines.append(f"free start={ev.start_time!r} duration={ev.duration!r}")
        else:
            lines.append(f"pulse start={ev.start_time!r} angle={ev.angle!r}")
    return "\n".join(lines) + "\n"


def schedule_from_text(text: str) -> PulseSchedule:
    events = []
    switch_time = None
    total_time = 0.0
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("switch_time"):
            switch_time = float(line.split("=", 1)[1])
        elif line.startswith("total_time"):
            total_time = float(line.split("=", 1)[1])
        else:
            kind, *parts = line.split()
            kv = dict(p.split("=") for p in parts)
            if kind == FREE:
                events.append(
                    ScheduleEvent(FREE, float(kv["start"]), duration=float(kv["duration"]))
                )
            else:
                events.append(
                    ScheduleEvent(PULSE, float(kv["start"]), angle=float(kv["angle"]))
                )
    return PulseSchedule(tuple(events), total_time=total_time, switch_time=switch_time)
