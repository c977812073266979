"""Circular-orbit constellation kinematics, visibility, and handover bookkeeping.

Geometry lives in an Earth-centered inertial frame (meters). Satellites fly circular
orbits, so the orbital radius is constant and the along-track angle advances linearly
at the orbit's angular velocity. Time is discrete: slot index t, slot_duration seconds
per slot. Angles are radians everywhere inside this module; the config boundary deals
in degrees.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Earth mass is stored as mu/G so the product G*M_e reproduces the standard
# gravitational parameter 3.986004418e14 m^3/s^2 to double precision.
_G_DEFAULT = 6.67430e-11
_ME_DEFAULT = 5.972168494074286e24


@dataclass(frozen=True)
class PhysicalConstants:
    """Physical constants used by the kinematics.

    Attributes:
        gravitational_constant: G in m^3 kg^-1 s^-2.
        earth_mass: M_e in kg.
        earth_radius: mean Earth radius in m.
    """

    gravitational_constant: float = _G_DEFAULT
    earth_mass: float = _ME_DEFAULT
    earth_radius: float = 6.371e6

    @property
    def mu(self) -> float:
        """Standard gravitational parameter G*M_e (m^3/s^2)."""
        return self.gravitational_constant * self.earth_mass


@dataclass(frozen=True)
class OrbitalElements:
    """Elements of one circular-orbit satellite.

    Attributes:
        altitude: height above the Earth surface in m (orbit radius = R_e + altitude).
        inclination: orbit plane inclination in rad.
        raan: right ascension of the ascending node in rad.
        arg_perigee_init: initial argument-of-latitude offset in rad.
        true_anomaly: fixed anomaly offset in rad (circular orbit: only the sum
            arg_perigee_init + true_anomaly matters; both are kept for interface
            symmetry with explicit element lists).
        eccentricity: must be 0.0; the model is circular-only.
        constants: physical constants used for derived quantities.
    """

    altitude: float
    inclination: float
    raan: float
    arg_perigee_init: float
    true_anomaly: float
    eccentricity: float = 0.0
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self) -> None:
        if self.eccentricity != 0.0:
            raise ValueError("only circular orbits are supported (eccentricity must be 0)")
        if self.altitude <= 0.0:
            raise ValueError("altitude must be positive")

    @property
    def orbit_radius(self) -> float:
        """Geocentric orbit radius H = R_e + altitude (m)."""
        return self.constants.earth_radius + self.altitude

    @property
    def period(self) -> float:
        """Orbital period tau = 2*pi*sqrt(H^3/(G*M_e)) (s)."""
        return TWO_PI * math.sqrt(self.orbit_radius**3 / self.constants.mu)

    @property
    def angular_velocity(self) -> float:
        """Mean motion 2*pi/tau (rad/s); positive by construction."""
        return TWO_PI / self.period


def argument_of_latitude(elements: OrbitalElements, t: int, slot_duration: float) -> float:
    """Along-track angle at slot t, normalized into [0, 2*pi) before the anomaly offset.

    The elapsed angle t*slot_duration*angular_velocity is wrapped mod 2*pi (the angle
    is periodic in the orbit, not in wall time), then shifted by the fixed offsets.
    """
    swept = (t * slot_duration * elements.angular_velocity) % TWO_PI
    return elements.arg_perigee_init + swept + elements.true_anomaly


def satellite_position(elements: OrbitalElements, t: int, slot_duration: float) -> np.ndarray:
    """Inertial position (3,) of the satellite at slot t.

    The orbit is the great circle through the ascending node (longitude raan) with the
    given inclination; the satellite sits at argument_of_latitude along it.
    """
    u = argument_of_latitude(elements, t, slot_duration)
    h = elements.orbit_radius
    cos_u, sin_u = math.cos(u), math.sin(u)
    cos_raan, sin_raan = math.cos(elements.raan), math.sin(elements.raan)
    cos_inc, sin_inc = math.cos(elements.inclination), math.sin(elements.inclination)
    return np.array(
        [
            h * (cos_u * cos_raan - sin_u * cos_inc * sin_raan),
            h * (cos_u * sin_raan + sin_u * cos_inc * cos_raan),
            h * sin_u * sin_inc,
        ]
    )


def constellation_positions(
    constellation: Sequence[OrbitalElements], t: int, slot_duration: float
) -> np.ndarray:
    """Positions (N, 3) of every satellite at slot t."""
    return np.stack([satellite_position(e, t, slot_duration) for e in constellation])


def elevation_angles(positions: np.ndarray, observer: np.ndarray) -> np.ndarray:
    """Elevation (rad) of each satellite above the observer's local horizontal.

    The observer's zenith is its geocentric direction; elevation is the angle of the
    observer->satellite ray above the plane normal to that zenith.
    """
    observer = np.asarray(observer, dtype=float)
    up = observer / np.linalg.norm(observer)
    rel = np.asarray(positions, dtype=float) - observer
    dist = np.linalg.norm(rel, axis=-1)
    sin_el = (rel @ up) / dist
    return np.arcsin(np.clip(sin_el, -1.0, 1.0))


def visible_set(
    positions: np.ndarray, observer: np.ndarray, min_elevation: float
) -> list[int]:
    """Sorted indices of satellites at or above min_elevation (rad) for the observer."""
    el = elevation_angles(positions, observer)
    return [int(i) for i in np.nonzero(el >= min_elevation)[0]]


@dataclass
class HandoverLedger:
    """Counts handover events over a selection sequence.

    A handover is a slot whose recorded selection differs from the previous recorded
    selection; the first recorded selection never counts. Slots with no selection
    (nothing visible) record nothing and do not break the comparison chain.
    """

    current_selection: int | None = None
    handover_count: int = 0
    history: list[int] = field(default_factory=list)

    def record(self, selection: int) -> bool:
        """Record one slot's selection; returns True when it was a handover."""
        switched = self.current_selection is not None and selection != self.current_selection
        if switched:
            self.handover_count += 1
        self.current_selection = int(selection)
        self.history.append(int(selection))
        return switched
