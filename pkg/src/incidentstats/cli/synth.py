"""Seeded synthetic stand-in for the four-table incident dataset.

Category shares default to the observed incident breakdowns; casualties are drawn
from a negative binomial whose log-mean depends on targeting and on the
handgun category.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from ..errors import DataError

MONTHLY_COUNTS = (266, 231, 235, 201, 253, 100, 70, 172, 344, 319, 203, 182)


def _normalized(d: Dict[str, float]) -> Dict[str, float]:
    total = sum(d.values())
    return {k: v / total for k, v in d.items()}


WEAPON_SHARES = {
    "handgun": 0.7265, "multiple handguns": 0.0230, "multiple rifles": 0.0037,
    "multiple unknown": 0.0119, "no data": 0.0943, "other": 0.0492, "rifle": 0.0521,
    "shotgun": 0.0295, "unknown": 0.0098,
}
TARGET_SHARES = {"victims targeted": 0.5677, "random shooting": 0.1630, "both": 0.1438,
                 "neither": 0.1255}
LOCATION_SHARES = _normalized({"Both Inside/Outside": 1.06, "Inside": 29.99, "Off Campus": 2.84,
                               "Outside": 60.67, "School Bus": 5.18})
GENDER_SHARES = _normalized({"male": 2199, "female": 97, "transgender": 2, "": 648})
RACE_SHARES = _normalized({"black": 369, "white": 247, "hispanic": 87, "asian": 14,
                           "other": 6, "indigenous": 4, "hawaiian/pacific island": 2,
                           "middle eastern": 1})
YES_SHARES = {"during_classes": 0.61632342, "hostages": 0.02358311,
              "shooter_killed": 0.09856495, "gang_related": 0.13558442,
              "bullied": 0.0455148, "domestic_violence": 0.05226904}
VICTIM_SHARES = {
    "gender": _normalized({"male": 75.94, "female": 22.39}),
    "affiliation": _normalized({"student": 66.30, "no relation": 11.85, "teacher": 5.47,
                                "nonstudent": 4.24, "other staff": 2.48}),
    "age_class": _normalized({"teen": 54.02, "adult": 33.71, "child": 12.18}),
    "race": _normalized({"black": 50.29, "white": 35.96, "hispanic": 10.53, "asian": 2.63,
                         "unknown": 0.29, "latino": 0.29}),
}
# rough school-dense centres, (lat, lon)
_CENTRES = ((40.7, -74.0), (34.0, -118.2), (41.9, -87.6), (29.8, -95.4), (33.7, -84.4),
            (39.3, -76.6), (42.3, -83.0), (35.1, -90.0), (39.7, -105.0), (38.6, -90.2),
            (32.8, -96.8), (29.9, -90.1), (37.8, -122.3), (47.6, -122.3), (33.4, -112.1))


@dataclass
class SynthSpec:
    n_incidents: int = 2584
    first_year: int = 1966
    last_year: int = 2023
    beta: Tuple[float, float, float] = (0.5, 0.8, -0.3)
    theta: float = 1.5
    mess_rate: float = 0.05
    missing_rate: float = 0.10
    weapon_shares: Dict[str, float] = field(default_factory=lambda: dict(WEAPON_SHARES))
    target_shares: Dict[str, float] = field(default_factory=lambda: dict(TARGET_SHARES))
    location_shares: Dict[str, float] = field(default_factory=lambda: dict(LOCATION_SHARES))

    def validate(self):
        if self.n_incidents < 1:
            raise DataError("n_incidents must be positive")
        if not self.theta > 0:
            raise DataError("theta must be positive")
        if len(self.beta) != 3:
            raise DataError("beta needs three values: intercept, targeted, handgun")
        if self.last_year < self.first_year:
            raise DataError("year range is empty")
        for name in ("weapon_shares", "target_shares", "location_shares"):
            total = sum(getattr(self, name).values())
            if abs(total - 1.0) > 1e-9:
                raise DataError(f"{name} sum to {total}, not 1")
        for rate in (self.mess_rate, self.missing_rate):
            if not 0 <= rate < 1:
                raise DataError("rates must lie in [0, 1)")


def _choice(rng, shares: Dict[str, float], size=None):
    keys = list(shares)
    probs = np.array([shares[k] for k in keys])
    idx = rng.choice(len(keys), size=size, p=probs / probs.sum())
    if size is None:
        return keys[int(idx)]
    return [keys[int(i)] for i in idx]


_WEAPON_ROWS = {
    "handgun": ["handgun"], "multiple handguns": ["handgun", "handgun"],
    "multiple rifles": ["rifle", "rifle"], "multiple unknown": ["handgun", "shotgun"],
    "no data": [], "other": ["other"], "rifle": ["rifle"], "shotgun": ["shotgun"],
    "unknown": ["unknown"],
}


def _age(rng):
    u = rng.random()
    if u < 0.06:
        return int(rng.integers(6, 13))
    if u < 0.62:
        return int(np.clip(round(rng.normal(16, 1.2)), 13, 17))
    return int(min(100, 18 + round(rng.gamma(1.6, 7.0))))


def _yes_no(rng, p_yes, missing_rate):
    if rng.random() < missing_rate:
        return ""
    return "yes" if rng.random() < p_yes else "no"


def _to_csv(header, rows) -> bytes:
    buf = io.StringIO(newline="")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().encode("utf-8")


def generate_synthetic(spec: SynthSpec = None, seed: int = 42) -> Dict[str, bytes]:
    """Four CSV tables (incidents, shooters, weapons, victims) as bytes."""
    spec = spec or SynthSpec()
    spec.validate()
    rng = np.random.default_rng(seed)
    years = np.arange(spec.first_year, spec.last_year + 1)
    t = years - spec.first_year
    year_w = 22.49 + 1.855e-5 * np.exp(0.2872 * t)
    month_w = np.array(MONTHLY_COUNTS, dtype=float)
    b0, b_target, b_handgun = spec.beta

    incidents, shooters, weapons, victims = [], [], [], []
    for k in range(spec.n_incidents):
        inc_id = f"INC{k + 1:05d}"
        year = int(rng.choice(years, p=year_w / year_w.sum()))
        month = int(rng.choice(12, p=month_w / month_w.sum())) + 1
        day = int(rng.integers(1, 29))
        if rng.random() < spec.mess_rate:
            date = f"{month}/{day}/{year}"
        else:
            date = f"{year:04d}-{month:02d}-{day:02d}"
        lat0, lon0 = _CENTRES[int(rng.integers(len(_CENTRES)))]
        if rng.random() < 0.4:
            lat, lon = rng.uniform(25.0, 49.0), rng.uniform(-124.0, -67.0)
        else:
            lat, lon = lat0 + rng.normal(0, 1.2), lon0 + rng.normal(0, 1.5)
        lat = float(np.clip(lat, -90, 90))
        lon = float(np.clip(lon, -180, 180))

        weapon = _choice(rng, spec.weapon_shares)
        target = _choice(rng, spec.target_shares)
        targeted = target in ("victims targeted", "both")
        eta = b0 + b_target * targeted + b_handgun * (weapon == "handgun")
        mu = math.exp(eta)
        casualties = int(rng.negative_binomial(spec.theta, spec.theta / (spec.theta + mu)))
        killed = int(rng.binomial(casualties, 0.27))
        wounded = casualties - killed
        shots = "" if rng.random() < 0.3 else str(casualties + int(rng.poisson(3.0)))
        n_shooters = 1 if rng.random() < 0.7759 else (2 if rng.random() < 0.8 else 3)
        row = [inc_id, date, f"{lat:.5f}", f"{lon:.5f}", killed, wounded, shots,
               _yes_no(rng, YES_SHARES["during_classes"], spec.missing_rate),
               "yes" if n_shooters > 1 else "no",
               _yes_no(rng, YES_SHARES["hostages"], spec.missing_rate),
               _yes_no(rng, YES_SHARES["shooter_killed"], spec.missing_rate),
               _yes_no(rng, YES_SHARES["gang_related"], spec.missing_rate),
               "" if rng.random() < spec.missing_rate else target,
               "" if rng.random() < spec.missing_rate else _choice(rng, spec.location_shares)]
        incidents.append(row)

        race_known = rng.random() < 1 / 3
        shared_race = _choice(rng, RACE_SHARES)
        for _ in range(n_shooters):
            u = rng.random()
            age = _age(rng)
            if u < spec.mess_rate:
                age_text = ""
            elif u < 2 * spec.mess_rate:
                age_text = "child" if age <= 12 else ("teen" if age <= 17 else "adult")
            else:
                age_text = str(age)
            race = ""
            if race_known:
                race = shared_race if rng.random() < 0.9 else _choice(rng, RACE_SHARES)
            shooters.append([inc_id, age_text, _choice(rng, GENDER_SHARES), race,
                             "student" if rng.random() < 0.5 else "no relation",
                             _yes_no(rng, YES_SHARES["bullied"], spec.missing_rate),
                             _yes_no(rng, YES_SHARES["domestic_violence"], spec.missing_rate)])
        for cls in _WEAPON_ROWS[weapon]:
            weapons.append([inc_id, cls])
        injuries = ["Fatal"] * killed + ["Wounded"] * wounded
        if rng.random() < 0.15:
            injuries.append("None")
        for injury in injuries:
            victims.append([inc_id, injury] + [
                "" if rng.random() < spec.missing_rate else _choice(rng, VICTIM_SHARES[attr])
                for attr in ("gender", "affiliation", "age_class", "race")])

    if spec.mess_rate > 0 and incidents:
        dup = list(incidents[int(rng.integers(len(incidents)))])
        dup[4] = int(dup[4]) + 1
        incidents.append(dup)

    return {
        "incidents.csv": _to_csv(["incident_id", "date", "latitude", "longitude", "killed",
                                  "wounded", "shots_fired", "during_classes", "accomplice",
                                  "hostages", "shooter_killed", "gang_related", "targets",
                                  "location_type"], incidents),
        "shooters.csv": _to_csv(["incident_id", "age", "gender", "race", "affiliation",
                                 "bullied", "domestic_violence"], shooters),
        "weapons.csv": _to_csv(["incident_id", "weapon_class"], weapons),
        "victims.csv": _to_csv(["incident_id", "injury", "gender", "affiliation", "age_class",
                                "race"], victims),
    }


def synth_nb_sample(n=2000, beta=(0.5, 0.8, -0.3), theta=1.5, seed=7,
                    scales=(1.0, 2.0)):
    """Design matrix [1, x1, x2] with normal covariates and NB(mu, theta) counts."""
    rng = np.random.default_rng(seed)
    beta = np.asarray(beta, dtype=float)
    cols = [np.ones(n)] + [rng.normal(scale=s, size=n) for s in scales[: len(beta) - 1]]
    X = np.column_stack(cols)
    mu = np.exp(X @ beta)
    y = rng.negative_binomial(theta, theta / (theta + mu)).astype(float)
    return X, y
