"""Imputation and merging rules that flatten joined incident data into one
`AnalysisRecord` per incident, plus the era split and the analysis-table
CSV format used by every downstream command."""
from __future__ import annotations

import csv
import io
import re
from collections import Counter
from dataclasses import dataclass, fields
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

from .errors import DataError
from .ingest import (LOCATION_TYPES, TARGETS, Diagnostic, IncidentBundle, JoinResult,
                     RawShooter, normalize_text)
from .stats.descriptive import median


class TriState(str, Enum):
    YES = "yes"
    NO = "no"
    MISSING = "NA"


class Era(str, Enum):
    ALL = "all"
    PRE2018 = "pre2018"
    POST2018 = "post2018"


GENDERS = ("male", "female", "multiple", "unknown")
RACES = ("black", "white", "hispanic", "asian", "other", "multiple")
WEAPON_TYPES = ("handgun", "multiple handguns", "rifle", "multiple rifles", "shotgun",
                "other", "unknown", "multiple unknown", "no data")

_GENDER_WORDS = {"male": "male", "m": "male", "man": "male", "boy": "male",
                 "female": "female", "f": "female", "woman": "female", "girl": "female"}
_RACE_WORDS = {
    "black": "black", "african american": "black",
    "white": "white", "caucasian": "white",
    "hispanic": "hispanic", "latino": "hispanic", "latina": "hispanic",
    "hispanic/latino": "hispanic",
    "asian": "asian",
    "other": "other", "indigenous": "other", "native american": "other",
    "american indian": "other", "hawaiian/pacific island": "other",
    "pacific islander": "other", "middle eastern": "other",
}
_WEAPON_WORDS = {"handgun": "handgun", "pistol": "handgun", "revolver": "handgun",
                 "rifle": "rifle", "shotgun": "shotgun", "other": "other",
                 "unknown": "unknown", "no data": "unknown", "": "unknown"}
_MULTIPLE_OF = {"handgun": "multiple handguns", "rifle": "multiple rifles"}
_AGE_KEYWORDS = ("child", "teen", "adult")


@dataclass(frozen=True)
class AgeImputationPolicy:
    overall_median: float
    child_median: float
    teen_median: float
    adult_median: float

    def for_keyword(self, keyword):
        return {"child": self.child_median, "teen": self.teen_median,
                "adult": self.adult_median}[keyword]


@dataclass(frozen=True)
class AnalysisRecord:
    id: str
    year: int
    month: int
    latitude: float
    longitude: float
    killed: int
    wounded: int
    casualties: int
    shots_fired: Optional[int]
    shooter_age: float
    shooter_gender: str
    race: Optional[str]
    weapon_type: str
    targets: Optional[str]
    during_classes: TriState
    accomplice: TriState
    hostages: TriState
    shooter_killed: TriState
    gang_related: TriState
    bullied: TriState
    domestic_violence: TriState
    location_type: Optional[str]


TRISTATE_FIELDS = ("during_classes", "accomplice", "hostages", "shooter_killed",
                   "gang_related", "bullied", "domestic_violence")
CLEAN_COLUMNS = tuple(f.name for f in fields(AnalysisRecord))


def _numeric_age(raw):
    return int(raw) if re.fullmatch(r"\d+", raw or "") else None


def _age_stratum(age):
    if age <= 12:
        return "child"
    if age <= 17:
        return "teen"
    return "adult"


def compute_age_policy(shooters: Iterable[RawShooter]) -> AgeImputationPolicy:
    """Medians of the numeric ages, overall and per child/teen/adult stratum.

    A stratum with no numeric ages falls back to the overall median.
    """
    ages = [a for a in (_numeric_age(s.age_raw) for s in shooters) if a is not None]
    if not ages:
        raise DataError("cannot impute shooter ages: no numeric ages present")
    overall = median(ages)
    strata = {"child": [], "teen": [], "adult": []}
    for a in ages:
        strata[_age_stratum(a)].append(a)
    meds = {k: (median(v) if v else overall) for k, v in strata.items()}
    return AgeImputationPolicy(overall, meds["child"], meds["teen"], meds["adult"])


def impute_age(age_raws: Sequence[str], policy: AgeImputationPolicy,
               incident: str = "") -> Tuple[float, List[Diagnostic]]:
    """Impute each shooter's age and average them for the incident."""
    diagnostics = []
    imputed = []
    for raw in age_raws:
        norm = normalize_text(raw or "")
        numeric = _numeric_age(norm)
        if numeric is not None:
            imputed.append(float(numeric))
        elif norm in _AGE_KEYWORDS:
            imputed.append(float(policy.for_keyword(norm)))
        else:
            if norm:
                diagnostics.append(Diagnostic("shooters", 0, "age",
                                              f"incident {incident}: unrecognised age "
                                              f"{raw!r} treated as blank"))
            imputed.append(float(policy.overall_median))
    if not imputed:
        return float(policy.overall_median), diagnostics
    return sum(imputed) / len(imputed), diagnostics


def merge_gender(genders: Sequence[str]) -> str:
    known = {_GENDER_WORDS.get(normalize_text(g)) for g in genders} - {None}
    if not known:
        return "unknown"
    if len(known) == 1:
        return known.pop()
    return "multiple"


def merge_race(races: Sequence[str]) -> Optional[str]:
    known = {_RACE_WORDS.get(normalize_text(r)) for r in races} - {None}
    if not known:
        return None
    if len(known) == 1:
        return known.pop()
    return "multiple"


def normalize_weapon(text: str) -> str:
    return _WEAPON_WORDS.get(normalize_text(text), "other")


def merge_weapon(classes: Sequence[str]) -> str:
    norm = [normalize_weapon(c) for c in classes]
    if not norm:
        return "no data"
    if len(norm) == 1:
        return norm[0]
    kinds = set(norm)
    if len(kinds) == 1:
        return _MULTIPLE_OF.get(norm[0], "multiple unknown")
    return "multiple unknown"


def merge_tristate(values: Sequence[Optional[bool]]) -> TriState:
    if any(v is True for v in values):
        return TriState.YES
    if any(v is False for v in values):
        return TriState.NO
    return TriState.MISSING


def _tristate(value: Optional[bool]) -> TriState:
    return merge_tristate([value])


def build_analysis_table(joined, policy: Optional[AgeImputationPolicy] = None
                         ) -> Tuple[List[AnalysisRecord], List[Diagnostic]]:
    """Flatten joined incidents into analysis records ordered by (year, month, id)."""
    entries = joined.entries if isinstance(joined, JoinResult) else joined
    bundles: List[IncidentBundle] = list(entries.values())
    if policy is None:
        policy = compute_age_policy(s for b in bundles for s in b.shooters)
    records, diagnostics = [], []
    for inc, shooters, weapons, _victims in bundles:
        if getattr(inc, "date", None) is None:
            diagnostics.append(Diagnostic("incidents", inc.source_row, "date",
                                          "no parseable date; incident excluded"))
            continue
        age, diags = impute_age([s.age_raw for s in shooters], policy, inc.id)
        diagnostics.extend(diags)
        records.append(AnalysisRecord(
            id=inc.id,
            year=inc.date.year,
            month=inc.date.month,
            latitude=inc.latitude,
            longitude=inc.longitude,
            killed=inc.killed,
            wounded=inc.wounded,
            casualties=inc.killed + inc.wounded,
            shots_fired=inc.shots_fired,
            shooter_age=age,
            shooter_gender=merge_gender([s.gender_raw for s in shooters]),
            race=merge_race([s.race_raw for s in shooters]),
            weapon_type=merge_weapon([w.weapon_class for w in weapons]),
            targets=inc.targets,
            during_classes=_tristate(inc.during_classes),
            accomplice=_tristate(inc.accomplice),
            hostages=_tristate(inc.hostages),
            shooter_killed=_tristate(inc.shooter_killed),
            gang_related=_tristate(inc.gang_related),
            bullied=merge_tristate([s.bullied for s in shooters]),
            domestic_violence=merge_tristate([s.domestic_violence for s in shooters]),
            location_type=inc.location_type,
        ))
    records.sort(key=lambda r: (r.year, r.month, r.id))
    return records, diagnostics


def split_era(records: Iterable[AnalysisRecord], selector) -> List[AnalysisRecord]:
    era = Era(selector)
    if era is Era.PRE2018:
        return [r for r in records if r.year <= 2017]
    if era is Era.POST2018:
        return [r for r in records if r.year >= 2018]
    return list(records)


# analysis-table CSV round trip

_NA = "NA"


def _fmt(value):
    if value is None:
        return _NA
    if isinstance(value, TriState):
        return value.value
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_clean_table(records: Iterable[AnalysisRecord]) -> bytes:
    buf = io.StringIO(newline="")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CLEAN_COLUMNS)
    for rec in records:
        writer.writerow([_fmt(getattr(rec, col)) for col in CLEAN_COLUMNS])
    return buf.getvalue().encode("utf-8")


def _opt(parse):
    def inner(text):
        return None if text == _NA else parse(text)
    return inner


def _member(allowed):
    def inner(text):
        if text not in allowed:
            raise ValueError(f"{text!r} is not one of {', '.join(allowed)}")
        return text
    return inner


_READERS = {
    "id": str, "year": int, "month": int, "latitude": float, "longitude": float,
    "killed": int, "wounded": int, "casualties": int, "shots_fired": _opt(int),
    "shooter_age": float, "shooter_gender": _member(GENDERS),
    "race": _opt(_member(RACES)), "weapon_type": _member(WEAPON_TYPES),
    "targets": _opt(_member(TARGETS)), "location_type": _opt(_member(LOCATION_TYPES)),
    **{name: TriState for name in TRISTATE_FIELDS},
}


def read_clean_table(data: bytes) -> List[AnalysisRecord]:
    """Parse an analysis-table CSV; any malformed row is a `DataError`."""
    reader = csv.reader(io.StringIO(data.decode("utf-8-sig"), newline=""))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != CLEAN_COLUMNS:
        raise DataError("analysis table header does not match the expected columns: "
                        + ",".join(CLEAN_COLUMNS))
    records = []
    for row_no, row in enumerate(reader, start=1):
        if not any(c.strip() for c in row):
            continue
        if len(row) != len(CLEAN_COLUMNS):
            raise DataError(f"analysis table row {row_no}: expected "
                            f"{len(CLEAN_COLUMNS)} fields, found {len(row)}")
        values = {}
        for col, text in zip(CLEAN_COLUMNS, row):
            try:
                values[col] = _READERS[col](text)
            except ValueError as exc:
                raise DataError(f"analysis table row {row_no}, column {col}: {exc}") from None
        rec = AnalysisRecord(**values)
        if rec.casualties != rec.killed + rec.wounded:
            raise DataError(f"analysis table row {row_no}: casualties != killed + wounded")
        if not 1 <= rec.month <= 12:
            raise DataError(f"analysis table row {row_no}: month out of range")
        records.append(rec)
    return records


def raw_numeric_ages(joined) -> List[int]:
    """Numeric shooter ages as recorded, before any imputation."""
    entries = joined.entries if isinstance(joined, JoinResult) else joined
    return [a for b in entries.values() for a in (_numeric_age(s.age_raw) for s in b.shooters)
            if a is not None]


def shooter_age_na_count(joined) -> int:
    entries = joined.entries if isinstance(joined, JoinResult) else joined
    return sum(1 for b in entries.values() for s in b.shooters if _numeric_age(s.age_raw) is None)


def victim_breakdown(joined):
    """Percentage of victims per category for injury, gender, affiliation, age and race."""
    entries = joined.entries if isinstance(joined, JoinResult) else joined
    victims = [v for b in entries.values() for v in b.victims]
    out = {}
    for attr in ("injury", "gender", "affiliation", "age_class", "race"):
        counts = Counter(getattr(v, attr) for v in victims if getattr(v, attr) is not None)
        total = sum(counts.values())
        out[attr] = sorted(((k, 100.0 * c / total) for k, c in counts.items()),
                           key=lambda kv: (-kv[1], kv[0])) if total else []
    return out

