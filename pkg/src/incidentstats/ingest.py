"""Parsing of the four incident CSV tables and their join on incident ID.

Malformed rows never raise; they come back as `Diagnostic` entries so a
caller can audit every excluded row. Only a missing mandatory column is
fatal (`SchemaError`).
"""
from __future__ import annotations

import csv
import datetime as dt
import io
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

from .errors import SchemaError


class TableKind(str, Enum):
    INCIDENTS = "incidents"
    SHOOTERS = "shooters"
    WEAPONS = "weapons"
    VICTIMS = "victims"


@dataclass(frozen=True)
class Diagnostic:
    table: str
    row: int
    column: str
    reason: str

    def __str__(self):
        return f"{self.table}\t{self.row}\t{self.column}\t{self.reason}"


TARGETS = ("victims targeted", "random shooting", "both", "neither")
LOCATION_TYPES = ("Inside", "Outside", "Both Inside/Outside", "Off Campus", "School Bus")
INJURIES = ("Fatal", "Wounded", "None", "Non-gunshot")
VICTIM_GENDERS = ("male", "female")
VICTIM_AFFILIATIONS = ("student", "no relation", "teacher", "nonstudent", "other staff")
VICTIM_AGE_CLASSES = ("child", "teen", "adult")
VICTIM_RACES = ("black", "white", "hispanic", "asian", "unknown", "latino")


@dataclass(frozen=True)
class RawIncident:
    id: str
    date: dt.date
    latitude: float
    longitude: float
    killed: int
    wounded: int
    shots_fired: Optional[int] = None
    during_classes: Optional[bool] = None
    accomplice: Optional[bool] = None
    hostages: Optional[bool] = None
    shooter_killed: Optional[bool] = None
    gang_related: Optional[bool] = None
    targets: Optional[str] = None
    location_type: Optional[str] = None
    source_row: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawShooter:
    incident: str
    age_raw: str = ""
    gender_raw: str = ""
    race_raw: str = ""
    affiliation: str = ""
    bullied: Optional[bool] = None
    domestic_violence: Optional[bool] = None
    source_row: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawWeapon:
    incident: str
    weapon_class: str = "unknown"
    source_row: int = field(default=0, compare=False)


@dataclass(frozen=True)
class RawVictim:
    incident: str
    injury: str
    gender: Optional[str] = None
    affiliation: Optional[str] = None
    age_class: Optional[str] = None
    race: Optional[str] = None
    source_row: int = field(default=0, compare=False)


class IncidentBundle(NamedTuple):
    incident: RawIncident
    shooters: Tuple[RawShooter, ...]
    weapons: Tuple[RawWeapon, ...]
    victims: Tuple[RawVictim, ...]


def normalize_text(text: str) -> str:
    return " ".join(text.strip().lower().split())


def normalize_header(name: str) -> str:
    return "_".join(name.strip().lower().replace("_", " ").split())


_MISSING = {"", "na", "n/a", "nan", "null", "unknown", "unk"}
_YES = {"yes", "y", "true", "1"}
_NO = {"no", "n", "false", "0"}
_ISO = re.compile(r"^(\d{4})-(\d{1,2})-(\d{1,2})$")
_US = re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{4})$")


def _parse_date(text):
    text = text.strip()
    m = _ISO.match(text)
    if m:
        y, mo, d = (int(g) for g in m.groups())
    else:
        m = _US.match(text)
        if not m:
            raise ValueError(f"unrecognised date {text!r} (use YYYY-MM-DD or M/D/YYYY)")
        mo, d, y = (int(g) for g in m.groups())
    return dt.date(y, mo, d)


def _parse_count(text):
    text = text.strip()
    if not re.fullmatch(r"\d+", text):
        raise ValueError(f"expected a non-negative integer, got {text!r}")
    return int(text)


def _parse_optional_count(text):
    if normalize_text(text) in _MISSING:
        return None
    return _parse_count(text)


def _parse_coord(limit):
    def parse(text):
        value = float(text.strip())
        if not -limit <= value <= limit:
            raise ValueError(f"coordinate {value} outside [-{limit}, {limit}]")
        return value
    return parse


def _parse_yes_no(text):
    norm = normalize_text(text)
    if norm in _MISSING:
        return None
    if norm in _YES:
        return True
    if norm in _NO:
        return False
    raise ValueError(f"expected yes/no, got {text!r}")


def _enum_parser(members, optional=True):
    lookup = {normalize_text(m): m for m in members}

    def parse(text):
        norm = normalize_text(text)
        if optional and norm in _MISSING:
            return None
        try:
            return lookup[norm]
        except KeyError:
            raise ValueError(f"{text!r} is not one of {', '.join(members)}") from None
    return parse


def _parse_age(text):
    norm = normalize_text(text)
    if re.fullmatch(r"[+-]?\d+(\.\d*)?", norm):
        value = float(norm)
        if value != int(value) or not 3 <= value <= 100:
            raise ValueError(f"numeric age must be an integer in [3, 100], got {text!r}")
        return str(int(value))
    return norm


def _free_text(text):
    return normalize_text(text)


def _parse_weapon_class(text):
    norm = normalize_text(text)
    return norm or "unknown"


def _parse_id(text):
    token = text.strip()
    if not token:
        raise ValueError("empty incident id")
    return token


# column -> (attribute name, parser, mandatory)
_SCHEMAS = {
    TableKind.INCIDENTS: (RawIncident, {
        "incident_id": ("id", _parse_id, True),
        "date": ("date", _parse_date, True),
        "latitude": ("latitude", _parse_coord(90.0), True),
        "longitude": ("longitude", _parse_coord(180.0), True),
        "killed": ("killed", _parse_count, True),
        "wounded": ("wounded", _parse_count, True),
        "shots_fired": ("shots_fired", _parse_optional_count, False),
        "during_classes": ("during_classes", _parse_yes_no, False),
        "accomplice": ("accomplice", _parse_yes_no, False),
        "hostages": ("hostages", _parse_yes_no, False),
        "shooter_killed": ("shooter_killed", _parse_yes_no, False),
        "gang_related": ("gang_related", _parse_yes_no, False),
        "targets": ("targets", _enum_parser(TARGETS), False),
        "location_type": ("location_type", _enum_parser(LOCATION_TYPES), False),
    }),
    TableKind.SHOOTERS: (RawShooter, {
        "incident_id": ("incident", _parse_id, True),
        "age": ("age_raw", _parse_age, True),
        "gender": ("gender_raw", _free_text, False),
        "race": ("race_raw", _free_text, False),
        "affiliation": ("affiliation", _free_text, False),
        "bullied": ("bullied", _parse_yes_no, False),
        "domestic_violence": ("domestic_violence", _parse_yes_no, False),
    }),
    TableKind.WEAPONS: (RawWeapon, {
        "incident_id": ("incident", _parse_id, True),
        "weapon_class": ("weapon_class", _parse_weapon_class, True),
    }),
    TableKind.VICTIMS: (RawVictim, {
        "incident_id": ("incident", _parse_id, True),
        "injury": ("injury", _enum_parser(INJURIES, optional=False), True),
        "gender": ("gender", _enum_parser(VICTIM_GENDERS), False),
        "affiliation": ("affiliation", _enum_parser(VICTIM_AFFILIATIONS), False),
        "age_class": ("age_class", _enum_parser(VICTIM_AGE_CLASSES), False),
        "race": ("race", _enum_parser(VICTIM_RACES), False),
    }),
}

TABLE_COLUMNS = {kind: tuple(schema[1]) for kind, schema in _SCHEMAS.items()}


def parse_table(data: bytes, kind) -> Tuple[list, List[Diagnostic]]:
    """Parse one CSV table into typed raw rows plus row diagnostics.

    Row numbers in diagnostics count data rows from 1 (the header is row 0).
    Entirely blank lines are not data rows.
    """
    kind = TableKind(kind)
    cls, schema = _SCHEMAS[kind]
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise SchemaError(f"{kind.value}: input is not valid UTF-8 ({exc})") from None
    reader = csv.reader(io.StringIO(text, newline=""))
    header = next(reader, None)
    if header is None:
        raise SchemaError(f"{kind.value}: missing header row")
    positions = {}
    for idx, name in enumerate(header):
        key = normalize_header(name)
        if key in schema and key not in positions:
            positions[key] = idx
    missing = [col for col, (_, _, mandatory) in schema.items()
               if mandatory and col not in positions]
    if missing:
        raise SchemaError(f"{kind.value}: missing mandatory column(s): {', '.join(missing)}")

    rows, diagnostics = [], []
    row_no = 0
    for record in reader:
        if not any(cell.strip() for cell in record):
            continue
        row_no += 1
        if len(record) != len(header):
            diagnostics.append(Diagnostic(kind.value, row_no, "*",
                                          f"expected {len(header)} fields, found {len(record)}"))
            continue
        values = {}
        bad = False
        for col, idx in positions.items():
            attr, parser, _ = schema[col]
            try:
                values[attr] = parser(record[idx])
            except ValueError as exc:
                diagnostics.append(Diagnostic(kind.value, row_no, col, str(exc)))
                bad = True
        if not bad:
            rows.append(cls(source_row=row_no, **values))
    return rows, diagnostics


@dataclass
class JoinResult:
    entries: Dict[str, IncidentBundle]
    diagnostics: List[Diagnostic]


def join_by_incident(incidents, shooters=(), weapons=(), victims=()) -> JoinResult:
    """Group child rows under their incident; first duplicate incident wins."""
    diagnostics = []
    heads: Dict[str, RawIncident] = {}
    for inc in incidents:
        if inc.id in heads:
            diagnostics.append(Diagnostic(
                TableKind.INCIDENTS.value, inc.source_row, "incident_id",
                f"duplicate incident {inc.id!r}; first occurrence (row "
                f"{heads[inc.id].source_row}) kept"))
            continue
        heads[inc.id] = inc
    children = {key: ([], [], []) for key in heads}
    for slot, (kind, rows) in enumerate(((TableKind.SHOOTERS, shooters),
                                         (TableKind.WEAPONS, weapons),
                                         (TableKind.VICTIMS, victims))):
        for row in rows:
            if row.incident not in children:
                diagnostics.append(Diagnostic(kind.value, row.source_row, "incident_id",
                                              f"orphan row: no incident {row.incident!r}"))
                continue
            children[row.incident][slot].append(row)
    entries = {key: IncidentBundle(heads[key], *(tuple(c) for c in children[key]))
               for key in heads}
    return JoinResult(entries, diagnostics)


def load_tables(incidents: bytes, shooters: bytes = b"", weapons: bytes = b"",
                victims: bytes = b"") -> JoinResult:
    """Parse and join all four tables; empty child inputs are allowed."""
    parsed = {}
    diagnostics = []
    for kind, data in ((TableKind.INCIDENTS, incidents), (TableKind.SHOOTERS, shooters),
                       (TableKind.WEAPONS, weapons), (TableKind.VICTIMS, victims)):
        if kind is not TableKind.INCIDENTS and not data.strip():
            parsed[kind] = []
            continue
        rows, diags = parse_table(data, kind)
        parsed[kind] = rows
        diagnostics.extend(diags)
    joined = join_by_incident(parsed[TableKind.INCIDENTS], parsed[TableKind.SHOOTERS],
                              parsed[TableKind.WEAPONS], parsed[TableKind.VICTIMS])
    joined.diagnostics[:0] = diagnostics
    return joined
