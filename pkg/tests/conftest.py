import dataclasses

import pytest

from incidentstats.clean import AnalysisRecord, TriState, build_analysis_table
from incidentstats.cli.synth import SynthSpec, generate_synthetic
from incidentstats.ingest import load_tables

MONTHLY = [266, 231, 235, 201, 253, 100, 70, 172, 344, 319, 203, 182]

_BASE = dict(id="X", year=2000, month=1, latitude=40.0, longitude=-90.0, killed=0, wounded=1,
             casualties=1, shots_fired=2, shooter_age=17.0, shooter_gender="male", race="white",
             weapon_type="handgun", targets="victims targeted",
             during_classes=TriState.NO, accomplice=TriState.NO, hostages=TriState.NO,
             shooter_killed=TriState.NO, gang_related=TriState.NO, bullied=TriState.NO,
             domestic_violence=TriState.NO, location_type="Inside")


def make_record(**kw):
    fields = dict(_BASE, **kw)
    if "casualties" not in kw:
        fields["casualties"] = fields["killed"] + fields["wounded"]
    return AnalysisRecord(**fields)


@pytest.fixture
def record_factory():
    return make_record


@pytest.fixture(scope="session")
def synth_tables():
    return generate_synthetic(SynthSpec(), seed=42)


@pytest.fixture(scope="session")
def synth_joined(synth_tables):
    t = synth_tables
    return load_tables(t["incidents.csv"], t["shooters.csv"], t["weapons.csv"], t["victims.csv"])


@pytest.fixture(scope="session")
def synth_records(synth_joined):
    records, _ = build_analysis_table(synth_joined)
    return records


def replace(record, **kw):
    return dataclasses.replace(record, **kw)
