import json

import numpy as np
import pytest

from fairedge.fairopt import SolveOptions, solve_alternating
from fairedge.exitpolicy import evaluate
from fairedge.scenario import (
    BUNDLE_SCHEMA,
    BundleSchemaError,
    ScenarioParseError,
    build_bundle,
    bundle_from_dict,
    bundle_to_dict,
    config_digest,
    load_scenario,
    max_secrecy_rate,
    parse_document,
    parse_scenario,
    random_scenario,
    random_scenario_config,
    read_bundle,
    realize,
    serialize_document,
    write_bundle,
)
from fairedge.trace import save_stream, generate_stream, GeneratorParams


MINIMAL_DOC = {
    "security_levels": 2,
    "bandwidth_cap_hz": 2e6,
    "power_cap_w": 0.1,
    "ues": [
        {
            "weight": 1.0,
            "security_level": 1,
            "feature_size_bits": 2e4,
            "deadline_s": 0.5,
            "channel": {
                "gain": 1e-5,
                "noise_psd_w_per_hz": 1e-13,
                "eavesdropper_gain": 0.0,
                "eavesdropper_noise_psd_w_per_hz": 1e-13,
            },
            "energy": {"joules_per_access": 1e-9, "access_counts": [1000, 2000]},
            "trace": {
                "generator": {
                    "layer_count": 3,
                    "critical_prior": 0.4,
                    "critical_drift": 0.8,
                    "normal_drift": -0.8,
                    "noise_std": 0.4,
                    "seed": 7,
                    "count": 20,
                }
            },
        }
    ],
    "ens": [{"bandwidth_hz": 5e6, "compute_units": 6, "security_level": 1}],
}


class TestParseScenario:
    def test_minimal_document_parses(self):
        scenario = parse_scenario(MINIMAL_DOC)
        assert len(scenario.ues) == 1 and len(scenario.ens) == 1
        assert len(scenario.ues[0].stream.traces) == 20

    def test_parse_accepts_json_text(self):
        scenario = parse_scenario(json.dumps(MINIMAL_DOC))
        assert scenario.security_levels == 2

    def test_negative_bandwidth_names_field(self):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["ens"][0]["bandwidth_hz"] = -1.0
        with pytest.raises(ScenarioParseError, match="ens\\[0\\].bandwidth_hz"):
            parse_document(doc)

    def test_missing_channel_field_names_path(self):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        del doc["ues"][0]["channel"]["gain"]
        with pytest.raises(ScenarioParseError, match="ues\\[0\\].channel.gain"):
            parse_document(doc)

    def test_security_level_out_of_range(self):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["ens"][0]["security_level"] = 3
        with pytest.raises(ScenarioParseError, match="security_level"):
            parse_document(doc)

    def test_trace_requires_exactly_one_source(self):
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["ues"][0]["trace"] = {"file": "a.csv", "generator": {}}
        with pytest.raises(ScenarioParseError, match="trace"):
            parse_document(doc)

    def test_round_trip_is_identity_on_canonical_form(self):
        config = parse_document(MINIMAL_DOC)
        doc = serialize_document(config)
        assert parse_document(doc) == config
        assert json.dumps(doc, sort_keys=True) == json.dumps(
            serialize_document(parse_document(doc)), sort_keys=True
        )

    def test_invalid_json_text_rejected(self):
        with pytest.raises(ScenarioParseError, match="invalid JSON"):
            parse_document("{not json")

    def test_file_trace_resolves_relative_to_document(self, tmp_path):
        stream = generate_stream(
            GeneratorParams(
                layer_count=2, critical_prior=0.5, critical_drift=0.8,
                normal_drift=-0.8, noise_std=0.3, seed=1,
            ),
            10,
        )
        save_stream(stream, tmp_path / "trace.csv")
        doc = json.loads(json.dumps(MINIMAL_DOC))
        doc["ues"][0]["trace"] = {"file": "trace.csv"}
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(doc), encoding="utf-8")
        scenario = load_scenario(path)
        assert len(scenario.ues[0].stream.traces) == 10
        assert scenario.ues[0].stream.layer_count == 2


class TestRandomScenario:
    def test_same_seed_is_identical(self):
        a = random_scenario_config(3, 2, 42)
        b = random_scenario_config(3, 2, 42)
        assert a == b
        assert realize(a) == realize(b)

    def test_zero_users_rejected(self):
        with pytest.raises(ValueError):
            random_scenario(0, 1, 1)
        with pytest.raises(ValueError):
            random_scenario(1, 0, 1)

    def test_full_advantage_probability_gives_positive_secrecy_everywhere(self):
        for seed in range(10):
            scenario = random_scenario(3, 2, seed, advantage_probability=1.0)
            for i in range(3):
                assert max_secrecy_rate(scenario, i) > 0.0

    def test_zero_advantage_probability_blocks_every_link(self):
        scenario = random_scenario(3, 2, 5, advantage_probability=0.0)
        for i in range(3):
            assert max_secrecy_rate(scenario, i) == 0.0

    def test_streams_always_contain_both_classes(self):
        for seed in range(15):
            scenario = random_scenario(2, 1, 900 + seed)
            for ue in scenario.ues:
                labels = {t.true_label for t in ue.stream.traces}
                assert labels == {"critical", "normal"}


def make_bundle(seed=0):
    config = random_scenario_config(2, 2, seed)
    scenario = realize(config)
    plan, report = solve_alternating(scenario, SolveOptions(mode="exhaustive"))
    counts, metrics = [], []
    for ue, thr in zip(scenario.ues, plan.thresholds):
        c, m = evaluate(ue.stream, thr)
        counts.append(c)
        metrics.append(m)
    return build_bundle(serialize_document(config), plan, report, counts, metrics)


class TestBundles:
    def test_write_read_identity(self, tmp_path):
        bundle = make_bundle()
        path = tmp_path / "bundle.json"
        write_bundle(bundle, path)
        loaded = read_bundle(path)
        assert loaded.report == bundle.report
        assert loaded.metrics == bundle.metrics
        assert loaded.counts == bundle.counts
        assert loaded.config_digest == bundle.config_digest
        assert np.array_equal(loaded.plan.assignment, bundle.plan.assignment)
        assert loaded.plan.thresholds == bundle.plan.thresholds

    def test_rewrite_is_byte_stable(self, tmp_path):
        bundle = make_bundle(3)
        first = tmp_path / "one.json"
        second = tmp_path / "two.json"
        write_bundle(bundle, first)
        write_bundle(read_bundle(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_tampered_config_warns(self, tmp_path):
        bundle = make_bundle(1)
        path = tmp_path / "bundle.json"
        write_bundle(bundle, path)
        payload = json.loads(path.read_text())
        payload["config"]["power_cap_w"] = 999.0
        path.write_text(json.dumps(payload, sort_keys=True))
        with pytest.warns(RuntimeWarning, match="digest mismatch"):
            read_bundle(path)

    def test_unknown_schema_version_rejected(self, tmp_path):
        bundle = make_bundle(2)
        path = tmp_path / "bundle.json"
        write_bundle(bundle, path)
        payload = json.loads(path.read_text())
        payload["schema_version"] = 99
        path.write_text(json.dumps(payload))
        with pytest.raises(BundleSchemaError, match="version"):
            read_bundle(path)

    def test_schema_violation_rejected(self, tmp_path):
        bundle = make_bundle(2)
        payload = bundle_to_dict(bundle)
        del payload["report"]["objective"]
        with pytest.raises(BundleSchemaError, match="schema"):
            bundle_from_dict(payload)

    def test_digest_tracks_canonical_config(self):
        bundle = make_bundle(4)
        assert bundle.config_digest == config_digest(bundle.config)
        assert len(bundle.config_digest) == 64

    def test_payload_validates_against_published_schema(self):
        from jsonschema import validate

        payload = bundle_to_dict(make_bundle(5))
        validate(payload, BUNDLE_SCHEMA)
