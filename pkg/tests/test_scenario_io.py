import json

import numpy as np
import pytest

from spectrumspace import (
    AccessRequest,
    PowerField,
    ScenarioValidationError,
    SpectrumQuantity,
)
from spectrumspace.scenario_io import (
    PolicyParams,
    ScenarioFormatError,
    document_to_dict,
    export_field,
    format_number,
    load_document,
    load_scenario,
    parse_document,
    quantity_to_dict,
    scenario_to_dict,
    write_report,
)

MINIMAL = {
    "grid": {"origin": [0.0, 0.0], "cell_size": 100.0, "n_x": 12, "n_y": 1},
    "bounds": {"p_max_dbm": 30.0, "p_min_dbm": -125.0},
}

FULL = {
    **MINIMAL,
    "dims": {"bands": 2, "quanta": 2, "band_width_hz": 5e6, "quantum_duration_s": 0.5},
    "propagation": {"model": "log-distance", "path_loss_exponent": 2.7,
                    "reference_distance_m": 1.0, "reference_loss_db": 42.0,
                    "min_distance_clamp_m": 2.0},
    "networks": [
        {
            "id": "a",
            "transmitters": [
                {"id": "a-tx", "position": [50.0, 50.0], "tx_power_dbm": 30.0,
                 "band": 0, "quanta": [0, 1],
                 "pattern": {"kind": "sectored", "boresight_deg": 10.0,
                             "beamwidth_deg": 90.0, "main_gain_db": 6.0,
                             "back_gain_db": -20.0}},
            ],
            "receivers": [
                {"id": "a-rx", "position": [150.0, 50.0], "band": 0, "quanta": [0, 1],
                 "beta_db": 10.0, "noise_floor_dbm": -100.0, "linked_tx": "a-tx"},
            ],
        },
        {
            "id": "b",
            "transmitters": [
                {"id": "b-tx", "position": [650.0, 50.0], "tx_power_dbm": 12.0,
                 "band": 1, "quanta": [1]},
            ],
        },
    ],
    "requests": [
        {"id": "r1", "position": [250.0, 50.0], "desired_dbm": 20.0,
         "min_useful_dbm": -10.0, "required_bands": 1, "acceptable_bands": [0, 1],
         "quanta": [0], "priority": 2},
    ],
    "policy": {"margin_db": 3.0, "sensitivity_dbm": -85.0, "tolerance_db": 1.0,
               "price_rate": 0.5,
               "price_rates": [{"band": 0, "quantum": 0, "rate": 2.0}]},
}


class TestParseDocument:
    def test_minimal_document(self):
        doc = parse_document(MINIMAL)
        scn = doc.scenario
        assert scn.networks == ()
        assert (scn.grid.n_x, scn.grid.n_y, scn.grid.cell_size) == (12, 1, 100.0)
        assert (scn.dims.b_hat, scn.dims.t_hat) == (1, 1)
        assert scn.propagation.model == "log-distance"
        assert scn.propagation.path_loss_exponent == 2.0
        assert doc.requests == ()
        assert doc.policy == PolicyParams()

    def test_full_document(self):
        doc = parse_document(FULL)
        scn = doc.scenario
        assert {net.id for net in scn.networks} == {"a", "b"}
        tx = scn.transmitter("a-tx")
        assert tx.pattern.kind == "sectored"
        assert tx.pattern.main_gain_db == 6.0
        assert scn.receiver("a-rx").linked_tx_id == "a-tx"
        assert scn.propagation.path_loss_exponent == 2.7
        assert scn.dims.band_width_hz == 5e6
        assert doc.requests == (AccessRequest(
            request_id="r1", position=(250.0, 50.0), desired_dbm=20.0,
            min_useful_dbm=-10.0, required_bands=1,
            acceptable_bands=frozenset({0, 1}), quanta=frozenset({0}), priority=2),)
        assert doc.policy.margin_db == 3.0
        assert doc.policy.price_rates == ((0, 0, 2.0),)

    def test_round_trip_is_identity(self):
        doc = parse_document(FULL)
        again = parse_document(document_to_dict(doc))
        assert again.scenario == doc.scenario
        assert again.requests == doc.requests
        assert again.policy == doc.policy

    def test_canonical_dict_is_stable(self):
        doc = parse_document(FULL)
        first = document_to_dict(doc)
        second = document_to_dict(parse_document(first))
        assert first == second

    def test_unknown_top_level_field(self):
        with pytest.raises(ScenarioFormatError, match="'foo'"):
            parse_document({**MINIMAL, "foo": 1})

    def test_unknown_nested_field_carries_its_path(self):
        data = json.loads(json.dumps(FULL))
        data["networks"][0]["transmitters"][0]["power"] = 10
        with pytest.raises(ScenarioFormatError,
                           match=r"networks\[0\].transmitters\[0\].*'power'"):
            parse_document(data)

    def test_missing_required_fields(self):
        with pytest.raises(ScenarioFormatError, match="missing required field 'grid'"):
            parse_document({"bounds": MINIMAL["bounds"]})
        broken = {"grid": MINIMAL["grid"], "bounds": {"p_max_dbm": 30.0}}
        with pytest.raises(ScenarioFormatError, match="'p_min_dbm'"):
            parse_document(broken)

    def test_booleans_are_not_numbers(self):
        data = json.loads(json.dumps(FULL))
        data["networks"][0]["transmitters"][0]["tx_power_dbm"] = True
        with pytest.raises(ScenarioFormatError, match="expected a number"):
            parse_document(data)
        bad_count = json.loads(json.dumps(MINIMAL))
        bad_count["grid"]["n_x"] = True
        with pytest.raises(ScenarioFormatError, match="expected an integer"):
            parse_document(bad_count)

    def test_non_finite_numbers_rejected(self):
        data = json.loads(json.dumps(MINIMAL))
        data["bounds"]["p_max_dbm"] = float("inf")
        with pytest.raises(ScenarioFormatError, match="finite"):
            parse_document(data)

    def test_malformed_position(self):
        data = json.loads(json.dumps(FULL))
        data["networks"][0]["transmitters"][0]["position"] = [1.0]
        with pytest.raises(ScenarioFormatError, match=r"expected \[x, y\]"):
            parse_document(data)

    def test_free_space_refuses_an_exponent(self):
        data = json.loads(json.dumps(MINIMAL))
        data["propagation"] = {"model": "free-space", "path_loss_exponent": 3.0}
        with pytest.raises(ScenarioFormatError, match="'path_loss_exponent'"):
            parse_document(data)

    def test_unknown_pattern_kind(self):
        data = json.loads(json.dumps(FULL))
        data["networks"][0]["transmitters"][0]["pattern"] = {"kind": "dish"}
        with pytest.raises(ScenarioFormatError, match="'dish'"):
            parse_document(data)

    def test_omni_pattern_takes_no_shape_fields(self):
        data = json.loads(json.dumps(FULL))
        data["networks"][0]["transmitters"][0]["pattern"] = {
            "kind": "omni", "beamwidth_deg": 90.0}
        with pytest.raises(ScenarioFormatError, match="'beamwidth_deg'"):
            parse_document(data)

    def test_validation_failures_are_forwarded_together(self):
        data = json.loads(json.dumps(FULL))
        data["networks"][0]["transmitters"][0]["tx_power_dbm"] = 40.0
        data["networks"][0]["receivers"][0]["linked_tx"] = "ghost"
        with pytest.raises(ScenarioValidationError) as err:
            parse_document(data)
        text = str(err.value)
        assert "power above p_max" in text
        assert "dangling link" in text


class TestLoadDocument:
    def test_load_and_validate(self, tmp_path):
        path = tmp_path / "scenario.json"
        path.write_text(json.dumps(FULL))
        scn = load_scenario(path)
        assert scn == parse_document(FULL).scenario

    def test_missing_file_is_an_io_error(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_document(tmp_path / "nope.json")

    def test_malformed_json_carries_line_info(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text('{"grid": }')
        with pytest.raises(ScenarioFormatError, match="line 1 column 10"):
            load_document(path)


class TestExportField:
    def test_single_cell_raster(self, tmp_path):
        path = tmp_path / "field.csv"
        export_field(PowerField(0, 0, np.full((1, 1), -125.0)), path)
        assert path.read_bytes() == b"# band=0 quantum=0 unit=dBm\n-125.0000\n"

    def test_uniform_two_by_two(self, tmp_path):
        path = tmp_path / "field.csv"
        export_field(PowerField(1, 2, np.full((2, 2), 30.0)), path)
        assert path.read_bytes() == (
            b"# band=1 quantum=2 unit=dBm\n30.0000,30.0000\n30.0000,30.0000\n")

    def test_row_zero_is_minimum_y(self, tmp_path):
        path = tmp_path / "field.csv"
        export_field(PowerField(0, 0, np.array([[1.0, 2.0], [3.0, 4.0]])), path)
        lines = path.read_text().splitlines()
        assert lines[1] == "1.0000,2.0000"
        assert lines[2] == "3.0000,4.0000"

    def test_re_export_is_byte_identical(self, tmp_path):
        values = np.linspace(-125.0, 30.0, 12).reshape(3, 4)
        first, second = tmp_path / "one.csv", tmp_path / "two.csv"
        export_field(PowerField(0, 0, values), first)
        export_field(PowerField(0, 0, values), second)
        assert first.read_bytes() == second.read_bytes()


class TestReportHelpers:
    def test_format_number_pins_12_significant_digits(self):
        assert format_number(1.0 / 3.0) == 0.333333333333
        assert format_number(999999.9999999997) == 1000000.0
        assert format_number(0.0) == 0.0
        assert format_number(84998.5) == 84998.5

    def test_quantity_serialization(self):
        quantity = SpectrumQuantity(6.5, {(1, 0): 2.5, (0, 0): 4.0})
        out = quantity_to_dict(quantity)
        assert out["unit"] == "W*m^2"
        assert out["value"] == 6.5
        assert out["breakdown"] == [
            {"band": 0, "quantum": 0, "value": 4.0},
            {"band": 1, "quantum": 0, "value": 2.5},
        ]
        assert "breakdown" not in quantity_to_dict(SpectrumQuantity(1.0))

    def test_write_report_deterministic(self, tmp_path):
        report = {"b": 1, "a": {"z": [1, 2], "y": 0.5}}
        one, two = tmp_path / "one.json", tmp_path / "two.json"
        write_report(report, one)
        write_report(report, two)
        assert one.read_bytes() == two.read_bytes()
        assert one.read_text().endswith("\n")
        assert json.loads(one.read_text()) == report
        assert one.read_text().index('"a"') < one.read_text().index('"b"')

    def test_scenario_to_dict_parses_back(self):
        scn = parse_document(FULL).scenario
        assert parse_document(scenario_to_dict(scn)).scenario == scn
