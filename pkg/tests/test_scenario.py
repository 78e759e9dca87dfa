import json

import pytest

from cavityfall import ValidationError, parse_scenario, scenario_to_dict
from cavityfall.scenario import load_scenario

MINIMAL_EXPERIMENT = {
    "experiment": {
        "lambda0": 1.064e-6,
        "sigma0": 0.1,
        "y_out": 0.5,
        "P_avg": 1e-3,
        "eta_det": 1e-3,
        "T_int": 3600,
        "Q": 7e10,
    }
}

FULL_FREEFALL = {
    "cavity": {"lambda0": 1.064e-6, "n_s": 1.43, "Q": 7e10},
    "gravity": {"g": 9.81, "n_s": 1.43},
    "propagation": {
        "grid": {"y_min": -64.0, "y_max": 64.0, "n_points": 8192},
        "dt": 8e-5,
        "t_final": 0.06,
        "sigma0": 0.1,
    },
    "output": {"directory": "out", "stride": 25},
}


def parse(document) -> object:
    return parse_scenario(json.dumps(document))


class TestDefaults:
    def test_minimal_experiment_file_gets_defaults(self):
        sc = parse(MINIMAL_EXPERIMENT)
        assert sc.experiment.width_model == "corrected"
        assert sc.experiment.n_s == 1.0
        assert sc.experiment.g == 9.81
        assert sc.cavity is None and sc.gravity is None and sc.propagation is None
        assert sc.output.directory == "out"
        assert sc.output.stride is None

    def test_gravity_inherits_cavity_medium(self):
        sc = parse({"cavity": {"lambda0": 1.064e-6, "n_s": 1.43}, "gravity": {"g": 9.81}})
        assert sc.gravity.n_s == 1.43

    def test_width_model_aliases(self):
        doc = json.loads(json.dumps(MINIMAL_EXPERIMENT))
        doc["experiment"]["width_model"] = "paper"
        assert parse(doc).experiment.width_model == "paper_verbatim"


class TestCavitySection:
    def test_both_geometry_and_wavelength_rejected(self):
        with pytest.raises(ValidationError, match="not both"):
            parse({"cavity": {"L": 1e-6, "j": 1, "lambda0": 1.064e-6}})

    def test_incomplete_geometry_rejected(self):
        with pytest.raises(ValidationError, match="either lambda0 or both L and j"):
            parse({"cavity": {"L": 1e-6}})
        with pytest.raises(ValidationError, match="either lambda0 or both L and j"):
            parse({"cavity": {"n_s": 1.43}})

    def test_wavelength_form_resolves_to_half_wave_geometry(self):
        sc = parse({"cavity": {"lambda0": 1.064e-6, "n_s": 1.43}})
        assert sc.cavity.j == 1
        assert sc.cavity.L == pytest.approx(1.064e-6 / 2.86, rel=1e-15)

    def test_direct_geometry_form(self):
        sc = parse({"cavity": {"L": 1e-6, "j": 2, "Q": 1e9}})
        assert (sc.cavity.L, sc.cavity.j, sc.cavity.Q) == (1e-6, 2, 1e9)


class TestValidationMessages:
    def test_unknown_top_level_key_named(self):
        with pytest.raises(ValidationError, match="experimnt"):
            parse({"experimnt": {}})

    def test_unknown_nested_key_has_path(self):
        doc = json.loads(json.dumps(FULL_FREEFALL))
        doc["propagation"]["grid"]["dx"] = 0.1
        with pytest.raises(ValidationError, match="propagation.grid.dx"):
            parse(doc)

    def test_unit_suffix_string_rejected(self):
        doc = json.loads(json.dumps(MINIMAL_EXPERIMENT))
        doc["experiment"]["lambda0"] = "1064nm"
        with pytest.raises(ValidationError, match="no unit suffixes"):
            parse(doc)

    def test_boolean_not_a_number(self):
        doc = json.loads(json.dumps(MINIMAL_EXPERIMENT))
        doc["experiment"]["Q"] = True
        with pytest.raises(ValidationError, match="experiment.Q"):
            parse(doc)

    def test_syntax_error_reported(self):
        with pytest.raises(ValidationError, match="syntax"):
            parse_scenario("{not json")

    def test_medium_mismatch_between_sections(self):
        doc = {"cavity": {"lambda0": 1.064e-6, "n_s": 1.43}, "gravity": {"g": 9.81, "n_s": 1.0}}
        with pytest.raises(ValidationError, match="single medium"):
            parse(doc)

    def test_invariant_violation_carries_section_prefix(self):
        doc = json.loads(json.dumps(MINIMAL_EXPERIMENT))
        doc["experiment"]["eta_det"] = 2.0
        with pytest.raises(ValidationError, match="experiment"):
            parse(doc)


class TestPropagationSection:
    def test_grid_power_of_two_enforced(self):
        doc = json.loads(json.dumps(FULL_FREEFALL))
        doc["propagation"]["grid"]["n_points"] = 1000
        with pytest.raises(ValidationError, match="power of two"):
            parse(doc)

    def test_boundary_periodic_default_and_absorbing(self):
        sc = parse(FULL_FREEFALL)
        assert sc.propagation.boundary is None
        doc = json.loads(json.dumps(FULL_FREEFALL))
        doc["propagation"]["boundary"] = {"type": "absorbing", "width": 5.0, "strength": 10.0}
        sc = parse(doc)
        assert sc.propagation.boundary.width == 5.0
        doc["propagation"]["boundary"] = {"type": "periodic", "width": 5.0}
        with pytest.raises(ValidationError, match="periodic"):
            parse(doc)
        doc["propagation"]["boundary"] = {"type": "reflecting"}
        with pytest.raises(ValidationError, match="boundary.type"):
            parse(doc)

    def test_missing_required_keys_reported(self):
        doc = json.loads(json.dumps(FULL_FREEFALL))
        del doc["propagation"]["dt"]
        with pytest.raises(ValidationError, match="propagation.dt"):
            parse(doc)


class TestReferenceFiles:
    def test_caf2_wgmc_parses_to_reference_parameters(self, scenario_dir):
        sc = load_scenario(scenario_dir / "caf2_wgmc.json")
        exp = sc.experiment
        assert exp.lambda0 == 1.064e-6
        assert exp.sigma0 == 0.1
        assert exp.y_out == 0.5
        assert exp.P_avg == 1e-3
        assert exp.eta_det == 1e-3
        assert exp.T_int == 3600.0
        assert exp.Q == 7e10
        assert exp.n_s == 1.43
        assert exp.g == 9.81
        assert exp.width_model == "corrected"

    def test_freefall_scenario_parses(self, scenario_dir):
        sc = load_scenario(scenario_dir / "freefall_caf2.json")
        assert sc.cavity is not None and sc.gravity is not None and sc.propagation is not None
        assert sc.gravity.n_s == sc.cavity.n_s == 1.43


class TestRoundTrip:
    def test_resolved_dict_reparses_identically(self):
        sc = parse(FULL_FREEFALL)
        resolved = scenario_to_dict(sc)
        again = parse_scenario(json.dumps(resolved))
        assert again.cavity == sc.cavity
        assert again.gravity == sc.gravity
        assert again.propagation == sc.propagation
        assert again.output == sc.output

    def test_experiment_round_trip(self):
        sc = parse(MINIMAL_EXPERIMENT)
        again = parse_scenario(json.dumps(scenario_to_dict(sc)))
        assert again.experiment == sc.experiment
