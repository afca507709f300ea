import json
from pathlib import Path

import pytest

from sapsim import ConfigError, Kind
from sapsim.config import (DEFAULT_KAPPA_REF, geometry_spec, layout_from,
                           load_config, model_from, propagation_options)

INI_SAMPLE = """
[geometry]
kind = fsap3
half_length = 7000
cut_fraction = 0.9

[coupling]
kappa_ref = auto
crosstalk_target_db = -18

[sweep]
n_points = 5
"""

JSON_SAMPLE = json.dumps({
    "geometry": {"kind": "fsap3", "half_length": 7000, "cut_fraction": 0.9},
    "coupling": {"kappa_ref": "auto", "crosstalk_target_db": -18},
    "sweep": {"n_points": 5},
})


class TestParsing:
    def test_defaults_without_file(self):
        cfg = load_config(None)
        assert cfg.geometry.kind == "folded5"
        assert cfg.geometry.half_length == 7500.0
        assert cfg.coupling.kappa_ref == DEFAULT_KAPPA_REF
        assert cfg.sweep.n_points == 27
        assert cfg.propagation.rtol == 1e-10

    def test_ini_and_json_equivalent(self, tmp_path):
        ini = tmp_path / "run.ini"
        ini.write_text(INI_SAMPLE)
        js = tmp_path / "run.json"
        js.write_text(JSON_SAMPLE)
        assert load_config(ini) == load_config(js)

    def test_ini_values_applied(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text(INI_SAMPLE)
        cfg = load_config(path)
        assert cfg.geometry.kind == "fsap3"
        assert cfg.geometry.half_length == 7000.0
        assert cfg.geometry.cut_fraction == 0.9
        assert cfg.coupling.kappa_ref == "auto"
        assert cfg.sweep.n_points == 5

    def test_unknown_key_names_path(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[geometry]\nbogus = 1\n")
        with pytest.raises(ConfigError, match=r"geometry\.bogus: unknown key"):
            load_config(path)

    def test_unknown_section_rejected(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[laser]\npower = 1\n")
        with pytest.raises(ConfigError, match="laser"):
            load_config(path)

    def test_type_error_names_path(self, tmp_path):
        path = tmp_path / "run.ini"
        path.write_text("[geometry]\nhalf_length = long\n")
        with pytest.raises(ConfigError, match=r"geometry\.half_length"):
            load_config(path)

    def test_integer_keys_reject_fractions(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"sweep": {"n_points": 5.5}}))
        with pytest.raises(ConfigError, match=r"sweep\.n_points"):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.ini")

    def test_malformed_json(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text("{broken")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_shipped_example_configs_load(self):
        root = Path(__file__).resolve().parent.parent / "configs"
        folded = load_config(root / "folded5.ini")
        assert folded.geometry.kind == "folded5"
        assert folded.propagation.wavelength == 1540.0
        diced = load_config(root / "fsap3_diced.json")
        assert diced.geometry.kind == "fsap3"
        assert diced.geometry.cut_fraction == 0.9


class TestOverridesAndValidation:
    def test_override_applies(self):
        cfg = load_config(None, ["geometry.kind=sap3",
                                 "propagation.wavelength=1540"])
        assert cfg.geometry.kind == "sap3"
        assert cfg.propagation.wavelength == 1540.0

    def test_override_bad_syntax(self):
        with pytest.raises(ConfigError):
            load_config(None, ["geometry.kind"])
        with pytest.raises(ConfigError):
            load_config(None, ["kind=sap3"])

    @pytest.mark.parametrize("override,path", [
        ("geometry.kind=ring", "geometry.kind"),
        ("geometry.cut_fraction=2.5", "geometry.cut_fraction"),
        ("geometry.angle=10", "geometry.angle"),
        ("coupling.target_ratio=1.5", "coupling.target_ratio"),
        ("coupling.crosstalk_target_db=5", "coupling.crosstalk_target_db"),
        ("sweep.n_points=0", "sweep.n_points"),
        ("sweep.lambda_min=1700", "sweep.lambda_min"),
        ("farfield.waist=-1", "farfield.waist"),
        ("design.steps_alpha=0", "design.steps_alpha"),
        ("propagation.samples=1", "propagation.samples"),
    ])
    def test_precondition_violations_name_key(self, override, path):
        with pytest.raises(ConfigError, match=path.replace(".", r"\.")):
            load_config(None, [override])


class TestBuilders:
    def test_layout_from_defaults(self):
        layout = layout_from(load_config(None))
        assert layout.kind is Kind.FOLDED5
        assert layout.z_end_um == 15000.0

    def test_edge_convention_adds_width(self):
        cfg = load_config(None, ["geometry.separation_convention=edge"])
        spec = geometry_spec(cfg)
        assert spec.outer_separation_um == 28.0

    def test_model_from_fixed_kappa(self):
        cfg = load_config(None)
        layout = layout_from(cfg)
        model = model_from(cfg, layout)
        assert model.kappa_ref == DEFAULT_KAPPA_REF
        assert model.delta_decay == pytest.approx(4.13995, abs=1e-5)

    def test_model_from_auto_calibrates(self):
        cfg = load_config(None, [
            "coupling.kappa_ref=auto", "coupling.crosstalk_target_db=0",
            "coupling.kappa_min=0.3", "propagation.rtol=1e-8",
            "propagation.atol=1e-10", "propagation.samples=16",
        ])
        layout = layout_from(cfg)
        model = model_from(cfg, layout)
        assert model.kappa_ref == 0.3   # any coupling meets a 0 dB target

    def test_propagation_options(self):
        cfg = load_config(None, ["propagation.samples=64"])
        opts = propagation_options(cfg)
        assert opts.n_samples == 64
        assert opts.rtol == 1e-10
