import json

import pytest

from levyinvest.config import load_config, parse_config
from levyinvest.errors import ParseError, ValidationError
from levyinvest.levy import Family

MINIMAL = {
    "model": {"family": "brownian_drift", "mu": 0.0, "sigma": 1.0},
    "profit": {"kind": "cobb_douglas", "alpha": 0.5, "beta": 0.5},
    "r": 2.0,
}


def cfg_text(**overrides) -> str:
    doc = json.loads(json.dumps(MINIMAL))
    doc.update(overrides)
    return json.dumps(doc)


class TestDefaults:
    def test_minimal_config_fills_defaults(self):
        cfg = parse_config(cfg_text())
        assert cfg.seed == 0
        assert cfg.step is None and cfg.effective_step == pytest.approx(1e-3 / 2.0)
        assert cfg.t_max is None and cfg.effective_t_max == pytest.approx(10.0)
        assert cfg.u_min == -2.0 and cfg.u_max == 2.0 and cfg.grid_n == 41
        assert cfg.x == 0.0 and cfg.y == 1.0
        assert cfg.scales == (0.5, 0.8, 1.0, 1.25, 2.0)
        assert cfg.out_dir == "out"
        assert len(cfg.verify_u0) == 3

    def test_model_and_profit_constructed(self):
        cfg = parse_config(cfg_text())
        assert cfg.model.family is Family.BROWNIAN_DRIFT
        assert cfg.profit.kind == "cobb_douglas"

    def test_sha_tracks_text(self):
        a = parse_config(cfg_text())
        b = parse_config(cfg_text(seed=7))
        assert a.config_sha256 != b.config_sha256
        assert a.config_sha256 == parse_config(cfg_text()).config_sha256

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "c.json"
        path.write_text(cfg_text(), encoding="utf-8")
        assert load_config(path).r == 2.0


class TestValidation:
    def test_negative_rate_names_key(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(r=-1))
        assert err.value.key == "r"

    def test_ces_gamma_interval_cited(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(profit={"kind": "ces", "alpha": 0.5, "gamma": 1.5}))
        assert err.value.key == "profit.gamma"
        assert "(0, 1)" in err.value.message

    def test_missing_required_keys(self):
        with pytest.raises(ValidationError) as err:
            parse_config(json.dumps({"profit": MINIMAL["profit"], "r": 1.0}))
        assert err.value.key == "model"
        with pytest.raises(ValidationError) as err:
            parse_config(json.dumps({"model": MINIMAL["model"], "r": 1.0}))
        assert err.value.key == "profit"

    def test_model_subkeys_named(self):
        bad = dict(MINIMAL["model"])
        bad["sigma"] = -2.0
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(model=bad))
        assert err.value.key == "model.sigma"

    def test_kou_p_up_range(self):
        kou = {"family": "kou", "mu": 0.0, "sigma": 0.2, "jump_intensity": 1.0,
               "p_up": 1.5, "eta_plus": 10.0, "eta_minus": 10.0}
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(model=kou))
        assert err.value.key == "model.p_up"

    def test_unknown_keys_rejected(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(bogus=1))
        assert err.value.key == "bogus"
        bad = dict(MINIMAL["model"])
        bad["sgima"] = 1.0
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(model=bad))
        assert err.value.key == "model.sgima"

    def test_unknown_family_and_kind(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(model={"family": "gamma_ou", "sigma": 1.0}))
        assert err.value.key == "model.family"
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(profit={"kind": "quadratic"}))
        assert err.value.key == "profit.kind"

    def test_mc_block_validation(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(mc={"n_paths": 0}))
        assert err.value.key == "mc.n_paths"
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(mc={"step": -0.1}))
        assert err.value.key == "mc.step"

    def test_grid_ordering(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(grid={"u_min": 2.0, "u_max": -2.0}))
        assert err.value.key == "grid.u_min"

    def test_state_capacity_positive(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(state={"y": -1.0}))
        assert err.value.key == "state.y"

    def test_scales_positive(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(scales=[1.0, -2.0]))
        assert err.value.key == "scales[1]"

    def test_seed_bounds(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(seed=-3))
        assert err.value.key == "seed"
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(seed=2 ** 64))
        assert err.value.key == "seed"

    def test_bool_is_not_a_number(self):
        with pytest.raises(ValidationError) as err:
            parse_config(cfg_text(r=True))
        assert err.value.key == "r"

    def test_not_json(self):
        with pytest.raises(ParseError):
            parse_config("not json {")
        with pytest.raises(ParseError):
            parse_config("[1, 2]")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "nope.json")
