import os
import tempfile

from reidtrack.setup import config
from reidtrack.setup.config import Config
from reidtrack.setup.config_section import ConfigSection


def test_get_default_for() -> None:
    assert Config.get_default_for("run", "tracker") == "integrated"
    assert Config.get_default_for("scenario", "velocity_range") == (1.0, 4.0)
    assert Config.get_default_for("measurement", "n_app") is None
    assert Config.get_default_for("scenario", "fp_rate") == 0.0001
    assert Config.get_default_for("metrics", "continuity") is True

    try:
        Config.get_default_for("not_a_section", "tracker")
        raise AssertionError("Expected ValueError")
    except ValueError:
        pass


def test_load_defaults() -> None:
    config = Config()
    try:
        config["run"]
        raise AssertionError("Expected SectionError before load")
    except Config.SectionError:
        pass

    config.load()
    assert type(config.sections) is tuple
    assert all([type(section) is ConfigSection for section in config.sections])
    assert config.get_section_names() == list(Config._options.keys())
    assert config["scenario"]["width"] == 64
    assert config["scenario"]["cell_size"] == 8.0
    assert config["kalman"]["q_diag"] == (1.0, 1.0, 0.25, 0.25)
    assert config["assoc"]["gt_sigma_cont"] == -0.3
    assert config["run"]["n_jobs"] is None

    try:
        config["not_a_section"]
        raise AssertionError("Expected ValueError")
    except ValueError:
        pass


def test_load_user_file() -> None:
    with tempfile.TemporaryDirectory() as tmpdir:
        config_filepath = os.path.join(tmpdir, "config.ini")
        with open(config_filepath, "w") as file:
            file.write("[run]\ntracker = nnkf_reid\n\n[scenario]\nseed =   7 \nvelocity_range = 0.5,   2\n")

        config = Config()
        config.load(config_filepath)
        assert config["run"]["tracker"] == "nnkf_reid"
        assert config["scenario"]["seed"] == 7
        assert config["scenario"]["velocity_range"] == (0.5, 2.0)
        # Unchanged parameters keep their defaults.
        assert config["scenario"]["frames"] == 300

        with open(config_filepath, "w") as file:
            file.write("[run]\ntracker = kalman\n")
        try:
            config.load(config_filepath)
            raise AssertionError("Expected ParamError")
        except Config.ParamError as e:
            assert "tracker" in str(e)

        with open(config_filepath, "w") as file:
            file.write("[not_a_section]\na = 1\n")
        try:
            config.load(config_filepath)
            raise AssertionError("Expected SectionError")
        except Config.SectionError:
            pass

        # Unknown parameters are ignored.
        with open(config_filepath, "w") as file:
            file.write("[run]\nnot_a_param = 1\n")
        config.load(config_filepath)
        assert "not_a_param" not in config["run"].get_parameter_names()

    try:
        config.load("/wrong/path/config.ini")
        raise AssertionError("Expected FileNotFoundError")
    except FileNotFoundError:
        pass


def test_load_overrides() -> None:
    config = Config()
    config.load(overrides=["scenario.seed=3", " histfilter.output_mode = expectation", "measurement.n_app=1e-1"])
    assert config["scenario"]["seed"] == 3
    assert config["histfilter"]["output_mode"] == "expectation"
    assert config["measurement"]["n_app"] == 0.1

    for bad_override in ("scenario.seed", "seed=3"):
        try:
            config.load(overrides=[bad_override])
            raise AssertionError(f"Expected ParamError for {bad_override}")
        except Config.ParamError:
            pass
    try:
        config.load(overrides=["nothing.seed=3"])
        raise AssertionError("Expected SectionError")
    except Config.SectionError:
        pass
    for bad_override in ("scenario.velocity_range=1.0", "metrics.iou_threshold=1.5", "scenario.border_mode=wrap"):
        try:
            config.load(overrides=[bad_override])
            raise AssertionError(f"Expected ParamError for {bad_override}")
        except Config.ParamError:
            pass


def test_save() -> None:
    config = Config()
    config.load(overrides=["run.tracker=gt_regressed", "scenario.velocity_range=2, 3"])
    config["bboxreg"]["slope"] = 0.25
    with tempfile.TemporaryDirectory() as tmpdir:
        config_filepath = os.path.join(tmpdir, "run_config.ini")
        config.save(config_filepath)

        reloaded = Config()
        reloaded.load(config_filepath)
    assert reloaded["run"]["tracker"] == "gt_regressed"
    assert reloaded["scenario"]["velocity_range"] == (2.0, 3.0)
    assert reloaded["bboxreg"]["slope"] == 0.25
    assert reloaded["bboxreg"]["intercept"] is None
    assert reloaded["run"]["dump_frames"] is False


def test_custom_options() -> None:
    config = Config()
    config.options.clear()
    config.options["debug"] = {
        "1": ("int", "positive"),
        "2": ("number", "not-negative_lt1"),
        "3": ("maybe_tuple_int", "tuple-len-2"),
        "4": ("tuple_bool", "tuple-not-empty"),
        "5": ("str", "match-mode"),
    }
    with tempfile.TemporaryDirectory() as tmpdir:
        default_filepath = os.path.join(tmpdir, "default.ini")
        with open(default_filepath, "w") as file:
            file.write("[debug]\n1 = 4\n2 = 0.5\n3 =\n4 = TrUe, false\n5 = distance\n")
        config.load(default_file_path=default_filepath)
        assert config["debug"]["1"] == 4
        assert config["debug"]["2"] == 0.5
        assert config["debug"]["3"] is None
        assert config["debug"]["4"] == (True, False)
        assert config["debug"]["5"] == "distance"

        user_filepath = os.path.join(tmpdir, "config.ini")
        incorrect_values = {"1": "0", "2": "1.0", "3": "1, 2, 3", "4": "", "5": "iuo"}
        for param_name, value in incorrect_values.items():
            with open(user_filepath, "w") as file:
                file.write(f"[debug]\n{param_name} = {value}\n")
            try:
                config.load(user_filepath, default_filepath)
                raise AssertionError(f"Expected ParamError for parameter {param_name}")
            except Config.ParamError as e:
                assert " " + param_name + " " in str(e)

        # Missing parameters in both files.
        with open(default_filepath, "w") as file:
            file.write("[debug]\n1 = 4\n")
        try:
            config.load(default_file_path=default_filepath)
            raise AssertionError("Expected MissingParamError")
        except Config.MissingParamError:
            pass


def test_ParamFormat() -> None:
    assert config.ParamFormat("maybe_tuple_number").parse("") is None
    assert config.ParamFormat("maybe_tuple_number").parse(" 1, 2.5e1 ,") == (1.0, 25.0)
    assert config.ParamFormat("int").parse(" -3 ") == -3
    assert config.ParamFormat("bool").parse("FALSE") is False
    assert config.ParamFormat("tuple_str").parse("a, b") == ("a", "b")
    assert config.ParamFormat("number").describe() == "number"
    assert config.ParamFormat("maybe_tuple_int").describe() == "a series of int or empty"

    for format_str, raw in (("int", "1.5"), ("number", "nan"), ("bool", "yes"), ("str", ""), ("tuple_int", "1, x")):
        try:
            config.ParamFormat(format_str).parse(raw)
            raise AssertionError(f"Expected ValueError for {raw} as {format_str}")
        except ValueError:
            pass
    for format_str in ("float", "tuple_maybe_int", "maybe"):
        try:
            config.ParamFormat(format_str)
            raise AssertionError(f"Expected ValueError for format {format_str}")
        except ValueError:
            pass


def test_check_value() -> None:
    assert config.check_value(None, "positive") is None
    assert config.check_value(0, "") is None
    assert config.check_value(0.5, "positive_lt1") is None
    assert config.check_value(1.0, "positive_lt1") == "< 1"
    assert config.check_value((1.0, -1.0), "tuple-len-2_not-negative") == ">= 0"
    assert config.check_value((1.0,), "tuple-len-2_not-negative") == "a series of 2 values"
    assert config.check_value("exit", "border-mode") is None
    assert config.check_value("wrap", "border-mode") == "one of reflect, exit"
    try:
        config.check_value(1, "not-a-check")
        raise AssertionError("Expected ValueError")
    except ValueError:
        pass
