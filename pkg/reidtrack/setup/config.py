import configparser
import importlib.resources as importlib_resources
import os
import re
from collections.abc import Callable, Iterable
from typing import Any, Dict, Optional, Tuple

from .. import log
from .config_section import ConfigSection

FORMATTED_PARAM_TYPE = (
    int | float | str | bool | None | Tuple[int, ...] | Tuple[float, ...] | Tuple[str, ...] | Tuple[bool, ...]
)

TRACKER_NAMES = ("nnkf", "nnkf_gt", "nnkf_reid", "nnkf_only_reid", "integrated", "integrated_entropy", "gt_regressed")

# Enumerated string parameters, keyed by the name of their check.
_CHOICES: dict[str, tuple[str, ...]] = {
    "tracker-name": TRACKER_NAMES,
    "border-mode": ("reflect", "exit"),
    "background-mode": ("random_far", "confuser"),
    "output-mode": ("peak", "expectation"),
    "match-mode": ("iou", "distance"),
}

# Patterns a raw scalar must match before it is converted.
_SCALAR_PATTERNS: dict[str, re.Pattern] = {
    "int": re.compile(r"[-+]?[0-9]+"),
    "number": re.compile(r"[-+]?([0-9]+\.?[0-9]*|\.[0-9]+)([eE][-+]?[0-9]+)?"),
    "bool": re.compile(r"true|false", re.IGNORECASE),
    "str": re.compile(r".+"),
}
_SCALAR_CONVERTERS: dict[str, Callable[[str], Any]] = {
    "int": int,
    "number": float,
    "bool": lambda x: x.lower() == "true",
    "str": str,
}

# Checks on formatted values: name -> (predicate, what the value is expected to be).
_VALUE_CHECKS: dict[str, Tuple[Callable[[Any], bool], str]] = {
    "positive": (lambda x: x > 0, "positive"),
    "negative": (lambda x: x < 0, "negative"),
    "not-positive": (lambda x: x <= 0, "<= 0"),
    "not-negative": (lambda x: x >= 0, ">= 0"),
    "lt1": (lambda x: x < 1, "< 1"),
    "lteq1": (lambda x: x <= 1, "<= 1"),
    "str-not-empty": (lambda x: bool(x.strip()), "a non empty string"),
    "file-exists": (lambda x: os.path.isfile(x), "an existing file"),
    "dir-exists": (lambda x: os.path.isdir(x), "an existing directory"),
}
for _name, _choices in _CHOICES.items():
    _VALUE_CHECKS[_name] = (_choices.__contains__, "one of " + ", ".join(_choices))
# Checks on a whole tuple rather than on each of its items.
_TUPLE_CHECKS: dict[str, Tuple[Callable[[tuple], bool], str]] = {
    "tuple-not-empty": (lambda x: len(x) > 0, "a non empty series"),
    "tuple-len-2": (lambda x: len(x) == 2, "a series of 2 values"),
    "tuple-len-4": (lambda x: len(x) == 4, "a series of 4 values"),
}


class ParamFormat:
    """
    A parsed format string like `maybe_tuple_number`: an optional `maybe_` prefix (an empty value means None), an
    optional `tuple_` prefix (comma separated values) and a scalar type out of `int`, `number`, `bool` or `str`.
    """

    optional: bool
    is_tuple: bool
    scalar: str

    def __init__(self, format_str: str) -> None:
        parts = format_str.split("_")
        self.optional = parts[0] == "maybe"
        if self.optional:
            parts = parts[1:]
        self.is_tuple = len(parts) > 0 and parts[0] == "tuple"
        if self.is_tuple:
            parts = parts[1:]
        if len(parts) != 1 or parts[0] not in _SCALAR_PATTERNS:
            raise ValueError(f"Invalid parameter format {format_str}")
        self.scalar = parts[0]

    def describe(self) -> str:
        description = f"a series of {self.scalar}" if self.is_tuple else self.scalar
        return description + (" or empty" if self.optional else "")

    def parse(self, raw: str) -> Optional[FORMATTED_PARAM_TYPE]:
        """
        Convert a raw config string. Returns None when the string is empty and the format is optional.

        Raises:
            ValueError: the string does not match the format.
        """
        raw = raw.strip()
        if self.optional and raw == "":
            return None
        items = [item.strip() for item in raw.split(",") if item.strip()] if self.is_tuple else [raw]
        for item in items:
            if _SCALAR_PATTERNS[self.scalar].fullmatch(item) is None:
                raise ValueError(f"{item} is not {self.scalar}")
        values = tuple(_SCALAR_CONVERTERS[self.scalar](item) for item in items)
        return values if self.is_tuple else values[0]


def check_value(value: FORMATTED_PARAM_TYPE, checks_str: str) -> Optional[str]:
    """
    Run underscore separated checks on a formatted value. Tuple checks apply to the whole tuple, every other check to
    each of its items. None values always pass.

    Returns:
        (str or none): failure. What the value was expected to be, None when every check passes.
    """
    if value is None or not checks_str:
        return None
    names = checks_str.split("_")
    for name in names:
        if name not in _VALUE_CHECKS and name not in _TUPLE_CHECKS:
            raise ValueError(f"Unknown parameter check {name}")
    if type(value) is not tuple:
        assert not any(name in _TUPLE_CHECKS for name in names), "Series checks need a series format"
    else:
        for name in [name for name in names if name in _TUPLE_CHECKS]:
            predicate, expected = _TUPLE_CHECKS[name]
            if not predicate(value):
                return expected
    items = value if type(value) is tuple else (value,)
    for name in [name for name in names if name in _VALUE_CHECKS]:
        predicate, expected = _VALUE_CHECKS[name]
        if not all(predicate(item) for item in items):
            return expected
    return None


class Config:
    """
    Typed, validated configuration read from ini files.

    Defaults come from `reidtrack/setup/default.ini`, then the user's file, then `section.parameter=value` overrides.
    Every parameter is declared in `_options` with a format string (see `ParamFormat`) and a string of underscore
    separated checks. Sections are `ConfigSection`s, so the softmin temperature is read by

    ```py
    temperature = config["measurement"]["temperature"]
    ```
    """

    _options_type = Dict[str, Dict[str, Tuple[str, str]]]

    # If you change config options, update the reidtrack/setup/default.ini file too.
    _options: _options_type = {
        "file_names": {
            "output_dir": ("str", "str-not-empty"),
            # Empty to generate the scenario from the [scenario] section instead of loading one.
            "scenario": ("maybe_str", "file-exists"),
            "log_name": ("str", "str-not-empty"),
        },
        "logging": {
            "minimum_print_severity": ("int", "not-negative"),
        },
        "scenario": {
            "width": ("int", "positive"),
            "height": ("int", "positive"),
            "cell_size": ("number", "positive"),
            "embedding_dim": ("int", "positive"),
            "num_identities": ("int", "positive"),
            "frames": ("int", "positive"),
            "velocity_range": ("tuple_number", "tuple-len-2_not-negative"),
            "motion_noise_sigma": ("number", "not-negative"),
            "border_mode": ("str", "border-mode"),
            "min_lifetime": ("int", "positive"),
            "randomize_lifetimes": ("bool", ""),
            "embedding_noise_sigma": ("number", "not-negative"),
            "background_mode": ("str", "background-mode"),
            "confuser_similarity": ("number", "not-negative_lt1"),
            "miss_rate": ("number", "not-negative_lteq1"),
            "fp_rate": ("number", "not-negative_lteq1"),
            "score_noise": ("number", "not-negative"),
            "detection_position_sigma": ("number", "not-negative"),
            "height_slope": ("number", ""),
            "height_intercept": ("number", ""),
            "height_noise_sigma": ("number", "not-negative"),
            "seed": ("int", "not-negative"),
            "calibration_samples": ("int", "positive"),
        },
        "grid": {
            "kernel_sigma_cutoff": ("number", "positive"),
        },
        "measurement": {
            "temperature": ("number", "positive"),
            "n_app": ("maybe_number", "positive"),
            "n_app_quantile": ("number", "positive_lt1"),
            "n_app_floor": ("number", "positive"),
            "entropy_fraction": ("maybe_number", "positive_lteq1"),
            "entropy_quantile": ("number", "positive_lt1"),
            "entropy_fraction_floor": ("number", "positive_lteq1"),
        },
        "histfilter": {
            "sigma_init": ("number", "not-negative"),
            "velocity_init_sigma": ("number", "positive"),
            "q_pos_sigma": ("number", "not-negative"),
            "q_vel_sigma": ("number", "not-negative"),
            "r_vel_sigma": ("number", "positive"),
            "d_max_missed": ("int", "not-negative"),
            "emit_max_missed": ("int", "not-negative"),
            "output_mode": ("str", "output-mode"),
            "count_entropy_rejections": ("bool", ""),
        },
        "kalman": {
            "q_diag": ("tuple_number", "tuple-len-4_not-negative"),
            "r_var": ("number", "positive"),
            "p_init_diag": ("tuple_number", "tuple-len-4_positive"),
        },
        "assoc": {
            "n_pos": ("number", "positive"),
            "n_app": ("maybe_number", "positive"),
            "n_app_floor": ("number", "positive"),
            "gate": ("number", "positive"),
            "sigma_init": ("number", ""),
            "d_init": ("int", "positive"),
            "sigma_cont": ("number", ""),
            "d_miss": ("int", "not-negative"),
            "gt_sigma_cont": ("number", ""),
            "gt_d_init": ("int", "positive"),
            "gt_d_miss": ("int", "not-negative"),
            "emit_max_missed": ("int", "not-negative"),
        },
        "bboxreg": {
            "aspect": ("number", "positive"),
            "scale": ("number", "positive"),
            "slope": ("maybe_number", ""),
            "intercept": ("maybe_number", ""),
        },
        "metrics": {
            "iou_threshold": ("number", "positive_lteq1"),
            "continuity": ("bool", ""),
            "match_mode": ("str", "match-mode"),
            "distance_threshold": ("number", "positive"),
        },
        "run": {
            "tracker": ("str", "tracker-name"),
            "dump_frames": ("bool", ""),
            "n_jobs": ("maybe_int", "positive"),
        },
    }

    _sections: list[ConfigSection]

    def __init__(self) -> None:
        self._options = {section: dict(params) for section, params in Config._options.items()}
        self._sections = []

    @property
    def options(self) -> _options_type:
        return self._options

    @options.setter
    def options(self, value: _options_type) -> None:
        self._options = value

    @property
    def sections(self) -> Tuple[ConfigSection, ...]:
        return tuple(self._sections)

    @staticmethod
    def get_default_for(section_name: str, parameter_name: str) -> FORMATTED_PARAM_TYPE:
        """
        The checked default of one parameter, as read from the default ini file.

        Raises:
            ValueError: no such section or parameter.
        """
        assert type(section_name) is str
        assert type(parameter_name) is str

        config = Config()
        parser = config._read([config._default_file_path()])
        if section_name not in config._options or not parser.has_section(section_name):
            raise ValueError(f"No config section called {section_name}")
        if parameter_name not in config._options[section_name] or not parser.has_option(section_name, parameter_name):
            raise ValueError(f"No parameter called {parameter_name} in section {section_name}")
        return config._formatted(section_name, parameter_name, parser[section_name][parameter_name], True)

    def __getitem__(self, section_name: str) -> ConfigSection:
        if type(section_name) is not str:
            raise TypeError(f"Config sections are accessed by name, got type {type(section_name)}")
        if len(self._sections) == 0:
            raise self.SectionError("Load must be called first to parse the config file")
        for section in self._sections:
            if section.name == section_name:
                return section
        raise ValueError(f"No config section named {section_name}")

    def get_section_names(self) -> list[str]:
        return [section.name for section in self._sections]

    def load(
        self,
        file_path: Optional[str] = None,
        default_file_path: Optional[str] = None,
        post_check: bool = True,
        overrides: Optional[Iterable[str]] = None,
    ) -> None:
        """
        Load the defaults, then the user's config file over them, then the overrides.

        Args:
            file_path (str, optional): the user's config file. Default: defaults only.
            default_file_path (str, optional): the file holding every parameter's default. Default:
                `reidtrack/setup/default.ini`.
            post_check (bool, optional): run the value checks of each parameter after formatting. Default: true.
            overrides (iterable of str, optional): `section.parameter=value` strings. Default: none.

        Raises:
            FileNotFoundError: a config file does not exist.
            Config.SectionError: a section is missing, or unknown.
            Config.MissingParamError: a declared parameter has no value in any file.
            Config.ParamError: a value has the wrong format or fails a check, or an override is malformed.
        """
        assert file_path is None or type(file_path) is str
        if default_file_path is None:
            default_file_path = self._default_file_path()
        assert type(default_file_path) is str

        parser = self._read([default_file_path] + ([] if file_path is None else [file_path]))
        for override in [] if overrides is None else overrides:
            self._apply_override(parser, override)

        unknown = [section for section in parser.sections() if section not in self._options]
        if unknown:
            raise self.SectionError(f"Unexpected config sections {unknown}")

        sections = []
        for section_name, params in self._options.items():
            if not parser.has_section(section_name):
                raise self.SectionError(f"No config section {section_name} found")
            for param_name in parser[section_name]:
                if param_name not in params:
                    log.warn(f"Unknown config parameter {param_name} in section {section_name}, ignoring it")
            values = {}
            for param_name in params:
                if not parser.has_option(section_name, param_name):
                    raise self.MissingParamError(f"Expected parameter {param_name} in section {section_name}")
                raw = parser[section_name][param_name]
                values[param_name] = self._formatted(section_name, param_name, raw, post_check)
            sections.append(ConfigSection(section_name, values))
        self._sections = sections

    def save(self, file_path: str) -> None:
        """
        Write the loaded config, values changed after loading included, as an ini file that reproduces the run.
        """
        assert type(file_path) is str
        if len(self._sections) == 0:
            raise self.SectionError("Load must be called first to parse the config file")

        parser = self._parser()
        for section in self._sections:
            parser[section.name] = {name: self.unformat_param(value) for name, value in section.to_dict().items()}
        with open(file_path, "w") as file:
            parser.write(file)

    @staticmethod
    def unformat_param(value: FORMATTED_PARAM_TYPE) -> str:
        """
        Convert a formatted value back into its config file string.
        """
        if value is None:
            return ""
        if type(value) is bool:
            return str(value).lower()
        if type(value) is tuple:
            return ", ".join(Config.unformat_param(item) for item in value)
        return str(value)

    def _formatted(self, section_name: str, param_name: str, raw: str, post_check: bool) -> FORMATTED_PARAM_TYPE:
        format_str, checks_str = self._options[section_name][param_name]
        param_format = ParamFormat(format_str)
        try:
            value = param_format.parse(raw)
        except ValueError as e:
            raise self.ParamError(
                f"Parameter {param_name} in section {section_name} must be {param_format.describe()}, got {raw!r}"
            ) from e
        if post_check:
            failure = check_value(value, checks_str)
            if failure is not None:
                raise self.ParamError(
                    f"Parameter {param_name} in section {section_name} must be {failure}, got {value!r}"
                )
        return value

    def _apply_override(self, parser: configparser.ConfigParser, override: str) -> None:
        key, separator, value = override.partition("=")
        section_name, dot, param_name = key.strip().partition(".")
        if not separator or not dot or not param_name.strip():
            raise self.ParamError(f"Override {override} must have the form section.parameter=value")
        if not parser.has_section(section_name):
            raise self.SectionError(f"Override {override} names unknown section {section_name}")
        parser[section_name][param_name.strip()] = value.strip()

    def _read(self, file_paths: list[str]) -> configparser.ConfigParser:
        parser = self._parser()
        for file_path in file_paths:
            if not os.path.isfile(file_path):
                raise FileNotFoundError(f"Could not find config file at {file_path}")
            with open(file_path, "r") as file:
                parser.read_string(file.read(), source=file_path)
        return parser

    @staticmethod
    def _parser() -> configparser.ConfigParser:
        parser = configparser.ConfigParser()
        # Parameter names are case sensitive.
        parser.optionxform = str
        return parser

    @staticmethod
    def _default_file_path() -> str:
        return str(importlib_resources.files("reidtrack.setup").joinpath("default.ini"))

    class ParamError(Exception):
        pass

    class MissingParamError(Exception):
        pass

    class SectionError(Exception):
        pass
