from typing import Any, ItemsView


class ConfigSection:
    """
    Parameters of one loaded config section, like `[histfilter]`.

    Values are stored already parsed. Every read is tallied per parameter, so after a run the parameters nothing
    looked at can be reported with `list_redundant_params`.

    Attributes:
        name (str): section name.
    """

    name: str

    _values: dict[str, Any]
    _reads: dict[str, int]

    def __init__(self, name: str, values: dict[str, Any]) -> None:
        assert type(name) is str
        assert type(values) is dict
        assert len(values) > 0, f"Section {name} is empty"
        assert all(type(key) is str for key in values)

        self.name = name
        self._values = dict(values)
        self._reads = dict.fromkeys(self._values, 0)

    def _require(self, param_name: str) -> None:
        if param_name not in self._values:
            raise ValueError(f"No parameter {param_name} in section {self.name}")

    def __getitem__(self, param_name: str) -> Any:
        if type(param_name) is not str:
            raise TypeError(f"Section {self.name} is indexed by parameter name, got {type(param_name)}")
        self._require(param_name)
        self._reads[param_name] += 1
        return self._values[param_name]

    def __setitem__(self, param_name: str, value: Any, /) -> None:
        """
        Overwrite a parameter, e.g. with a calibrated value. The new value starts out unread.
        """
        assert type(param_name) is str
        self._require(param_name)
        self._values[param_name] = value
        self._reads[param_name] = 0

    def __contains__(self, param_name: str) -> bool:
        return param_name in self._values

    def items(self) -> ItemsView[str, Any]:
        for param_name in self._reads:
            self._reads[param_name] += 1
        return self._values.items()

    def get_parameter_names(self) -> list[str]:
        return list(self._values)

    def list_redundant_params(self) -> tuple[str, ...]:
        """
        Returns:
            (tuple of str): names of the parameters never read, in section order.
        """
        return tuple(name for name, reads in self._reads.items() if reads == 0)

    def to_dict(self) -> dict[str, Any]:
        # Not tallied as a read.
        return dict(self._values)
