import torch

from reidtrack import _version
from reidtrack.utils import system


def test_get_software_version() -> None:
    assert system.get_software_version() == _version.__version__


def test_get_device() -> None:
    assert system.get_device(True) == torch.device("cpu")
    assert system.get_device(False) in (torch.device("cpu"), torch.device("cuda"))


def test_get_core_count() -> None:
    n_cores = system.get_core_count()
    assert type(n_cores) is int
    assert n_cores >= 1
