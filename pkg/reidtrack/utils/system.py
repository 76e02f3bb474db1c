import psutil
import torch

from .. import _version

# Logical cores left free for the operating system during parallel sweeps.
RESERVED_CORES = 2


def get_software_version() -> str:
    return _version.__version__


def get_device(force_cpu: bool) -> torch.device:
    """
    The torch device distance maps are computed on: the GPU when CUDA is available and the CPU is not forced.

    Args:
        force_cpu (bool): always use the CPU.

    Returns:
        (`torch.device`): device. Either `cpu` or `cuda`.
    """
    if force_cpu or not torch.cuda.is_available():
        return torch.device("cpu")
    return torch.device("cuda")


def get_core_count() -> int:
    """
    Workers a parallel sweep may use: the logical core count minus `RESERVED_CORES`, at least one.
    """
    n_logical = psutil.cpu_count(logical=True)
    if n_logical is None:
        return 1
    return max(n_logical - RESERVED_CORES, 1)
