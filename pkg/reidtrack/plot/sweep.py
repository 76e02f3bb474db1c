import os
from typing import Optional, Sequence

import matplotlib.pyplot as plt
import pandas as pd

from .. import log


def plot_sweep(
    csv_path: str,
    key: Optional[str] = None,
    metrics: Sequence[str] = ("MOTA", "MOTP"),
    out_path: Optional[str] = None,
) -> str:
    """
    Plot metrics against the swept parameter of a sweep table, one subplot per metric.

    Args:
        csv_path (str): sweep table written by `pipeline.sweep.sweep`.
        key (str, optional): the swept column. Default: the table's first column.
        metrics (sequence of str, optional): metric columns to plot. Default: MOTA and MOTP.
        out_path (str, optional): image path. Default: the table path with a png suffix.

    Returns:
        str: out_path. Path of the saved figure.
    """
    if not os.path.isfile(csv_path):
        raise FileNotFoundError(f"No sweep table at {csv_path}")
    table = pd.read_csv(csv_path)
    if key is None:
        key = table.columns[0]
    missing = [name for name in (key, *metrics) if name not in table.columns]
    if missing:
        raise ValueError(f"Sweep table {csv_path} has no columns {missing}")
    if out_path is None:
        out_path = os.path.splitext(csv_path)[0] + ".png"

    numeric = pd.api.types.is_numeric_dtype(table[key])
    x = table[key] if numeric else range(len(table))
    fig, axes = plt.subplots(len(metrics), 1, figsize=(6, 3 * len(metrics)), sharex=True, squeeze=False)
    for ax, name in zip(axes[:, 0], metrics):
        ax.plot(x, table[name], marker="o")
        ax.set_ylabel(name)
        ax.grid(alpha=0.3)
    if not numeric:
        axes[-1, 0].set_xticks(list(x), table[key].astype(str).tolist())
    axes[-1, 0].set_xlabel(key)
    fig.suptitle(f"Sweep over {key}")
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)
    log.info(f"Sweep plot saved at {out_path}")
    return out_path
