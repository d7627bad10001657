"""Run directory writer: CSV/JSON/text data, SVG figures and the manifest."""

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt
import numpy as np

from ..core.errors import ConfigError
from ..utils.logger import get_cli_logger

logger = get_cli_logger()

MANIFEST_NAME = 'manifest.json'
MANIFEST_VERSION = 1
FIGURE_SIZE = (7.0, 4.5)


def to_jsonable(value: Any) -> Any:
    """numpy scalars/arrays and tuples to plain JSON types; non-finite floats to strings."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value


def _cell(value: Any) -> Any:
    if isinstance(value, (np.floating, float)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _span(values: np.ndarray) -> List[float]:
    low, high = float(values[0]), float(values[-1])
    if high == low:
        return [low - 0.5, high + 0.5]
    return [low, high]


def sha256_file(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


class OutputWriter:
    """
    Writes every file of one run under out_dir and remembers what it wrote.

    Data files are always written; figures only when plots is set. File names
    are relative to out_dir and may include subdirectories.
    """

    def __init__(self, out_dir: Path, plots: bool = True):
        self.out_dir = Path(out_dir)
        self.plots = plots
        self._outputs: List[str] = []
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            raise ConfigError(f"Cannot create output directory {self.out_dir}: {e}") from e

    @property
    def outputs(self) -> List[str]:
        return list(self._outputs)

    def path(self, name: str) -> Path:
        path = self.out_dir / name
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def _record(self, name: str) -> str:
        if name not in self._outputs:
            self._outputs.append(name)
        logger.debug(f"Wrote {self.out_dir / name}")
        return name

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
        """UTF-8, comma-separated, header row, floats in shortest round-trip form."""
        with self.path(name).open('w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        return self._record(name)

    def write_json(self, name: str, payload: Any) -> str:
        text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
        self.path(name).write_text(text + '\n', encoding='utf-8')
        return self._record(name)

    def write_text(self, name: str, text: str) -> str:
        self.path(name).write_text(text, encoding='utf-8')
        return self._record(name)

    def adopt(self, name: str) -> str:
        """Record a file some library writer already put under out_dir."""
        if not (self.out_dir / name).is_file():
            raise ConfigError(f"Expected output {name} was not written")
        return self._record(name)

    def _save(self, fig, name: str) -> str:
        fig.tight_layout()
        fig.savefig(self.path(name), format='svg', metadata={'Date': None})
        plt.close(fig)
        return self._record(name)

    def line_plot(
        self,
        name: str,
        x: Sequence[float],
        series: Mapping[str, Sequence[float]],
        xlabel: str,
        ylabel: str,
        title: Optional[str] = None,
        verticals: Sequence[float] = (),
        markers: bool = False,
    ) -> Optional[str]:
        """
        One or more curves over a shared x axis.

        Args:
            name: SVG file name
            x: Abscissa
            series: Curve label -> ordinates
            xlabel: x axis label
            ylabel: y axis label
            title: Optional title
            verticals: x positions marked with dashed lines
            markers: Draw points instead of lines

        Returns:
            File name, or None when plots are disabled
        """
        if not self.plots:
            return None
        fig, ax = plt.subplots(figsize=FIGURE_SIZE)
        for label, y in series.items():
            if markers:
                ax.plot(x, y, '.', markersize=3, label=label)
            else:
                ax.plot(x, y, label=label)
        for v in verticals:
            ax.axvline(v, color='gray', linestyle='--', linewidth=0.8)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        return self._save(fig, name)

    def heatmap(
        self,
        name: str,
        x: Sequence[float],
        y: Sequence[float],
        z: np.ndarray,
        xlabel: str,
        ylabel: str,
        zlabel: str,
        title: Optional[str] = None,
    ) -> Optional[str]:
        """z[i, j] drawn at (x[j], y[i])."""
        if not self.plots:
            return None
        fig, ax = plt.subplots(figsize=FIGURE_SIZE)
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        extent = _span(x) + _span(y)
        im = ax.imshow(np.asarray(z, dtype=float), origin='lower', aspect='auto', cmap='viridis',
                       extent=extent, vmin=0.0, interpolation='nearest')
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        fig.colorbar(im, ax=ax, label=zlabel)
        return self._save(fig, name)

    def write_manifest(
        self,
        resolved: Dict[str, Any],
        config_hash: str,
        checks: Dict[str, Any],
        budget_exhausted: bool = False,
    ) -> Path:
        """
        manifest.json: resolved configuration, its hash, per-output sha256 and checks.

        Figures are listed separately from data files so that regenerating a
        run with --no-plots leaves the data section unchanged.
        """
        data = {n: sha256_file(self.out_dir / n) for n in self._outputs if not n.endswith('.svg')}
        figures = {n: sha256_file(self.out_dir / n) for n in self._outputs if n.endswith('.svg')}
        manifest = {
            'manifest_version': MANIFEST_VERSION,
            'experiment': resolved.get('experiment'),
            'seed': resolved.get('seed'),
            'config': resolved,
            'config_hash': config_hash,
            'outputs': data,
            'figures': figures,
            'checks': checks,
            'budget_exhausted': budget_exhausted,
        }
        path = self.path(MANIFEST_NAME)
        path.write_text(json.dumps(to_jsonable(manifest), indent=2, sort_keys=True) + '\n', encoding='utf-8')
        logger.info(f"Manifest written to {path}")
        return path
