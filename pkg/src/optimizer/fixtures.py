"""Published optimal parameter tables shipped as JSON replay fixtures.

Files live in ``data/`` as ``<mode>_r<r>.json``. Each holds the geometry the
table was produced for, its column layout (the angle layout of the mode) and
one row of engineered values per stopping time.
"""

import json
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import ConfigError, ParameterError
from ..model.params import ModelParams
from .objective import MODES, n_angles

DATA_DIR = Path(__file__).parent / 'data'


@dataclass(frozen=True)
class FixtureTable:
    mode: str
    r: float
    geometry: Dict[str, object]
    columns: Tuple[str, ...]
    rows: Dict[float, Tuple[float, ...]]
    source: str

    @property
    def stopping_times(self) -> List[float]:
        return sorted(self.rows)

    def base_model(self) -> ModelParams:
        """Model the table's values are substituted into."""
        geo = self.geometry
        if self.mode == 'onsite':
            return ModelParams.uniform(int(geo['L']), pos=tuple(geo['pos']), g=float(geo['g']),
                                       phi=float(geo['phi']), J=float(geo['J']))
        return ModelParams.uniform(int(geo['L']), pos=tuple(geo['pos']), phi=float(geo['phi']),
                                   delta=float(geo['delta']))

    def row(self, t_f: float) -> Tuple[float, ...]:
        for key, values in self.rows.items():
            if abs(key - t_f) < 1e-9:
                return values
        raise ParameterError(
            f"No {self.mode} r={self.r} row for t_f={t_f} (available: {self.stopping_times})"
        )


def fixture_path(mode: str, r: float) -> Path:
    return DATA_DIR / f"{mode}_r{r:.1f}.json"


def available_tables() -> List[Tuple[str, float]]:
    """(mode, r) of every shipped table."""
    tables = []
    for path in sorted(DATA_DIR.glob('*_r*.json')):
        mode, _, r = path.stem.partition('_r')
        tables.append((mode, float(r)))
    return tables


@lru_cache(maxsize=None)
def load_table(mode: str, r: float) -> FixtureTable:
    """
    Load one fixture table.

    Raises:
        ParameterError: unknown mode or no table for r
        ConfigError: malformed fixture file
    """
    if mode not in MODES:
        raise ParameterError(f"mode must be one of {MODES}, got {mode!r}")
    path = fixture_path(mode, r)
    if not path.exists():
        known = sorted(rr for m, rr in available_tables() if m == mode)
        raise ParameterError(f"No {mode} fixture for r={r} (available: {known})")
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
        rows = {float(t): tuple(float(v) for v in values) for t, values in data['rows'].items()}
        table = FixtureTable(
            mode=data['mode'], r=float(data['r']), geometry=dict(data['geometry']),
            columns=tuple(data['columns']), rows=rows, source=data.get('source', ''),
        )
    except (OSError, KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"Malformed fixture {path.name}: {e}") from e
    width = len(table.columns)
    if any(len(values) != width for values in rows.values()):
        raise ConfigError(f"Fixture {path.name} has rows that do not match its {width} columns")
    return table


def fixture_params(base: Optional[ModelParams], mode: str, r: float, t_f: float) -> ModelParams:
    """
    Parameters of one published row substituted into base.

    Args:
        base: Model to substitute into (default: the table's own geometry)
        mode: 'onsite' or 'hopping'
        r: Table bound
        t_f: Stopping time of the row

    Returns:
        ModelParams
    """
    table = load_table(mode, r)
    model = table.base_model() if base is None else base
    values = np.array(table.row(t_f))
    if values.size != n_angles(mode, model):
        raise ParameterError(f"Fixture row has {values.size} values; the model needs {n_angles(mode, model)}")
    if mode == 'onsite':
        return model.replace(delta_c=tuple(values[:model.L]), delta_n=tuple(values[model.L:]))
    couplings = values[model.L - 1:].reshape(model.N, 2)
    return model.replace(
        J_c=tuple(values[:model.L - 1]), g_left=tuple(couplings[:, 0]), g_right=tuple(couplings[:, 1])
    )
