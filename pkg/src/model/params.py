"""Model parameters and the canonical site ordering."""

import json
import math
import numbers
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ..core.errors import ParameterError

JSON_KEYS = ('L', 'N', 'delta_c', 'delta_n', 'J_c', 'g_left', 'g_right', 'phi', 'omega', 'pos')
PHI_SLACK = 1e-12


def _floats(values: Sequence[Any], name: str) -> Tuple[float, ...]:
    try:
        out = tuple(float(v) for v in values)
    except (TypeError, ValueError) as e:
        raise ParameterError(f"{name} must be a list of numbers: {e}") from e
    if not all(math.isfinite(v) for v in out):
        raise ParameterError(f"{name} contains non-finite values")
    return out


def _integer(value: Any, name: str, minimum: int) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Real) or int(value) != value:
        raise ParameterError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise ParameterError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


@dataclass(frozen=True)
class SiteOrdering:
    """Interleaved physical ordering of cavity spins and atoms.

    Atom n_i sits immediately after cavity spin L[n_i], e.g. for L=10 and
    pos=(2, 8): c1, c2, n1, c3, ..., c8, n2, c9, c10.
    """

    labels: Tuple[str, ...]
    cavity_index: Tuple[int, ...]
    atom_index: Tuple[int, ...]
    left_neighbor: Tuple[int, ...]
    right_neighbor: Tuple[int, ...]

    @property
    def n_total(self) -> int:
        return len(self.labels)

    def index_of(self, label: str) -> int:
        """Index of a site tag such as 'c3' or 'n1'."""
        try:
            return self.labels.index(label)
        except ValueError:
            raise ParameterError(f"Unknown site label: {label}") from None

    def is_atom(self, index: int) -> bool:
        return index in self.atom_index


@dataclass(frozen=True)
class ModelParams:
    """Full parameter record of the driven, chirally coupled spin cavity.

    Energies are in units of J. Lists are stored as tuples so instances are
    hashable and safe to share between threads and processes.

    Attributes:
        L: Cavity length
        N: Number of atoms
        delta_c: On-site energies of the L cavity spins
        delta_n: On-site energies of the N atoms
        J_c: L-1 nearest-neighbour hoppings
        g_left: Per-atom coupling to the left cavity spin L[n_i]
        g_right: Per-atom coupling to the right cavity spin R[n_i] = L[n_i] + 1
        phi: Per-atom hopping phase in [0, pi/2]
        omega: Per-atom classical driving strength
        pos: Per-atom left-neighbour position L[n_i], 1-based
    """

    L: int
    N: int
    delta_c: Tuple[float, ...]
    delta_n: Tuple[float, ...]
    J_c: Tuple[float, ...]
    g_left: Tuple[float, ...]
    g_right: Tuple[float, ...]
    phi: Tuple[float, ...]
    omega: Tuple[float, ...]
    pos: Tuple[int, ...]
    _ordering: Optional[SiteOrdering] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'L', _integer(self.L, 'L', minimum=2))
        object.__setattr__(self, 'N', _integer(self.N, 'N', minimum=1))

        for name in ('delta_c', 'delta_n', 'J_c', 'g_left', 'g_right', 'phi', 'omega'):
            object.__setattr__(self, name, _floats(getattr(self, name), name))
        try:
            positions = tuple(int(p) for p in self.pos)
        except (TypeError, ValueError) as e:
            raise ParameterError(f"pos must be a list of integers: {e}") from e
        if any(int(p) != p for p in self.pos):
            raise ParameterError("pos must contain integers")
        object.__setattr__(self, 'pos', positions)

        expected = {
            'delta_c': self.L, 'J_c': self.L - 1, 'delta_n': self.N, 'g_left': self.N,
            'g_right': self.N, 'phi': self.N, 'omega': self.N, 'pos': self.N,
        }
        for name, length in expected.items():
            if len(getattr(self, name)) != length:
                raise ParameterError(
                    f"{name} has length {len(getattr(self, name))}, expected {length}"
                )

        for name in ('J_c', 'g_left', 'g_right', 'omega'):
            if any(v < 0 for v in getattr(self, name)):
                raise ParameterError(f"{name} must be nonnegative")
        if any(p < -PHI_SLACK or p > math.pi / 2 + PHI_SLACK for p in self.phi):
            raise ParameterError("phi must lie in [0, pi/2]")

        for i, p in enumerate(self.pos):
            if p < 1 or p > self.L - 1:
                raise ParameterError(f"pos[{i}]={p} outside [1, {self.L - 1}]")
        for i in range(self.N - 1):
            if self.pos[i] + 1 >= self.pos[i + 1]:
                raise ParameterError(
                    f"atoms {i + 1} and {i + 2} overlap: R[n_{i + 1}]={self.pos[i] + 1} "
                    f">= L[n_{i + 2}]={self.pos[i + 1]}"
                )

    @property
    def n_total(self) -> int:
        """Total number of sites N_T = L + N."""
        return self.L + self.N

    @property
    def ordering(self) -> SiteOrdering:
        """Canonical interleaved site ordering (computed once)."""
        if self._ordering is None:
            object.__setattr__(self, '_ordering', site_ordering(self))
        return self._ordering

    @property
    def is_driven(self) -> bool:
        return any(w != 0.0 for w in self.omega)

    def replace(self, **changes) -> 'ModelParams':
        """Copy with some fields changed (validated again)."""
        return replace(self, **changes)

    def with_couplings(self, g_left: Sequence[float], g_right: Sequence[float]) -> 'ModelParams':
        return replace(self, g_left=tuple(g_left), g_right=tuple(g_right))

    @classmethod
    def uniform(
        cls,
        L: int,
        pos: Sequence[int],
        g: float = 0.1,
        phi: float = math.pi / 4,
        J: float = 1.0,
        delta: float = 0.0,
        omega: float = 0.0,
    ) -> 'ModelParams':
        """
        Homogeneous cavity with identical atoms.

        Args:
            L: Cavity length
            pos: Left-neighbour positions of the atoms
            g: Coupling amplitude on both sides of every atom
            phi: Hopping phase of every atom
            J: Uniform cavity hopping
            delta: On-site energy of every cavity spin and atom
            omega: Driving strength of every atom

        Returns:
            ModelParams
        """
        n = len(pos)
        return cls(
            L=L, N=n,
            delta_c=(delta,) * L, delta_n=(delta,) * n,
            J_c=(J,) * (L - 1),
            g_left=(g,) * n, g_right=(g,) * n,
            phi=(phi,) * n, omega=(omega,) * n,
            pos=tuple(pos),
        )

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data.pop('_ordering', None)
        return {key: (list(data[key]) if isinstance(data[key], tuple) else data[key]) for key in JSON_KEYS}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ModelParams':
        """Build from the JSON schema; unknown or missing keys raise ParameterError."""
        if not isinstance(data, dict):
            raise ParameterError("model parameters must be a JSON object")
        unknown = sorted(set(data) - set(JSON_KEYS))
        if unknown:
            raise ParameterError(f"Unknown model keys: {', '.join(unknown)}")
        missing = [key for key in JSON_KEYS if key not in data]
        if missing:
            raise ParameterError(f"Missing model keys: {', '.join(missing)}")
        return cls(**{key: data[key] for key in JSON_KEYS})

    def to_json(self, indent: Optional[int] = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, text: str) -> 'ModelParams':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ParameterError(f"Invalid model JSON: {e}") from e
        return cls.from_dict(data)


def site_ordering(p: ModelParams) -> SiteOrdering:
    """
    Build the interleaved ordering for a parameter set.

    Args:
        p: Model parameters

    Returns:
        SiteOrdering with per-site tags and index lookups
    """
    labels: List[str] = []
    cavity_index: List[int] = []
    atom_index: List[int] = []
    atoms_after = {p.pos[a]: a for a in range(p.N)}
    for site in range(1, p.L + 1):
        cavity_index.append(len(labels))
        labels.append(f"c{site}")
        if site in atoms_after:
            atom_index.append(len(labels))
            labels.append(f"n{atoms_after[site] + 1}")
    left = tuple(cavity_index[p.pos[a] - 1] for a in range(p.N))
    right = tuple(cavity_index[p.pos[a]] for a in range(p.N))
    return SiteOrdering(
        labels=tuple(labels),
        cavity_index=tuple(cavity_index),
        atom_index=tuple(atom_index),
        left_neighbor=left,
        right_neighbor=right,
    )


def standard_model(L: int = 10, g: float = 0.1, phi: float = math.pi / 4) -> ModelParams:
    """Ordered study geometry with atoms at L[n1]=2 and L[n2]=L-2."""
    return ModelParams.uniform(L, pos=(2, L - 2), g=g, phi=phi)
