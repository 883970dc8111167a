"""Counter-based exponential weight fields on the integer lattice.

A field never stores weights.  The weight at a vertex is recomputed on
demand from ``(master_seed, trial_index, x, y)`` through a stateless 64-bit
mixing function, so a trial's environment is a pure value that can be
discounted on a region, spliced with another field, or shared by threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace
import math
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .errors import CoordinateOverflowError, DomainError
from .regions import PLANE, Region, Union

COORD_LIMIT = 2**40
MASK64 = (1 << 64) - 1
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_GOLDEN = 0x9E3779B97F4A7C15


class LatticePoint(NamedTuple):
    x: int
    y: int


def as_point(p) -> LatticePoint:
    """Coerce ``p`` to a LatticePoint and apply the coordinate guard."""
    x, y = int(p[0]), int(p[1])
    if abs(x) > COORD_LIMIT or abs(y) > COORD_LIMIT or abs(x + y) > COORD_LIMIT:
        raise CoordinateOverflowError(f"point {(x, y)} exceeds the 2**40 coordinate guard")
    return LatticePoint(x, y)


def _fmix_int(z):
    z &= MASK64
    z ^= z >> 30
    z = (z * _M1) & MASK64
    z ^= z >> 27
    z = (z * _M2) & MASK64
    return z ^ (z >> 31)


def domain_key(master_seed: int, trial_index: int) -> int:
    """64-bit key of the counter domain ``(master_seed, trial_index)``."""
    a = _fmix_int(master_seed + _GOLDEN)
    b = _fmix_int((trial_index * _M2 + 2 * _GOLDEN) & MASK64)
    return _fmix_int(a ^ b ^ 0x243F6A8885A308D3)


@dataclass(frozen=True)
class Override:
    field: "WeightField"
    region: Region


@dataclass(frozen=True)
class WeightField:
    """Immutable description of a weight environment.

    Evaluation order at a point: the override region (if any) defers to
    the secondary field, then the discount region returns 0, otherwise the
    field's own Exp(1) stream (or ``constant``, for synthetic fixtures).
    """

    master_seed: int
    trial_index: int
    discount_region: Optional[Region] = None
    override_source: Optional[Override] = None
    constant: Optional[float] = dc_field(default=None, compare=True)

    def __post_init__(self):
        for name in ("master_seed", "trial_index"):
            v = getattr(self, name)
            if not 0 <= v <= MASK64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v}")

    @property
    def key(self) -> int:
        return domain_key(self.master_seed, self.trial_index)

    def domains(self) -> set:
        """Counter domains this field may read from."""
        own = set() if self.constant is not None else {(self.master_seed, self.trial_index)}
        if self.override_source is not None:
            own |= self.override_source.field.domains()
        return own

    @cached_property
    def compiled(self):
        nodes, keys, consts, regions = [], [], [], []

        def region_id(region):
            regions.append(region.compiled())
            return len(regions) - 1

        def emit(f):
            idx = len(nodes)
            nodes.append(None)
            if f.override_source is not None:
                rid = region_id(f.override_source.region)
                inner = emit(f.override_source.field)
                outer = emit(replace(f, override_source=None))
                nodes[idx] = (_kernels.NODE_SELECT, rid, inner, outer)
            elif f.discount_region is not None:
                rid = region_id(f.discount_region)
                child = emit(replace(f, discount_region=None))
                nodes[idx] = (_kernels.NODE_DISCOUNT, rid, child, 0)
            else:
                keys.append(f.key)
                consts.append(np.nan if f.constant is None else float(f.constant))
                nodes[idx] = (_kernels.NODE_LEAF, len(keys) - 1, 0, 0)
            return idx

        emit(self)
        offsets = np.zeros(len(regions) + 1, dtype=np.int64)
        offsets[1:] = np.cumsum([len(r) for r in regions])
        prog = np.concatenate(regions) if regions else np.zeros((0, 5), dtype=np.int64)
        return CompiledField(
            np.asarray(nodes, dtype=np.int64),
            np.asarray(keys, dtype=np.uint64),
            np.asarray(consts, dtype=np.float64),
            prog,
            offsets,
        )

    def with_extra_region(self, region: Region):
        """Compiled arrays plus one appended region program; returns its id."""
        c = self.compiled
        extra = region.compiled()
        prog = np.concatenate([c.rprog, extra])
        offsets = np.append(c.roff, c.roff[-1] + len(extra))
        return CompiledField(c.nodes, c.lkeys, c.lconst, prog, offsets), len(offsets) - 2


class CompiledField(NamedTuple):
    nodes: np.ndarray
    lkeys: np.ndarray
    lconst: np.ndarray
    rprog: np.ndarray
    roff: np.ndarray


def derive_trial_field(master_seed: int, trial_index: int) -> WeightField:
    """Field of trial ``trial_index`` in the campaign keyed by ``master_seed``."""
    return WeightField(int(master_seed), int(trial_index))


def constant_field(value: float) -> WeightField:
    """Field equal to ``value`` everywhere (a fixture for constructed cases)."""
    return WeightField(0, 0, constant=float(value))


def with_discount(field: WeightField, region: Region) -> WeightField:
    """Copy of ``field`` whose weights are 0 on ``region``."""
    disc = region if field.discount_region is None else Union((field.discount_region, region))
    over = field.override_source
    if over is not None:
        over = Override(with_discount(over.field, region), over.region)
    return replace(field, discount_region=disc, override_source=over)


def hybrid_field(inside: WeightField, outside: WeightField, region: Region) -> WeightField:
    """Field equal to ``inside`` on ``region`` and to ``outside`` elsewhere."""
    shared = inside.domains() & outside.domains()
    if shared:
        raise DomainError(f"inside and outside share counter domains {sorted(shared)}")
    return _splice(inside, outside, region)


def _splice(inside, outside, region):
    over = outside.override_source
    if over is None:
        return replace(outside, override_source=Override(inside, region))
    merged = _splice(inside, over.field, region)
    return replace(outside, override_source=Override(merged, Union((region, over.region))))


# Vectorised evaluation, independent of the compiled kernels.

def _fmix_np(z):
    z = z ^ (z >> np.uint64(30))
    z = z * np.uint64(_M1)
    z = z ^ (z >> np.uint64(27))
    z = z * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def _uniform_np(key, xs, ys):
    xu = np.asarray(xs, dtype=np.int64).astype(np.uint64)
    yu = np.asarray(ys, dtype=np.int64).astype(np.uint64)
    h = _fmix_np(np.uint64(key) ^ xu)
    h = _fmix_np(h ^ (yu * np.uint64(_GOLDEN)))
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def _exp_from_uniform(u):
    # libm log1p, bit-identical to the compiled kernels (numpy's SIMD log1p is not)
    return -np.fromiter(map(math.log1p, (-u).tolist()), dtype=np.float64, count=u.size)


def uniforms(field: WeightField, xs, ys) -> np.ndarray:
    """The underlying uniforms of the field's own stream (no regions applied)."""
    with np.errstate(over="ignore"):
        return _uniform_np(field.key, xs, ys)


def weights(field: WeightField, xs, ys) -> np.ndarray:
    """Weights at many points at once; shapes of ``xs`` and ``ys`` must match."""
    xs = np.atleast_1d(np.asarray(xs, dtype=np.int64))
    ys = np.atleast_1d(np.asarray(ys, dtype=np.int64))
    if xs.size and (np.abs(xs).max() > COORD_LIMIT or np.abs(ys).max() > COORD_LIMIT
                    or np.abs(xs + ys).max() > COORD_LIMIT):
        raise CoordinateOverflowError("coordinates exceed the 2**40 coordinate guard")
    return _weights_tree(field, xs, ys)


def _weights_tree(f, xs, ys):
    out = np.empty(xs.shape, dtype=np.float64)
    todo = np.ones(xs.shape, dtype=bool)
    if f.override_source is not None:
        m = f.override_source.region.mask(xs, ys)
        if m.any():
            out[m] = _weights_tree(f.override_source.field, xs[m], ys[m])
        todo &= ~m
    if f.discount_region is not None:
        m = todo & f.discount_region.mask(xs, ys)
        out[m] = 0.0
        todo &= ~m
    if todo.any():
        if f.constant is not None:
            out[todo] = f.constant
        else:
            out[todo] = _exp_from_uniform(uniforms(f, xs[todo], ys[todo]))
    return out


def weight_at(field: WeightField, p) -> float:
    """Exp(1) weight of vertex ``p`` (0 inside the discount region)."""
    x, y = as_point(p)
    return float(weights(field, [x], [y])[0])


def compiled_weights(field: WeightField, xs, ys) -> np.ndarray:
    """Same values as :func:`weights`, through the compiled kernel."""
    c = field.compiled
    xs = np.ascontiguousarray(xs, dtype=np.int64)
    ys = np.ascontiguousarray(ys, dtype=np.int64)
    return _kernels.weights_block(c.nodes, c.lkeys, c.lconst, c.rprog, c.roff, xs, ys)


__all__ = [
    "COORD_LIMIT",
    "LatticePoint",
    "WeightField",
    "Override",
    "as_point",
    "compiled_weights",
    "constant_field",
    "derive_trial_field",
    "domain_key",
    "hybrid_field",
    "uniforms",
    "weight_at",
    "weights",
    "with_discount",
    "PLANE",
]
