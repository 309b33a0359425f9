"""Multilevel d-dimensional framelet transforms in the frequency domain.

All convolutions are periodic. A band is obtained from the DFT of the
current low-pass data by applying the 1-D transition operator along each
axis in turn (axis 0 first); diagonal sampling matrices make the order
irrelevant. Reconstruction applies the 1-D subdivision operator per axis
and sums bands sharing an axis-label prefix before moving to the next
axis, which keeps the work close to one full-size pass per axis label.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .filterbank import FilterBank1D

__all__ = [
    "ShapeError",
    "CoeffPyramid",
    "transition",
    "subdivision",
    "analyze",
    "synthesize",
    "required_divisor",
    "admissible_length",
    "sym_extend",
    "crop",
    "pad_for_transform",
]


class ShapeError(ValueError):
    """Raised for tensors whose shapes do not fit the requested operation."""


Label = tuple[str, ...]


@dataclass
class CoeffPyramid:
    """Frame coefficients of a J-level decomposition.

    ``levels[j - 1]`` holds level ``j`` (finest first) as a mapping from
    per-axis label tuples to complex coefficient arrays. ``low`` is the
    level-J low-pass data.
    """

    bank_name: str
    J: int
    low: np.ndarray
    levels: list[dict[Label, np.ndarray]]
    original_shape: tuple[int, ...]
    padding: tuple[tuple[int, int], ...] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def ndim(self) -> int:
        return self.low.ndim

    def level_input_shape(self, j: int) -> tuple[int, ...]:
        """Shape of the low-pass data entering level ``j`` (``j = 1`` is the input)."""
        return tuple(int(s) << (self.J - j + 1) for s in self.low.shape)

    def bands(self):
        for j, level in enumerate(self.levels, start=1):
            for label, arr in level.items():
                yield j, label, arr

    def energy(self) -> float:
        tot = float(np.vdot(self.low, self.low).real)
        for _, _, arr in self.bands():
            tot += float(np.vdot(arr, arr).real)
        return tot

    def scalar_count(self) -> int:
        """Real scalars with each conjugate band pair counted once, i.e.
        one per stored complex high-pass coefficient plus the low band."""
        return int(self.low.size) + sum(int(a.size) for _, _, a in self.bands())

    def map_bands(self, fn) -> "CoeffPyramid":
        """New pyramid with ``fn(j, label, arr)`` applied to every high band."""
        levels = [
            {lab: fn(j, lab, arr) for lab, arr in level.items()}
            for j, level in enumerate(self.levels, start=1)
        ]
        return CoeffPyramid(self.bank_name, self.J, self.low.copy(), levels,
                            self.original_shape, self.padding, dict(self.meta))

    def zeros_like(self) -> "CoeffPyramid":
        p = self.map_bands(lambda j, lab, a: np.zeros_like(a))
        p.low = np.zeros_like(self.low)
        return p


def transition(vhat, fhat, M: int):
    """1-D normalized transition operator on DFT samples.

    ``out[k] = M**-0.5 * sum_t vhat[k + t*n/M] * conj(fhat[k + t*n/M])``,
    the DFT of ``M**-0.5 * T_{u,M} v`` for an n-periodic ``v``.
    """
    vhat = np.asarray(vhat)
    return _transition_axis(vhat, np.asarray(fhat), M, vhat.ndim - 1)


def subdivision(what, fhat, M: int):
    """1-D normalized subdivision operator on DFT samples.

    ``out[k] = M**0.5 * what[k mod n/M] * fhat[k]``, the DFT of
    ``M**-0.5 * S_{u,M} w``.
    """
    what = np.asarray(what)
    fhat = np.asarray(fhat)
    if fhat.shape[-1] != what.shape[-1] * M:
        raise ShapeError(
            f"filter has {fhat.shape[-1]} samples, expected {what.shape[-1]} * {M}"
        )
    return _subdivision_axis(what, fhat, M, what.ndim - 1)


def _along(f, ndim, axis):
    shape = [1] * ndim
    shape[axis] = f.shape[0]
    return f.reshape(shape)


def _transition_axis(x, f, M, axis):
    n = x.shape[axis]
    if M < 1 or n % M:
        raise ShapeError(f"axis {axis} of length {n} is not divisible by {M}")
    if f.shape[0] != n:
        raise ShapeError(f"filter has {f.shape[0]} samples, axis has {n}")
    y = x * _along(np.conj(f), x.ndim, axis)
    if M == 1:
        return y
    y = np.moveaxis(y, axis, 0)
    y = y.reshape((M, n // M) + y.shape[1:]).sum(axis=0)
    y *= M ** -0.5
    return np.moveaxis(y, 0, axis)


def _subdivision_axis(w, f, M, axis):
    reps = [1] * w.ndim
    reps[axis] = M
    y = np.tile(w, reps)
    if y.shape[axis] != f.shape[0]:
        raise ShapeError(f"filter has {f.shape[0]} samples, expected {y.shape[axis]}")
    y = y * _along(f, w.ndim, axis)
    if M != 1:
        y *= M ** 0.5
    return y


def required_divisor(bank: FilterBank1D, J: int) -> int:
    """Every axis length must be a multiple of this for a J-level transform."""
    if J <= 0:
        return 1
    return (1 << (J - 1)) * math.lcm(2, bank.max_factor)


def _check_shape(shape, bank, J):
    div = required_divisor(bank, J)
    for ax, n in enumerate(shape):
        if n % div:
            raise ShapeError(
                f"axis {ax} has length {n}; a {J}-level {bank.name} transform "
                f"needs every axis divisible by {div}"
            )


def _analysis_level(vhat, bank: FilterBank1D):
    """Frequency-domain bands of one level plus the next low-pass data."""
    d = vhat.ndim
    shape = vhat.shape
    cache = {}

    def samples(label, axis):
        key = (label, shape[axis])
        if key not in cache:
            cache[key] = bank[label].samples(shape[axis])
        return cache[key]

    partial = {(): vhat}
    for axis in range(d):
        nxt = {}
        for prefix, arr in partial.items():
            for lab in bank.axis_labels:
                nxt[prefix + (lab,)] = _transition_axis(
                    arr, samples(lab, axis), bank.factor(lab), axis
                )
        partial = nxt
    excl = bank.excluded_axis_labels
    bands = {lab: arr for lab, arr in partial.items() if not all(x in excl for x in lab)}

    low = vhat
    a = bank.lowpass
    for axis in range(d):
        low = _transition_axis(low, samples(a.label, axis), a.sampling_factor, axis)
    return bands, low


def analyze(v, bank: FilterBank1D, J: int) -> CoeffPyramid:
    """J-level forward transform of a real or complex d-dimensional array."""
    v = np.asarray(v)
    if v.ndim == 0:
        raise ShapeError("input must have at least one axis")
    if J < 0:
        raise ValueError("J must be >= 0")
    _check_shape(v.shape, bank, J)
    vhat = np.fft.fftn(v)
    levels = []
    for _ in range(J):
        bands, vhat = _analysis_level(vhat, bank)
        levels.append({lab: np.fft.ifftn(b) for lab, b in bands.items()})
    low = np.fft.ifftn(vhat) if J else v.astype(complex)
    return CoeffPyramid(bank.name, J, low, levels, tuple(v.shape))


def _synthesis_level(bands_hat: dict, low_hat, bank: FilterBank1D, shape):
    d = len(shape)
    current = dict(bands_hat)
    for axis in reversed(range(d)):
        n = shape[axis]
        nxt = {}
        for lab, arr in current.items():
            u = bank[lab[axis]]
            up = _subdivision_axis(arr, u.samples(n), u.sampling_factor, axis)
            key = lab[:axis]
            if key in nxt:
                nxt[key] += up
            else:
                nxt[key] = up
        current = nxt
    out = current.get((), None)

    a = bank.lowpass
    y = low_hat
    for axis in reversed(range(d)):
        y = _subdivision_axis(y, a.samples(shape[axis]), a.sampling_factor, axis)
    return y if out is None else out + y


def synthesize(p: CoeffPyramid, bank: FilterBank1D, *, with_diagnostic: bool = False):
    """Inverse transform; returns the real part of the reconstruction.

    With ``with_diagnostic=True`` returns ``(x, max_abs_imag)``.
    """
    if p.bank_name != bank.name:
        raise ShapeError(f"pyramid was built with {p.bank_name}, not {bank.name}")
    if len(p.levels) != p.J:
        raise ShapeError(f"pyramid declares J={p.J} but holds {len(p.levels)} levels")
    expected = set(bank.band_labels(p.ndim))
    vhat = np.fft.fftn(p.low)
    for j in range(p.J, 0, -1):
        shape = p.level_input_shape(j)
        level = p.levels[j - 1]
        if set(level) != expected:
            raise ShapeError(f"level {j} band labels do not match {bank.name} in {p.ndim}-D")
        bands_hat = {}
        for lab, arr in level.items():
            want = tuple(n // bank.factor(x) for n, x in zip(shape, lab))
            if arr.shape != want:
                raise ShapeError(f"band {lab} at level {j} has shape {arr.shape}, expected {want}")
            bands_hat[lab] = np.fft.fftn(arr)
        vhat = _synthesis_level(bands_hat, vhat, bank, shape)
    x = np.fft.ifftn(vhat) if p.J else np.asarray(p.low, dtype=complex)
    imag = float(np.max(np.abs(x.imag))) if x.size else 0.0
    if with_diagnostic:
        return x.real.copy(), imag
    return x.real.copy()


def admissible_length(n: int, divisor: int, min_pad: int = 16) -> int:
    """Smallest multiple of ``divisor`` that is at least ``n + 2*min_pad``."""
    need = n + 2 * min_pad
    return -(-need // divisor) * divisor


def sym_extend(v, target_shape):
    """Half-point symmetric extension (``E(-1-k) = v(k)``) to ``target_shape``.

    Returns ``(extended, padding)``; padding is ``(left, right)`` per axis
    with the extra sample, if any, on the right.
    """
    v = np.asarray(v)
    target_shape = tuple(int(t) for t in target_shape)
    if len(target_shape) != v.ndim:
        raise ShapeError(f"target has {len(target_shape)} axes, input has {v.ndim}")
    padding = []
    for n, t in zip(v.shape, target_shape):
        if t < n:
            raise ShapeError(f"target length {t} is smaller than input length {n}")
        left = (t - n) // 2
        padding.append((left, t - n - left))
    return np.pad(v, padding, mode="symmetric"), tuple(padding)


def crop(v, original_shape, padding):
    v = np.asarray(v)
    sl = tuple(slice(l, l + n) for (l, _), n in zip(padding, original_shape))
    return v[sl]


def pad_for_transform(v, bank: FilterBank1D, J: int, min_pad: int = 16):
    """Symmetric extension to the smallest admissible shape with at least
    ``min_pad`` samples per side."""
    v = np.asarray(v)
    div = required_divisor(bank, J)
    target = tuple(admissible_length(n, div, min_pad) for n in v.shape)
    return sym_extend(v, target)
