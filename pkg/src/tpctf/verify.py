"""Numerical checks of the structural properties of the framelet banks.

Everything here is evaluated on DFT grids or by brute force, independently
of the fast transform wherever possible, so the checks can serve as
oracles for :mod:`tpctf.transform`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .filterbank import BankKind, FilterBank1D, SampledFilter, _check_grid, multilevel_filter
from .transform import CoeffPyramid, analyze

__all__ = [
    "PRReport",
    "check_pr",
    "check_energy",
    "check_frequency_separation",
    "das_equivalence",
    "RedundancyResult",
    "redundancy",
    "measured_redundancy",
    "DAS_MAX_N",
]

PR_TOL = 1e-12
DAS_MAX_N = 128


@dataclass
class PRReport:
    """Grid residuals of the perfect-reconstruction identities.

    ``residuals`` maps a condition name to ``max_k |LHS - RHS|``; the names
    are ``<subbank>:sum`` for the energy partition and ``<subbank>:w=p/q``
    for each alias offset.
    """

    n: int
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = PR_TOL

    @property
    def passed(self) -> bool:
        return all(r < self.tol for r in self.residuals.values())

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)

    def __str__(self):
        lines = [f"{k}={v:.3e}" for k, v in self.residuals.items()]
        return "\n".join(lines)


def _subbanks(bank: FilterBank1D) -> dict[str, list[SampledFilter]]:
    """The 1-D filter banks whose PR identities must hold.

    Banks with auxiliary ``AP``/``AN`` filters are checked both with the
    real low-pass and with the pair in its place.
    """
    highs = [f for f in bank.filters if f.label.startswith("B")]
    if bank.kind is BankKind.CTF_ODD:
        return {"lowpass": [bank.lowpass, *highs]}
    pair = [bank["AP"], bank["AN"]]
    return {"lowpass": [bank.lowpass, *highs], "split": [*pair, *highs]}


def _pr_residuals(filters, n: int, prefix: str) -> dict[str, float]:
    samples = [(f.sampling_factor, f.samples(n)) for f in filters]
    out = {}
    total = sum(np.abs(s) ** 2 for _, s in samples)
    out[f"{prefix}:sum"] = float(np.max(np.abs(total - 1.0)))

    offsets = sorted({Fraction(g, M) for M, _ in samples for g in range(1, M)})
    k = np.arange(n)
    for w in offsets:
        shift = int(w * n)
        acc = np.zeros(n, dtype=complex)
        for M, s in samples:
            if (w * M).denominator == 1:
                acc += s * np.conj(s[(k + shift) % n])
        out[f"{prefix}:w={w}"] = float(np.max(np.abs(acc)))
    return out


def check_pr(bank: FilterBank1D, n: int, tol: float = PR_TOL) -> PRReport:
    """Evaluate ``sum |u|^2 = 1`` and every alias cancellation
    ``sum_{u: w in Omega_M(u)} u(xi) conj(u(xi + 2 pi w)) = 0`` on the grid."""
    _check_grid(n, math.lcm(2, bank.max_factor))
    report = PRReport(n, tol=tol)
    for name, filters in _subbanks(bank).items():
        report.residuals.update(_pr_residuals(filters, n, name))
    return report


def check_energy(bank: FilterBank1D, v, J: int) -> float:
    """Relative defect of ``||v||^2 = ||low||^2 + sum ||w||^2``."""
    v = np.asarray(v)
    ref = float(np.vdot(v, v).real)
    if ref == 0.0:
        return 0.0
    return abs(ref - analyze(v, bank, J).energy()) / ref


def check_frequency_separation(bank: FilterBank1D, j_max: int, n: int, j_min: int = 2):
    """Leakage of the directional high-pass filters onto the wrong half-axis.

    Returns ``{(l, j): (max_p, max_n)}`` where ``max_p`` is the largest
    modulus of the level-``j`` filter ``BPl`` on grid points in ``[-pi, 0]``
    and ``max_n`` that of ``BNl`` on ``[0, pi]``.
    """
    _check_grid(n, 2 ** j_max)
    m = np.arange(n)
    m = np.where(m < n // 2, m, m - n)
    neg = m <= 0
    pos = (m >= 0) | (m == -n // 2)
    out = {}
    for l in range(1, bank.params.s + 1):
        for j in range(j_min, j_max + 1):
            bp = multilevel_filter(bank, f"BP{l}", j, n)
            bn = multilevel_filter(bank, f"BN{l}", j, n)
            out[(l, j)] = (float(np.max(np.abs(bp[neg]))), float(np.max(np.abs(bn[pos]))))
    return out


def _spatial(symbol):
    # f(k) with symbol(xi) = sum_k f(k) exp(-i k xi)
    return np.fft.ifft(symbol)


def _inner_products(v, element, step: int):
    n = v.shape[0]
    count = n // step
    out = np.empty(count, dtype=complex)
    for k in range(count):
        shifted = np.roll(element, step * k)
        out[k] = np.sum(v * np.conj(shifted))
    return out


def das_coefficients(bank: FilterBank1D, v, J: int) -> CoeffPyramid:
    """Frame coefficients of a 1-D signal computed as explicit inner products
    with the elements of the discrete affine system.

    Level ``j`` band ``u`` uses ``sqrt(2^(j-1) M_u) u_j(. - 2^(j-1) M_u k)``;
    the low band uses ``2^(J/2) a_J(. - 2^J k)``. Cost is quadratic in
    ``n``.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError("the brute-force oracle is one-dimensional")
    n = v.shape[0]
    if n > DAS_MAX_N:
        raise ValueError(f"brute-force oracle refuses n={n} > {DAS_MAX_N}")
    if J == 0:
        return CoeffPyramid(bank.name, 0, v.copy(), [], (n,))
    levels = []
    for j in range(1, J + 1):
        level = {}
        for lab in bank.band_labels(1):
            M = bank.factor(lab[0])
            step = (1 << (j - 1)) * M
            u = _spatial(multilevel_filter(bank, lab[0], j, n))
            level[lab] = math.sqrt(step) * _inner_products(v, u, step)
        levels.append(level)
    k = np.arange(n)
    aJ = np.ones(n, dtype=complex)
    a = bank.lowpass.samples(n)
    for t in range(J):
        aJ = aJ * a[(k << t) % n]
    low = 2 ** (J / 2) * _inner_products(v, _spatial(aJ), 1 << J)
    return CoeffPyramid(bank.name, J, low, levels, (n,))


def das_equivalence(bank: FilterBank1D, n: int, J: int, v=None, seed: int = 0) -> float:
    """Max deviation between :func:`analyze` and :func:`das_coefficients`."""
    if n > DAS_MAX_N:
        raise ValueError(f"brute-force oracle refuses n={n} > {DAS_MAX_N}")
    if v is None:
        v = np.random.default_rng(seed).standard_normal(n)
    fast = analyze(v, bank, J)
    slow = das_coefficients(bank, v, J)
    dev = float(np.max(np.abs(fast.low - slow.low)))
    for (j, lab, arr) in fast.bands():
        dev = max(dev, float(np.max(np.abs(arr - slow.levels[j - 1][lab]))))
    return dev


@dataclass(frozen=True)
class RedundancyResult:
    """Redundancy rates as exact rationals.

    ``finite`` is the rate of a ``J``-level transform (``None`` when only
    the limit was requested), ``limit`` the ``J -> infinity`` rate and
    ``measured`` the count from an actual pyramid, if one was supplied.
    """

    d: int
    J: int | None
    finite: Fraction | None
    limit: Fraction
    measured: Fraction | None = None


def _band_rule(kind: BankKind, d: int, s: int):
    """(high-pass bands per level, per-axis high-pass factor)."""
    if kind is BankKind.CTF6_DOWN:
        return 6 ** d - 2 ** d, 4
    if kind is BankKind.CTF_EVEN:
        return (2 * s + 2) ** d - 2 ** d, 2
    return (2 * s + 1) ** d - 1, 2


def _as_kind(kind) -> tuple[BankKind, int]:
    if isinstance(kind, FilterBank1D):
        return kind.kind, kind.params.s
    if isinstance(kind, str) and kind in ("ctf3", "ctf6", "ctf6down"):
        return {"ctf3": (BankKind.CTF_ODD, 1), "ctf6": (BankKind.CTF_EVEN, 2),
                "ctf6down": (BankKind.CTF6_DOWN, 2)}[kind]
    k = BankKind(kind)
    return k, 2 if k is not BankKind.CTF_ODD else 1


def redundancy(kind, d: int, J: int | None = None, s: int | None = None,
               pyramid: CoeffPyramid | None = None) -> RedundancyResult:
    """Exact redundancy rate of the d-dimensional transform.

    Each complex coefficient counts as two real scalars and each conjugate
    band pair is counted once, so every stored complex high-pass
    coefficient contributes one scalar. ``kind`` may be a bank, a
    :class:`BankKind` or a bank name; ``J=None`` requests only the limit.
    """
    bk, s0 = _as_kind(kind)
    s = s0 if s is None else s
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d > 10 or (J is not None and J > 64):
        raise OverflowError("redundancy is only tabulated for d <= 10 and J <= 64")
    if J is not None and J < 0:
        raise ValueError("J must be >= 0")
    H, F = _band_rule(bk, d, s)
    first = Fraction(H, F ** d)
    shrink = Fraction(1, 2 ** d)
    limit = first / (1 - shrink)
    finite = None
    if J is not None:
        finite = sum((first * shrink ** (j - 1) for j in range(1, J + 1)), Fraction(0))
        finite += shrink ** J
    measured = measured_redundancy(pyramid) if pyramid is not None else None
    return RedundancyResult(d, J, finite, limit, measured)


def measured_redundancy(p: CoeffPyramid) -> Fraction:
    """Stored coefficients over input samples, as an exact rational."""
    return Fraction(p.scalar_count(), math.prod(p.original_shape))
