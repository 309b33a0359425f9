"""One-dimensional complex tight framelet filter banks built from bump functions.

Every filter here is band-limited: it is defined by a closed-form,
2*pi-periodic frequency response and is never realised as spatial taps.
Filters are sampled on the DFT grid ``xi_k = 2*pi*k/n`` wrapped into
``[-pi, pi)``; the sample at ``k = n/2`` is the point ``-pi``.

Three families are supported:

``CTF_ODD``    {a; b1p..bsp, b1n..bsn}, all sampled by 2.
``CTF_EVEN``   {ap, an; b1p..bsp, b1n..bsn}, all sampled by 2, with the
               real low-pass ``a`` kept aside as the recursive branch.
``CTF6_DOWN``  {a (by 2); ap, an, b1p, b2p, b1n, b2n (by 4)}.
"""

from __future__ import annotations

import ast
import enum
import itertools
import math
import operator
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BankKind",
    "BumpSegment",
    "FrameletParams",
    "SampledFilter",
    "FilterBank1D",
    "ValidationReport",
    "ParameterError",
    "GridError",
    "bump_eval",
    "periodic_bump",
    "grid",
    "validate_ctf6down",
    "validate_params",
    "build_bank",
    "sample_filter",
    "filter_l2_norm_sq",
    "multilevel_filter",
    "reference_params",
    "default_bank",
    "BANK_NAMES",
]

TWO_PI = 2.0 * math.pi
# slack allowed when a parameter inequality is met with equality
INEQ_TOL = 1e-12


class ParameterError(ValueError):
    """Raised when framelet parameters violate a construction condition."""


class GridError(ValueError):
    """Raised for frequency grids that cannot carry the requested samples."""


class BankKind(str, enum.Enum):
    CTF_ODD = "CTF_ODD"
    CTF_EVEN = "CTF_EVEN"
    CTF6_DOWN = "CTF6_DOWN"


@dataclass(frozen=True)
class BumpSegment:
    """Plateau ``[cL, cR]`` flanked by cosine transitions of half-widths
    ``epsL`` and ``epsR``."""

    cL: float
    cR: float
    epsL: float
    epsR: float

    def __post_init__(self):
        if not (self.epsL > 0 and self.epsR > 0):
            raise ParameterError(
                f"bump transition widths must be positive, got {self.epsL}, {self.epsR}"
            )
        if self.epsL + self.epsR > self.cR - self.cL + INEQ_TOL:
            raise ParameterError(
                f"empty plateau: epsL + epsR = {self.epsL + self.epsR!r} "
                f"> cR - cL = {self.cR - self.cL!r}"
            )

    @property
    def support(self) -> tuple[float, float]:
        return self.cL - self.epsL, self.cR + self.epsR


def bump_eval(seg: BumpSegment, xi):
    """Evaluate the (non-periodic) bump function at ``xi``.

    Accepts scalars or arrays; a scalar input returns a Python float.
    """
    x = np.asarray(xi, dtype=float)
    cL, cR, eL, eR = seg.cL, seg.cR, seg.epsL, seg.epsR
    out = np.zeros_like(x)
    left = (x > cL - eL) & (x < cL + eL)
    plateau = (x >= cL + eL) & (x <= cR - eR)
    right = (x > cR - eR) & (x < cR + eR) & ~plateau
    out[left] = np.cos(np.pi * (cL + eL - x[left]) / (4.0 * eL))
    out[plateau] = 1.0
    out[right] = np.cos(np.pi * (x[right] - cR + eR) / (4.0 * eR))
    if out.ndim == 0:
        return float(out)
    return out


def periodic_bump(seg: BumpSegment, xi):
    """2*pi-periodization of the bump, evaluated for ``xi`` in ``[-pi, pi)``."""
    x = np.asarray(xi, dtype=float)
    out = bump_eval(seg, x)
    lo, hi = seg.support
    if hi > math.pi:
        out = out + bump_eval(seg, x + TWO_PI)
    if lo < -math.pi:
        out = out + bump_eval(seg, x - TWO_PI)
    return out


def grid(n: int) -> np.ndarray:
    """Frequencies ``2*pi*m/n`` for ``m = 0..n/2-1, -n/2..-1`` (FFT order)."""
    _check_grid(n, min_n=2)
    k = np.arange(n)
    m = np.where(k >= n // 2, k - n, k)
    return TWO_PI * m / n


def _check_grid(n: int, divisor: int = 2, min_n: int = 8) -> None:
    if not isinstance(n, (int, np.integer)) or n < min_n or n % 2:
        raise GridError(f"grid size must be an even integer >= {min_n}, got {n!r}")
    if n % divisor:
        raise GridError(f"grid size {n} is not divisible by {divisor}")


@dataclass(frozen=True)
class FrameletParams:
    """Breakpoints ``c = (c1, ..., c_{s+1})`` with ``c_{s+1} = pi`` and
    transition widths ``eps = (eps0, ..., eps_{s+1})``.

    ``eps0`` only shapes the auxiliary pair ``ap, an`` and may be ``None``
    for odd banks, which do not have them.
    """

    c: tuple[float, ...]
    eps: tuple[float | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(x) for x in self.c))
        object.__setattr__(
            self, "eps", tuple(None if e is None else float(e) for e in self.eps)
        )
        s = len(self.c) - 1
        if s < 1:
            raise ParameterError("need at least two breakpoints (s >= 1)")
        if len(self.eps) != s + 2:
            raise ParameterError(f"expected {s + 2} widths eps0..eps{s + 1}, got {len(self.eps)}")
        if abs(self.c[-1] - math.pi) > INEQ_TOL:
            raise ParameterError(f"last breakpoint must be pi, got {self.c[-1]!r}")
        for i, e in enumerate(self.eps):
            if e is None and i == 0:
                continue
            if e is None or not e > 0:
                raise ParameterError(f"eps{i} must be positive, got {e!r}")
        if not self.c[0] > 0:
            raise ParameterError(f"c1 must be positive, got {self.c[0]!r}")
        for i in range(s):
            if not self.c[i] < self.c[i + 1]:
                raise ParameterError("breakpoints must be strictly increasing")

    @property
    def s(self) -> int:
        return len(self.c) - 1


@dataclass(frozen=True)
class Inequality:
    name: str
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.slack >= -INEQ_TOL

    def __str__(self):
        mark = "ok" if self.holds else "FAIL"
        return f"{self.name}: {self.lhs:.6g} <= {self.rhs:.6g} (slack {self.slack:+.3g}) {mark}"


@dataclass(frozen=True)
class ValidationReport:
    inequalities: tuple[Inequality, ...]

    @property
    def valid(self) -> bool:
        return all(q.holds for q in self.inequalities)

    @property
    def failures(self) -> list[Inequality]:
        return [q for q in self.inequalities if not q.holds]

    def __str__(self):
        return "\n".join(str(q) for q in self.inequalities)


def validate_ctf6down(params: FrameletParams) -> ValidationReport:
    """Check the tight-frame and frequency-separation conditions for the
    reduced six-filter bank (s = 2)."""
    if params.s != 2:
        raise ParameterError(f"CTF6_DOWN needs s = 2, got s = {params.s}")
    c1, c2, _ = params.c
    e0, e1, e2, e3 = params.eps
    if e0 is None:
        raise ParameterError("CTF6_DOWN needs eps0")
    half = math.pi / 2
    q = (
        Inequality("eps0+eps1 <= c1", e0 + e1, c1),
        Inequality("c1 <= pi/2-eps0-eps1", c1, half - e0 - e1),
        Inequality("pi/2+eps2+eps3 <= c2", half + e2 + e3, c2),
        Inequality("c2 <= pi-eps2-eps3", c2, math.pi - e2 - e3),
        Inequality("eps1+eps2 <= c2-c1", e1 + e2, c2 - c1),
        Inequality("c2-c1 <= pi/2-eps1-eps2", c2 - c1, half - e1 - e2),
        Inequality("c2/2+eps2/2+c1+eps1 <= pi", 0.5 * c2 + 0.5 * e2 + c1 + e1, math.pi),
        Inequality("c1+eps1+eps3/2 <= pi/2", c1 + e1 + 0.5 * e3, half),
    )
    return ValidationReport(q)


def validate_params(kind: BankKind, params: FrameletParams) -> ValidationReport:
    """Conditions under which the uniform (dyadic) banks are tight."""
    kind = BankKind(kind)
    if kind is BankKind.CTF6_DOWN:
        return validate_ctf6down(params)
    c, eps = params.c, params.eps
    q = []
    if kind is BankKind.CTF_EVEN:
        if eps[0] is None:
            raise ParameterError("CTF_EVEN needs eps0")
        q.append(Inequality("eps0+eps1 <= c1", eps[0] + eps[1], c[0]))
    else:
        q.append(Inequality("eps1 <= c1", eps[1], c[0]))
    q.append(Inequality("c1 <= pi/2-eps1", c[0], math.pi / 2 - eps[1]))
    for l in range(1, params.s + 1):
        gap = c[l] - c[l - 1]
        w = eps[l] + eps[l + 1]
        q.append(Inequality(f"eps{l}+eps{l + 1} <= c{l + 1}-c{l}", w, gap))
        q.append(Inequality(f"c{l + 1}-c{l} <= pi-eps{l}-eps{l + 1}", gap, math.pi - w))
    return ValidationReport(tuple(q))


@dataclass(frozen=True, eq=False)
class SampledFilter:
    """A single filter of a bank.

    Positive-axis filters carry a ``segment`` and are evaluated in closed
    form. Mirrored filters (``AN``, ``BNl``) carry ``mirror_of`` and are
    produced from their partner by ``k -> -k mod n`` plus conjugation, so
    ``un(xi) = conj(up(-xi))`` holds bit for bit.
    """

    label: str
    sampling_factor: int
    segment: BumpSegment | None = None
    mirror_of: "SampledFilter | None" = None
    gain: float = 1.0
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if (self.segment is None) == (self.mirror_of is None):
            raise ValueError("a filter needs exactly one of segment / mirror_of")

    def samples(self, n: int) -> np.ndarray:
        cached = self._cache.get(n)
        if cached is not None:
            return cached
        # coarse transform levels of short signals run on grids below 8
        _check_grid(n, min_n=2)
        if self.segment is not None:
            vals = periodic_bump(self.segment, grid(n)).astype(complex)
            if self.gain != 1.0:
                vals = vals * self.gain
        else:
            src = self.mirror_of.samples(n)
            vals = np.conj(src[(-np.arange(n)) % n])
        vals.flags.writeable = False
        self._cache[n] = vals
        return vals

    @property
    def is_mirror(self) -> bool:
        return self.mirror_of is not None


@dataclass(frozen=True, eq=False)
class FilterBank1D:
    kind: BankKind
    params: FrameletParams
    filters: tuple[SampledFilter, ...]
    lowpass: SampledFilter

    def __getitem__(self, label: str) -> SampledFilter:
        if label == self.lowpass.label:
            return self.lowpass
        for f in self.filters:
            if f.label == label:
                return f
        raise KeyError(label)

    @property
    def labels(self) -> list[str]:
        return [f.label for f in self.filters]

    @property
    def name(self) -> str:
        for key, (kind, s) in _NAMED.items():
            if kind is self.kind and s == self.params.s:
                return key
        return f"{self.kind.value.lower()}_s{self.params.s}"

    @property
    def axis_labels(self) -> list[str]:
        """Per-axis labels from which high-pass tensor bands are formed."""
        if self.kind is BankKind.CTF_ODD:
            return [self.lowpass.label] + [f.label for f in self.filters if f is not self.lowpass]
        return [f.label for f in self.filters if f is not self.lowpass]

    @property
    def excluded_axis_labels(self) -> frozenset[str]:
        """A tensor band whose every axis label lies in this set is not a
        high-pass band."""
        if self.kind is BankKind.CTF_ODD:
            return frozenset({self.lowpass.label})
        return frozenset({"AP", "AN"})

    def band_labels(self, d: int) -> list[tuple[str, ...]]:
        """All high-pass tensor labels in dimension ``d``, lexicographic in
        ``axis_labels`` order."""
        excl = self.excluded_axis_labels
        return [
            lab
            for lab in itertools.product(self.axis_labels, repeat=d)
            if not all(x in excl for x in lab)
        ]

    def factor(self, label: str) -> int:
        return self[label].sampling_factor

    @property
    def max_factor(self) -> int:
        return max(f.sampling_factor for f in (*self.filters, self.lowpass))

    def perturbed(self, label: str, gain: float) -> "FilterBank1D":
        """Copy of the bank with one positive-axis filter scaled by ``gain``;
        its mirrored partner follows."""
        target = self[label]
        if target.is_mirror:
            raise ValueError(f"scale the positive-axis partner of {label} instead")
        new = SampledFilter(label, target.sampling_factor, segment=target.segment,
                            gain=target.gain * gain)
        swapped: dict[str, SampledFilter] = {}
        out = []
        for f in self.filters:
            if f is target:
                g = new
            elif f.mirror_of is target:
                g = SampledFilter(f.label, f.sampling_factor, mirror_of=new)
            else:
                g = f
            swapped[f.label] = g
            out.append(g)
        low = new if self.lowpass is target else swapped.get(self.lowpass.label, self.lowpass)
        return FilterBank1D(self.kind, self.params, tuple(out), low)


def _pair(plabel: str, nlabel: str, seg: BumpSegment, factor: int):
    p = SampledFilter(plabel, factor, segment=seg)
    return p, SampledFilter(nlabel, factor, mirror_of=p)


def build_bank(kind, params: FrameletParams, validate: bool = True) -> FilterBank1D:
    """Construct a 1-D bank of the given kind.

    With ``validate=True`` any violated parameter inequality raises
    :class:`ParameterError` naming it.
    """
    kind = BankKind(kind)
    if validate:
        report = validate_params(kind, params)
        if not report.valid:
            bad = "; ".join(str(q) for q in report.failures)
            raise ParameterError(f"{kind.value} parameter conditions violated: {bad}")
    s = params.s
    c, eps = params.c, params.eps
    hi_factor = 4 if kind is BankKind.CTF6_DOWN else 2
    if kind is BankKind.CTF6_DOWN and s != 2:
        raise ParameterError("CTF6_DOWN needs s = 2")

    low = SampledFilter("A", 2, segment=BumpSegment(-c[0], c[0], eps[1], eps[1]))
    bp, bn = [], []
    for l in range(1, s + 1):
        seg = BumpSegment(c[l - 1], c[l], eps[l], eps[l + 1])
        p, n = _pair(f"BP{l}", f"BN{l}", seg, hi_factor)
        bp.append(p)
        bn.append(n)

    if kind is BankKind.CTF_ODD:
        filters = (low, *bp, *bn)
    else:
        if eps[0] is None:
            raise ParameterError(f"{kind.value} needs eps0")
        ap, an = _pair("AP", "AN", BumpSegment(0.0, c[0], eps[0], eps[1]), hi_factor)
        if kind is BankKind.CTF6_DOWN:
            filters = (low, ap, an, *bp, *bn)
        else:
            filters = (ap, an, *bp, *bn)
    return FilterBank1D(kind, params, filters, low)


def sample_filter(f: SampledFilter, n: int) -> np.ndarray:
    """Frequency samples of ``f`` on the ``n``-point grid (read-only, cached)."""
    _check_grid(n)
    return f.samples(n)


def filter_l2_norm_sq(f: SampledFilter, n: int) -> float:
    """Grid Parseval estimate ``(1/n) sum_k |f(xi_k)|^2`` of ``||f||^2``."""
    v = sample_filter(f, n)
    return float(np.sum(v.real ** 2 + v.imag ** 2) / n)


def multilevel_filter(bank: FilterBank1D, which: str, j: int, n: int) -> np.ndarray:
    """Samples of the level-``j`` filter
    ``a(xi) a(2 xi) ... a(2^{j-2} xi) u(2^{j-1} xi)`` with ``u = bank[which]``.

    Dilated arguments are reduced modulo 2*pi exactly, through integer
    index arithmetic on the grid.
    """
    if j < 1:
        raise ValueError("level j must be >= 1")
    _check_grid(n, 2 ** j)
    k = np.arange(n)
    a = bank.lowpass.samples(n)
    out = np.ones(n, dtype=complex)
    for t in range(j - 1):
        out = out * a[(k << t) % n]
    return out * bank[which].samples(n)[(k << (j - 1)) % n]


def reference_params(kind) -> FrameletParams:
    """Reference parameters for the three named banks."""
    kind = BankKind(kind)
    pi = math.pi
    if kind is BankKind.CTF6_DOWN:
        return FrameletParams(c=(pi / 2 - 0.425, 2.0, pi), eps=(0.125, 0.3, 0.35, 0.0778))
    if kind is BankKind.CTF_ODD:
        return FrameletParams(c=(33 / 32, pi), eps=(None, 69 / 128, 51 / 512))
    return FrameletParams(
        c=(119 / 128, pi / 2 + 119 / 256, pi),
        eps=(35 / 128, 81 / 128, 115 / 256, 115 / 256),
    )


_NAMED = {
    "ctf3": (BankKind.CTF_ODD, 1),
    "ctf6": (BankKind.CTF_EVEN, 2),
    "ctf6down": (BankKind.CTF6_DOWN, 2),
}
BANK_NAMES = tuple(_NAMED)


def default_bank(name: str, params: FrameletParams | None = None) -> FilterBank1D:
    """Build one of ``ctf3``, ``ctf6``, ``ctf6down`` with reference or
    supplied parameters."""
    try:
        kind, _ = _NAMED[name]
    except KeyError:
        raise ValueError(f"unknown bank {name!r}; choose from {', '.join(BANK_NAMES)}") from None
    return build_bank(kind, params if params is not None else reference_params(kind))


def mirrored_label(label: str) -> str:
    """``AP <-> AN`` and ``BPl <-> BNl``; the real low-pass maps to itself."""
    if label.startswith("AP"):
        return "AN" + label[2:]
    if label.startswith("AN"):
        return "AP" + label[2:]
    if label.startswith("BP"):
        return "BN" + label[2:]
    if label.startswith("BN"):
        return "BP" + label[2:]
    return label


def parse_params_text(text: str, kind) -> FrameletParams:
    """Parse ``key=value`` lines (``c1``, ``c2``, ..., ``eps0``, ...).

    Values may be arithmetic over numbers and ``pi``. Missing keys fall back
    to the reference parameters of ``kind``.
    """
    base = reference_params(kind)
    c = list(base.c)
    eps = list(base.eps)
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"bad parameter line {raw!r}")
        key, val = (x.strip() for x in line.split("=", 1))
        value = _eval_number(val)
        if key.startswith("eps") and key[3:].isdigit():
            i = int(key[3:])
            if i >= len(eps):
                raise ParameterError(f"unknown parameter {key}")
            eps[i] = value
        elif key.startswith("c") and key[1:].isdigit():
            i = int(key[1:]) - 1
            if not 0 <= i < len(c):
                raise ParameterError(f"unknown parameter {key}")
            c[i] = value
        else:
            raise ParameterError(f"unknown parameter {key}")
    return FrameletParams(tuple(c), tuple(eps))


def _eval_number(expr: str) -> float:
    ops = {
        ast.Add: operator.add, ast.Sub: operator.sub,
        ast.Mult: operator.mul, ast.Div: operator.truediv,
        ast.USub: operator.neg, ast.UAdd: operator.pos,
    }

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id == "pi":
            return math.pi
        if isinstance(node, ast.BinOp) and type(node.op) in ops:
            return ops[type(node.op)](ev(node.left), ev(node.right))
        if isinstance(node, ast.UnaryOp) and type(node.op) in ops:
            return ops[type(node.op)](ev(node.operand))
        raise ParameterError(f"unsupported expression {expr!r}")

    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ParameterError(f"cannot parse {expr!r}") from exc
    return ev(tree)
