"""Command-line interface: ``tpctf <command> ...``.

Report lines are space-separated ``key=value`` pairs. Exit status is 0 on
success, 1 on runtime errors or failed checks and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import math
import os
import sys

import numpy as np

from . import io as tio
from .filterbank import (
    BANK_NAMES,
    GridError,
    ParameterError,
    build_bank,
    default_bank,
    parse_params_text,
)
from .processing import (
    ConfigError,
    InpaintConfig,
    ShrinkConfig,
    add_gaussian_noise,
    denoise,
    inpaint,
    make_random_mask,
    psnr,
)
from .transform import ShapeError, analyze, required_divisor, synthesize
from .verify import (
    DAS_MAX_N,
    check_energy,
    check_frequency_separation,
    check_pr,
    das_equivalence,
    measured_redundancy,
    redundancy,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TABLE_BANKS = ("ctf3", "ctf6", "ctf6down")


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:.2f}"


def _load_bank(name: str, params_path: str | None):
    if params_path is None:
        return default_bank(name)
    kind = default_bank(name).kind
    with open(params_path) as fh:
        params = parse_params_text(fh.read(), kind)
    return build_bank(kind, params)


def _add_bank_args(p, default="ctf6down"):
    p.add_argument("--bank", choices=BANK_NAMES, default=default)
    p.add_argument("--params", metavar="FILE",
                   help="key=value lines overriding c1.., eps0.. of the bank")


# ---------------------------------------------------------------- commands

def cmd_filters(args) -> int:
    bank = _load_bank(args.bank, args.params)
    os.makedirs(args.out, exist_ok=True)
    n = args.grid
    k = np.arange(n)
    xi = 2 * np.pi * np.where(k < n // 2, k, k - n) / n
    order = np.argsort(xi, kind="stable")
    for f in bank.filters:
        s = f.samples(n)
        path = os.path.join(args.out, f"{bank.name}_{f.label}.csv")
        with open(path, "w") as fh:
            fh.write("xi,re,im\n")
            for i in order:
                fh.write(f"{xi[i]:.17g},{s[i].real:.17g},{s[i].imag:.17g}\n")
        print(f"filter={f.label} factor={f.sampling_factor} file={path}")
    return EXIT_OK


def _verify_shape(bank, d: int, J: int) -> tuple[int, ...]:
    div = required_divisor(bank, J)
    target = min(256, max(16, round(2 ** (16 / d))))
    n = max(div, -(-target // div) * div)
    return (n,) * d


def cmd_verify(args) -> int:
    if args.dims < 1:
        raise UsageError("--dims must be >= 1")
    if args.levels < 1:
        raise UsageError("--levels must be >= 1")
    bank = _load_bank(args.bank, args.params)
    if args.perturb is not None:
        bank = bank.perturbed("BP2" if bank.params.s >= 2 else "BP1", args.perturb)
    d, J = args.dims, args.levels
    ok = True

    pr = check_pr(bank, args.grid)
    ok &= pr.passed
    print(f"check=pr grid={args.grid} max_residual={pr.max_residual:.3e} "
          f"pass={int(pr.passed)}")

    rng = np.random.Generator(np.random.PCG64(args.seed))
    shape = _verify_shape(bank, d, J)
    v = rng.standard_normal(shape)
    err = check_energy(bank, v, J)
    p = analyze(v, bank, J)
    x, imag = synthesize(p, bank, with_diagnostic=True)
    rt = float(np.max(np.abs(x - v)))
    e_ok, rt_ok = err < 1e-10, rt < 1e-9 and imag < 1e-9
    ok &= e_ok and rt_ok
    print(f"check=energy shape={'x'.join(map(str, shape))} rel_error={err:.3e} pass={int(e_ok)}")
    print(f"check=roundtrip max_error={rt:.3e} max_imag={imag:.3e} pass={int(rt_ok)}")

    if bank.name == "ctf6down":
        jmax = max(2, min(5, J))
        sep = check_frequency_separation(bank, jmax, args.grid)
        worst = max(max(pair) for pair in sep.values())
        s_ok = worst < 1e-12
        ok &= s_ok
        print(f"check=separation levels=2..{jmax} max_leak={worst:.3e} pass={int(s_ok)}")

    red = redundancy(bank, d, J, pyramid=p)
    r_ok = red.measured == red.finite
    ok &= r_ok
    print(f"check=redundancy redundancy={red.limit} finite={red.finite} "
          f"measured={red.measured} pass={int(r_ok)}")

    dJ = min(J, 3)
    dn = max(64, required_divisor(bank, dJ))
    if dn <= DAS_MAX_N:
        dev = das_equivalence(bank, dn, dJ, seed=args.seed)
        d_ok = dev < 1e-10
        ok &= d_ok
        print(f"check=das n={dn} levels={dJ} max_deviation={dev:.3e} pass={int(d_ok)}")

    print(f"result={'pass' if ok else 'fail'}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_roundtrip(args) -> int:
    bank = _load_bank(args.bank, args.params)
    v = tio.read_array(args.input)
    p = analyze(v, bank, args.levels)
    x, imag = synthesize(p, bank, with_diagnostic=True)
    if args.out:
        tio.write_ten1(args.out, x)
    err = float(np.max(np.abs(x - v))) if v.size else 0.0
    print(f"max_error={err:.3e} max_imag={imag:.3e} "
          f"energy_rel_error={check_energy(bank, v, args.levels):.3e} "
          f"redundancy={measured_redundancy(p)}")
    return EXIT_OK


def _default_levels(ndim: int) -> int:
    return 4 if ndim >= 3 else 5


def _shrink_config(args, sigma, ndim):
    base = ShrinkConfig.for_ndim(sigma, ndim)
    return ShrinkConfig(
        sigma,
        args.window if args.window is not None else base.window_radius,
        args.constant if args.constant is not None else base.constant,
    )


def cmd_denoise(args) -> int:
    if not args.sigma > 0:
        raise UsageError("denoising requires --sigma > 0")
    bank = _load_bank(args.bank, args.params)
    clean = tio.read_array(args.input)
    J = args.levels if args.levels is not None else _default_levels(clean.ndim)
    noisy = add_gaussian_noise(clean, args.sigma, args.seed)
    out = denoise(noisy, bank, J, _shrink_config(args, args.sigma, clean.ndim))
    if args.noisy_out:
        tio.write_array(args.noisy_out, noisy)
    if args.out:
        tio.write_array(args.out, out)
    print(f"noisy_psnr={_fmt(psnr(clean, noisy))} denoised_psnr={_fmt(psnr(clean, out))}")
    return EXIT_OK


def _parse_mask(arg: str, shape, seed: int):
    if arg.startswith("random:"):
        try:
            frac = float(arg[len("random:"):])
        except ValueError:
            raise UsageError(f"bad mask argument {arg!r}") from None
        return make_random_mask(shape, frac, seed)
    mask = tio.read_array(arg)
    if mask.shape != tuple(shape):
        raise ConfigError(f"mask shape {mask.shape} differs from image shape {tuple(shape)}")
    return (mask != 0).astype(float)


def cmd_inpaint(args) -> int:
    if args.sigma < 0:
        raise UsageError("--sigma must be >= 0")
    bank = _load_bank(args.bank, args.params)
    clean = tio.read_array(args.input)
    J = args.levels if args.levels is not None else _default_levels(clean.ndim)
    mask = _parse_mask(args.mask, clean.shape, args.seed + 1)
    y = add_gaussian_noise(clean, args.sigma, args.seed) * mask
    cfg = InpaintConfig(args.iterations, args.lambda_max, args.lambda_min, args.sigma)
    shrink = _shrink_config(args, args.sigma, clean.ndim) if args.sigma > 0 else None
    out = inpaint(y, mask, bank, J, cfg, shrink)
    if args.observed_out:
        tio.write_array(args.observed_out, y)
    if args.out:
        tio.write_array(args.out, out)
    print(f"observed_psnr={_fmt(psnr(clean, y))} inpainted_psnr={_fmt(psnr(clean, out))}")
    return EXIT_OK


def cmd_psnr(args) -> int:
    a = tio.read_array(args.a)
    b = tio.read_array(args.b)
    print(f"psnr={_fmt(psnr(a, b))}")
    return EXIT_OK


def _parse_dims(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
            dims = list(range(lo, hi + 1))
        else:
            dims = [int(text)]
    except ValueError:
        raise UsageError(f"bad --dims {text!r}; use N or A..B") from None
    if not dims or min(dims) < 1 or max(dims) > 10:
        raise UsageError("--dims must lie in 1..10")
    return dims


def cmd_redundancy(args) -> int:
    dims = _parse_dims(args.dims)
    for name in TABLE_BANKS:
        for d in dims:
            r = redundancy(name, d, args.levels)
            line = f"bank={name} d={d} redundancy={r.limit}"
            if args.levels is not None:
                line += f" levels={args.levels} finite={r.finite}"
            print(line)
    return EXIT_OK


def cmd_pgm_frames(args) -> int:
    shape = tio.pgm_frames_to_ten1(args.dir, args.out)
    print(f"frames={shape[0]} shape={'x'.join(map(str, shape))} file={args.out}")
    return EXIT_OK


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tpctf", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("filters", help="write filter frequency responses as CSV")
    _add_bank_args(p)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_filters)

    p = sub.add_parser("verify", help="check reconstruction and frame properties")
    _add_bank_args(p)
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--grid", type=int, default=4096)
    p.add_argument("--perturb", type=float, default=None,
                   help="scale the BP2 filter (BP1 for ctf3) by this gain")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("roundtrip", help="analyze and resynthesize a tensor")
    _add_bank_args(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--out")
    p.set_defaults(func=cmd_roundtrip)

    for name, func in (("denoise", cmd_denoise), ("inpaint", cmd_inpaint)):
        p = sub.add_parser(name)
        _add_bank_args(p)
        p.add_argument("--in", dest="input", required=True)
        p.add_argument("--sigma", type=float, required=(name == "denoise"),
                       default=0.0)
        p.add_argument("--levels", type=int, default=None,
                       help="default 5 for images, 4 for video")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--window", type=int, default=None, help="window radius")
        p.add_argument("--constant", type=float, default=None)
        p.set_defaults(func=func)
        if name == "denoise":
            p.add_argument("--noisy-out")
        else:
            p.add_argument("--mask", required=True, help="mask file (0 = missing) or random:p")
            p.add_argument("--observed-out")
            p.add_argument("--iterations", type=int, default=20)
            p.add_argument("--lambda-max", type=float, default=128.0)
            p.add_argument("--lambda-min", type=float, default=None)

    p = sub.add_parser("psnr", help="PSNR between two files")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_psnr)

    p = sub.add_parser("redundancy", help="exact redundancy rates")
    p.add_argument("--dims", default="1..5", help="N or A..B")
    p.add_argument("--levels", type=int, default=None)
    p.set_defaults(func=cmd_redundancy)

    p = sub.add_parser("pgm-frames", help="stack PGM frames into a TEN1 volume")
    p.add_argument("--dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pgm_frames)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"tpctf {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, tio.FormatError, ConfigError, ParameterError, GridError,
            ShapeError, ValueError, OverflowError) as exc:
        print(f"tpctf {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
