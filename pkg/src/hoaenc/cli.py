"""Command line front-end.

Subcommands: ``info``, ``simulate``, ``design-filters``, ``encode`` and
``render-binaural``. Failures print one line ``error[<category>]: <detail>``
to stderr and exit with 2 (usage), 3 (I/O) or 4 (numerical).
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from . import __version__
from . import encoder as enc
from . import io as hio
from . import renderer, simulator
from .errors import ConfigError, HoaError, WavFormatError
from .radial import RadialConfig, design_fir_bank

logger = logging.getLogger("hoaenc")

EXIT_CODES = {"usage": 2, "io": 3, "numerical": 4}

CONVENTIONS = {
    "fft_sign": "-1",
    "sh_basis": "real",
    "normalization": "N3D",
    "ordering": "ACN",
}


def version_string() -> str:
    conv = " ".join(f"{k}={v}" for k, v in CONVENTIONS.items())
    return f"hoaenc {__version__} ({conv})"


def _geometry(args):
    return hio.parse_geometry(args.geometry)


def _order(geom, requested):
    return geom.default_order() if requested is None else requested


def cmd_info(args):
    geom = _geometry(args)
    order = _order(geom, args.order)
    shm = enc.build_sh_matrix(geom, order)
    f_alias = enc.aliasing_frequency(order, geom.radius, geom.speed_of_sound)
    lines = [
        version_string(),
        "fourier_transform = S(w) = int s(t) exp(-i w t) dt ; s(t) = 1/(2 pi) int S(w) exp(+i w t) dw",
        "fft_sign = -1",
        "sh_definition = Y_nm = (-1)^m sqrt((2n+1)/(4pi) (n-|m|)!/(n+|m|)!) P_n^|m|(cos b) "
        "* {sqrt2 sin(|m| a) m<0 ; 1 m=0 ; sqrt2 cos(m a) m>0}, P_n^m with Condon-Shortley phase",
        "ordering = ACN (channel = n^2 + n + m)",
        "normalization = N3D",
        "radial_term = b_n(x) = -4 pi i^n (i / x^2) / h_n^(2)'(x), x = w R / c, h^(2) = j - i y",
        f"geometry = {args.geometry}",
        f"mics = {geom.n_mics}",
        f"radius_m = {geom.radius}",
        f"speed_of_sound_mps = {geom.speed_of_sound}",
        f"order = {order}",
        f"channels = {enc.n_channels(order)}",
        f"condition_number = {shm.condition_number:.6g}",
        f"f_alias_hz = {f_alias:.1f}",
    ]
    print("\n".join(lines))
    return 0


def cmd_simulate(args):
    geom = _geometry(args)
    buf = hio.read_wav(args.input)
    if buf.n_channels != 1:
        raise ConfigError(f"{args.input}: source must be mono, has {buf.n_channels} channels")
    if not 0.0 <= args.colatitude_deg <= 180.0:
        raise ConfigError("--colatitude-deg must lie in [0, 180]")
    src = simulator.PlaneWaveSource(
        math.radians(args.colatitude_deg), math.radians(args.azimuth_deg), buf.channels[0], buf.sample_rate
    )
    n_sim = args.order_sim
    if n_sim is None:
        n_sim = simulator.default_sim_order(buf.sample_rate / 2.0, geom.radius, geom.speed_of_sound)
    mics = simulator.surface_pressure(src, geom, n_sim)
    hio.write_wav(args.output, hio.WavBuffer(mics.signals, buf.sample_rate))
    hio.write_sidecar(args.output, {
        "format": "rigid_sphere_mics",
        "mics": geom.n_mics,
        "sample_rate": buf.sample_rate,
        "colatitude_deg": args.colatitude_deg,
        "azimuth_deg": args.azimuth_deg,
        "order_sim": n_sim,
    })
    return 0


def _bank_meta(bank):
    cfg = bank.config
    return {
        "order": cfg.order,
        "sample_rate": cfg.sample_rate,
        "radius_m": cfg.radius,
        "speed_of_sound_mps": cfg.speed_of_sound,
        "max_gain_db": cfg.max_gain_db,
        "fir_length": cfg.fir_length,
        "group_delay_samples": bank.group_delay_samples,
        "regularization": "tikhonov",
    }


def cmd_design_filters(args):
    if args.geometry is not None:
        geom = _geometry(args)
        radius, c = geom.radius, geom.speed_of_sound
        order = _order(geom, args.order)
    else:
        if args.radius is None:
            raise ConfigError("design-filters needs --geometry or --radius")
        radius, c = args.radius, args.speed_of_sound
        order = 4 if args.order is None else args.order
    if int(args.sample_rate) != args.sample_rate:
        raise ConfigError("sample rate must be an integer number of Hz for WAV output")
    bank = design_fir_bank(RadialConfig(radius, c, order, args.sample_rate, args.max_gain_db, args.fir_length))
    hio.write_wav(args.output, hio.WavBuffer(bank.impulse_response, int(args.sample_rate)))
    hio.write_sidecar(args.output, {"format": "inverse_radial_filters", **_bank_meta(bank)})
    return 0


def cmd_encode(args):
    geom = _geometry(args)
    buf = hio.read_wav(args.input)
    if buf.n_channels != geom.n_mics:
        raise ConfigError(f"{args.input} has {buf.n_channels} channels, geometry has {geom.n_mics} mics")
    order = _order(geom, args.order)
    shm = enc.build_sh_matrix(geom, order)
    bank = design_fir_bank(
        RadialConfig(geom.radius, geom.speed_of_sound, order, buf.sample_rate, args.max_gain_db, args.fir_length)
    )
    mics = enc.MicBlock(buf.channels.astype(np.float64), buf.sample_rate)
    fn = enc.encode_time_domain if args.domain == "time" else enc.encode_frequency_domain
    ambi = fn(mics, geom, shm, bank, full=args.full)
    hio.write_wav(args.output, hio.WavBuffer(ambi.signals, buf.sample_rate))
    hio.write_sidecar(args.output, {
        "format": "ambisonics",
        "order": ambi.order,
        "channels": enc.n_channels(ambi.order),
        "ordering": ambi.ordering,
        "normalization": ambi.normalization,
        "sample_rate": buf.sample_rate,
        "group_delay_samples": ambi.group_delay_samples,
        "max_gain_db": args.max_gain_db,
        "fir_length": args.fir_length,
        "domain": args.domain,
        "length": "full" if args.full else "same",
    })
    return 0


def _check_n3d(path, meta):
    if meta is not None and meta.get("normalization", "N3D").upper() != "N3D":
        raise ConfigError(f"{path}: normalization {meta['normalization']} is not N3D")


def cmd_render(args):
    hbuf = hio.read_wav(args.hrtf)
    _check_n3d(args.hrtf, hio.read_sidecar(args.hrtf))
    if hbuf.n_channels % 2:
        raise WavFormatError(f"{args.hrtf}: SH-domain HRIR file needs an even channel count")
    half = hbuf.n_channels // 2
    hrtf = renderer.HrtfShSet(hbuf.channels[:half], hbuf.channels[half:], hbuf.sample_rate)
    abuf = hio.read_wav(args.input)
    _check_n3d(args.input, hio.read_sidecar(args.input))
    order = enc.order_from_channels(abuf.n_channels)
    ambi = enc.AmbisonicBlock(abuf.channels.astype(np.float64), order, abuf.sample_rate)
    out = renderer.render(ambi, hrtf)
    hio.write_wav(args.output, hio.WavBuffer(out.stereo(), abuf.sample_rate))
    hio.write_sidecar(args.output, {
        "format": "binaural",
        "render_order": min(order, hrtf.order),
        "sample_rate": abuf.sample_rate,
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hoaenc", description="Rigid-sphere array to ACN/N3D ambisonics.")
    parser.add_argument("--version", action="version", version=version_string())
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="print conventions and array facts")
    p.add_argument("--geometry", required=True)
    p.add_argument("--order", type=int)
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("simulate", help="plane wave on the rigid sphere")
    p.add_argument("--geometry", required=True)
    p.add_argument("--azimuth-deg", type=float, required=True)
    p.add_argument("--colatitude-deg", type=float, required=True)
    p.add_argument("--input", required=True, help="mono source WAV")
    p.add_argument("--order-sim", type=int)
    p.add_argument("output")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("design-filters", help="write the inverse radial FIR bank")
    p.add_argument("--geometry")
    p.add_argument("--radius", type=float)
    p.add_argument("--speed-of-sound", type=float, default=343.0)
    p.add_argument("--order", type=int)
    p.add_argument("--sample-rate", type=float, default=48000.0)
    p.add_argument("--max-gain-db", type=float, default=20.0)
    p.add_argument("--fir-length", type=int, default=1024)
    p.add_argument("output")
    p.set_defaults(func=cmd_design_filters)

    p = sub.add_parser("encode", help="microphone WAV to ACN/N3D ambisonic WAV")
    p.add_argument("--geometry", required=True)
    p.add_argument("--order", type=int)
    p.add_argument("--max-gain-db", type=float, default=20.0)
    p.add_argument("--fir-length", type=int, default=1024)
    p.add_argument("--domain", choices=("time", "freq"), default="time")
    p.add_argument("--full", action="store_true", help="keep the full convolution tail")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("render-binaural", help="ambisonic WAV to binaural stereo")
    p.add_argument("--hrtf", required=True, help="2*(N+1)^2-channel SH-domain HRIR WAV (left block, right block)")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HoaError as exc:
        category = exc.category
        detail = str(exc)
    except (OSError, UnicodeDecodeError) as exc:
        category = "io"
        detail = str(exc)
    except (ValueError, np.linalg.LinAlgError) as exc:
        category = "numerical"
        detail = str(exc)
    print(f"error[{category}]: {' '.join(detail.split())}", file=sys.stderr)
    return EXIT_CODES[category]


if __name__ == "__main__":
    sys.exit(main())
