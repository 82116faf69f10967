"""File formats: multichannel WAV, array geometry descriptions, metadata sidecars.

Geometry files are plain text::

    # Eigenmike-style 32 capsule array
    radius_m = 0.042
    speed_of_sound_mps = 343.0

    [mics]
    # colatitude_deg  azimuth_deg  [weight]
    69.0   0.0
    90.0  32.0
    ...

``radius_m`` is required, ``speed_of_sound_mps`` defaults to 343.0. Every mic
row has two numbers, or three when quadrature weights are given (then all rows
must carry one and the weights must sum to 4 pi within 1e-6). Angles are in
degrees; ``#`` starts a comment.

Sidecars are ``key = value`` text files stored next to a WAV file with the
suffix ``.meta`` appended to the full WAV file name.
"""

from __future__ import annotations

import math
import os
import struct
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .encoder import ArrayGeometry
from .errors import ConfigError, GeometryError, WavFormatError

_INT_SCALE = {np.dtype(np.int16): 32768.0, np.dtype(np.int32): 2147483648.0}


@dataclass(frozen=True)
class WavBuffer:
    """Multichannel audio, ``channels`` of shape (n_channels, n_samples)."""

    channels: np.ndarray
    sample_rate: int
    format: str = "float32"

    def __post_init__(self):
        ch = np.asarray(self.channels)
        if ch.ndim == 1:
            ch = ch[np.newaxis, :]
        if ch.ndim != 2:
            raise WavFormatError("channels must be a 2-D array (channels, samples)")
        if ch.shape[0] == 0:
            raise WavFormatError("a WAV buffer needs at least one channel")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise WavFormatError(f"sample rate must be a positive integer, got {self.sample_rate!r}")
        object.__setattr__(self, "channels", ch)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    @property
    def n_channels(self) -> int:
        return self.channels.shape[0]

    @property
    def n_samples(self) -> int:
        return self.channels.shape[1]


def _fmt_chunk(path) -> tuple[int, int, int]:
    """(format code, channel count, bits per sample) from the RIFF header."""
    with open(path, "rb") as fh:
        head = fh.read(12)
        if len(head) < 12 or head[:4] not in (b"RIFF", b"RIFX", b"RF64") or head[8:12] != b"WAVE":
            raise WavFormatError(f"{path}: not a RIFF/WAVE file")
        endian = ">" if head[:4] == b"RIFX" else "<"
        while True:
            hdr = fh.read(8)
            if len(hdr) < 8:
                raise WavFormatError(f"{path}: missing fmt chunk")
            tag, size = hdr[:4], struct.unpack(endian + "I", hdr[4:])[0]
            if tag == b"fmt ":
                body = fh.read(size)
                if len(body) < 16:
                    raise WavFormatError(f"{path}: truncated fmt chunk")
                code, channels, _, _, _, bits = struct.unpack(endian + "HHIIHH", body[:16])
                if code == 0xFFFE and len(body) >= 26:
                    code = struct.unpack(endian + "H", body[24:26])[0]
                return code, channels, bits
            fh.seek(size + (size & 1), os.SEEK_CUR)


def read_wav(path) -> WavBuffer:
    """Read a WAV file into float samples.

    IEEE float data (format code 3) is returned unchanged. Integer PCM is
    scaled by 2**-(bits-1) (16-bit -32768 maps to -1.0 exactly); 8-bit
    unsigned PCM is centred on 128 first.

    Raises
    ------
    WavFormatError
        On malformed headers, unsupported format codes or zero channels.
    """
    code, n_ch, bits = _fmt_chunk(path)
    if n_ch == 0:
        raise WavFormatError(f"{path}: channel count is 0")
    if code not in (1, 3):
        raise WavFormatError(f"{path}: unsupported WAV format code {code}")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", wavfile.WavFileWarning)
            rate, data = wavfile.read(path)
    except ValueError as exc:
        raise WavFormatError(f"{path}: {exc}") from None
    data = data.reshape(-1, n_ch).T
    if code == 3:
        fmt = f"float{bits}"
    else:
        fmt = f"pcm{bits}"
        if data.dtype == np.uint8:
            data = (data.astype(np.float64) - 128.0) / 128.0
        elif data.dtype in _INT_SCALE:
            data = data.astype(np.float64) / _INT_SCALE[data.dtype]
        else:
            data = data.astype(np.float64) / 2.0 ** (8 * data.dtype.itemsize - 1)
    return WavBuffer(np.ascontiguousarray(data), rate, fmt)


def _atomic_write(path, write_fn, mode="wb"):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, mode) as fh:
            write_fn(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_wav(path, buf: WavBuffer) -> None:
    """Write 32-bit IEEE float WAV (format code 3) via a temporary file and rename."""
    data = np.ascontiguousarray(np.asarray(buf.channels, dtype=np.float32).T)
    _atomic_write(path, lambda fh: wavfile.write(fh, buf.sample_rate, data))


# ---------------------------------------------------------------------------
# geometry files
# ---------------------------------------------------------------------------

_GEOM_KEYS = {"radius_m", "speed_of_sound_mps"}


def _number(text, where):
    try:
        value = float(text)
    except ValueError:
        raise GeometryError(f"{where}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise GeometryError(f"{where}: non-finite number {text!r}")
    return value


def parse_geometry_text(text: str, source: str = "<geometry>") -> ArrayGeometry:
    """Parse geometry text (see module docstring) into an :class:`ArrayGeometry`."""
    keys: dict[str, float] = {}
    rows: list[tuple[float, ...]] = []
    in_mics = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        where = f"{source}:{lineno}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if line.lower() != "[mics]":
                raise GeometryError(f"{where}: unknown section {line!r}")
            if in_mics:
                raise GeometryError(f"{where}: duplicate [mics] section")
            in_mics = True
            continue
        if not in_mics:
            if "=" not in line:
                raise GeometryError(f"{where}: expected 'key = value'")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _GEOM_KEYS:
                raise GeometryError(f"{where}: unknown key {key!r}")
            if key in keys:
                raise GeometryError(f"{where}: duplicate key {key!r}")
            keys[key] = _number(value, where)
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise GeometryError(f"{where}: mic row needs 'colatitude_deg azimuth_deg [weight]'")
        row = tuple(_number(f, where) for f in fields)
        if rows and len(row) != len(rows[0]):
            raise GeometryError(f"{where}: weights must be given for all mics or for none")
        if not 0.0 <= row[0] <= 180.0:
            raise GeometryError(f"{where}: colatitude {row[0]} outside [0, 180] degrees")
        rows.append(row)

    if "radius_m" not in keys:
        raise GeometryError(f"{source}: missing required key 'radius_m'")
    if not rows:
        raise GeometryError(f"{source}: no microphones listed under [mics]")
    table = np.array(rows, dtype=float)
    weights = table[:, 2] if table.shape[1] == 3 else None
    dirs = np.round(np.column_stack([table[:, 0], np.mod(table[:, 1], 360.0)]), 9)
    if np.unique(dirs, axis=0).shape[0] < dirs.shape[0]:
        warnings.warn(f"{source}: duplicate microphone directions", stacklevel=2)
    try:
        return ArrayGeometry(
            radius=keys["radius_m"],
            colatitude=np.deg2rad(table[:, 0]),
            azimuth=np.deg2rad(table[:, 1]),
            speed_of_sound=keys.get("speed_of_sound_mps", 343.0),
            weights=weights,
        )
    except ConfigError as exc:
        raise GeometryError(f"{source}: {exc}") from None


def parse_geometry(path) -> ArrayGeometry:
    path = Path(path)
    try:
        text = path.read_text()
    except UnicodeDecodeError:
        raise GeometryError(f"{path}: not a text file") from None
    return parse_geometry_text(text, str(path))


def serialize_geometry(geom: ArrayGeometry) -> str:
    """Geometry text that :func:`parse_geometry_text` reads back."""
    lines = [f"radius_m = {geom.radius!r}", f"speed_of_sound_mps = {geom.speed_of_sound!r}", "", "[mics]"]
    colat = np.rad2deg(geom.colatitude)
    azi = np.rad2deg(geom.azimuth)
    for q in range(geom.n_mics):
        row = f"{float(colat[q])!r} {float(azi[q])!r}"
        if geom.weights is not None:
            row += f" {float(geom.weights[q])!r}"
        lines.append(row)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# sidecars
# ---------------------------------------------------------------------------


def sidecar_path(wav_path) -> Path:
    wav_path = Path(wav_path)
    return wav_path.with_name(wav_path.name + ".meta")


def write_sidecar(wav_path, meta: dict) -> Path:
    path = sidecar_path(wav_path)
    text = "".join(f"{k} = {v}\n" for k, v in meta.items())
    _atomic_write(path, lambda fh: fh.write(text), mode="w")
    return path


def read_sidecar(wav_path) -> dict[str, str] | None:
    """Key/value pairs of the sidecar next to ``wav_path``, or None if absent."""
    path = sidecar_path(wav_path)
    if not path.exists():
        return None
    meta = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise WavFormatError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        meta[key] = value
    return meta
