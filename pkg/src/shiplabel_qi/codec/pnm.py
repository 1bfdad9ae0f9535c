"""Binary PNM (P5 grayscale / P6 RGB) codec.

Only maxval 255 is supported. The writer emits the canonical header
``P5\\n<w> <h>\\n255\\n`` so encoding is bit-exact and round-trips.
"""

from shiplabel_qi.core.errors import MalformedHeader, TruncatedBody, UnsupportedMaxval
from shiplabel_qi.core.raster import Raster

MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}
CHANNELS_MAGIC = {1: b"P5", 3: b"P6"}
WHITESPACE = b" \t\n\r\x0b\x0c"


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    """Read one header token starting at pos, skipping whitespace and comments."""
    n = len(data)
    while pos < n:
        if data[pos] in WHITESPACE:
            pos += 1
        elif data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    start = pos
    while pos < n and data[pos] not in WHITESPACE and data[pos] != ord("#"):
        pos += 1
    if start == pos:
        raise MalformedHeader("PNM header ended early")
    return data[start:pos], pos


def _parse_int(token: bytes, what: str) -> int:
    if not token.isdigit():
        raise MalformedHeader(f"PNM {what} is not a number: {token!r}")
    return int(token)


def read_pnm(data: bytes) -> Raster:
    """
    Decode a binary PNM image.

    Raises:
        MalformedHeader: bad magic or dimensions
        UnsupportedMaxval: maxval other than 255
        TruncatedBody: fewer body bytes than width*height*channels
    """
    magic = data[:2]
    if magic not in MAGIC_CHANNELS:
        raise MalformedHeader(f"Unsupported PNM magic: {magic!r}")
    channels = MAGIC_CHANNELS[magic]
    pos = 2
    if pos >= len(data) or data[pos] not in WHITESPACE:
        raise MalformedHeader("PNM magic must be followed by whitespace")

    token, pos = _next_token(data, pos)
    width = _parse_int(token, "width")
    token, pos = _next_token(data, pos)
    height = _parse_int(token, "height")
    token, pos = _next_token(data, pos)
    maxval = _parse_int(token, "maxval")

    if width < 1 or height < 1:
        raise MalformedHeader(f"PNM dimensions must be >= 1, got {width}x{height}")
    if maxval != 255:
        raise UnsupportedMaxval(f"Only maxval 255 is supported, got {maxval}")
    # Exactly one whitespace byte separates the header from the body
    if pos >= len(data) or data[pos] not in WHITESPACE:
        raise MalformedHeader("PNM header must end with a single whitespace byte")
    pos += 1

    expected = width * height * channels
    body = data[pos:pos + expected]
    if len(body) < expected:
        raise TruncatedBody(f"PNM body has {len(body)} bytes, {expected} required")
    return Raster.from_bytes(width, height, channels, body)


def write_pnm(raster: Raster) -> bytes:
    """Encode a raster as canonical binary PNM."""
    magic = CHANNELS_MAGIC[raster.channels]
    header = magic + f"\n{raster.width} {raster.height}\n255\n".encode("ascii")
    return header + raster.data
