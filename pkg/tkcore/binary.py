"""
Little-endian section files shared by the index kinds.

A file is a fixed header followed by flat integer arrays whose lengths are
derived from the header::

    magic (4 bytes) | format version (uint8) | 3 pad bytes | header ints (int32) | arrays

See ``docs/index_format.rst`` for the per-kind section lists.
"""
import os
import struct

import numpy as np

from tkcore.exceptions import IndexFormatError

__all__ = ['FORMAT_VERSION', 'write_sections', 'read_sections']

FORMAT_VERSION = 1

_PREAMBLE = struct.Struct("<4sB3x")

BAD_MAGIC_ERROR = "Not a {0} index file: expected magic {1!r}, got {2!r}."
BAD_VERSION_ERROR = "Unsupported index format version {0}; this build reads version {1}."
TRUNCATED_ERROR = "Index file is truncated: {0} needs {1} bytes, {2} available."
TRAILING_ERROR = "Index file has {0} unexpected trailing bytes."


def _open(target, mode):
    if isinstance(target, (str, os.PathLike)):
        return open(target, mode), True
    return target, False


def write_sections(sink, magic, header, sections):
    """
    Write a header and a sequence of ``(dtype, array)`` sections.

    Parameters
    ----------
    sink: path-like or binary file object
    magic: `bytes`
        Four identifying bytes.
    header: iterable of `int`
        Values stored as int32 after the preamble.
    sections: iterable of `tuple`
        ``(dtype, array)`` pairs written in order.
    """
    header = [int(value) for value in header]
    f, owned = _open(sink, "wb")
    try:
        f.write(_PREAMBLE.pack(magic, FORMAT_VERSION))
        f.write(struct.pack(f"<{len(header)}i", *header))
        for dtype, array in sections:
            f.write(np.ascontiguousarray(array, dtype=dtype).tobytes())
    finally:
        if owned:
            f.close()


def read_sections(source, magic, kind, n_header, layout):
    """
    Read a file written by `write_sections`.

    Parameters
    ----------
    source: path-like or binary file object
    magic: `bytes`
    kind: `str`
        Name used in error messages.
    n_header: `int`
        Number of int32 header values.
    layout: callable
        Given the header tuple, returns ``(name, dtype, length)`` triples in
        file order.  A length may also be a callable, given the `dict` of the
        arrays read so far.

    Returns
    -------
    header: `tuple` of `int`
    arrays: `dict`
        Section name to `numpy.ndarray`.
    """
    f, owned = _open(source, "rb")
    try:
        data = f.read()
    finally:
        if owned:
            f.close()
    offset = _PREAMBLE.size + 4 * n_header
    if len(data) < offset:
        raise IndexFormatError(TRUNCATED_ERROR.format("header", offset, len(data)))
    found_magic, version = _PREAMBLE.unpack_from(data, 0)
    if found_magic != magic:
        raise IndexFormatError(BAD_MAGIC_ERROR.format(kind, magic, found_magic))
    if version != FORMAT_VERSION:
        raise IndexFormatError(BAD_VERSION_ERROR.format(version, FORMAT_VERSION))
    header = struct.unpack_from(f"<{n_header}i", data, _PREAMBLE.size)
    if min(header, default=0) < 0:
        raise IndexFormatError(f"Negative count in {kind} header: {header}.")
    arrays = {}
    for name, dtype, length in layout(header):
        if callable(length):
            length = length(arrays)
        dtype = np.dtype(dtype)
        size = int(length) * dtype.itemsize
        if len(data) < offset + size:
            raise IndexFormatError(TRUNCATED_ERROR.format(f"section {name!r}", offset + size,
                                                          len(data)))
        arrays[name] = np.frombuffer(data, dtype=dtype, count=int(length), offset=offset).copy()
        offset += size
    if offset != len(data):
        raise IndexFormatError(TRAILING_ERROR.format(len(data) - offset))
    return header, arrays
