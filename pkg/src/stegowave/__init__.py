"""Lossless data hiding in hard-thresholded Haar coefficients of grayscale images."""

from .image_io import GrayImage, load_pgm, save_pgm, read_pgm, write_pgm
from .pipeline import EmbedParams, StegoStats, embed, extract
from .errors import (
    StegoError,
    PGMError,
    CapacityError,
    SeparationError,
    SelfCheckError,
    FrameNotFoundError,
    CrcMismatchError,
    DecryptError,
    CodecError,
)

__version__ = "0.1.0"

__all__ = [
    "GrayImage",
    "load_pgm",
    "save_pgm",
    "read_pgm",
    "write_pgm",
    "EmbedParams",
    "StegoStats",
    "embed",
    "extract",
    "StegoError",
    "PGMError",
    "CapacityError",
    "SeparationError",
    "SelfCheckError",
    "FrameNotFoundError",
    "CrcMismatchError",
    "DecryptError",
    "CodecError",
]
