"""Exception hierarchy.

Everything raised deliberately by this package derives from StegoError (which
is a ValueError), so callers can catch one type at the boundary.
"""


class StegoError(ValueError):
    pass


class PGMError(StegoError):
    pass


class CodecError(StegoError):
    """Malformed compressed blob."""


class PaddingError(StegoError):
    """PKCS#7 padding did not validate after CBC decryption."""


class CapacityError(StegoError):
    pass


class SeparationError(StegoError):
    """Threshold too small to keep symbol and preserved coefficients apart."""


class SelfCheckError(StegoError):
    pass


class FrameNotFoundError(StegoError):
    pass


class CrcMismatchError(StegoError):
    pass


class DecryptError(StegoError):
    pass
