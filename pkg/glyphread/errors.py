class GlyphReadException(Exception):
    pass


class ShapeError(GlyphReadException, ValueError):
    pass


class NumericError(GlyphReadException, ArithmeticError):
    pass


class InputError(GlyphReadException, ValueError):
    pass


class BundleFormatError(GlyphReadException):
    pass
