class DegenerateInputError(ValueError):
    """Input is well-formed but carries nothing to compute on (no pairs, no edges, ...)."""


class EmptyCatalogError(RuntimeError):
    """No decodable image was found while building a catalog."""
