"""Exception hierarchy for tetrametric."""


class TetraError(Exception):
    """Base class for all tetrametric errors."""


class DegenerateInput(TetraError):
    """Tetrahedron too close to flat for reliable unfolding arithmetic."""


class NonAdjacent(TetraError):
    """Consecutive faces in an unfolding sequence share no edge."""


class Collinear(TetraError):
    """Planar triangle degenerate within tolerance."""


class NotAcute(TetraError):
    """Side triple does not form an acute triangle."""


class SearchExhausted(TetraError):
    """Geodesic search hit the face-sequence cap without a certified optimum."""


class AmbiguousCut(TetraError):
    """A source-to-vertex shortest path is not unique within tolerance."""


class GenerationFailed(TetraError):
    """Random generator exceeded its rejection budget."""
