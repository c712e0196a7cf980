"""Exception types shared across the package."""


class CsfLabError(Exception):
    """Base class for all csflab errors."""


class DegenerateSpacing(CsfLabError):
    """An edge of the polyline is too short relative to the curve diameter."""


class OutOfDomain(CsfLabError):
    """Requested time lies outside an exact family's time domain."""


class StepRejected(CsfLabError):
    """A flow step failed the embeddedness or stability check after retries."""


class PathBroken(CsfLabError):
    """A tracked critical-point path has a gap over the requested frames."""


class OutOfWindow(CsfLabError):
    """A queried spacetime point precedes or follows the trajectory window."""


class NotProper(CsfLabError):
    """A curve boundary point enters the cutoff support during the query span."""


class HypothesisViolated(CsfLabError):
    """Input fails the hypotheses of a calibrated bound check."""


class ZeroCurvature(CsfLabError):
    """Operation requires nonzero curvature at the requested point."""


class OrientationAmbiguous(CsfLabError):
    """Vertex curvature vanishes, so the fitting orientation is undefined."""


class SheetCountMismatch(CsfLabError):
    """Vertical lines do not meet the curve the expected number of times."""


class GridMismatch(CsfLabError):
    """Sampled functions do not share a common grid."""


class NonPositiveValue(CsfLabError):
    """Decay fitting requires strictly positive values."""


class BoundaryViolated(CsfLabError):
    """Zero counting with nonvanishing boundary got a vanishing endpoint."""


class DegenerateProfile(CsfLabError):
    """Distance profile derivative vanishes identically (center of symmetry)."""


class DegenerateVertexSet(CsfLabError):
    """Curvature derivative vanishes identically (circle or line)."""


class SelfCrossingChord(CsfLabError):
    """Finger chord crosses the finger arc."""


class WindowTooSmall(CsfLabError):
    """Trajectory window cannot accommodate even the minimal probe radius."""


class AmbiguousMatch(CsfLabError):
    """Two path-matching candidates tie within tolerance."""


class TruncationWarning(UserWarning):
    """Entropy of a truncated open curve underestimates the true value."""
