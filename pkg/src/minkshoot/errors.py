"""Exception hierarchy for the solver."""


class MinkshootError(Exception):
    """Base class for all solver errors."""


class ExpressionError(MinkshootError):
    """Malformed or disallowed expression string."""


class NonFiniteWeight(MinkshootError):
    """The weight q evaluated to a non-finite value on the radial interval."""


class DegenerateProblem(MinkshootError):
    """q*g vanishes identically on the scanned box; shooting is vacuous."""


class SlopeOutOfRange(MinkshootError):
    """phi(s) evaluated at |s| >= 1."""


class StepSizeUnderflow(MinkshootError):
    """The adaptive step controller collapsed below the minimum step."""


class OriginHit(MinkshootError):
    """A nontrivial shot reached the phase-plane origin (integration failure)."""


class NoConvergence(MinkshootError):
    """Fixed-point iteration exhausted max_iter before reaching tolerance."""


class LiftAmbiguous(MinkshootError):
    """A raw angle increment reached pi/2; trajectory is under-resolved."""


class CountMismatch(MinkshootError):
    """Sign-change count and winding-derived zero count disagree."""


class NotSuperlinear(MinkshootError):
    """No small-amplitude threshold exists on the search grid."""


class SpiralBlowup(MinkshootError):
    """A comparison spiral left the coercivity test range."""


class BoxExceeded(MinkshootError):
    """No admissible starting radius exists for the requested rotation count."""


class NoBracket(MinkshootError):
    """No sign change straddles the target angle (reported, not fatal)."""
