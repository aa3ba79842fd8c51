"""Exception taxonomy for the whole package."""

from __future__ import annotations


class ConevolveError(Exception):
    """Base class for all package errors."""


# --- polyhedra -------------------------------------------------------------

class ZeroNormalInfeasible(ConevolveError):
    """A constraint with zero normal and positive offset (0 >= b > 0)."""


class NotPointed(ConevolveError):
    """The cone has a nonzero lineality space."""


class NotFullDimensional(ConevolveError):
    """The polyhedron is lower-dimensional than its ambient space."""


class InconsistentEqualities(ConevolveError):
    """The equality system has no solution."""


class InfeasibleSystem(ConevolveError):
    """The constraint system has no solution."""


class RayCapExceeded(ConevolveError):
    """A ray-count resource cap was exceeded."""


# --- exact-lp --------------------------------------------------------------

class DimensionMismatch(ConevolveError):
    """Vector length does not match the ambient dimension."""


class NotImplied(ConevolveError):
    """The target inequality is not implied by the system.

    Carries a separating witness in ``point`` (or ``ray`` for a feasible
    direction along which the target is violated arbitrarily).
    """

    def __init__(self, message, point=None, ray=None):
        super().__init__(message)
        self.point = point
        self.ray = ray


# --- double description ----------------------------------------------------

class NonHomogeneousInequality(ConevolveError):
    """A cone operation received an inequality with nonzero offset."""


class RayNotInPair(ConevolveError):
    """The given ray is not part of the DD pair."""


# --- chm -------------------------------------------------------------------

class UnboundedParent(ConevolveError):
    """The parent polyhedron is unbounded in the objective direction."""


class InfeasibleParent(ConevolveError):
    """The parent polyhedron is empty."""


class ProjectionNotFullDimensional(ConevolveError):
    """The projection is lower-dimensional; carries an implied equality.

    ``normal`` and ``value`` describe a hyperplane normal.x == value that
    contains the whole projection.
    """

    def __init__(self, message, normal=None, value=None):
        super().__init__(message)
        self.normal = normal
        self.value = value


class PointsAffinelyDependent(ConevolveError):
    """Input points are affinely dependent."""


class VertexInsideHull(ConevolveError):
    """A vertex handed to an update already lies inside the inner bound."""


class NotAFacet(ConevolveError):
    """The selected inequality is not a facet of the cone."""


# --- symmetry groups -------------------------------------------------------

class ElementCapExceeded(ConevolveError):
    """Group closure exceeded the element cap."""


class NonInvertibleGenerator(ConevolveError):
    """A matrix generator is singular."""


class ActionDimensionMismatch(ConevolveError):
    """Group degree is incompatible with the acted-on object."""


class NonPermutationAction(ConevolveError):
    """A matrix-group action was supplied where only permutations are supported."""


class GroupDoesNotStabilize(ConevolveError):
    """The supplied group does not stabilize the object it must fix."""


class SearchCapExceeded(ConevolveError):
    """A brute-force group search exceeded its cap."""


# --- netinfo ---------------------------------------------------------------

class NTooLarge(ConevolveError):
    """Too many random variables for the entropy-space cap."""


class InvalidProblem(ConevolveError):
    """The network problem description is malformed."""


class InvalidAccessStructure(ConevolveError):
    """A secret-sharing access structure is malformed."""


class InvalidDigraph(ConevolveError):
    """A guessing-game digraph is malformed."""
