"""conevolve: exact-rational polyhedral outer bounds for network coding.

Library layout:

* ``polyhedra``  - representations, canonical forms, reductions, faces
* ``lp``         - exact rational simplex with duals and Farkas certificates
* ``dd``         - incremental double description and H/V conversion
* ``chm``        - convex hull method (LP-driven polytope projection)
* ``symchm``     - symmetry-exploiting projection on orbit transversals
* ``groups``     - permutation groups, orbits, stabilizers, fixed subspaces
* ``netinfo``    - Shannon bounds, network problems, rate regions, LP bounds
* ``cli``        - the ``conevolve`` command
"""

from . import chm, dd, errors, groups, lp, netinfo, polyhedra, symchm

__version__ = "0.1.0"

__all__ = [
    "chm",
    "dd",
    "errors",
    "groups",
    "lp",
    "netinfo",
    "polyhedra",
    "symchm",
    "__version__",
]
