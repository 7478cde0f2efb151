"""kepgalois: exact + numeric verification pipeline showing the minimum-time
controlled Kepler problem is not meromorphically Liouville integrable.

The pipeline derives the normal variational equation along an explicit
collision solution, reduces it to a scalar operator with the cyclic vector
method, classifies the differential Galois group of its hypergeometric
factor exactly, and corroborates the verdict with numerically computed
monodromy matrices.
"""

__version__ = "0.1.0"
