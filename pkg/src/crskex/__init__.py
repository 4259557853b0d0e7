"""Class-group-action key exchange on ordinary isogeny graphs.

A key exchange in the Couveignes-Rostovtsev-Stolbunov family: the ideal
class group of an imaginary quadratic order acts on a set of ordinary
elliptic curves over F_p, private keys are exponent vectors over a set
of small split (Elkies) primes, and the walk steps are computed either
with modular polynomials (Elkies steps) or with Velu's formulas on
rational torsion found over small extension fields (Velu steps).
"""

__version__ = "0.1.0"
