"""Named frequency vectors used by the experiment suite.

The surd-based entries are generic irrational vectors entered at full
double precision.  PLANE_DEMO_B3 is different: a hand-built rational-plus-
drift vector whose orbit returns close to 0 at two designated small indices
(71 and 160) with independent return directions.  Generic vectors make the
level-(b-1)/(b+1) hit certificate vacuous at desk-scale N because their
first short returns are too long; this one keeps the certificate populated
at N = 1e4 while remaining non-resonant.
"""

from __future__ import annotations

import math

from .torus import Frequency

__all__ = [
    "GOLDEN_MEAN",
    "SQRT_PAIR",
    "PLANE_DEMO_B2",
    "PLANE_DEMO_B3",
]

GOLDEN_MEAN = Frequency(((math.sqrt(5.0) - 1.0) / 2.0,), "golden mean (sqrt(5)-1)/2")

# The classic pair for two-frequency scans.
SQRT_PAIR = Frequency((math.sqrt(2.0) - 1.0, math.sqrt(3.0) - 1.0), "frac(sqrt2, sqrt3)")

# First short simultaneous return at n = 17; keeps the b = 2 certificate
# populated at N = 1e4.
PLANE_DEMO_B2 = Frequency((math.sqrt(2.0) - 1.0, math.sqrt(5.0) - 2.0), "frac(sqrt2, sqrt5)")

# Designed returns: {160 a} = 160*eta and {231 a} = (4,5,3)/231-ish combine
# through the residues of K = (30727, 2084, 26568) mod 160*231 = 36960; the
# first window hits land at n = 71 = 231 - 160 and n = 160.
_D = 36960
_K = (30727, 2084, 26568)
_ETA = (3e-5, 2e-5, 2.5e-5)
PLANE_DEMO_B3 = Frequency(
    tuple(k / _D + e for k, e in zip(_K, _ETA)),
    "designed short-return frequency for the 3-torus plane demo",
)
