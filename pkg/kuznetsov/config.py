# Numerical defaults shared by every module. Values are read at call time, so tests and the
# command line may override them through keyword arguments rather than by editing this file.

# Relative tolerance used when a matrix is checked for unit determinant before rescaling
DET_TOLERANCE = 1e-6

# A lower-left entry below this fraction of the largest entry puts an element in the small Bruhat cell
TOL_CELL = 1e-12

# Default absolute and relative quadrature tolerances
QUAD_ABS_TOL = 1e-11
QUAD_REL_TOL = 1e-10

# Maximum number of adaptive subintervals (or oscillation cycles) before a quadrature gives up
QUAD_MAX_PANELS = 2000

# Largest Bessel order modulus and argument accepted by the special function layer.
# Orders up to 64 cover Fourier weights whose support reaches |Im nu| = 32.
BESSEL_MAX_ORDER = 64.0
BESSEL_MAX_ARG = 200.0

# Below this distance from an integer, sin(pi nu) is treated as vanishing and the Bessel kernel
# is obtained as a symmetric limit in nu
KERNEL_LIMIT_THRESHOLD = 1e-6
KERNEL_LIMIT_STEP = 1e-4

# Finite difference defaults for Lie derivatives (step is relative to the coordinate scale)
FD_STEP = 1e-4
FD_ORDER = 4

# Step of the Whittaker equation check; its values come from quadrature, so it needs a wider step
WHITTAKER_FD_STEP = 1e-3

# Whittaker near-origin expansion is rejected when |mu| is below this value (logarithmic case)
NEAR_ORIGIN_MIN_MU = 0.05

# Upper end of the exponential decay window: integrands below exp(-DECAY_CUTOFF) are dropped
DECAY_CUTOFF = 45.0

# Jacquet integral: a y-node is switched to the hairpin contour when 2 pi y (1 - c) exceeds the
# growth of the principal branch plus this margin
HAIRPIN_MARGIN = 1.0

# Nodes per unit of log-scale for trapezoidal Kirillov integrals
GRAM_NODES_PER_UNIT = 10
WEYL_NODES_PER_UNIT = 16

# Dyadic windows [2^-lo, 2^hi] for log-scale integrals over the Kirillov model
GRAM_WINDOW = (40, 3)
WEYL_WINDOW = (30, 3)
MELLIN_WINDOW = (30, 3)

# Gauss-Legendre nodes per dyadic panel for direct Mellin integrals
PANEL_NODES = 16

# Cut between the head and the rotated Hankel tail of real-line Bessel Mellin integrals
MELLIN_HANKEL_CUT = 10.0
MELLIN_SERIES_CUT = 1e-3

# Product integral of two Whittaker functions: analytic piece below, numeric above
WHITTAKER_PRODUCT_EPS = 1e-8

# Kloosterman sums are computed in floating point; the imaginary part of the full sum must vanish
# to this precision before it is dropped
KLOOSTERMAN_IMAG_TOL = 1e-10

# The l-sum of the spectral to Kloosterman formula stops once its Weil tail estimate falls below
# KLOOSTERMAN_TAIL_TOL, and in any case at ELL_MAX_DEFAULT
KLOOSTERMAN_TAIL_TOL = 1e-10
ELL_MAX_DEFAULT = 200

# Primes up to this bound are checked against |S(m,n;p)| <= 2 sqrt(p)
WEIL_PRIME_LIMIT = 1000

# Width of the kappa range beyond the spectral cutoff used to estimate the truncation of the
# discrete spectrum, and the number of sample points over it
SPECTRAL_TAIL_SPAN = 20.0
SPECTRAL_TAIL_SAMPLES = 41

# The fourth-moment kernel integral starts at v = exp(-XI_LOG_CUT)
XI_LOG_CUT = 60.0
XI_TOL = 1e-8

# Hecke relations must hold to this (absolute) precision in a dataset, and the fitted constant
# of |t(n)| <= C n^(1/4 + 0.01) must stay below the bound
HECKE_RELATION_TOL = 1e-8
HECKE_BOUND_EXPONENT = 0.26
HECKE_BOUND_CONSTANT = 6.0

# Maass forms by collocation on two horocycles y = Y below the fundamental domain. Fourier terms
# are kept while the scaled K-Bessel at the lower height exceeds 10^-HEJHAL_DIGITS, and the number
# of collocation points exceeds the number of terms by HEJHAL_EXTRA_POINTS.
HEJHAL_HEIGHTS = (0.5, 0.45)
HEJHAL_DIGITS = 13
HEJHAL_MIN_TERMS = 10
HEJHAL_EXTRA_POINTS = 10
# Scan step in kappa, the tolerance of a refined eigenvalue, and the agreement of both heights
# (and of the Hecke relations among the computed coefficients) required to accept it
HEJHAL_SCAN_STEP = 0.02
HEJHAL_KAPPA_TOL = 1e-11
HEJHAL_ACCEPT_TOL = 1e-6
# t(n) of a tabulated form come from these primes through the Hecke relations
HEJHAL_PRIMES = (2, 3, 5, 7)
MAASS_TABLE_KAPPA_MAX = 30.0

# K-Bessel of imaginary order by the trapezoid rule on a line through the saddle point: the line
# stays KBESSEL_SADDLE_GAP / kappa below Im t = pi/2, and terms below exp(-KBESSEL_DECAY) are dropped
KBESSEL_SADDLE_GAP = 2.0
KBESSEL_DECAY = 36.0

# Petersson norm over the fundamental domain: Gauss-Legendre nodes per direction below y = 1,
# nodes in log y above it, and the K-Bessel argument beyond pi kappa / 2 where the cusp integral stops
NORM_NODES = 48
NORM_CUSP_NODES = 160
NORM_CUSP_TAIL = 40.0

# Acceptance tolerances of the verification suites
GROUP_TOL = 1e-12
LIE_COMMUTATOR_TOL = 1e-6
CASIMIR_TOL = 1e-6
RIGHT_TRANSLATION_TOL = 1e-6
JACQUET_TOL = 1e-8
ODE_TOL = 1e-6
GAMMA_P_TOL = 1e-7
FUNCTIONAL_EQUATION_TOL = 1e-6
GRAM_TOL = 1e-6
# the Weyl element integral is doubly oscillatory and carries a looser default
WEYL_TOL = 1e-4
WEYL_TWICE_TOL = 1e-3
MELLIN_TOL = 1e-7
WHITTAKER_PRODUCT_TOL = 1e-6
TRACE_RELATIVE_TOL = 1e-2

# Number of random points exercised by the seeded suites
SUITE_SAMPLES = 100
DEFAULT_SEED = 0
