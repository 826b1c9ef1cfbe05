# Largest Bessel order accepted by muskin.specfun
MAX_ORDER = 64

# Largest order covered by the accuracy contract of muskin.specfun
TESTED_ORDER = 32

# Mode systems with a balanced 2-norm condition number above this are rejected
CONDITION_LIMIT = 1e12

# Relative tolerance for transmission-condition self checks
INTERFACE_TOL = 1e-10

# Cutoff defaults, as fractions of the interface radius
CUTOFF_D0 = 0.3
CUTOFF_D1 = 0.6

# Coordinate chart floor, as a fraction of the interface radius
CHART_FLOOR = 0.1

# Gauss-Legendre nodes per radial segment
RADIAL_ORDER = 64

# Minimum number of angular nodes; at least 8 per unit of mode index is used
ANGULAR_MIN = 16
ANGULAR_PER_MODE = 8

# Two quadrature refinement levels must agree to this relative tolerance
QUADRATURE_TOL = 1e-6

# Boundary-layer breakpoints, in units of eps / Re(lambda)
LAYER_BREAKPOINTS = (1.0, 4.0, 16.0, 64.0)

# Shell source quadrature: starting node count, refinement cap and target residual
SHELL_NODES = 16
SHELL_MAX_NODES = 4096
SHELL_TOL = 1e-9

# Convergence-rate policy
SLOPE_TOL = 0.3
RATE_POINTS = 4

# Float format for CSV output (17 significant digits)
FLOAT_FORMAT = "%.16e"

# Version of the experiment config schema
SCHEMA_VERSION = 1

# Environment variable overriding the thread count
THREADS_ENV = "MU_SKIN_THREADS"
