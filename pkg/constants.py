"""
Constants for the OPDAD simulator
Contains simulation defaults, numerical tolerances and file-format constants.
"""

import math

# Default simulation parameters (deployment of a 64-antenna uplink)
PATH_LOSS_EXPONENT = 3.7
BLOCKS = 100                 # L
USER_POWER_DBM = 10.0        # P_U
JAMMER_POWER_DBM = 18.0      # P_J (also the maximum swept value)
WINDOW_START = 10            # g
WINDOW_END = 50              # h
ANTENNAS = 64                # M
USERS = 10                   # K
JAMMERS = 10                 # N (also the maximum swept value)
NOISE_POWER_DBM = -90.0      # sigma_B^2
EPSILON = 0.13
BURST_COUNT = 15             # n_r

# Placement annuli in meters
USER_ANNULUS = (30.0, 400.0)
JAMMER_ANNULUS = (100.0, 300.0)

# Angular spread (half-width) used for users and jammers alike
DEFAULT_ANGULAR_SPREAD = math.radians(5.0)

# Reference distance of the path-loss law
REFERENCE_DISTANCE = 1.0

# Burst scheduling
DEFAULT_Q_STAY = 0.7
SCHEDULE_MODES = ['burst_markov', 'burst_exact_count', 'constant']

# Detection
TARGET_PFA = 0.05
BOOTSTRAP_DEV_MULTIPLIER = 3.0
MAX_FEATURE_DISTANCE = 2.0       # between two unit features
TRAINING_BLOCKS = 50
TRAINING_BURN_IN = 20
MIN_CALIBRATION_BLOCKS = 100
METHODS = ['opdad', 'ed', 'sd', 'dmf']

# Numerical tolerances
QUADRATURE_NODES = 64
QUADRATURE_TOLERANCE = 1e-10
QUADRATURE_MAX_PANELS = 4096
PSD_TOLERANCE = 1e-10          # relative to the trace
HERMITIAN_TOLERANCE = 1e-12
DENSITY_GUARD = 1e-12
EIGENVALUE_CLAMP = 1e-10
DEGENERACY_TOLERANCE = 1e-9    # eigengap below this fraction of lambda_1 is degenerate

# Baselines
BASELINE_WINDOW = 10           # W
RANK_THRESHOLD = 1e-3          # tau_rank, relative to lambda_max

# Bound evaluation
SCALING_FLAG_LEVEL = 0.1       # M beta^(1-2 xi) above this is flagged for Theorem-1 style bounds

# Observation stream file format
STREAM_MAGIC = b'OPDD'
STREAM_VERSION = 1
STREAM_HEADER_FORMAT = '<4sHHII'   # magic, version u16, M u16, L u32, reserved u32
