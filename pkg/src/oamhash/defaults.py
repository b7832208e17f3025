"""Physical and numerical defaults for the OAM single-photon setup.

Every value here can be overridden per call or per CLI flag.
"""

# source
PAIR_RATE_PER_MW = 176_000.0  # detected pairs / s / mW, losses included
PUMP_POWER_MW = 1.0
HERALDING_EFFICIENCY = 0.11
CRYSTAL_LENGTH = 10e-3  # m, PPLN
PUMP_WAVELENGTH = 532e-9  # m
SIGNAL_WAVELENGTH = 860e-9  # m, heralding arm
IDLER_WAVELENGTH = 1480e-9  # m, hash-carrying arm
IDLER_WAIST = 47e-6  # m, as realised

# detectors: (efficiency, dark counts / s, dead time s)
SPD1 = (0.45, 2_000.0, 150e-9)  # heralding channel, free running
SPD2 = (0.25, 10_000.0, 14e-6)  # hash channel, gated

COINCIDENCE_WINDOW = 5e-9  # s, half-width of the coincidence gate

# recorded for reference only, not error sources
POSITIONING_ACCURACY = 8e-6  # m
SLM_RATE = 60.0  # Hz

# field maps
GRID_POINTS = 512
GRID_EXTENT_WIDTHS = 4.0

# verification protocol
TRIALS_PER_POINT = 100
CALIBRATION_ITERATIONS = 10
TRIAL_DURATION = 1.0  # s of simulated time per rate measurement
MAX_RESENDS = 1000
BOOTSTRAP_RESAMPLES = 200

# tomography
TOMO_SHOTS = 100_000
