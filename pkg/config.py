"""
Configuration file for the qudit secret-sharing laboratory
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Reproducibility (published so the benchmark commands below are copy-pasteable)
DEFAULT_SEED = int(os.getenv("QSS_SEED", "20080917"))

# Numerical tolerances
STATE_TOLERANCE = float(os.getenv("QSS_STATE_TOLERANCE", "1e-9"))
IDENTITY_TOLERANCE = float(os.getenv("QSS_IDENTITY_TOLERANCE", "1e-12"))

# Size limits for dense vectors and exhaustive audits
MAX_DENSE_AMPLITUDES = int(os.getenv("QSS_MAX_DENSE_AMPLITUDES", str(2 ** 24)))
MAX_ENUMERATION = int(os.getenv("QSS_MAX_ENUMERATION", str(10 ** 6)))
MAX_AUDIT_DIMENSION = int(os.getenv("QSS_MAX_AUDIT_DIMENSION", "1024"))

# Amplitudes held at once when a session measures many rounds together
BATCH_AMPLITUDES = int(os.getenv("QSS_BATCH_AMPLITUDES", str(2 ** 18)))

# Protocol defaults
DEFAULT_PARTIES = 3
DEFAULT_ROUNDS = int(os.getenv("QSS_DEFAULT_ROUNDS", "10000"))
DEFAULT_BENCHMARK_ROUNDS = int(os.getenv("QSS_BENCHMARK_ROUNDS", "20000"))
DEFAULT_TEST_FRACTION = float(os.getenv("QSS_TEST_FRACTION", "0.5"))

# System Configuration
LOG_LEVEL = os.getenv("QSS_LOG_LEVEL", "WARNING")
RESULTS_DIR = os.getenv("QSS_RESULTS_DIR", "results")

# Party names in register order
PARTY_NAMES = ["Alice", "Bob", "Charlie", "Dave", "Erin", "Frank", "Grace", "Heidi"]

# Reproduction presets for the detection-rate benchmarks and protocol claims
EXAMPLE_EXPERIMENTS = {
    "mbb_optimum": ["benchmark-detection", "--kind", "mbb", "--d-range", "2..8"],
    "mub_monotone": ["benchmark-detection", "--kind", "mub", "--d-range", "3..31"],
    "honest_original": ["simulate", "--d", "3", "--kind", "mub", "--variant", "original"],
    "participant_original": ["simulate", "--d", "3", "--attack", "participant", "--variant", "original"],
    "participant_modified": ["simulate", "--d", "3", "--attack", "participant", "--variant", "modified"],
    "uniqueness": ["verify", "--d", "3", "--n", "3", "--kind", "mub"],
}
