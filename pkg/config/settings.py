"""
Runtime settings, read once from the environment (and a local .env file)
"""

import os

from dotenv import load_dotenv

load_dotenv()


def _flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).strip().lower() in ("1", "true", "yes", "on")


def _positive_int(name: str, default: int) -> int:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        print(f"   ⚠️  Ignoring {name}={raw!r}: not an integer")
        return default
    return max(1, value)


# Configuration settings
CONFIG = {
    # Worker processes for independent trials
    'max_parallel': _positive_int('INSDEL_MAX_PARALLEL', 1),

    # Let the adversary insert ⊤ (stress tests only)
    'allow_top_insertion': _flag('INSDEL_ALLOW_TOP'),

    # Outcome model for measurements that destroy data qubits
    'measurement_policy': os.getenv('INSDEL_MEASUREMENT_POLICY', 'adversarial'),

    # Sample-and-verify attempts per synchronization string
    'sync_max_attempts': _positive_int('INSDEL_SYNC_ATTEMPTS', 50),

    # Directory of finished sync strings reused across runs (empty disables)
    'sync_cache_dir': os.getenv('INSDEL_SYNC_CACHE', ''),

    'log_level': os.getenv('INSDEL_LOG_LEVEL', 'WARNING').upper(),

    'output_dir': os.getenv('INSDEL_OUTPUT_DIR', './output'),
}


def get_config(key: str):
    """Get configuration value"""
    return CONFIG.get(key)
