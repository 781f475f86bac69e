"""
Numerical configuration for the graph PME verifier.

Values are read once from environment variables, with defaults that match the
documented tolerances. CLI flags override them for a single run.
"""
import os


# Tolerances and guards shared by the calculus, dynamics and verifier modules
NUMERICS_CONFIG = {
    "positivity_floor": float(os.getenv("GPME_POSITIVITY_FLOOR", "1e-12")),
    "power_floor": float(os.getenv("GPME_POWER_FLOOR", "1e-300")),
    "integration_tol": float(os.getenv("GPME_INTEGRATION_TOL", "1e-8")),
    "blowup_ceiling": float(os.getenv("GPME_BLOWUP_CEILING", "1e12")),
    "min_step": float(os.getenv("GPME_MIN_STEP", "1e-12")),
    "max_steps": int(os.getenv("GPME_MAX_STEPS", "1000000")),
    "pass_tol": float(os.getenv("GPME_PASS_TOL", "1e-9")),
    "identity_tol": float(os.getenv("GPME_IDENTITY_TOL", "1e-10")),
}

# Graph construction and path enumeration limits
GRAPH_CONFIG = {
    "path_cap": int(os.getenv("GPME_PATH_CAP", "10000")),
    "dense_cap": int(os.getenv("GPME_DENSE_CAP", "500")),
    "connect_retries": int(os.getenv("GPME_CONNECT_RETRIES", "100")),
}

# Kernel series truncation
KERNEL_CONFIG = {
    "eps": float(os.getenv("GPME_KERNEL_EPS", "1e-10")),
    "max_order": int(os.getenv("GPME_KERNEL_MAX_ORDER", "10000")),
}
