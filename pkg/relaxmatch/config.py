from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Logging
    log_level: str = "INFO"

    # Brute-force oracle
    oracle_limit: int = 10
    oracle_tol: float = 1e-12

    # Eigensolver
    eig_backend: Literal["jacobi", "lapack"] = "jacobi"
    jacobi_max_sweeps: int = 100
    jacobi_tol: float = 1e-12
    sign_tol: float = 1e-12

    # Spectral classification
    gap_tol_rel: float = 1e-8
    overlap_tol: float = 1e-8

    # Relaxation solvers
    zero_cost_rel: float = 1e-10
    rank_tol: float = 1e-8
    fw_max_iter: int = 2000
    fw_gap_rel: float = 1e-7
    fw_away_steps: bool = False
    mu: float = 1.0
    affine_max_n: int = 40

    # Linear assignment
    lap_slack_rel: float = 1e-12

    # Pipeline
    exact_tol_rel: float = 1e-7

    # Generators
    seed_retry_cap: int = 100
    friendly_resample_cap: int = 100
    symmetric_resample_cap: int = 20

    # Experiments
    jobs: int = 1

    model_config = SettingsConfigDict(env_file=".env", env_prefix="RELAXMATCH_")


settings = Settings()
