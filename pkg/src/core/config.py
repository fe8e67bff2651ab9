from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_prefix="DNLS_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )

    # Worker pool (DNLS_NUM_THREADS)
    num_threads: int = 1

    # Minimization
    gradient_tol: float = 1e-4
    max_gradient_iter: int = 50_000
    abs_projection_every: int = 50
    seed_jitter: float = 1e-3
    max_saddle_escapes: int = 3

    # Newton
    newton_tol: float = 1e-12
    max_newton_iter: int = 50

    # Box-size rule
    boundary_mass_ratio: float = 1e-20
    boundary_layer: int = 2
    max_sites: int = 4000

    # Spectral thresholds
    negative_threshold: float = 1e-9
    kernel_threshold: float = 1e-8
    instability_threshold: float = 1e-6
    marginal_upper: float = 1e-4
    vk_condition_limit: float = 1e12

    # Continuation
    default_delta_omega: float = 0.01

    # General
    random_seed: int = 0
    log_level: str = "INFO"

    @property
    def solver_tolerances(self) -> dict[str, float]:
        return {
            "gradient_tol": self.gradient_tol,
            "newton_tol": self.newton_tol,
            "boundary_mass_ratio": self.boundary_mass_ratio,
        }

    @property
    def spectral_thresholds(self) -> dict[str, float]:
        return {
            "negative": self.negative_threshold,
            "kernel": self.kernel_threshold,
            "instability": self.instability_threshold,
            "marginal_upper": self.marginal_upper,
        }


settings = Settings()
