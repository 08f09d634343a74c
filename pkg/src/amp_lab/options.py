from dataclasses import dataclass, replace


@dataclass(frozen=True)
class SolverOptions:
    """Tolerances and budgets shared by every iterative routine.

    Relative quantities (``bisect_rel``, ``margin_rel``) are fractions of the
    spectral gap or of the eigenvalue they guard.
    """

    tol: float = 1e-10
    max_iter: int = 200_000
    shooting_tol: float = 1e-10
    solve_tol: float = 1e-9
    star_gtol: float = 1e-9
    constraint_tol: float = 1e-11
    bisect_rel: float = 1e-4
    margin_rel: float = 1e-3
    delta_rel: float = 1e-8
    seed: int = 0
    n_starts: int = 3
    jobs: int = 1

    def __post_init__(self):
        for name in ("tol", "shooting_tol", "solve_tol", "star_gtol",
                     "constraint_tol", "bisect_rel", "margin_rel", "delta_rel"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1 or self.n_starts < 1 or self.jobs < 1:
            raise ValueError("max_iter, n_starts and jobs must be >= 1")

    def with_(self, **changes):
        return replace(self, **changes)


DEFAULT_OPTIONS = SolverOptions()
