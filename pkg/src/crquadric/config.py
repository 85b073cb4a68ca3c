"""Single source of truth for numeric defaults used by checks and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class Tolerances:
    pit_tol: float = 1e-8          # relative residual for randomized identity tests
    pit_seeds: int = 20            # seeds 0..pit_seeds-1
    catalog_tol: float = 1e-9      # absolute residual for radical model constants
    match_tol: float = 1e-12       # coefficient matching between reduced tables
    kerr_tol: float = 1e-6         # shear/geodesic residual bound for holomorphic specs
    kerr_control: float = 1e-2     # non-holomorphic control must exceed this
    quadric_tol: float = 1e-14     # hyperquadric incidence identity
    lie_tol: float = 1e-8          # finite-difference Lie-derivative residual
    fd_step: float = 1e-5          # central-difference step
    newton_tol: float = 1e-12      # |H| at an accepted implicit root
    newton_max_iter: int = 50
    mutation_floor: float = 0.1    # detected mutations must exceed this

    def override(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULTS = Tolerances()


def seed_range(tols: Tolerances = DEFAULTS) -> range:
    return range(tols.pit_seeds)
