"""Configuration, generators, fixtures and the command line front end."""

from importlib import resources

from .config import ConfigError, RunConfig, load_config, parse_config
from .generators import (
    Manufactured,
    ModeTerm,
    gen_branched_harmonic,
    gen_manufactured,
    random_average_free_field,
    standard_manufactured_terms,
)


def fixture_path(name: str) -> str:
    """Path of a shipped example config, e.g. ``fixture_path("q2k3_harmonic")``."""
    fname = name if name.endswith(".cfg") else name + ".cfg"
    return str(resources.files(__name__).joinpath("fixtures", fname))


FIXTURES = (
    "q2k3_harmonic",
    "q2k3_manufactured",
    "q3k4_manufactured",
    "mse-eps1e-3",
    "mss2-eps1e-3",
)

__all__ = [
    "ConfigError",
    "RunConfig",
    "load_config",
    "parse_config",
    "Manufactured",
    "ModeTerm",
    "gen_branched_harmonic",
    "gen_manufactured",
    "random_average_free_field",
    "standard_manufactured_terms",
    "fixture_path",
    "FIXTURES",
]
