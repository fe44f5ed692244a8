"""
Pytest configuration and fixtures for ergopt.

Provides the standard SFTs and potentials used across the suite, a spec-file
writer for CLI tests and a seeded generator of random rational instances.
"""

import logging
import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, Generator, List, Tuple

import numpy as np
import pytest
import yaml

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from ergopt.config import Settings, set_settings  # noqa: E402
from ergopt.core.potentials import (  # noqa: E402
    LocallyConstantPotential,
    constant,
    indicator,
    symbol_value,
)
from ergopt.core.symbolic import SFT, full_shift, golden_mean_shift, validate_sft  # noqa: E402
from ergopt.monitoring import get_collector  # noqa: E402

SYSTEMS_DIR = project_root / "config" / "systems"


@pytest.fixture(autouse=True)
def configure_logging() -> Generator[None, None, None]:
    """Quiet logging for tests; restored after CLI runs swap the stream."""
    logging.basicConfig(level=logging.WARNING, force=True)
    yield
    logging.basicConfig(level=logging.WARNING, force=True)


@pytest.fixture(autouse=True)
def default_settings() -> Generator[Settings, None, None]:
    """Built-in defaults, independent of config files and the environment."""
    settings = Settings()
    set_settings(settings)
    yield settings
    set_settings(None)


@pytest.fixture
def float_settings(default_settings: Settings) -> Settings:
    return default_settings.with_overrides(arithmetic="float")


@pytest.fixture
def metrics():
    collector = get_collector()
    collector.reset_metrics()
    yield collector
    collector.reset_metrics()


@pytest.fixture
def temp_dir() -> Generator[Path, None, None]:
    """Create a temporary directory for tests."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def systems_dir() -> Path:
    return SYSTEMS_DIR


@pytest.fixture
def golden_mean() -> SFT:
    return golden_mean_shift()


@pytest.fixture
def full2() -> SFT:
    return full_shift(2)


@pytest.fixture
def gm_f(golden_mean: SFT) -> LocallyConstantPotential:
    """Indicator of symbol 1 on the golden mean."""
    return indicator(golden_mean, 1)


@pytest.fixture
def gm_phi(golden_mean: SFT) -> LocallyConstantPotential:
    """Indicator of symbol 0 on the golden mean."""
    return indicator(golden_mean, 0)


@pytest.fixture
def x0(full2: SFT) -> LocallyConstantPotential:
    return symbol_value(full2)


@pytest.fixture
def one(full2: SFT) -> LocallyConstantPotential:
    return constant(full2, Fraction(1))


@pytest.fixture
def spec_writer(temp_dir: Path) -> Callable[[Dict[str, Any], str], Path]:
    """Write a system-spec document to a YAML file and return its path."""

    def write(document: Dict[str, Any], name: str = "system.yaml") -> Path:
        path = temp_dir / name
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(document, f, sort_keys=False)
        return path

    return write


def random_mixing_sft(rng: np.random.Generator, max_symbols: int = 5) -> SFT:
    """Random SFT with a Hamiltonian cycle and a self-loop at 0, hence mixing."""
    n = int(rng.integers(2, max_symbols + 1))
    edges = {(i, (i + 1) % n) for i in range(n)} | {(0, 0)}
    for a in range(n):
        for b in range(n):
            if rng.random() < 0.3:
                edges.add((a, b))
    return validate_sft(n, sorted(edges))


def random_weights(rng: np.random.Generator, sft: SFT, low: int = -5, high: int = 5) -> LocallyConstantPotential:
    """Range-1 potential with small rational weights."""
    return LocallyConstantPotential(
        sft,
        1,
        {(s,): Fraction(int(rng.integers(low, high + 1)), int(rng.integers(1, 4))) for s in range(sft.alphabet_size)},
    )


def random_range2(rng: np.random.Generator, sft: SFT) -> LocallyConstantPotential:
    from ergopt.core.symbolic import allowed_blocks

    return LocallyConstantPotential(
        sft,
        2,
        {b: Fraction(int(rng.integers(-4, 5)), int(rng.integers(1, 3))) for b in allowed_blocks(sft, 2)},
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240531)


@pytest.fixture
def random_instances(rng: np.random.Generator) -> Callable[[int, int], List[Tuple[SFT, LocallyConstantPotential, LocallyConstantPotential]]]:
    """count random (sft, F, Phi) triples over at most max_symbols symbols."""

    def make(count: int, max_symbols: int = 4) -> List[Tuple[SFT, LocallyConstantPotential, LocallyConstantPotential]]:
        out = []
        for _ in range(count):
            sft = random_mixing_sft(rng, max_symbols)
            out.append((sft, random_weights(rng, sft), random_weights(rng, sft)))
        return out

    return make
