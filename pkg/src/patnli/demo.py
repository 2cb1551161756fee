"""Access to the bundled demo world and pattern files."""

from importlib.resources import files
from pathlib import Path


def demo_world_path() -> Path:
    return Path(str(files("patnli.data") / "demo_world.yaml"))


def demo_patterns_path() -> Path:
    return Path(str(files("patnli.data") / "demo_patterns.xml"))


def load_demo():
    """Load and validate the bundled world and patterns; returns (world, patterns)."""
    from .patterns import load_patterns_file
    from .world import load_world_file

    world = load_world_file(demo_world_path())
    patterns = load_patterns_file(demo_patterns_path(), world)
    return world, patterns
