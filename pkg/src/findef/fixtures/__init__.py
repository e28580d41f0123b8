"""Small example structures shipped with the package."""
from importlib import resources

from ..structure import Structure, parse_structure

NAMES = ("L3", "2K2", "C4")


def fixture_text(name: str) -> str:
    return resources.files(__name__).joinpath(f"{name}.struct").read_text(encoding="utf-8")


def load_fixture(name: str) -> Structure:
    return parse_structure(fixture_text(name))


def fixture_path(name: str):
    return resources.files(__name__).joinpath(f"{name}.struct")
