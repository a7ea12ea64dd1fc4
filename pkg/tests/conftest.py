from pathlib import Path

import pytest


@pytest.fixture(scope="session")
def static_path():
    return Path(__file__).parent.absolute() / "static"


@pytest.fixture(scope="session")
def walls_path(static_path):
    return static_path / "walls.yaml"


@pytest.fixture(scope="session")
def config_path(static_path):
    return static_path / "config.toml"


@pytest.fixture(scope="session")
def schemas():
    from i4mirror.artifacts import OutputSchemas

    return OutputSchemas.from_package()


@pytest.fixture(scope="session")
def wall_table(walls_path, schemas):
    """The wall table shipped with the tests, validated against its schema."""
    from i4mirror.mirror import WallTable

    return WallTable.load(walls_path, schema=schemas.walls)


@pytest.fixture(scope="session")
def empty_walls():
    from i4mirror.mirror import WallTable

    return WallTable()


@pytest.fixture(scope="session")
def empty_equations(empty_walls):
    """Mirror equations without walls to grade 25."""
    from i4mirror.mirror import assemble_equations

    return assemble_equations(empty_walls, 25)


@pytest.fixture
def run_config(tmp_path):
    from i4mirror.config import RunConfig

    return RunConfig(output=tmp_path / "out")

