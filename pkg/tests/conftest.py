import shutil

import pytest

from iceberg.synth import SynthConfig, bundled, generate


@pytest.fixture(scope="session")
def seed42():
    return bundled("synth_seed42")


@pytest.fixture
def seed42_copy(tmp_path, seed42):
    dst = tmp_path / "synth_seed42"
    shutil.copytree(seed42.directory, dst)
    return dst


@pytest.fixture
def make_dataset(tmp_path_factory):
    def _make(**kw):
        cfg = SynthConfig(**kw)
        return generate(cfg, tmp_path_factory.mktemp(f"ds{cfg.seed}"))
    return _make


def write(path, text):
    path.write_text(text.lstrip("\n"), encoding="utf-8")
    return path


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line[1])
