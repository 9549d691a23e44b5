from pathlib import Path

import pytest
import yaml

from src.randsrc import RandomSource

CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.yaml"


@pytest.fixture
def config():
    with open(CONFIG_PATH, 'r', encoding='utf-8') as f:
        cfg = yaml.safe_load(f)
    cfg['harness']['show_progress'] = False
    cfg['output']['audit'] = False
    return cfg


@pytest.fixture
def src():
    return RandomSource(1337)
