import pytest

from sample_amplification.config import DEFAULT_LEVEL, DEFAULT_SEED, load_experiment_config, parse_experiment_text
from sample_amplification.errors import ValidationError


GRID = """
# grade gaussiana
family = GaussianMean
dim = 16
dim = 64      # segunda dimensão
n = 100
n = 200
m = 0
m = 10
method = gaussian_mean
method = gaussian_mean_exact
reps = 500
seed = 7
output = saida.csv
"""


class TestParse:

    def test_grid_values(self):
        config = parse_experiment_text(GRID)
        assert config.family == "GaussianMean"
        assert config.dims == [16, 64]
        assert config.ns == [100, 200]
        assert config.ms == [0, 10]
        assert config.methods == ["gaussian_mean", "gaussian_mean_exact"]
        assert (config.reps, config.seed, config.output) == (500, 7, "saida.csv")

    def test_defaults(self):
        config = parse_experiment_text("family = Discrete\n")
        assert config.seed == DEFAULT_SEED
        assert config.level == DEFAULT_LEVEL
        assert config.reps == 0
        assert config.output is None
        assert config.cells() == []

    def test_cell_order(self):
        cells = parse_experiment_text(GRID).cells()
        assert len(cells) == 16
        assert cells[0] == {"method": "gaussian_mean", "d": 16, "n": 100, "m": 0}
        assert cells[1] == {"method": "gaussian_mean", "d": 16, "n": 100, "m": 10}
        assert cells[2] == {"method": "gaussian_mean", "d": 16, "n": 200, "m": 0}
        assert cells[4]["d"] == 64
        assert cells[8]["method"] == "gaussian_mean_exact"

    def test_extras(self):
        config = parse_experiment_text("family = TopElementDiscrete\ntop_mass = 0.01\nlevel = 0.1\n")
        assert config.extras == {"top_mass": 0.01}
        assert config.level == 0.1

    @pytest.mark.parametrize("text", [
        "dim = 4\n",
        "family = GaussianMean\ncolor = red\n",
        "family = GaussianMean\nseed = 1\nseed = 2\n",
        "family = GaussianMean\nfamily = Discrete\n",
        "family = GaussianMean\ndim = four\n",
        "family = GaussianMean\nn = 0\n",
        "family = GaussianMean\nm = -1\n",
        "family = GaussianMean\njust a line\n",
    ])
    def test_invalid(self, text):
        with pytest.raises(ValidationError):
            parse_experiment_text(text)


def test_load_from_file(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(GRID, encoding="utf-8")
    assert load_experiment_config(str(path)).dims == [16, 64]
