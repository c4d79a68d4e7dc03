"""
Configurações e leitura dos arquivos de experimento

Formato do arquivo de experimento (chave = valor, sem aninhamento):

    # comentário
    family = GaussianMean
    dim = 16
    dim = 64          # chaves repetidas formam a grade
    n = 100
    n = 200
    m = 10
    method = gaussian_mean
    reps = 0
    seed = 7
    output = resultados.csv
"""

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

from .errors import ValidationError


# =============================================================================
# CONFIGURAÇÕES
# =============================================================================
DEFAULT_SEED = int(os.environ.get("SAMPLE_AMP_SEED", "20240517"))
DEFAULT_LEVEL = float(os.environ.get("SAMPLE_AMP_LEVEL", "0.05"))
CALIBRATION_REPS = int(os.environ.get("SAMPLE_AMP_CALIBRATION_REPS", "10000"))
CLIPPED_CHI2_REPS = int(os.environ.get("SAMPLE_AMP_CLIPPED_CHI2_REPS", "10000"))
N_JOBS = int(os.environ.get("SAMPLE_AMP_N_JOBS", "1"))

# Autovalores em [-EIGEN_TOLERANCE·‖M‖, 0] viram zero
EIGEN_TOLERANCE = 1e-10

# Quantos números aleatórios gerar por bloco nas simulações grandes
MC_CHUNK_SIZE = int(os.environ.get("SAMPLE_AMP_MC_CHUNK", "4000000"))

MIN_BATTERY_REPS = 100
MSTAR_CEILING = 10 ** 6

# Chaves aceitas no arquivo de experimento: chave → é grade (repetível)?
EXPERIMENT_KEYS = {
    "family": False,
    "dim": True,
    "n": True,
    "m": True,
    "method": True,
    "reps": False,
    "seed": False,
    "output": False,
    "level": False,
    "sparsity": False,
    "top_mass": False,
    "rank": False,
}


# =============================================================================
# ARQUIVO DE EXPERIMENTO
# =============================================================================

@dataclass
class ExperimentConfig:
    family: str
    dims: List[int] = field(default_factory=list)
    ns: List[int] = field(default_factory=list)
    ms: List[int] = field(default_factory=list)
    methods: List[str] = field(default_factory=list)
    reps: int = 0
    seed: int = DEFAULT_SEED
    output: Optional[str] = None
    level: float = DEFAULT_LEVEL
    extras: Dict[str, float] = field(default_factory=dict)

    def cells(self) -> List[Dict]:
        """Células da grade na ordem determinística (método, d, n, m)"""
        grid = []
        for method in self.methods:
            for d in self.dims:
                for n in self.ns:
                    for m in self.ms:
                        grid.append({"method": method, "d": d, "n": n, "m": m})
        return grid


def parse_experiment_text(text: str) -> ExperimentConfig:
    """
    Interpreta o conteúdo de um arquivo de experimento

    Args:
        text: conteúdo no formato chave = valor

    Returns:
        ExperimentConfig validado (inteiros positivos nas grades)
    """
    values: Dict[str, List[str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"linha {lineno}: esperado 'chave = valor', recebido {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in EXPERIMENT_KEYS:
            raise ValidationError(f"linha {lineno}: chave desconhecida {key!r}")
        if not EXPERIMENT_KEYS[key] and key in values:
            raise ValidationError(f"linha {lineno}: chave {key!r} não pode se repetir")
        values.setdefault(key, []).append(value)

    if "family" not in values:
        raise ValidationError("arquivo de experimento sem 'family'")

    def _ints(key: str, allow_zero: bool = False) -> List[int]:
        out = []
        for v in values.get(key, []):
            try:
                number = int(v)
            except ValueError:
                raise ValidationError(f"{key}={v!r} não é inteiro")
            if number < 0 or (number == 0 and not allow_zero):
                raise ValidationError(f"{key}={number} fora da grade (precisa ser positivo)")
            out.append(number)
        return out

    extras = {}
    for key in ("sparsity", "top_mass", "rank"):
        if key in values:
            extras[key] = float(values[key][0])

    return ExperimentConfig(
        family=values["family"][0],
        dims=_ints("dim"),
        ns=_ints("n"),
        ms=_ints("m", allow_zero=True),
        methods=values.get("method", []),
        reps=int(values["reps"][0]) if "reps" in values else 0,
        seed=int(values["seed"][0]) if "seed" in values else DEFAULT_SEED,
        output=values["output"][0] if "output" in values else None,
        level=float(values["level"][0]) if "level" in values else DEFAULT_LEVEL,
        extras=extras,
    )


def load_experiment_config(path: str) -> ExperimentConfig:
    """Lê e valida um arquivo de experimento"""
    return parse_experiment_text(Path(path).read_text(encoding="utf-8"))
