"""
Aleatoriedade determinística, funções especiais e álgebra linear densa

Todo sorteio do pacote passa por um RngState (seed, stream). O gerador é o
Philox do numpy (contador, reprodutível entre plataformas), semeado por
SeedSequence com spawn_key = (stream, *path). Normais, gamas, Poisson e
Dirichlet vêm dos algoritmos documentados do numpy.Generator.
"""

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from .config import EIGEN_TOLERANCE, MC_CHUNK_SIZE
from .errors import DomainError, NotPSDError, ValidationError

UINT64_MAX = 2 ** 64 - 1


# =============================================================================
# GERADOR
# =============================================================================

@dataclass(frozen=True)
class RngState:
    """
    Estado de aleatoriedade como valor imutável

    Args:
        seed: semente base (inteiro de 64 bits sem sinal)
        stream: índice da subsequência (réplicas paralelas)
        path: subdivisões derivadas via substream()
    """
    seed: int
    stream: int = 0
    path: Tuple[int, ...] = ()

    def __post_init__(self):
        for name, value in (("seed", self.seed), ("stream", self.stream)):
            if not 0 <= int(value) <= UINT64_MAX:
                raise ValidationError(f"{name}={value} fora de [0, 2^64)")

    def substream(self, k: int) -> "RngState":
        """Subsequência filha k; filhas distintas nunca compartilham estado"""
        if k < 0:
            raise ValidationError(f"índice de subsequência negativo: {k}")
        return RngState(self.seed, self.stream, self.path + (int(k),))

    def seed_sequence(self) -> np.random.SeedSequence:
        return np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream),) + self.path)

    def generator(self) -> np.random.Generator:
        """Gerador novo, sempre na mesma posição inicial para o mesmo estado"""
        return np.random.Generator(np.random.Philox(self.seed_sequence()))

    def label(self) -> str:
        parts = [str(self.seed), str(self.stream)] + [str(p) for p in self.path]
        return ":".join(parts)


RngLike = Union[RngState, np.random.Generator]


def as_generator(rng: RngLike) -> np.random.Generator:
    """Aceita RngState (gerador novo e determinístico) ou um Generator em uso"""
    if isinstance(rng, RngState):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ValidationError(f"rng deve ser RngState ou numpy.random.Generator, recebido {type(rng).__name__}")


def spawn_generators(rng: RngLike, count: int) -> List[np.random.Generator]:
    """`count` geradores independentes: substreams do RngState ou spawn do Generator"""
    if isinstance(rng, RngState):
        return [rng.substream(k).generator() for k in range(count)]
    return list(as_generator(rng).spawn(count))


# =============================================================================
# AMOSTRADORES
# =============================================================================

def sample_std_normal(rng: RngLike, count) -> np.ndarray:
    return as_generator(rng).standard_normal(count)


def sample_chi2(rng: RngLike, dof, size=None):
    if np.any(np.asarray(dof) <= 0):
        raise DomainError(f"graus de liberdade devem ser positivos: {dof}")
    return as_generator(rng).chisquare(dof, size)


def sample_gamma(rng: RngLike, shape, rate, size=None):
    if np.any(np.asarray(shape) <= 0) or np.any(np.asarray(rate) <= 0):
        raise DomainError(f"gamma exige forma e taxa positivas: shape={shape}, rate={rate}")
    return as_generator(rng).gamma(shape, 1.0 / np.asarray(rate, dtype=float), size)


def sample_dirichlet(rng: RngLike, dim: int, size=None) -> np.ndarray:
    """Dirichlet(1, ..., 1): uniforme no simplexo"""
    if dim < 1:
        raise DomainError(f"dimensão do simplexo deve ser >= 1: {dim}")
    return as_generator(rng).dirichlet(np.ones(dim), size)


def sample_poisson(rng: RngLike, mean, size=None):
    if np.any(np.asarray(mean) < 0):
        raise DomainError(f"média de Poisson negativa: {mean}")
    return as_generator(rng).poisson(mean, size)


def chunk_sizes(total: int, width: int = 1, budget: int = MC_CHUNK_SIZE) -> Iterator[int]:
    """Divide `total` réplicas em blocos com no máximo `budget` números cada"""
    step = max(1, budget // max(1, width))
    done = 0
    while done < total:
        size = min(step, total - done)
        yield size
        done += size


def mean_and_stderr(values: np.ndarray) -> Tuple[float, float]:
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return float(values.mean()), float("nan")
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(values.size))


# =============================================================================
# FUNÇÕES ESPECIAIS
# =============================================================================

def _require_positive(x, name: str):
    if np.any(np.asarray(x) <= 0):
        raise DomainError(f"{name} exige x > 0, recebido {x}")


def log_gamma(x):
    _require_positive(x, "log_gamma")
    return special.gammaln(x)


def digamma(x):
    _require_positive(x, "digamma")
    return special.digamma(x)


def trigamma(x):
    _require_positive(x, "trigamma")
    return special.polygamma(1, x)


def _check_multivariate(x, d: int):
    if d < 1:
        raise DomainError(f"dimensão deve ser >= 1: {d}")
    if np.any(np.asarray(x) <= 0.5 * (d - 1)):
        raise DomainError(f"função multivariada exige x > (d-1)/2 = {0.5 * (d - 1)}, recebido {x}")


def multivariate_log_gamma(x, d: int):
    """log Γ_d(x) = d(d-1)/4·log π + Σ_i log Γ(x - (i-1)/2)"""
    _check_multivariate(x, d)
    return special.multigammaln(x, d)


def multivariate_digamma(x, d: int):
    _check_multivariate(x, d)
    x = np.asarray(x, dtype=float)
    return sum(special.digamma(x - 0.5 * i) for i in range(d))


def chi2_cdf(x, k):
    if np.any(np.asarray(k) <= 0):
        raise DomainError(f"graus de liberdade devem ser positivos: {k}")
    if np.any(np.asarray(x) < 0):
        raise DomainError(f"chi2_cdf exige x >= 0, recebido {x}")
    return special.gammainc(np.asarray(k, dtype=float) / 2.0, np.asarray(x, dtype=float) / 2.0)


def normal_cdf(z):
    return special.ndtr(z)


def binomial_cdf(k, n: int, p):
    if np.any(np.asarray(p) < 0) or np.any(np.asarray(p) > 1):
        raise DomainError(f"probabilidade fora de [0,1]: {p}")
    if n < 0:
        raise DomainError(f"n negativo: {n}")
    return stats.binom.cdf(k, n, p)


def poisson_binomial_cdf(k: int, probs: Sequence[float]) -> float:
    """P(soma de Bernoulli(p_i) independentes <= k), por programação dinâmica"""
    probs = np.asarray(probs, dtype=float)
    if np.any(probs < 0) or np.any(probs > 1):
        raise DomainError("probabilidades fora de [0,1]")
    if k < 0:
        return 0.0
    pmf = np.zeros(probs.size + 1)
    pmf[0] = 1.0
    for i, p in enumerate(probs, start=1):
        pmf[1:i + 1] = pmf[1:i + 1] * (1 - p) + pmf[0:i] * p
        pmf[0] *= 1 - p
    return float(min(1.0, pmf[: int(k) + 1].sum()))


# =============================================================================
# ÁLGEBRA LINEAR
# =============================================================================

def symmetrize(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    return 0.5 * (M + M.T)


def sym_sqrt(M: np.ndarray, pseudo: bool = False) -> np.ndarray:
    """
    Raiz quadrada simétrica de uma matriz PSD

    Args:
        M: matriz d×d simétrica
        pseudo: se True, devolve a pseudo-inversa da raiz (inversa no autoespaço
            positivo, zero no núcleo)

    Returns:
        R simétrica com R·R = M (ou R·M·R = projeção no suporte, se pseudo)
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"matriz deve ser quadrada, recebido shape {M.shape}")
    scale = float(np.abs(M).max()) if M.size else 0.0
    if np.abs(M - M.T).max(initial=0.0) > 1e-12 * max(scale, 1.0):
        raise ValidationError("matriz não é simétrica (tolerância relativa 1e-12)")

    eigenvalues, eigenvectors = np.linalg.eigh(symmetrize(M))
    norm = float(np.abs(eigenvalues).max(initial=0.0))
    if eigenvalues.size and eigenvalues.min() < -EIGEN_TOLERANCE * norm:
        raise NotPSDError(f"autovalor {eigenvalues.min():.3e} abaixo de -{EIGEN_TOLERANCE}·‖M‖")
    eigenvalues = np.clip(eigenvalues, 0.0, None)

    if pseudo:
        rank_tol = norm * M.shape[0] * np.finfo(float).eps
        positive = eigenvalues > rank_tol
        roots = np.zeros_like(eigenvalues)
        roots[positive] = 1.0 / np.sqrt(eigenvalues[positive])
    else:
        roots = np.sqrt(eigenvalues)
    return symmetrize((eigenvectors * roots) @ eigenvectors.T)
