"""
Amplificação por estatística suficiente

Cada amplificador calcula T_n, mapeia para T̂_{n+m} (identidade, exceto no
híbrido de Poisson) e sorteia n+m amostras da lei condicional dado T̂_{n+m}
usando uma estatística ancilar da família:

    GaussianMean       Z - mean(Z), Z ~ N(0, Σ)^{n+m}
    GaussianCov        moldura S = Z·(ZᵀZ)^{-1/2}, uniforme em SᵀS = I
    GaussianMeanCov    moldura centrada, S·1 = 0
    ProductExponential Dirichlet(1, ..., 1) por coordenada
    UniformRect        (Z - Zmin)/(Zmax - Zmin) por coordenada
    Poisson            multinomial uniforme dado o total (Poisson dado a soma)
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from . import divergences
from .divergences import BoundReport
from .errors import (
    AmplificationImpossibleError,
    DegenerateSupportError,
    DomainError,
    InsufficientSamplesError,
    RequiresEvenNError,
    UnsupportedFamilyError,
    ValidationError,
)
from .families import (
    Dataset,
    FamilyKind,
    FamilySpec,
    ParamPoint,
    SufficientStat,
    suffstat_of_array,
)
from .numerics import RngLike, as_generator, sample_dirichlet, sym_sqrt, symmetrize


# =============================================================================
# TIPOS
# =============================================================================

@dataclass
class AmplifierOutput:
    """
    Resultado de um amplificador

    Args:
        samples: matriz (n+m)×d (ou vetor de símbolos)
        family: família das amostras
        method: tag do método
        bound: limite teórico de TV calculado na geração
        target_stat: T̂_{n+m} usado (None quando o método não usa suficiência)
        metadata: informações extras do método
    """
    samples: np.ndarray
    family: FamilySpec
    method: str
    bound: BoundReport
    target_stat: Optional[SufficientStat] = None
    metadata: Dict = field(default_factory=dict)

    @property
    def n_out(self) -> int:
        return int(np.asarray(self.samples).shape[0])

    def dataset(self, seed: Optional[str] = None) -> Dataset:
        return Dataset(samples=self.samples, family=self.family, seed=seed, metadata={"method": self.method})

    def check_target(self, rtol: float = 1e-8) -> bool:
        """Recalcula a estatística suficiente da saída e compara com target_stat"""
        if self.target_stat is None:
            return True
        return suffstat_of_array(self.family, self.samples).allclose(self.target_stat, rtol=rtol)


def _require_kind(data: Dataset, *kinds: FamilyKind):
    if data.family.kind not in kinds:
        expected = ", ".join(k.value for k in kinds)
        raise UnsupportedFamilyError(f"método exige família {expected}, recebido {data.family.kind.value}")


def _require_m(m: int):
    if m < 0:
        raise ValidationError(f"m >= 0 exigido, recebido {m}")


def _multinomial_block(gen: np.random.Generator, totals: np.ndarray, rows: int) -> np.ndarray:
    """Distribui cada total de coluna uniformemente entre `rows` linhas"""
    totals = np.rint(np.asarray(totals)).astype(np.int64)
    if rows == 0:
        return np.zeros((0, totals.size))
    pvals = np.full(rows, 1.0 / rows)
    return gen.multinomial(totals, pvals).T.astype(float)


# =============================================================================
# GAUSSIANAS
# =============================================================================

def amplify_gaussian_mean(data: Dataset, cov: np.ndarray, m: int, rng: RngLike) -> AmplifierOutput:
    """
    Gaussiana de média desconhecida e covariância Σ conhecida

    Args:
        data: n amostras
        cov: Σ conhecida (d×d, PSD)
        m: amostras extras
        rng: aleatoriedade

    Returns:
        n+m linhas com média exatamente igual a T_n
    """
    _require_kind(data, FamilyKind.GAUSSIAN_MEAN)
    _require_m(m)
    d = data.family.dim
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (d, d):
        raise ValidationError(f"Σ deve ser {d}×{d}, recebido {cov.shape}")
    n = data.n
    total = n + m
    target = data.samples.mean(axis=0)

    gen = as_generator(rng)
    z = gen.standard_normal((total, d)) @ sym_sqrt(cov)
    samples = z - z.mean(axis=0) + target
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="gaussian_mean",
        bound=divergences.gaussian_mean_bound(n, m, d),
        target_stat=SufficientStat("mean", total, {"mean": target}),
    )


def amplify_gaussian_cov(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """Gaussiana de média zero; preserva Σ̂_n = n⁻¹ΣXXᵀ calculada sobre as n+m linhas"""
    _require_kind(data, FamilyKind.GAUSSIAN_COV)
    _require_m(m)
    d = data.family.dim
    n = data.n
    total = n + m
    x = data.samples
    cov_n = symmetrize(x.T @ x / n)

    gen = as_generator(rng)
    z = gen.standard_normal((total, d))
    frame = z @ sym_sqrt(z.T @ z, pseudo=True)
    samples = frame @ sym_sqrt(total * cov_n)
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="gaussian_cov",
        bound=divergences.gaussian_cov_bound(n, m, d),
        target_stat=SufficientStat("second_moment", total, {"cov": cov_n}),
        metadata={"rank_deficient": total < d},
    )


def amplify_gaussian_mean_cov(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """Média e covariância desconhecidas; preserva (X̄_n, Σ̂_n) com normalização n-1"""
    _require_kind(data, FamilyKind.GAUSSIAN_MEAN_COV)
    _require_m(m)
    n = data.n
    if n < 2:
        raise InsufficientSamplesError(f"(X̄, Σ̂) exige n >= 2, recebido {n}")
    d = data.family.dim
    total = n + m
    stat = suffstat_of_array(data.family, data.samples)
    mean_n, cov_n = stat.values["mean"], stat.values["cov"]

    gen = as_generator(rng)
    z = gen.standard_normal((total, d))
    z = z - z.mean(axis=0)
    frame = z @ sym_sqrt(z.T @ z, pseudo=True)
    samples = frame @ sym_sqrt((total - 1) * cov_n) + mean_n
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="gaussian_mean_cov",
        bound=divergences.gaussian_mean_cov_bound(n, m, d),
        target_stat=SufficientStat("mean_cov", total, {"mean": mean_n, "cov": cov_n}),
        metadata={"rank_deficient": total - 1 < d},
    )


# =============================================================================
# PRODUTOS
# =============================================================================

def amplify_exponential(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """Produto de exponenciais: X_ij = (n+m)·T̂_j·D_i com D ~ Dirichlet(1, ..., 1)"""
    _require_kind(data, FamilyKind.PRODUCT_EXPONENTIAL)
    _require_m(m)
    if np.any(data.samples <= 0):
        raise DomainError("amostras exponenciais devem ser > 0")
    n = data.n
    d = data.family.dim
    total = n + m
    target = data.samples.mean(axis=0)

    weights = sample_dirichlet(as_generator(rng), total, d).T
    samples = total * target * weights
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="exponential",
        bound=divergences.exponential_bound(n, m, d),
        target_stat=SufficientStat("mean", total, {"mean": target}),
    )


def amplify_uniform(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """Uniforme num retângulo; preserva (mín, máx) de cada coordenada"""
    _require_kind(data, FamilyKind.UNIFORM_RECT)
    _require_m(m)
    n = data.n
    if n < 2:
        raise InsufficientSamplesError(f"amplificação uniforme exige n >= 2, recebido {n}")
    low = data.samples.min(axis=0)
    high = data.samples.max(axis=0)
    degenerate = np.flatnonzero(high <= low)
    if degenerate.size:
        raise DegenerateSupportError(f"coordenadas com mín = máx: {degenerate.tolist()}")
    d = data.family.dim
    total = n + m

    z = as_generator(rng).random((total, d))
    z_low = z.min(axis=0)
    z_high = z.max(axis=0)
    ancillary = (z - z_low) / (z_high - z_low)
    samples = low + (high - low) * ancillary
    columns = np.arange(d)
    samples[z.argmin(axis=0), columns] = low
    samples[z.argmax(axis=0), columns] = high
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="uniform",
        bound=divergences.uniform_bound(n, m, d),
        target_stat=SufficientStat("minmax", total, {"min": low, "max": high}),
    )


def amplify_poisson_hybrid(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """
    Produto de Poisson: suficiência + aprendizado

    A primeira metade estima λ̂; o total da segunda metade recebe Z ~ ∏Poi(m·λ̂_j)
    e o novo total é redistribuído entre n/2+m linhas.
    """
    _require_kind(data, FamilyKind.PRODUCT_POISSON)
    _require_m(m)
    n = data.n
    if n % 2:
        raise RequiresEvenNError(f"divisão em metades exige n par, recebido {n}")
    if n < 2:
        raise InsufficientSamplesError(f"n >= 2 exigido, recebido {n}")
    d = data.family.dim
    half = n // 2
    first, second = data.samples[:half], data.samples[half:]

    gen = as_generator(rng)
    rates = first.mean(axis=0)
    shift = gen.poisson(m * rates).astype(float)
    block_total = second.sum(axis=0) + shift
    block = _multinomial_block(gen, block_total, half + m)
    samples = np.vstack([first, block])
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="poisson_hybrid",
        bound=divergences.poisson_hybrid_bound(n, m, d),
        target_stat=SufficientStat("counts", n + m, {"total": first.sum(axis=0) + block_total}),
        metadata={"block_total": block_total, "rates": rates},
    )


def amplify_poissonized_discrete(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """Modelo discreto poissonizado: identidade nos totais, realocação multinomial"""
    _require_kind(data, FamilyKind.POISSONIZED_DISCRETE)
    _require_m(m)
    n = data.n
    totals = data.samples.sum(axis=0)
    samples = _multinomial_block(as_generator(rng), totals, n + m)
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="poissonized_discrete",
        bound=divergences.poissonized_discrete_bound(n, m),
        target_stat=SufficientStat("counts", n + m, {"total": totals}),
    )


# =============================================================================
# COVARIÂNCIA DE POSTO BAIXO
# =============================================================================

def amplify_lowrank_cov(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """
    Σ = UUᵀ com U p×d desconhecida

    Com n >= d as observações geram span(U), então Σ é recuperada sem erro e
    as m linhas novas são sorteadas de N(0, VVᵀ). Com n < d a amplificação é
    impossível.
    """
    _require_kind(data, FamilyKind.LOW_RANK_COV)
    _require_m(m)
    n = data.n
    rank = data.family.rank
    if n < rank:
        raise AmplificationImpossibleError(
            f"amplificação impossível para covariância de posto {rank} com n={n} < d={rank}: "
            "as n amostras só geram um subespaço próprio de span(U), e uma amostra nova genuína "
            "sai dele com probabilidade 1; para posto d a amplificação é possível se e somente se n >= d"
        )
    _, singular, vt = np.linalg.svd(data.samples, full_matrices=False)
    tol = singular.max(initial=0.0) * max(data.samples.shape) * np.finfo(float).eps
    if np.count_nonzero(singular > tol) < rank:
        raise ValidationError(f"as observações não geram um subespaço de dimensão {rank}")
    frame = vt[:rank].T

    fresh = as_generator(rng).standard_normal((m, rank)) @ frame.T
    samples = np.vstack([data.samples, fresh])
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="lowrank_cov",
        bound=divergences.lowrank_bound(n, m, rank),
        target_stat=None,
        metadata={"frame": frame, "projection": frame @ frame.T},
    )


# =============================================================================
# REGISTRO
# =============================================================================

@dataclass(frozen=True)
class MethodEntry:
    kind: FamilyKind
    run: Callable
    bound: Callable[[FamilySpec, int, int], BoundReport]


def _gaussian_mean_runner(data: Dataset, m: int, rng: RngLike, param: Optional[ParamPoint] = None):
    cov = param.cov if param is not None and param.cov is not None else np.eye(data.family.dim)
    return amplify_gaussian_mean(data, cov, m, rng)


def _plain(function):
    def runner(data, m, rng, param=None):
        return function(data, m, rng)
    runner.__name__ = function.__name__
    return runner


METHODS: Dict[str, MethodEntry] = {
    "gaussian_mean": MethodEntry(
        FamilyKind.GAUSSIAN_MEAN, _gaussian_mean_runner, lambda f, n, m: divergences.gaussian_mean_bound(n, m, f.dim)
    ),
    "gaussian_cov": MethodEntry(
        FamilyKind.GAUSSIAN_COV, _plain(amplify_gaussian_cov), lambda f, n, m: divergences.gaussian_cov_bound(n, m, f.dim)
    ),
    "gaussian_mean_cov": MethodEntry(
        FamilyKind.GAUSSIAN_MEAN_COV,
        _plain(amplify_gaussian_mean_cov),
        lambda f, n, m: divergences.gaussian_mean_cov_bound(n, m, f.dim),
    ),
    "exponential": MethodEntry(
        FamilyKind.PRODUCT_EXPONENTIAL, _plain(amplify_exponential), lambda f, n, m: divergences.exponential_bound(n, m, f.dim)
    ),
    "uniform": MethodEntry(
        FamilyKind.UNIFORM_RECT, _plain(amplify_uniform), lambda f, n, m: divergences.uniform_bound(n, m, f.dim)
    ),
    "poisson_hybrid": MethodEntry(
        FamilyKind.PRODUCT_POISSON, _plain(amplify_poisson_hybrid), lambda f, n, m: divergences.poisson_hybrid_bound(n, m, f.dim)
    ),
    "poissonized_discrete": MethodEntry(
        FamilyKind.POISSONIZED_DISCRETE,
        _plain(amplify_poissonized_discrete),
        lambda f, n, m: divergences.poissonized_discrete_bound(n, m),
    ),
    "lowrank_cov": MethodEntry(
        FamilyKind.LOW_RANK_COV, _plain(amplify_lowrank_cov), lambda f, n, m: divergences.lowrank_bound(n, m, f.rank)
    ),
}


def check_method(method: str, family: FamilySpec) -> MethodEntry:
    """Valida a combinação método/família antes de qualquer cálculo"""
    if method not in METHODS:
        raise ValidationError(f"método de suficiência desconhecido: {method!r}; opções: {sorted(METHODS)}")
    entry = METHODS[method]
    if entry.kind != family.kind:
        raise ValidationError(f"método {method!r} exige família {entry.kind.value}, recebido {family.kind.value}")
    return entry


def amplify(method: str, data: Dataset, m: int, rng: RngLike, param: Optional[ParamPoint] = None) -> AmplifierOutput:
    """
    Executa um amplificador de suficiência pela tag

    Args:
        method: tag registrada em METHODS
        data: amostras de entrada
        m: amostras extras
        rng: aleatoriedade
        param: parâmetro conhecido (só GaussianMean usa, para Σ)
    """
    entry = check_method(method, data.family)
    return entry.run(data, m, rng, param)


def bound_for(method: str, family: FamilySpec, n: int, m: int) -> BoundReport:
    """Limite teórico do método sem executar o amplificador"""
    return check_method(method, family).bound(family, n, m)
