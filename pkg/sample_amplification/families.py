"""
Registro das famílias de distribuições

Para cada família: validação de parâmetros, amostragem i.i.d., log-densidades
(de uma observação e da estatística suficiente), estatística suficiente e
leitura/escrita do formato CSV. As famílias unidimensionais usadas pelos
limites inferiores ficam em ComponentFamily, no fim do arquivo.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd
from scipy import integrate, special, stats

from .errors import (
    DomainError,
    NoSufficientStatisticError,
    UnsupportedFamilyError,
    ValidationError,
)
from .numerics import RngLike, RngState, as_generator, normal_cdf, sym_sqrt, symmetrize


# =============================================================================
# TIPOS
# =============================================================================

class FamilyKind(str, Enum):
    GAUSSIAN_MEAN = "GaussianMean"
    GAUSSIAN_COV = "GaussianCov"
    GAUSSIAN_MEAN_COV = "GaussianMeanCov"
    PRODUCT_EXPONENTIAL = "ProductExponential"
    UNIFORM_RECT = "UniformRect"
    PRODUCT_POISSON = "ProductPoisson"
    DISCRETE = "Discrete"
    POISSONIZED_DISCRETE = "PoissonizedDiscrete"
    SPARSE_GAUSSIAN = "SparseGaussian"
    TOP_ELEMENT_DISCRETE = "TopElementDiscrete"
    LOW_RANK_COV = "LowRankCov"


SYMBOL_KINDS = {FamilyKind.DISCRETE, FamilyKind.TOP_ELEMENT_DISCRETE}
COUNT_KINDS = {FamilyKind.PRODUCT_POISSON, FamilyKind.POISSONIZED_DISCRETE}
CONTINUOUS_KINDS = {
    FamilyKind.GAUSSIAN_MEAN,
    FamilyKind.GAUSSIAN_COV,
    FamilyKind.GAUSSIAN_MEAN_COV,
    FamilyKind.PRODUCT_EXPONENTIAL,
    FamilyKind.UNIFORM_RECT,
    FamilyKind.SPARSE_GAUSSIAN,
    FamilyKind.LOW_RANK_COV,
}
PRODUCT_KINDS = {
    FamilyKind.PRODUCT_EXPONENTIAL,
    FamilyKind.UNIFORM_RECT,
    FamilyKind.PRODUCT_POISSON,
    FamilyKind.POISSONIZED_DISCRETE,
    FamilyKind.SPARSE_GAUSSIAN,
}

# Tipo da estatística suficiente de cada família
SUFFSTAT_KINDS = {
    FamilyKind.GAUSSIAN_MEAN: "mean",
    FamilyKind.GAUSSIAN_COV: "second_moment",
    FamilyKind.GAUSSIAN_MEAN_COV: "mean_cov",
    FamilyKind.PRODUCT_EXPONENTIAL: "mean",
    FamilyKind.UNIFORM_RECT: "minmax",
    FamilyKind.PRODUCT_POISSON: "counts",
    FamilyKind.POISSONIZED_DISCRETE: "counts",
    FamilyKind.LOW_RANK_COV: "second_moment",
}


@dataclass(frozen=True)
class FamilySpec:
    """
    Família de distribuições

    Args:
        kind: tipo da família
        dim: dimensão d (ou tamanho do suporte k; para LowRankCov, a dimensão
            ambiente p)
        sparsity: s para SparseGaussian
        top_mass: t para TopElementDiscrete
        rank: posto d para LowRankCov
    """
    kind: FamilyKind
    dim: int
    sparsity: Optional[int] = None
    top_mass: Optional[float] = None
    rank: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.dim < 1:
            raise ValidationError(f"dim >= 1 exigido, recebido {self.dim}")
        if self.kind == FamilyKind.SPARSE_GAUSSIAN:
            if self.sparsity is None or not 1 <= self.sparsity <= self.dim:
                raise ValidationError(f"SparseGaussian exige 1 <= s <= d, recebido s={self.sparsity}, d={self.dim}")
        if self.kind == FamilyKind.TOP_ELEMENT_DISCRETE:
            low = 1.0 / (2.0 * np.sqrt(self.dim))
            if self.top_mass is None or not low <= self.top_mass <= 0.5:
                raise ValidationError(
                    f"TopElementDiscrete exige t em [1/(2√d), 1/2] = [{low:.4g}, 0.5], recebido t={self.top_mass}"
                )
        if self.kind == FamilyKind.LOW_RANK_COV:
            if self.rank is None or self.rank < 1 or self.dim < self.rank + 1:
                raise ValidationError(f"LowRankCov exige p >= d+1, recebido p={self.dim}, d={self.rank}")

    @property
    def columns(self) -> int:
        """Número de colunas de uma amostra (1 para famílias de símbolos)"""
        if self.kind in SYMBOL_KINDS:
            return 1
        return self.dim

    @property
    def support_size(self) -> int:
        if self.kind == FamilyKind.TOP_ELEMENT_DISCRETE:
            return self.dim + 1
        return self.dim

    def describe(self) -> str:
        extras = []
        if self.sparsity is not None:
            extras.append(f"s={self.sparsity}")
        if self.top_mass is not None:
            extras.append(f"t={self.top_mass}")
        if self.rank is not None:
            extras.append(f"posto={self.rank}")
        suffix = f" ({', '.join(extras)})" if extras else ""
        return f"{self.kind.value} d={self.dim}{suffix}"


@dataclass
class ParamPoint:
    """Parâmetro concreto; só os campos da família correspondente são usados"""
    mean: Optional[np.ndarray] = None
    cov: Optional[np.ndarray] = None
    rates: Optional[np.ndarray] = None
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    probs: Optional[np.ndarray] = None
    frame: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("mean", "cov", "rates", "lower", "upper", "probs", "frame"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, np.asarray(value, dtype=float))


@dataclass(frozen=True)
class Dataset:
    """Amostras n×d (ou vetor de símbolos) mais a procedência"""
    samples: np.ndarray
    family: FamilySpec
    seed: Optional[str] = None
    metadata: Dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.array(self.samples, copy=True)
        if self.family.kind in SYMBOL_KINDS:
            samples = samples.reshape(-1).astype(np.int64)
            low = 0 if self.family.kind == FamilyKind.TOP_ELEMENT_DISCRETE else 1
            if samples.size and (samples.min() < low or samples.max() > self.family.dim):
                raise ValidationError(f"símbolos devem estar em [{low}, {self.family.dim}]")
        else:
            samples = np.atleast_2d(samples.astype(float))
            if samples.shape[1] != self.family.columns:
                raise ValidationError(f"esperado {self.family.columns} colunas, recebido {samples.shape[1]}")
            if np.isnan(samples).any():
                raise ValidationError("amostras com NaN")
        if samples.shape[0] < 1:
            raise ValidationError("dataset vazio (n >= 1 exigido)")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def n(self) -> int:
        return int(self.samples.shape[0])


@dataclass
class SufficientStat:
    """
    Estatística suficiente T_n

    kind em {"mean", "second_moment", "mean_cov", "minmax", "counts"}. Com
    batched=True cada valor carrega um eixo inicial de réplicas.
    """
    kind: str
    n: int
    values: Dict[str, np.ndarray]
    batched: bool = False

    def allclose(self, other: "SufficientStat", rtol: float = 1e-8) -> bool:
        if self.kind != other.kind or set(self.values) != set(other.values):
            return False
        for key, value in self.values.items():
            scale = max(1.0, float(np.abs(value).max(initial=0.0)))
            if np.abs(value - other.values[key]).max(initial=0.0) > rtol * scale:
                return False
        return True


# =============================================================================
# VALIDAÇÃO E PARÂMETROS PADRÃO
# =============================================================================

def _check_cov(cov: Optional[np.ndarray], d: int):
    if cov is None:
        raise ValidationError("covariância Σ ausente")
    if cov.shape != (d, d):
        raise ValidationError(f"Σ deve ser {d}×{d}, recebido {cov.shape}")
    sym_sqrt(cov)


def _check_vector(value: Optional[np.ndarray], d: int, name: str):
    if value is None:
        raise ValidationError(f"parâmetro {name} ausente")
    if value.shape != (d,):
        raise ValidationError(f"{name} deve ter dimensão {d}, recebido {value.shape}")
    if not np.all(np.isfinite(value)):
        raise ValidationError(f"{name} com valores não finitos")


def _check_probs(probs: Optional[np.ndarray], k: int):
    _check_vector(probs, k, "vetor de probabilidades")
    if probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-12:
        raise ValidationError("vetor de probabilidades deve ser não negativo e somar 1 ± 1e-12")


def validate_param(family: FamilySpec, param: ParamPoint):
    """Levanta ValidationError citando o invariante violado"""
    d = family.dim
    kind = family.kind
    if kind == FamilyKind.GAUSSIAN_MEAN or kind == FamilyKind.GAUSSIAN_MEAN_COV:
        _check_vector(param.mean, d, "média θ")
        _check_cov(param.cov, d)
    elif kind == FamilyKind.GAUSSIAN_COV:
        _check_cov(param.cov, d)
    elif kind == FamilyKind.PRODUCT_EXPONENTIAL:
        _check_vector(param.rates, d, "taxas λ")
        if param.rates.min() <= 0:
            raise ValidationError("taxas λ devem ser > 0")
    elif kind == FamilyKind.PRODUCT_POISSON:
        _check_vector(param.rates, d, "taxas λ")
        if param.rates.min() < 0:
            raise ValidationError("taxas λ devem ser >= 0")
    elif kind == FamilyKind.UNIFORM_RECT:
        _check_vector(param.lower, d, "limite inferior a")
        _check_vector(param.upper, d, "limite superior b")
        if np.any(param.upper - param.lower <= 0):
            raise ValidationError("retângulo exige a_j < b_j em toda coordenada")
    elif kind in (FamilyKind.DISCRETE, FamilyKind.POISSONIZED_DISCRETE):
        _check_probs(param.probs, d)
    elif kind == FamilyKind.TOP_ELEMENT_DISCRETE:
        _check_probs(param.probs, d + 1)
        if abs(param.probs[0] - family.top_mass) > 1e-12:
            raise ValidationError(f"p_0 deve ser igual a t={family.top_mass}")
    elif kind == FamilyKind.SPARSE_GAUSSIAN:
        _check_vector(param.mean, d, "média θ")
        if np.count_nonzero(param.mean) > family.sparsity:
            raise ValidationError(f"média com mais de s={family.sparsity} coordenadas não nulas")
    elif kind == FamilyKind.LOW_RANK_COV:
        frame = param.frame
        if frame is None or frame.shape != (d, family.rank):
            raise ValidationError(f"moldura U deve ser {d}×{family.rank}")
        if np.abs(frame.T @ frame - np.eye(family.rank)).max() > 1e-10:
            raise ValidationError("moldura U não é ortonormal (UᵀU = I dentro de 1e-10)")


def default_param(family: FamilySpec, rng: Optional[RngLike] = None) -> ParamPoint:
    """
    Parâmetro canônico usado quando nenhum dado é fornecido

    Apenas LowRankCov consome aleatoriedade (moldura por QR de uma gaussiana).
    """
    d = family.dim
    kind = family.kind
    if kind in (FamilyKind.GAUSSIAN_MEAN, FamilyKind.GAUSSIAN_MEAN_COV):
        return ParamPoint(mean=np.zeros(d), cov=np.eye(d))
    if kind == FamilyKind.GAUSSIAN_COV:
        return ParamPoint(cov=np.eye(d))
    if kind in (FamilyKind.PRODUCT_EXPONENTIAL, FamilyKind.PRODUCT_POISSON):
        return ParamPoint(rates=np.ones(d))
    if kind == FamilyKind.UNIFORM_RECT:
        return ParamPoint(lower=np.zeros(d), upper=np.ones(d))
    if kind in (FamilyKind.DISCRETE, FamilyKind.POISSONIZED_DISCRETE):
        return ParamPoint(probs=np.full(d, 1.0 / d))
    if kind == FamilyKind.SPARSE_GAUSSIAN:
        mean = np.zeros(d)
        mean[: family.sparsity] = 1.0
        return ParamPoint(mean=mean)
    if kind == FamilyKind.TOP_ELEMENT_DISCRETE:
        t = family.top_mass
        return ParamPoint(probs=np.concatenate([[t], np.full(d, (1.0 - t) / d)]))
    if kind == FamilyKind.LOW_RANK_COV:
        gen = as_generator(rng if rng is not None else RngState(0))
        q, _ = np.linalg.qr(gen.standard_normal((d, family.rank)))
        return ParamPoint(frame=q)
    raise UnsupportedFamilyError(f"sem parâmetro padrão para {kind.value}")


# =============================================================================
# AMOSTRAGEM
# =============================================================================

def _rng_label(rng: RngLike) -> Optional[str]:
    return rng.label() if isinstance(rng, RngState) else None


def draw(family: FamilySpec, param: ParamPoint, n: int, gen: np.random.Generator) -> np.ndarray:
    """Matriz n×d (ou vetor de símbolos) sem validação; uso interno em laços"""
    d = family.dim
    kind = family.kind
    if kind in (FamilyKind.GAUSSIAN_MEAN, FamilyKind.GAUSSIAN_MEAN_COV):
        return param.mean + gen.standard_normal((n, d)) @ sym_sqrt(param.cov)
    if kind == FamilyKind.GAUSSIAN_COV:
        return gen.standard_normal((n, d)) @ sym_sqrt(param.cov)
    if kind == FamilyKind.SPARSE_GAUSSIAN:
        return param.mean + gen.standard_normal((n, d))
    if kind == FamilyKind.PRODUCT_EXPONENTIAL:
        return gen.exponential(1.0 / param.rates, size=(n, d))
    if kind == FamilyKind.UNIFORM_RECT:
        return param.lower + (param.upper - param.lower) * gen.random((n, d))
    if kind == FamilyKind.PRODUCT_POISSON:
        return gen.poisson(param.rates, size=(n, d)).astype(float)
    if kind == FamilyKind.POISSONIZED_DISCRETE:
        return gen.poisson(param.probs, size=(n, d)).astype(float)
    if kind == FamilyKind.DISCRETE:
        return gen.choice(d, size=n, p=param.probs) + 1
    if kind == FamilyKind.TOP_ELEMENT_DISCRETE:
        return gen.choice(d + 1, size=n, p=param.probs)
    if kind == FamilyKind.LOW_RANK_COV:
        return gen.standard_normal((n, family.rank)) @ param.frame.T
    raise UnsupportedFamilyError(f"amostragem não registrada para {kind.value}")


def sample(family: FamilySpec, param: ParamPoint, n: int, rng: RngLike) -> Dataset:
    """
    n amostras i.i.d. de P_param

    Args:
        family: família
        param: parâmetro (validado antes do sorteio)
        n: número de linhas
        rng: RngState ou Generator

    Returns:
        Dataset com a semente registrada
    """
    validate_param(family, param)
    if n < 1:
        raise ValidationError(f"n >= 1 exigido, recebido {n}")
    samples = draw(family, param, n, as_generator(rng))
    return Dataset(samples=samples, family=family, seed=_rng_label(rng), metadata={"generated": True})


def indicator_matrix(family: FamilySpec, samples: np.ndarray) -> np.ndarray:
    """One-hot das amostras de símbolos (colunas na ordem do suporte)"""
    samples = np.asarray(samples).reshape(-1).astype(np.int64)
    offset = 0 if family.kind == FamilyKind.TOP_ELEMENT_DISCRETE else 1
    out = np.zeros((samples.size, family.support_size))
    out[np.arange(samples.size), samples - offset] = 1.0
    return out


# =============================================================================
# ESTATÍSTICAS SUFICIENTES
# =============================================================================

def suffstat_of_array(family: FamilySpec, samples: np.ndarray) -> SufficientStat:
    """Estatística suficiente calculada diretamente de uma matriz de amostras"""
    kind = family.kind
    if kind not in SUFFSTAT_KINDS:
        raise NoSufficientStatisticError(f"{kind.value} não tem estatística suficiente registrada")
    x = np.atleast_2d(np.asarray(samples, dtype=float))
    n = x.shape[0]
    stat_kind = SUFFSTAT_KINDS[kind]
    if stat_kind == "mean":
        return SufficientStat("mean", n, {"mean": x.mean(axis=0)})
    if stat_kind == "second_moment":
        return SufficientStat("second_moment", n, {"cov": symmetrize(x.T @ x / n)})
    if stat_kind == "mean_cov":
        if n < 2:
            raise ValidationError("(X̄, Σ̂) exige n >= 2")
        centered = x - x.mean(axis=0)
        cov = symmetrize(centered.T @ centered / (n - 1))
        return SufficientStat("mean_cov", n, {"mean": x.mean(axis=0), "cov": cov})
    if stat_kind == "minmax":
        return SufficientStat("minmax", n, {"min": x.min(axis=0), "max": x.max(axis=0)})
    return SufficientStat("counts", n, {"total": x.sum(axis=0)})


def sufficient_stat(family: FamilySpec, data: Dataset) -> SufficientStat:
    """
    T_n do dataset

    Média para GaussianMean/ProductExponential, Σ̂ = n⁻¹ΣXXᵀ (média conhecida),
    (X̄, Σ̂) com normalização (n-1) para GaussianMeanCov, (mín, máx) por
    coordenada para UniformRect e totais de contagem para Poisson.
    """
    return suffstat_of_array(family, data.samples)


def bartlett_factor(gen: np.random.Generator, d: int, dof: int, size: int) -> np.ndarray:
    """
    Fator triangular inferior A com A·Aᵀ ~ W_d(I, dof), shape (size, d, d)

    A_jj² ~ χ²_{dof-j+1} e as entradas abaixo da diagonal são N(0, 1).
    """
    if dof < d:
        raise DomainError(f"Bartlett exige dof >= d, recebido dof={dof}, d={d}")
    A = np.zeros((size, d, d))
    diag = np.arange(d)
    A[:, diag, diag] = np.sqrt(gen.chisquare(dof - diag, size=(size, d)))
    rows, cols = np.tril_indices(d, k=-1)
    A[:, rows, cols] = gen.standard_normal((size, rows.size))
    return A


def _bartlett_wishart(gen: np.random.Generator, root: np.ndarray, dof: int, size: int) -> np.ndarray:
    """W_d(R·R, dof) pela decomposição de Bartlett, shape (size, d, d)"""
    W = root @ bartlett_factor(gen, root.shape[0], dof, size)
    return W @ W.transpose(0, 2, 1)


def sample_suffstat(family: FamilySpec, param: ParamPoint, n: int, size: int, rng: RngLike) -> SufficientStat:
    """
    `size` sorteios de T_n tirados diretamente da sua lei

    Quando a lei fechada não se aplica (ex: Wishart com n < d) simula os dados.
    """
    gen = as_generator(rng)
    kind = family.kind
    d = family.dim
    stat_kind = SUFFSTAT_KINDS.get(kind)
    if stat_kind is None:
        raise NoSufficientStatisticError(f"{kind.value} não tem estatística suficiente registrada")

    if kind == FamilyKind.GAUSSIAN_MEAN:
        root = sym_sqrt(param.cov / n)
        return SufficientStat("mean", n, {"mean": param.mean + gen.standard_normal((size, d)) @ root}, batched=True)
    if kind == FamilyKind.PRODUCT_EXPONENTIAL:
        means = gen.gamma(n, 1.0 / (n * param.rates), size=(size, d))
        return SufficientStat("mean", n, {"mean": means}, batched=True)
    if kind == FamilyKind.GAUSSIAN_COV and n >= d:
        cov = _bartlett_wishart(gen, sym_sqrt(param.cov), n, size) / n
        return SufficientStat("second_moment", n, {"cov": cov}, batched=True)
    if kind == FamilyKind.GAUSSIAN_MEAN_COV and n - 1 >= d:
        means = param.mean + gen.standard_normal((size, d)) @ sym_sqrt(param.cov / n)
        cov = _bartlett_wishart(gen, sym_sqrt(param.cov), n - 1, size) / (n - 1)
        return SufficientStat("mean_cov", n, {"mean": means, "cov": cov}, batched=True)
    if kind == FamilyKind.UNIFORM_RECT:
        width = param.upper - param.lower
        if n == 1:
            point = gen.random((size, d))
            low = high = point
        else:
            high = gen.random((size, d)) ** (1.0 / n)
            low = high * (1.0 - gen.random((size, d)) ** (1.0 / (n - 1)))
        return SufficientStat(
            "minmax", n, {"min": param.lower + width * low, "max": param.lower + width * high}, batched=True
        )
    if kind in COUNT_KINDS:
        rates = param.rates if kind == FamilyKind.PRODUCT_POISSON else param.probs
        return SufficientStat("counts", n, {"total": gen.poisson(n * rates, size=(size, d)).astype(float)}, batched=True)

    # Caminho genérico: simula os dados e calcula a estatística
    stats_list = [suffstat_of_array(family, draw(family, param, n, gen)) for _ in range(size)]
    values = {key: np.stack([s.values[key] for s in stats_list]) for key in stats_list[0].values}
    return SufficientStat(stat_kind, n, values, batched=True)


# =============================================================================
# LOG-DENSIDADES
# =============================================================================

def _mvn_logpdf(x: np.ndarray, mean: np.ndarray, cov: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    out = stats.multivariate_normal.logpdf(x, mean=mean, cov=cov, allow_singular=True)
    return np.atleast_1d(out).reshape(x.shape[:-1])


def _wishart_logpdf(S: np.ndarray, scale: np.ndarray, dof: int) -> np.ndarray:
    """S com shape (N, d, d); devolve (N,)"""
    d = scale.shape[0]
    if dof < d:
        raise UnsupportedFamilyError(f"densidade Wishart exige graus de liberdade >= d ({dof} < {d})")
    if np.linalg.matrix_rank(scale) < d:
        raise UnsupportedFamilyError("densidade Wishart exige Σ definida positiva")
    out = stats.wishart.logpdf(np.transpose(S, (1, 2, 0)), df=dof, scale=scale)
    return np.atleast_1d(out).reshape(S.shape[0])


def log_density(family: FamilySpec, param: ParamPoint, x) -> Union[float, np.ndarray]:
    """
    Log-densidade de uma observação (ou de várias, no primeiro eixo)

    Fora do suporte devolve -inf; entrada com NaN levanta DomainError.
    """
    kind = family.kind
    x = np.asarray(x, dtype=float)
    if np.isnan(x).any():
        raise DomainError("observação com NaN")
    single = x.ndim == 0 if kind in SYMBOL_KINDS else x.ndim <= 1

    with np.errstate(divide="ignore"):
        if kind in SYMBOL_KINDS:
            symbols = np.atleast_1d(x)
            offset = 0 if kind == FamilyKind.TOP_ELEMENT_DISCRETE else 1
            index = symbols - offset
            valid = (index >= 0) & (index < family.support_size) & (index == np.round(index))
            out = np.full(symbols.shape, -np.inf)
            out[valid] = np.log(param.probs[index[valid].astype(np.int64)])
        else:
            points = x.reshape(1, -1) if single else x
            if kind in (FamilyKind.GAUSSIAN_MEAN, FamilyKind.GAUSSIAN_MEAN_COV):
                out = _mvn_logpdf(points, param.mean, param.cov)
            elif kind == FamilyKind.GAUSSIAN_COV:
                out = _mvn_logpdf(points, np.zeros(family.dim), param.cov)
            elif kind == FamilyKind.SPARSE_GAUSSIAN:
                out = _mvn_logpdf(points, param.mean, np.eye(family.dim))
            elif kind == FamilyKind.LOW_RANK_COV:
                out = _mvn_logpdf(points, np.zeros(family.dim), param.frame @ param.frame.T)
            elif kind == FamilyKind.PRODUCT_EXPONENTIAL:
                inside = np.all(points >= 0, axis=1)
                out = np.where(inside, (np.log(param.rates) - param.rates * points).sum(axis=1), -np.inf)
            elif kind == FamilyKind.UNIFORM_RECT:
                inside = np.all((points >= param.lower) & (points <= param.upper), axis=1)
                out = np.where(inside, -np.log(param.upper - param.lower).sum(), -np.inf)
            elif kind in COUNT_KINDS:
                rates = param.rates if kind == FamilyKind.PRODUCT_POISSON else param.probs
                out = stats.poisson.logpmf(points, rates).sum(axis=1)
            else:
                raise UnsupportedFamilyError(f"log-densidade não registrada para {kind.value}")
    return float(out[0]) if single else out


def log_density_suffstat(family: FamilySpec, param: ParamPoint, t: SufficientStat, n: int):
    """
    Log-densidade exata de T_n sob tamanho amostral n

    Leis: N(θ, Σ/n) para médias gaussianas; W_d(Σ/n, n) para Σ̂ com média
    conhecida; N(θ, Σ/n) × W_d(Σ/(n-1), n-1) para (X̄, Σ̂); Gamma(n, nλ_j)
    por coordenada; f_n(a,b) = n(n-1)(b-a)^{n-2}/(B-A)^n para (mín, máx);
    Poisson(nλ_j) para totais. Aceita estatísticas em lote (batched=True).
    """
    kind = family.kind
    if kind not in SUFFSTAT_KINDS or kind == FamilyKind.LOW_RANK_COV:
        raise NoSufficientStatisticError(f"sem densidade da estatística suficiente para {kind.value}")
    values = t.values if t.batched else {key: np.asarray(v)[np.newaxis, ...] for key, v in t.values.items()}

    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == FamilyKind.GAUSSIAN_MEAN:
            out = _mvn_logpdf(values["mean"], param.mean, param.cov / n)
        elif kind == FamilyKind.PRODUCT_EXPONENTIAL:
            out = stats.gamma.logpdf(values["mean"], a=n, scale=1.0 / (n * param.rates)).sum(axis=1)
        elif kind == FamilyKind.GAUSSIAN_COV:
            out = _wishart_logpdf(values["cov"], param.cov / n, n)
        elif kind == FamilyKind.GAUSSIAN_MEAN_COV:
            if n < 2:
                raise ValidationError("(X̄, Σ̂) exige n >= 2")
            out = _mvn_logpdf(values["mean"], param.mean, param.cov / n)
            out = out + _wishart_logpdf(values["cov"], param.cov / (n - 1), n - 1)
        elif kind == FamilyKind.UNIFORM_RECT:
            if n < 2:
                raise ValidationError("densidade conjunta (mín, máx) exige n >= 2")
            low, high = values["min"], values["max"]
            inside = (low >= param.lower) & (low <= high) & (high <= param.upper)
            per_coord = (
                np.log(n) + np.log(n - 1)
                + special.xlogy(n - 2, high - low)
                - n * np.log(param.upper - param.lower)
            )
            out = np.where(np.all(inside, axis=1), np.where(inside, per_coord, 0.0).sum(axis=1), -np.inf)
        else:
            rates = param.rates if kind == FamilyKind.PRODUCT_POISSON else param.probs
            out = stats.poisson.logpmf(values["total"], n * rates).sum(axis=1)
    out = np.asarray(out, dtype=float).reshape(-1)
    if not t.batched:
        return float(out[0])
    return out


# =============================================================================
# CSV
# =============================================================================

def dataset_to_frame(data: Dataset) -> pd.DataFrame:
    if data.family.kind in SYMBOL_KINDS:
        return pd.DataFrame({"symbol": data.samples})
    columns = [f"x{j + 1}" for j in range(data.family.columns)]
    frame = pd.DataFrame(data.samples, columns=columns)
    if data.family.kind in COUNT_KINDS:
        frame = frame.astype(np.int64)
    return frame


def write_dataset_csv(data: Dataset, path: str):
    """Cabeçalho x1..xd (ou `symbol`), uma linha por amostra, floats com 17 dígitos"""
    dataset_to_frame(data).to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")


def read_dataset_csv(path: str, family: FamilySpec) -> Dataset:
    """
    Lê um CSV de amostras

    Args:
        path: caminho do arquivo
        family: família esperada (define o número de colunas)

    Returns:
        Dataset com metadata {'source': path}
    """
    df = pd.read_csv(path, float_precision="round_trip")
    if "Unnamed: 0" in df.columns:
        df = df.drop("Unnamed: 0", axis=1)
    if family.kind in SYMBOL_KINDS:
        if list(df.columns) != ["symbol"]:
            raise ValidationError(f"CSV de símbolos deve ter a coluna única 'symbol', recebido {list(df.columns)}")
        samples = df["symbol"].to_numpy()
    else:
        expected = [f"x{j + 1}" for j in range(family.columns)]
        if list(df.columns) != expected:
            raise ValidationError(f"colunas esperadas {expected[:3]}..., recebido {list(df.columns)[:3]}...")
        samples = df.to_numpy(dtype=float)
    return Dataset(samples=samples, family=family, seed=None, metadata={"source": str(path)})


# =============================================================================
# FAMÍLIAS UNIDIMENSIONAIS (COORDENADAS)
# =============================================================================

class ComponentFamily:
    """
    Lei de uma coordenada, indexada por um parâmetro escalar θ

    Subclasses com estrutura exponencial implementam sum_sample/sum_llr: a
    soma das t observações é suficiente, então a TV entre produtos pode ser
    simulada sobre ela.
    """
    name = "component"
    discrete = False
    param_range = (-np.inf, np.inf)
    search_interval = (0.0, 1.0)

    def check(self, theta: float):
        low, high = self.param_range
        if not (low <= theta <= high) or not np.isfinite(theta):
            raise DomainError(f"{self.name}: parâmetro {theta} fora de [{low}, {high}]")

    def logpdf(self, x: np.ndarray, theta: float) -> np.ndarray:
        raise NotImplementedError

    def sample(self, gen: np.random.Generator, theta: float, size) -> np.ndarray:
        raise NotImplementedError

    def cdf(self, x: np.ndarray, theta: float) -> np.ndarray:
        raise UnsupportedFamilyError(f"{self.name} sem CDF registrada")

    def hellinger2(self, theta1: float, theta2: float) -> Optional[float]:
        """Forma fechada, ou None para usar quadratura"""
        return None

    def support(self, theta1: float, theta2: float):
        return (-np.inf, np.inf)

    def chi2(self, estimate: float, theta: float) -> float:
        raise UnsupportedFamilyError(f"{self.name} sem χ² fechado")

    has_sum_statistic = False

    def sum_sample(self, gen: np.random.Generator, theta: float, t: int, size: int) -> np.ndarray:
        raise NotImplementedError

    def sum_llr(self, s: np.ndarray, theta_from: float, theta_to: float, t: int) -> np.ndarray:
        raise NotImplementedError

    def exact_product_tv(self, theta1: float, theta2: float, t: int) -> Optional[float]:
        return None


class GaussianComponent(ComponentFamily):
    """N(θ, 1)"""
    name = "gaussian"
    search_interval = (0.0, 10.0)
    has_sum_statistic = True

    def logpdf(self, x, theta):
        return stats.norm.logpdf(x, loc=theta)

    def sample(self, gen, theta, size):
        return theta + gen.standard_normal(size)

    def cdf(self, x, theta):
        return normal_cdf(np.asarray(x) - theta)

    def hellinger2(self, theta1, theta2):
        return float(-np.expm1(-((theta1 - theta2) ** 2) / 8.0))

    def chi2(self, estimate, theta):
        return float(np.expm1((estimate - theta) ** 2))

    def sum_sample(self, gen, theta, t, size):
        return t * theta + np.sqrt(t) * gen.standard_normal(size)

    def sum_llr(self, s, theta_from, theta_to, t):
        return (theta_to - theta_from) * s - 0.5 * t * (theta_to ** 2 - theta_from ** 2)

    def exact_product_tv(self, theta1, theta2, t):
        return float(2.0 * normal_cdf(np.sqrt(t) * abs(theta1 - theta2) / 2.0) - 1.0)


class PoissonComponent(ComponentFamily):
    """Poi(λ)"""
    name = "poisson"
    discrete = True
    param_range = (0.0, np.inf)
    search_interval = (1.0, 100.0)
    has_sum_statistic = True

    def logpdf(self, x, theta):
        return stats.poisson.logpmf(x, theta)

    def sample(self, gen, theta, size):
        return gen.poisson(theta, size).astype(float)

    def cdf(self, x, theta):
        return stats.poisson.cdf(x, theta)

    def hellinger2(self, theta1, theta2):
        return float(-np.expm1(-((np.sqrt(theta1) - np.sqrt(theta2)) ** 2) / 2.0))

    def chi2(self, estimate, theta):
        return float(np.expm1((estimate - theta) ** 2 / theta))

    def sum_sample(self, gen, theta, t, size):
        return gen.poisson(t * theta, size).astype(float)

    def sum_llr(self, s, theta_from, theta_to, t):
        return s * np.log(theta_to / theta_from) - t * (theta_to - theta_from)


class ExponentialComponent(ComponentFamily):
    """Exp(λ), parametrizada pela taxa"""
    name = "exponential"
    param_range = (0.0, np.inf)
    search_interval = (1.0, 100.0)
    has_sum_statistic = True

    def check(self, theta):
        super().check(theta)
        if theta <= 0:
            raise DomainError("exponential: taxa deve ser > 0")

    def logpdf(self, x, theta):
        return stats.expon.logpdf(x, scale=1.0 / theta)

    def sample(self, gen, theta, size):
        return gen.exponential(1.0 / theta, size)

    def cdf(self, x, theta):
        return stats.expon.cdf(x, scale=1.0 / theta)

    def hellinger2(self, theta1, theta2):
        return float(1.0 - 2.0 * np.sqrt(theta1 * theta2) / (theta1 + theta2))

    def support(self, theta1, theta2):
        return (0.0, np.inf)

    def chi2(self, estimate, theta):
        if 2.0 * estimate <= theta:
            return float("inf")
        return float((estimate - theta) ** 2 / (theta * (2.0 * estimate - theta)))

    def sum_sample(self, gen, theta, t, size):
        return gen.gamma(t, 1.0 / theta, size)

    def sum_llr(self, s, theta_from, theta_to, t):
        return t * np.log(theta_to / theta_from) - (theta_to - theta_from) * s


class BernoulliComponent(ComponentFamily):
    """Bern(p)"""
    name = "bernoulli"
    discrete = True
    param_range = (0.0, 1.0)
    search_interval = (0.5, 0.999)
    has_sum_statistic = True

    def logpdf(self, x, theta):
        return stats.bernoulli.logpmf(x, theta)

    def sample(self, gen, theta, size):
        return (gen.random(size) < theta).astype(float)

    def hellinger2(self, theta1, theta2):
        return float(max(0.0, 1.0 - np.sqrt(theta1 * theta2) - np.sqrt((1 - theta1) * (1 - theta2))))

    def chi2(self, estimate, theta):
        return float((estimate - theta) ** 2 / (theta * (1.0 - theta)))

    def sum_sample(self, gen, theta, t, size):
        return gen.binomial(t, theta, size).astype(float)

    def sum_llr(self, s, theta_from, theta_to, t):
        with np.errstate(divide="ignore", invalid="ignore"):
            return special.xlogy(s, theta_to / theta_from) + special.xlogy(t - s, (1 - theta_to) / (1 - theta_from))


class UniformScaleComponent(ComponentFamily):
    """U[0, b]; sem forma fechada registrada, H² sai por quadratura"""
    name = "uniform_scale"
    param_range = (0.0, np.inf)
    search_interval = (1.0, 2.0)

    def check(self, theta):
        super().check(theta)
        if theta <= 0:
            raise DomainError("uniform_scale: b deve ser > 0")

    def logpdf(self, x, theta):
        return stats.uniform.logpdf(x, loc=0.0, scale=theta)

    def sample(self, gen, theta, size):
        return theta * gen.random(size)

    def cdf(self, x, theta):
        return stats.uniform.cdf(x, loc=0.0, scale=theta)

    def support(self, theta1, theta2):
        return (0.0, max(theta1, theta2))


class PoissonizedPairComponent(ComponentFamily):
    """
    Par de coordenadas Poi(1/k + θ) × Poi(1/k - θ), θ em [-1/k, 1/k]

    É a perturbação de uma coordenada do modelo discreto poissonizado; com
    k >> n o H² máximo fica abaixo de 1/(10n).
    """
    name = "poissonized_pair"
    discrete = True
    has_sum_statistic = True

    def __init__(self, k: int):
        if k < 1:
            raise DomainError(f"poissonized_pair exige k >= 1, recebido {k}")
        self.k = int(k)
        self.param_range = (-1.0 / k, 1.0 / k)
        self.search_interval = (0.0, 1.0 / k)

    def _rates(self, theta):
        base = 1.0 / self.k
        return base + theta, base - theta

    def logpdf(self, x, theta):
        x = np.asarray(x)
        a, b = self._rates(theta)
        return stats.poisson.logpmf(x[..., 0], a) + stats.poisson.logpmf(x[..., 1], b)

    def sample(self, gen, theta, size):
        a, b = self._rates(theta)
        size = (size,) if np.isscalar(size) else tuple(size)
        return np.stack([gen.poisson(a, size), gen.poisson(b, size)], axis=-1).astype(float)

    def hellinger2(self, theta1, theta2):
        a1, b1 = self._rates(theta1)
        a2, b2 = self._rates(theta2)
        exponent = ((np.sqrt(a1) - np.sqrt(a2)) ** 2 + (np.sqrt(b1) - np.sqrt(b2)) ** 2) / 2.0
        return float(-np.expm1(-exponent))

    def sum_sample(self, gen, theta, t, size):
        a, b = self._rates(theta)
        return np.stack([gen.poisson(t * a, size), gen.poisson(t * b, size)], axis=-1).astype(float)

    def sum_llr(self, s, theta_from, theta_to, t):
        a1, b1 = self._rates(theta_from)
        a2, b2 = self._rates(theta_to)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (
                special.xlogy(s[..., 0], a2 / a1) + special.xlogy(s[..., 1], b2 / b1)
                - t * (a2 - a1) - t * (b2 - b1)
            )


COMPONENTS = {
    "gaussian": GaussianComponent,
    "poisson": PoissonComponent,
    "exponential": ExponentialComponent,
    "bernoulli": BernoulliComponent,
    "uniform_scale": UniformScaleComponent,
    "poissonized_pair": PoissonizedPairComponent,
}


def component_family(name: Union[str, ComponentFamily], **kwargs) -> ComponentFamily:
    """Instancia uma família unidimensional pelo nome (ex: 'poissonized_pair', k=1000)"""
    if isinstance(name, ComponentFamily):
        return name
    if name not in COMPONENTS:
        raise UnsupportedFamilyError(f"família unidimensional desconhecida: {name!r}; opções: {sorted(COMPONENTS)}")
    return COMPONENTS[name](**kwargs)


def _quadrature_hellinger2(family: ComponentFamily, theta1: float, theta2: float) -> float:
    low, high = family.support(theta1, theta2)

    def integrand(x):
        return np.exp(0.5 * (family.logpdf(x, theta1) + family.logpdf(x, theta2)))

    if family.discrete:
        raise UnsupportedFamilyError(f"{family.name}: quadratura não implementada para leis discretas")
    breaks = [p for p in (theta1, theta2) if low < p < high]
    if np.isfinite(low) and np.isfinite(high):
        affinity, _ = integrate.quad(integrand, low, high, points=breaks or None, limit=200)
    else:
        affinity, _ = integrate.quad(integrand, low, high, limit=200)
    return float(min(1.0, max(0.0, 1.0 - affinity)))


def hellinger2_1d(family_1d: Union[str, ComponentFamily], theta1: float, theta2: float) -> float:
    """
    H²(p_θ1, p_θ2) = 1 - ∫√(p q), em [0, 1]

    Formas fechadas para gaussiana de variância 1, Poisson, exponencial e
    Bernoulli; quadratura numérica nas demais.
    """
    family = component_family(family_1d)
    family.check(theta1)
    family.check(theta2)
    if theta1 == theta2:
        return 0.0
    closed = family.hellinger2(theta1, theta2)
    if closed is not None:
        return float(min(1.0, max(0.0, closed)))
    return _quadrature_hellinger2(family, theta1, theta2)
