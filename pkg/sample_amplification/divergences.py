"""
Divergências e limites em forma fechada

Funções escalares puras. Os limites de TV são cortados em 1 só no
BoundReport (o valor sem corte fica guardado); TVs exatas nunca são cortadas.
Os formula_id são estáveis e documentados em docs/layout_relatorios.txt (seção Fórmulas).
"""

from dataclasses import asdict, dataclass, field
from typing import Dict, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, UnsupportedFamilyError, ValidationError
from .families import ComponentFamily, component_family
from .numerics import (
    RngLike,
    as_generator,
    chi2_cdf,
    chunk_sizes,
    digamma,
    log_gamma,
    multivariate_digamma,
    multivariate_log_gamma,
)


# =============================================================================
# RELATÓRIO
# =============================================================================

@dataclass
class BoundReport:
    """
    Valor numérico de um limite com sua procedência

    Args:
        value: valor reportado (cortado em 1 para limites de TV)
        formula_id: identificador estável da fórmula
        unclipped: valor antes do corte
        validity: condição → satisfeita?
        anchor: descrição curta do resultado usado
        estimated: True quando algum termo veio de Monte Carlo
    """
    value: float
    formula_id: str
    unclipped: float
    validity: Dict[str, bool] = field(default_factory=dict)
    anchor: str = ""
    estimated: bool = False

    def __post_init__(self):
        if self.value < 0 or np.isnan(self.value):
            raise ValidationError(f"limite negativo ou NaN: {self.value}")

    @property
    def valid(self) -> bool:
        return all(self.validity.values())

    def as_dict(self) -> Dict:
        return asdict(self)


def tv_bound_report(value: float, formula_id: str, validity=None, anchor: str = "", estimated: bool = False) -> BoundReport:
    unclipped = float(value)
    return BoundReport(
        value=min(1.0, unclipped),
        formula_id=formula_id,
        unclipped=unclipped,
        validity=dict(validity or {}),
        anchor=anchor,
        estimated=estimated,
    )


def _check_sizes(n: int, m: int, min_n: int = 1):
    if n < min_n:
        raise DomainError(f"n >= {min_n} exigido, recebido {n}")
    if m < 0:
        raise DomainError(f"m >= 0 exigido, recebido {m}")


# =============================================================================
# KL E TV EXATAS
# =============================================================================

def gaussian_scaling_kl(n: int, m: int, d: int) -> float:
    """KL(N(θ, Σ/n) ‖ N(θ, Σ/(n+m))) = d/2·(m/n - log(1+m/n))"""
    _check_sizes(n, m)
    ratio = m / n
    return float(0.5 * d * (ratio - np.log1p(ratio)))


def gaussian_scaling_tv_exact(n: int, m: int, d: int) -> float:
    """
    ‖N(0, I/n) - N(0, I/(n+m))‖_TV exata

    As densidades se cruzam em ‖x‖² = r* = d·log((n+m)/n)/m, e a TV é a
    diferença das massas χ²_d dentro dessa bola.
    """
    _check_sizes(n, m)
    if m == 0:
        return 0.0
    r_star = d * np.log1p(m / n) / m
    return float(chi2_cdf(r_star * (n + m), d) - chi2_cdf(r_star * n, d))


def wishart_kl(n: int, m: int, d: int) -> float:
    """f(n,m,d): KL entre as leis de Σ̂ com n e n+m amostras"""
    if n <= d - 1:
        raise DomainError(f"wishart_kl exige n > d-1, recebido n={n}, d={d}")
    _check_sizes(n, m)
    if m == 0:
        return 0.0
    value = (
        0.5 * d * (m - (n + m) * np.log1p(m / n))
        + multivariate_log_gamma((n + m) / 2.0, d)
        - multivariate_log_gamma(n / 2.0, d)
        - 0.5 * m * multivariate_digamma(n / 2.0, d)
    )
    return float(max(0.0, value))


def gamma_kl(n: int, m: int, d: int) -> float:
    """KL entre produtos Gamma(n, nλ) e Gamma(n+m, (n+m)λ) das médias"""
    _check_sizes(n, m)
    if m == 0:
        return 0.0
    value = d * (m - (n + m) * np.log1p(m / n) + log_gamma(n + m) - log_gamma(n) - m * digamma(n))
    return float(max(0.0, value))


def uniform_minmax_kl(n: int, m: int, d: int) -> float:
    """KL entre as leis de (mín, máx) com n e n+m amostras uniformes"""
    if n < 2:
        raise DomainError(f"uniform_minmax_kl exige n >= 2, recebido {n}")
    _check_sizes(n, m, min_n=2)
    a = m / n
    b = m / (n - 1)
    return float(d * ((a - np.log1p(a)) + (b - np.log1p(b))))


def tv_from_kl(kl: float) -> float:
    """Pinsker: TV <= √(KL/2)"""
    return float(np.sqrt(max(0.0, kl) / 2.0))


# =============================================================================
# LIMITES DE EMBARALHAMENTO
# =============================================================================

def amplification_bound_general(n: int, m: int, chi2_guarantee: float) -> float:
    """min(1, √(m²/n · r))"""
    if chi2_guarantee < 0:
        raise DomainError(f"garantia de χ² negativa: {chi2_guarantee}")
    _check_sizes(n, m)
    if m == 0 or chi2_guarantee == 0:
        return 0.0
    return float(min(1.0, np.sqrt(m * m / n * chi2_guarantee)))


def amplification_bound_product(n: int, m: int, chi2_guarantees: Sequence[float]) -> float:
    """min(1, √(m²/n · Σ_j r_j))"""
    guarantees = np.asarray(chi2_guarantees, dtype=float)
    if np.any(guarantees < 0):
        raise DomainError("garantias de χ² devem ser >= 0")
    return amplification_bound_general(n, m, float(guarantees.sum()))


# =============================================================================
# HELLINGER
# =============================================================================

def _check_h2(values):
    values = np.asarray(values, dtype=float)
    if np.any(values < 0) or np.any(values > 1) or np.any(np.isnan(values)):
        raise DomainError("H² deve estar em [0, 1]")
    return values


def hellinger_tensorize(h2s: Sequence[float]) -> float:
    """H² do produto: 1 - ∏(1 - h2_j)"""
    values = _check_h2(h2s)
    if np.any(values == 1.0):
        return 1.0
    return float(-np.expm1(np.log1p(-values).sum()))


def tv_hellinger_sandwich(h2: float) -> Tuple[float, float]:
    """H² <= TV <= H·√(2 - H²)"""
    value = float(_check_h2(h2))
    return value, float(np.sqrt(value * (2.0 - value)))


def tv_product_mc(
    family_1d: Union[str, ComponentFamily],
    theta1: float,
    theta2: float,
    t: int,
    reps: int,
    rng: RngLike,
) -> Tuple[float, float]:
    """
    Monte Carlo de ‖p_θ1^{⊗t} - p_θ2^{⊗t}‖_TV = E_{p^t}[(1 - ∏ q/p)_+]

    Em famílias exponenciais a razão de verossimilhança depende só da soma
    das t observações, que é sorteada diretamente.

    Returns:
        (estimativa, erro padrão)
    """
    family = component_family(family_1d)
    family.check(theta1)
    family.check(theta2)
    if t < 1:
        raise DomainError(f"t >= 1 exigido, recebido {t}")
    if reps < 2:
        raise ValidationError("tv_product_mc exige reps >= 2")
    if theta1 == theta2:
        return 0.0, 0.0

    gen = as_generator(rng)
    total = 0.0
    total_sq = 0.0
    width = 1 if family.has_sum_statistic else t
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for size in chunk_sizes(reps, width):
            if family.has_sum_statistic:
                s = family.sum_sample(gen, theta1, t, size)
                llr = family.sum_llr(s, theta1, theta2, t)
            else:
                try:
                    x = family.sample(gen, theta1, (size, t))
                    llr = (family.logpdf(x, theta2) - family.logpdf(x, theta1)).sum(axis=1)
                except NotImplementedError:
                    raise UnsupportedFamilyError(f"{family.name} sem densidade para tv_product_mc")
            llr = np.nan_to_num(np.asarray(llr, dtype=float), nan=-np.inf)
            values = -np.expm1(np.minimum(llr, 0.0))
            total += values.sum()
            total_sq += np.square(values).sum()
    mean = total / reps
    variance = max(0.0, (total_sq - reps * mean * mean) / (reps - 1))
    return float(min(1.0, max(0.0, mean))), float(np.sqrt(variance / reps))


# =============================================================================
# LIMITES DOS AMPLIFICADORES POR SUFICIÊNCIA
# =============================================================================

def gaussian_mean_bound(n: int, m: int, d: int) -> BoundReport:
    kl = gaussian_scaling_kl(n, m, d)
    return tv_bound_report(tv_from_kl(kl), "gaussian_mean_kl", {"n >= 1": n >= 1}, "Pinsker sobre KL de N(θ,Σ/n) vs N(θ,Σ/(n+m))")


def gaussian_exact_error(n: int, m: int, d: int) -> BoundReport:
    value = gaussian_scaling_tv_exact(n, m, d)
    return BoundReport(value, "gaussian_exact_tv", value, {"n >= 1": n >= 1}, "TV exata entre N(0,I/n) e N(0,I/(n+m))")


def gaussian_cov_bound(n: int, m: int, d: int) -> BoundReport:
    _check_sizes(n, m)
    return tv_bound_report(2.0 * m * d / n, "gaussian_cov_2md_n", {"n >= 4·max(m,d)": n >= 4 * max(m, d)}, "TV <= 2md/n")


def gaussian_mean_cov_bound(n: int, m: int, d: int) -> BoundReport:
    _check_sizes(n, m, min_n=2)
    return tv_bound_report(
        3.0 * m * d / (n - 1),
        "gaussian_mean_cov_3md_n",
        {"n >= 2": n >= 2, "n-1 >= 4·max(m,d)": n - 1 >= 4 * max(m, d)},
        "TV <= 3md/(n-1)",
    )


def exponential_bound(n: int, m: int, d: int) -> BoundReport:
    kl = gamma_kl(n, m, d)
    return tv_bound_report(tv_from_kl(kl), "gamma_kl_pinsker", {"n >= 1": n >= 1}, "Pinsker sobre KL das médias Gamma")


def uniform_bound(n: int, m: int, d: int) -> BoundReport:
    kl = uniform_minmax_kl(n, m, d)
    return tv_bound_report(tv_from_kl(kl), "uniform_minmax_kl_pinsker", {"n >= 2": n >= 2}, "Pinsker sobre KL de (mín, máx)")


def poisson_hybrid_bound(n: int, m: int, d: int) -> BoundReport:
    _check_sizes(n, m, min_n=2)
    return tv_bound_report(
        m * np.sqrt(2.0 * d) / n, "poisson_hybrid_m_sqrt2d_n", {"n par": n % 2 == 0}, "suficiência + aprendizado: TV <= m√(2d)/n"
    )


def poissonized_discrete_bound(n: int, m: int) -> BoundReport:
    _check_sizes(n, m)
    kl = m * m / n
    return tv_bound_report(tv_from_kl(kl), "poissonized_kl_m2_n", {"n >= 1": n >= 1}, "Pinsker sobre KL <= m²/n, sem dependência de k")


def lowrank_bound(n: int, m: int, rank: int) -> BoundReport:
    return BoundReport(0.0, "lowrank_exact_recovery", 0.0, {"n >= d": n >= rank}, "Σ recuperada exatamente quando n >= d")
