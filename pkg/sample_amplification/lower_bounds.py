"""
Limites inferiores computáveis

Riscos de Bayes do teste de votação, certificados para modelos produto,
a curva p_d do modelo gaussiano esparso e as contas de perda de Stein
para covariância. Toda folga de Monte Carlo é descontada antes de
declarar uma lacuna positiva: um certificado inconclusivo nunca é
apresentado como refutação.
"""

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from .divergences import tv_product_mc
from .errors import (
    AssumptionFailureError,
    DomainError,
    InconclusiveCertificateError,
    ValidationError,
)
from .families import ComponentFamily, bartlett_factor, component_family, hellinger2_1d
from .numerics import (
    RngLike,
    as_generator,
    binomial_cdf,
    chunk_sizes,
    digamma,
    poisson_binomial_cdf,
    spawn_generators,
    trigamma,
)


# =============================================================================
# CONFIGURAÇÕES
# =============================================================================

# Faixa de TV por coordenada exigida em n e em 20n
TV_N_FLOOR = 0.09
TV_20N_CEILING = 0.99995

# Ganho de TV entre n e 20n usado no argumento da casa dos pombos
PIGEONHOLE_LOW = 0.6
PIGEONHOLE_HIGH = 0.86
HORIZON = 20

# Desvios padrão descontados de cada estimativa de Monte Carlo
MC_SLACK = 3.0

SPARSE_GRID_POINTS = 41


# =============================================================================
# TESTE DE VOTAÇÃO
# =============================================================================

def _vote_threshold(alpha_total: float, d: int) -> int:
    # tolerância evita que (1+α)d/2 inteiro caia um abaixo por arredondamento
    return int(math.floor((d + alpha_total) / 2.0 + 1e-12))


def _check_tv_pairs(tv_n, tv_nm) -> Tuple[np.ndarray, np.ndarray]:
    tv_n = np.atleast_1d(np.asarray(tv_n, dtype=float))
    tv_nm = np.atleast_1d(np.asarray(tv_nm, dtype=float))
    if tv_n.shape != tv_nm.shape or tv_n.ndim != 1 or tv_n.size == 0:
        raise ValidationError(f"tv_n e tv_nm devem ser vetores do mesmo tamanho: {tv_n.shape} vs {tv_nm.shape}")
    if np.any(tv_n < 0) or np.any(tv_nm > 1) or np.any(np.isnan(tv_n)) or np.any(np.isnan(tv_nm)):
        raise ValidationError("TVs por coordenada devem estar em [0, 1]")
    if np.any(tv_n > tv_nm):
        bad = int(np.argmax(tv_n > tv_nm))
        raise ValidationError(f"coordenada {bad}: TV em n ({tv_n[bad]}) maior que em n+m ({tv_nm[bad]})")
    return tv_n, tv_nm


def binomial_voting_gap(alpha: float, beta: float, d: int) -> Tuple[float, float, float]:
    """
    Diferença de riscos de Bayes do teste de votação com d coordenadas

    Args:
        alpha: limiar médio α em [0, 1)
        beta: meia-distância β (escala √d) entre as probabilidades de acerto
        d: número de coordenadas

    Returns:
        (P(B(d, p-) <= k), P(B(d, p+) <= k), lacuna) com p± = (1+α)/2 ± β/(2√d)
        e k = ⌊(1+α)d/2⌋
    """
    if d < 1:
        raise DomainError(f"d >= 1 exigido, recebido {d}")
    if beta < 0:
        raise DomainError(f"β >= 0 exigido, recebido {beta}")
    half = beta / (2.0 * np.sqrt(d))
    center = (1.0 + alpha) / 2.0
    if center - half < 0 or center + half > 1:
        raise DomainError(f"(1+α)/2 ± β/(2√d) fora de [0,1]: α={alpha}, β={beta}, d={d}")
    k = _vote_threshold(alpha * d, d)
    lower = float(binomial_cdf(k, d, center - half))
    upper = float(binomial_cdf(k, d, center + half))
    return lower, upper, max(0.0, lower - upper)


def voting_bayes_gap(tv_n: Sequence[float], tv_nm: Sequence[float]) -> Tuple[float, float, float]:
    """
    Limites de Hoeffding para os riscos de Bayes com n e com n+m amostras

    α_j é o ponto médio de (tv_n_j, tv_nm_j) e β/√d a menor meia-distância
    entre eles. TVs iguais dão lacuna zero.

    Returns:
        (rB_n inferior, rB_{n+m} superior, lacuna >= 0)
    """
    tv_n, tv_nm = _check_tv_pairs(tv_n, tv_nm)
    d = tv_n.size
    alpha = float(np.mean((tv_n + tv_nm) / 2.0))
    beta = float(np.sqrt(d) * np.min(tv_nm - tv_n) / 2.0)
    return binomial_voting_gap(alpha, beta, d)


def voting_exact_gap(tv_n: Sequence[float], tv_nm: Sequence[float]) -> Tuple[float, float, float]:
    """
    Mesma votação, com a lei exata (Poisson-binomial) do número de acertos

    A coordenada j acerta com probabilidade (1 + TV_j)/2; a regra aceita
    quando há no máximo ⌊d/2 + Σα_j/2⌋ acertos.
    """
    tv_n, tv_nm = _check_tv_pairs(tv_n, tv_nm)
    alphas = (tv_n + tv_nm) / 2.0
    k = _vote_threshold(float(alphas.sum()), tv_n.size)
    lower = poisson_binomial_cdf(k, (1.0 + tv_n) / 2.0)
    upper = poisson_binomial_cdf(k, (1.0 + tv_nm) / 2.0)
    return lower, upper, max(0.0, lower - upper)


# =============================================================================
# CERTIFICADO PARA MODELOS PRODUTO
# =============================================================================

def hellinger_two_point(
    family_1d: Union[str, ComponentFamily],
    n: int,
    search_interval: Optional[Tuple[float, float]] = None,
    max_iter: int = 200,
) -> Tuple[float, float]:
    """
    Par (θ+, θ-) com 1/(10n) <= H² <= 1/(5n)

    θ- fica fixo no início do intervalo; θ+ é bissectado até H² chegar
    perto de 3/(20n), o meio da faixa.

    Raises:
        AssumptionFailureError: nem o extremo do intervalo alcança 1/(10n)
    """
    if n < 1:
        raise DomainError(f"n >= 1 exigido, recebido {n}")
    family = component_family(family_1d)
    low, high = search_interval if search_interval is not None else family.search_interval
    if not low < high:
        raise ValidationError(f"intervalo de busca vazio: ({low}, {high})")
    floor_h2, ceil_h2, target = 1.0 / (10 * n), 1.0 / (5 * n), 3.0 / (20 * n)

    reach = hellinger2_1d(family, low, high)
    if reach < floor_h2:
        raise AssumptionFailureError(
            f"{family.name}: H² máximo no intervalo ({low}, {high}) é {reach:.3e} < 1/(10n) = {floor_h2:.3e}"
        )

    left, right = low, high
    theta_plus = high
    for _ in range(max_iter):
        theta_plus = 0.5 * (left + right)
        h2 = hellinger2_1d(family, low, theta_plus)
        if abs(h2 - target) <= 1e-3 * target:
            break
        if h2 < target:
            left = theta_plus
        else:
            right = theta_plus

    h2 = hellinger2_1d(family, low, theta_plus)
    if not floor_h2 <= h2 <= ceil_h2 or theta_plus == low:
        raise AssumptionFailureError(f"{family.name}: bisseção terminou com H² = {h2:.3e} fora da faixa")
    return float(theta_plus), float(low)


@dataclass
class LowerCertificate:
    """
    Certificado de limite inferior para um modelo produto

    Todas as coordenadas usam a mesma família unidimensional, então o par de
    pontos e a curva de TV são os mesmos para cada j.
    """
    family: str
    n: int
    m: int
    d: int
    theta_plus: float
    theta_minus: float
    hellinger2: float
    n_j: List[int]
    upper_j: List[int]
    tv_n: List[float]
    tv_nm: List[float]
    tv_n_stderr: float
    tv_nm_stderr: float
    alpha_j: List[float]
    beta: float
    required_increase: float
    observed_increase: float
    rb_n_lower: float
    rb_nm_upper: float
    bayes_risk_gap: float
    binomial_gap: float
    reps: int
    flags: Dict[str, bool] = field(default_factory=dict)
    exact_gap: Optional[float] = None
    anchors: List[str] = field(default_factory=list)

    def __post_init__(self):
        if self.bayes_risk_gap < 0:
            raise ValidationError(f"lacuna de risco negativa: {self.bayes_risk_gap}")
        horizon = HORIZON * self.n
        if any(not self.n <= t <= horizon for t in self.n_j + self.upper_j):
            raise ValidationError(f"tamanhos fora de [n, {HORIZON}n]")

    @property
    def conclusive(self) -> bool:
        return self.bayes_risk_gap > 0

    def as_dict(self) -> Dict:
        return asdict(self)

    def to_block(self) -> str:
        """Bloco plano chave=valor separado por ';' (vai numa célula do CSV)"""
        items = [
            ("family", self.family),
            ("n", self.n),
            ("m", self.m),
            ("d", self.d),
            ("theta_plus", f"{self.theta_plus:.10g}"),
            ("theta_minus", f"{self.theta_minus:.10g}"),
            ("h2", f"{self.hellinger2:.6g}"),
            ("n_j", self.n_j[0]),
            ("upper_j", self.upper_j[0]),
            ("tv_n", f"{self.tv_n[0]:.6g}"),
            ("tv_nm", f"{self.tv_nm[0]:.6g}"),
            ("tv_stderr", f"{max(self.tv_n_stderr, self.tv_nm_stderr):.3g}"),
            ("beta", f"{self.beta:.6g}"),
            ("required_increase", f"{self.required_increase:.6g}"),
            ("observed_increase", f"{self.observed_increase:.6g}"),
            ("rb_n_lower", f"{self.rb_n_lower:.6g}"),
            ("rb_nm_upper", f"{self.rb_nm_upper:.6g}"),
            ("gap", f"{self.bayes_risk_gap:.6g}"),
            ("binomial_gap", f"{self.binomial_gap:.6g}"),
            ("reps", self.reps),
        ]
        items += [(f"flag.{key}", int(value)) for key, value in self.flags.items()]
        if self.exact_gap is not None:
            items.append(("exact_gap", f"{self.exact_gap:.6g}"))
        return ";".join(f"{key}={value}" for key, value in items)


def _size_grid(n: int, m: int) -> List[int]:
    horizon = HORIZON * n
    grid = list(range(n, horizon + 1, m))
    if grid[-1] != horizon:
        grid.append(horizon)
    return grid


def product_lower_certificate(
    family_1d: Union[str, ComponentFamily],
    n: int,
    m: int,
    d: int,
    reps: int,
    rng: RngLike,
    search_interval: Optional[Tuple[float, float]] = None,
) -> LowerCertificate:
    """
    Certificado de que nenhum amplificador (n, n+m) tem erro abaixo da lacuna

    Args:
        family_1d: família de cada coordenada
        n, m: tamanhos da amplificação
        d: número de coordenadas
        reps: réplicas de Monte Carlo por tamanho da grade
        rng: aleatoriedade (cada tamanho usa uma subsequência própria)
        search_interval: intervalo para o par de pontos (padrão da família)

    Returns:
        LowerCertificate com lacuna > 0

    Raises:
        AssumptionFailureError: par de pontos inexistente no intervalo
        InconclusiveCertificateError: a folga de MC anulou o ganho de TV
    """
    if m < 1:
        raise DomainError(f"m >= 1 exigido, recebido {m}")
    if d < 1:
        raise DomainError(f"d >= 1 exigido, recebido {d}")
    family = component_family(family_1d)
    theta_plus, theta_minus = hellinger_two_point(family, n, search_interval)
    h2 = hellinger2_1d(family, theta_minus, theta_plus)

    grid = _size_grid(n, m)
    generators = spawn_generators(rng, len(grid))
    curve = {}
    for t, gen in zip(grid, generators):
        curve[t] = tv_product_mc(family, theta_plus, theta_minus, t, reps, gen)

    horizon = HORIZON * n
    best = None
    for t in grid[:-1]:
        upper = min(t + m, horizon)
        est_t, se_t = curve[t]
        est_u, se_u = curve[upper]
        increase = (est_u - MC_SLACK * se_u) - (est_t + MC_SLACK * se_t)
        if best is None or increase > best[0]:
            best = (increase, t, upper)
    increase, n_j, upper_j = best

    est_n, se_n = curve[n_j]
    est_u, se_u = curve[upper_j]
    tv_n = float(np.clip(est_n + MC_SLACK * se_n, 0.0, 1.0))
    tv_nm = float(np.clip(est_u - MC_SLACK * se_u, 0.0, 1.0))
    required = (PIGEONHOLE_HIGH - PIGEONHOLE_LOW) / math.ceil((HORIZON - 1) * n / m)
    flags = {
        "tv_n_floor": curve[n][0] >= TV_N_FLOOR,
        "tv_20n_ceiling": curve[horizon][0] <= TV_20N_CEILING,
        "pigeonhole": increase >= required,
    }

    exact = family.exact_product_tv(theta_plus, theta_minus, n_j)
    exact_gap = None
    if exact is not None:
        exact_upper = family.exact_product_tv(theta_plus, theta_minus, upper_j)
        exact_gap = voting_exact_gap([exact] * d, [exact_upper] * d)[2]

    tvs_n = [tv_n] * d
    tvs_nm = [tv_nm] * d
    separated = tv_nm > tv_n
    if separated:
        rb_n, rb_nm, gap = voting_exact_gap(tvs_n, tvs_nm)
        binomial_gap = voting_bayes_gap(tvs_n, tvs_nm)[2]
    else:
        # limites triviais: sem separação a votação não diz nada
        rb_n, rb_nm, gap, binomial_gap = 0.0, 1.0, 0.0, 0.0
    certificate = LowerCertificate(
        family=family.name,
        n=n,
        m=m,
        d=d,
        theta_plus=theta_plus,
        theta_minus=theta_minus,
        hellinger2=h2,
        n_j=[n_j] * d,
        upper_j=[upper_j] * d,
        tv_n=tvs_n,
        tv_nm=tvs_nm,
        tv_n_stderr=se_n,
        tv_nm_stderr=se_u,
        alpha_j=[(tv_n + tv_nm) / 2.0] * d,
        beta=float(np.sqrt(d) * (tv_nm - tv_n) / 2.0),
        required_increase=required,
        observed_increase=increase,
        rb_n_lower=rb_n,
        rb_nm_upper=rb_nm,
        bayes_risk_gap=gap,
        binomial_gap=binomial_gap,
        reps=reps,
        flags=flags,
        exact_gap=exact_gap,
        anchors=["voting test over product coordinates", "pigeonhole scan over t in {n, n+m, ..., 20n}"],
    )
    if not separated:
        raise InconclusiveCertificateError(
            f"{family.name}: ganho de TV {increase:.3e} não supera a folga de MC com {reps} réplicas",
            certificate=certificate,
        )
    if gap <= 0:
        raise InconclusiveCertificateError(
            f"{family.name}: lacuna de risco nula após descontar a folga de MC", certificate=certificate
        )
    return certificate


# =============================================================================
# GAUSSIANA ESPARSA
# =============================================================================

def pd_curve(d: int, z, reps: int, rng: RngLike):
    """
    Probabilidade de acerto p_d(z) do estimador bayesiano da coordenada ativa

    p_d(z) = E[e^{z(z+Z₁)} / (e^{z(z+Z₁)} + Σ_{j>=2} e^{zZ_j})]. Vários z
    compartilham o mesmo ruído, então as estimativas são monótonas em z
    salvo erro de arredondamento.

    Args:
        d: número de coordenadas do bloco (>= 2)
        z: escalar ou vetor de pontos
        reps: réplicas de Monte Carlo
        rng: aleatoriedade

    Returns:
        (estimativa, erro padrão), escalares ou vetores conforme z
    """
    if d < 2:
        raise DomainError(f"pd_curve exige d >= 2, recebido {d}")
    if reps < 2:
        raise ValidationError("pd_curve exige reps >= 2")
    scalar = np.ndim(z) == 0
    zs = np.atleast_1d(np.asarray(z, dtype=float))

    gen = as_generator(rng)
    totals = np.zeros(zs.size)
    squares = np.zeros(zs.size)
    for size in chunk_sizes(reps, d):
        noise = gen.standard_normal((size, d))
        for i, zi in enumerate(zs):
            if zi == 0.0:
                values = np.full(size, 1.0 / d)
            else:
                lead = zi * (zi + noise[:, 0])
                rest = special.logsumexp(zi * noise[:, 1:], axis=1)
                values = special.expit(lead - rest)
            totals[i] += values.sum()
            squares[i] += np.square(values).sum()

    means = totals / reps
    variances = np.clip((squares - reps * means * means) / (reps - 1), 0.0, None)
    means = np.clip(means, 0.0, 1.0)
    stderrs = np.sqrt(variances / reps)
    stderrs[zs == 0.0] = 0.0
    if scalar:
        return float(means[0]), float(stderrs[0])
    return means, stderrs


def sparse_amplification_floor(
    s: int,
    d: int,
    n: int,
    m: int,
    reps: int,
    rng: RngLike,
    grid_points: int = SPARSE_GRID_POINTS,
) -> float:
    """
    Limite inferior para o erro de amplificação no modelo gaussiano s-esparso

    Divide as d coordenadas em s blocos de d₀ = ⌊d/s⌋ com uma coordenada
    ativa de altura t cada. A lacuna é maximizada numa grade de t em torno
    da transição √n·t ≈ √(2 log d₀).

    Returns:
        maior diferença P(B(s, 1-p(√n t)) >= N) - P(B(s, 1-p(√(n+m) t)) >= N)
    """
    if s < 1 or 2 * s >= d:
        raise DomainError(f"exige 1 <= s < d/2, recebido s={s}, d={d}")
    if n < 1 or m < 0:
        raise DomainError(f"exige n >= 1 e m >= 0, recebido n={n}, m={m}")
    if m == 0:
        return 0.0

    block = d // s
    center = np.sqrt(2.0 * np.log(block))
    scaled = np.linspace(max(center - 3.0, 0.0), center + 3.0, grid_points)
    ts = scaled / np.sqrt(n)
    z_n = np.sqrt(n) * ts
    z_nm = np.sqrt(n + m) * ts
    est, se = pd_curve(block, np.concatenate([z_n, z_nm]), reps, rng)

    p_n = np.clip(est[:grid_points] + MC_SLACK * se[:grid_points], 0.0, 1.0)
    p_nm = np.clip(est[grid_points:] - MC_SLACK * se[grid_points:], 0.0, 1.0)
    miss_n = 1.0 - p_n
    miss_nm = 1.0 - p_nm
    threshold = np.ceil(s * miss_n / 2.0 + s * miss_nm / 2.0)
    gaps = stats.binom.sf(threshold - 1, s, miss_n) - stats.binom.sf(threshold - 1, s, miss_nm)
    return float(max(0.0, np.max(gaps)))


# =============================================================================
# PERDA DE STEIN (COVARIÂNCIA)
# =============================================================================

@dataclass(frozen=True)
class SteinWeights:
    """Diagonal D = diag(λ) do estimador invariante Σ̂ = L·D·Lᵀ"""
    lam: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lam) == 0:
            raise DomainError("λ vazio")
        if any(not value > 0 for value in self.lam):
            raise DomainError(f"λ_j devem ser > 0: {self.lam}")

    @classmethod
    def default(cls, n: int, d: int) -> "SteinWeights":
        """λ_j = 1/(n+d+1-2j)"""
        if n < d:
            raise DomainError(f"pesos padrão exigem n >= d, recebido n={n}, d={d}")
        j = np.arange(1, d + 1)
        return cls(tuple(float(v) for v in 1.0 / (n + d + 1 - 2 * j)))

    @property
    def d(self) -> int:
        return len(self.lam)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.lam, dtype=float)


def _stein_inputs(n: int, d: int, weights: Optional[SteinWeights]) -> Tuple[np.ndarray, np.ndarray]:
    if d < 1 or n < d:
        raise DomainError(f"exige n >= d >= 1, recebido n={n}, d={d}")
    weights = weights or SteinWeights.default(n, d)
    if weights.d != d:
        raise ValidationError(f"λ tem {weights.d} entradas, esperado {d}")
    return weights.as_array(), np.arange(1, d + 1)


def stein_mean(n: int, d: int, weights: Optional[SteinWeights] = None) -> float:
    """E[ℓ(I, L·D·Lᵀ)] com L·Lᵀ ~ W_d(I, n)"""
    lam, j = _stein_inputs(n, d, weights)
    terms = (n + d + 1 - 2 * j) * lam - np.log(lam) - (np.log(2.0) + digamma((n - j + 1) / 2.0))
    return float(terms.sum() - d)


def stein_var(n: int, d: int, weights: Optional[SteinWeights] = None) -> float:
    """Var[ℓ(I, L·D·Lᵀ)]; os termos por coluna de L são independentes"""
    lam, j = _stein_inputs(n, d, weights)
    terms = 2.0 * (n + d + 1 - 2 * j) * lam ** 2 - 4.0 * lam + trigamma((n + 1 - j) / 2.0)
    return float(terms.sum())


def stein_g(u: float, v: float) -> float:
    if u <= 0 or v < 0:
        raise DomainError(f"stein_g exige u > 0 e v >= 0, recebido u={u}, v={v}")
    value = 0.5 * (special.xlogy(u + 2 * v, u + 2 * v) + special.xlogy(u, u)) - special.xlogy(u + v, u + v)
    return float(value)


def stein_h(u: float) -> float:
    if u <= 0:
        raise DomainError(f"stein_h exige u > 0, recebido {u}")
    return float(u - np.log(u) - 1.0)


def stein_mc(n: int, d: int, weights: Optional[SteinWeights], reps: int, rng: RngLike) -> Tuple[float, float]:
    """
    Monte Carlo da perda de Stein pela decomposição de Bartlett

    Returns:
        (média amostral, variância amostral)
    """
    lam, _ = _stein_inputs(n, d, weights)
    if reps < 2:
        raise ValidationError("stein_mc exige reps >= 2")
    gen = as_generator(rng)
    losses = []
    for size in chunk_sizes(reps, d * d):
        A = bartlett_factor(gen, d, n, size)
        trace = (np.square(A) * lam).sum(axis=(1, 2))
        log_det = np.log(lam).sum() + np.log(np.square(np.diagonal(A, axis1=1, axis2=2))).sum(axis=1)
        losses.append(trace - log_det - d)
    values = np.concatenate(losses)
    return float(values.mean()), float(values.var(ddof=1))


@dataclass
class CovarianceGapReport:
    """Separação de riscos com perda de Stein entre n e n+m amostras"""
    n: int
    d: int
    m: int
    stein_mean_n: float
    stein_sd_n: float
    g_n: float
    g_nm: float
    g_gap: float
    slack: float
    mean_bound_holds: bool
    var_bound_holds: bool
    conclusive: bool
    validity: Dict[str, bool] = field(default_factory=dict)

    def as_dict(self) -> Dict:
        return asdict(self)


def covariance_lower_gap(n: int, d: int, m: int) -> CovarianceGapReport:
    """
    Compara g(n+1-d, d) - g(n+m+1-d, d) com os termos de erro d/n

    Com os pesos padrão, a média da perda fica a 5d/n de g e o desvio padrão
    abaixo de 4d/n; por Chebyshev (prob. 0.9) cada lado perde
    (5 + 4√10)·d/n. A conclusão m = Ω(n/d) vale quando a lacuna de g supera
    a soma das duas folgas.
    """
    if d < 1 or n < 2 * d:
        raise ValidationError(f"covariance_lower_gap exige n >= 2d, recebido n={n}, d={d}")
    if m < 0:
        raise DomainError(f"m >= 0 exigido, recebido {m}")

    mean_n = stein_mean(n, d)
    sd_n = float(np.sqrt(stein_var(n, d)))
    g_n = stein_g(n + 1 - d, d)
    g_nm = stein_g(n + m + 1 - d, d)
    g_gap = g_n - g_nm if m > 0 else 0.0
    slack = 2.0 * (5.0 + 4.0 * np.sqrt(10.0)) * d / n
    return CovarianceGapReport(
        n=n,
        d=d,
        m=m,
        stein_mean_n=mean_n,
        stein_sd_n=sd_n,
        g_n=g_n,
        g_nm=g_nm,
        g_gap=float(g_gap),
        slack=float(slack),
        mean_bound_holds=abs(mean_n - g_n) <= 5.0 * d / n,
        var_bound_holds=sd_n <= 4.0 * d / n,
        conclusive=bool(m > 0 and g_gap > slack),
        validity={"n >= 2d": True, "m <= n": m <= n},
    )
