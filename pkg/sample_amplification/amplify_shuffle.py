"""
Amplificação por aprendizado e embaralhamento

A primeira metade das amostras treina um estimador P̂; m amostras falsas de
P̂ são misturadas à segunda metade por uma permutação uniforme (linhas
inteiras no caso geral, coluna a coluna no caso produto). O limite reportado
depende da garantia de χ² esperado do estimador em n/2 amostras.
"""

from functools import lru_cache
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy import stats

from .amplify_sufficiency import AmplifierOutput
from .config import CLIPPED_CHI2_REPS, DEFAULT_SEED
from .divergences import (
    BoundReport,
    amplification_bound_general,
    amplification_bound_product,
    tv_bound_report,
)
from .errors import (
    DomainError,
    GuaranteeUnavailableError,
    InsufficientSamplesError,
    RequiresEvenNError,
    UnsupportedFamilyError,
    ValidationError,
)
from .families import Dataset, FamilyKind, FamilySpec
from .numerics import RngLike, RngState, as_generator, spawn_generators


# =============================================================================
# ESTIMADORES (LEARNERS)
# =============================================================================

class Learner:
    """
    Estimador de distribuição com garantia de χ² esperado

    fit recebe só as linhas que pode usar (a divisão em metades é feita por
    quem chama). Estimadores por coordenada recebem uma coluna e devolvem a
    lei de uma coordenada; a garantia de um produto de d coordenadas é
    (1 + r)^d - 1.
    """
    name = "learner"
    formula_id = "learner"
    estimated = False
    kinds = frozenset()

    def fit(self, rows: np.ndarray):
        raise NotImplementedError

    def draw(self, param, count: int, gen: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def coordinate_guarantee(self, n: int) -> float:
        raise GuaranteeUnavailableError(f"{self.name}: sem garantia de χ² registrada")

    def chi2_guarantees(self, n: int, d: int) -> np.ndarray:
        return np.full(d, self.coordinate_guarantee(n))

    def chi2_guarantee(self, n: int, d: int = 1) -> float:
        """Garantia de E[χ²(P̂, P)] para o vetor inteiro de d coordenadas"""
        guarantees = self.chi2_guarantees(n, d)
        return float(np.expm1(np.log1p(guarantees).sum()))

    def chi2_to_truth(self, param, truth) -> float:
        """χ²(P̂, P) em forma fechada"""
        raise UnsupportedFamilyError(f"{self.name}: χ² até a verdade não registrado")

    def __repr__(self):
        return f"{type(self).__name__}()"


class EmpiricalDiscrete(Learner):
    """Distribuição empírica em k símbolos; E[χ²] = (k-1)/n"""
    name = "empirical_discrete"
    formula_id = "empirical_discrete_k-1_n"
    kinds = frozenset({FamilyKind.DISCRETE})

    def __init__(self, k: int):
        if k < 1:
            raise ValidationError(f"k >= 1 exigido, recebido {k}")
        self.k = int(k)

    def fit(self, rows):
        symbols = np.asarray(rows).reshape(-1).astype(np.int64)
        return np.bincount(symbols - 1, minlength=self.k)[: self.k] / symbols.size

    def draw(self, param, count, gen):
        return gen.choice(self.k, size=count, p=param) + 1

    def chi2_guarantee(self, n, d=1):
        if n < 1:
            raise GuaranteeUnavailableError("distribuição empírica exige n >= 1")
        return (self.k - 1) / n

    def chi2_to_truth(self, param, truth):
        truth = np.asarray(truth, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(truth > 0, (param - truth) ** 2 / truth, np.where(param > 0, np.inf, 0.0))
        return float(terms.sum())

    def __repr__(self):
        return f"EmpiricalDiscrete(k={self.k})"


class GaussianMeanPlugin(Learner):
    """N(θ̂, I) com θ̂ a média amostral; E[χ²] = √(n/(n-2)) - 1 por coordenada"""
    name = "gaussian_mean_plugin"
    formula_id = "gaussian_plugin_sqrt_n_n-2"
    kinds = frozenset({FamilyKind.GAUSSIAN_MEAN})

    def fit(self, rows):
        return np.asarray(rows, dtype=float).mean(axis=0)

    def draw(self, param, count, gen):
        param = np.asarray(param, dtype=float)
        return param + gen.standard_normal((count,) + param.shape)

    def coordinate_guarantee(self, n):
        if n < 3:
            raise GuaranteeUnavailableError(f"garantia gaussiana exige n >= 3, recebido {n}")
        return float(np.sqrt(n / (n - 2.0)) - 1.0)

    def chi2_to_truth(self, param, truth):
        return float(np.expm1(np.sum((np.asarray(param) - np.asarray(truth)) ** 2)))


class UniformMLE(Learner):
    """U[mín, máx] por coordenada; E[χ²] = (4n-6)/((n-2)(n-3))"""
    name = "uniform_mle"
    formula_id = "uniform_mle_4n-6"
    kinds = frozenset({FamilyKind.UNIFORM_RECT})

    def fit(self, rows):
        rows = np.asarray(rows, dtype=float)
        return np.stack([rows.min(axis=0), rows.max(axis=0)])

    def draw(self, param, count, gen):
        low, high = param[0], param[1]
        shape = (count,) + np.shape(low)
        return low + (high - low) * gen.random(shape)

    def coordinate_guarantee(self, n):
        if n < 4:
            raise GuaranteeUnavailableError(f"garantia uniforme exige n >= 4, recebido {n}")
        return (4.0 * n - 6.0) / ((n - 2.0) * (n - 3.0))

    def chi2_to_truth(self, param, truth):
        """truth = (a, b) do intervalo verdadeiro"""
        low, high = np.atleast_1d(param[0]), np.atleast_1d(param[1])
        a, b = np.atleast_1d(truth[0]), np.atleast_1d(truth[1])
        ratios = ((b - a) / (high - low)) ** 2
        return float(np.prod(ratios) - 1.0)


# Semente fixa: a garantia truncada é cacheada por n
_CLIPPED_SEED = RngState(DEFAULT_SEED, stream=0xC11F)


@lru_cache(maxsize=256)
def _clipped_exponential_chi2(n: int, reps: int) -> float:
    gen = _CLIPPED_SEED.substream(n).generator()
    rate_ratio = n / gen.gamma(n, 1.0, size=reps)
    with np.errstate(divide="ignore"):
        chi2 = np.where(
            2.0 * rate_ratio > 1.0,
            (rate_ratio - 1.0) ** 2 / np.maximum(2.0 * rate_ratio - 1.0, 1e-300),
            np.inf,
        )
    return float(np.minimum(chi2, n).mean())


def soft_threshold(values: np.ndarray, tau: float) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    return np.sign(values) * np.maximum(np.abs(values) - tau, 0.0)


@lru_cache(maxsize=256)
def _clipped_sparse_chi2(n: int, c: float, theta: float, reps: int) -> float:
    gen = _CLIPPED_SEED.substream(n).substream(int(round(theta * 1e6))).generator()
    tau = np.sqrt(c * np.log(n) / n)
    estimates = soft_threshold(theta + gen.standard_normal(reps) / np.sqrt(n), tau)
    with np.errstate(over="ignore"):
        chi2 = np.expm1((estimates - theta) ** 2)
    return float(np.minimum(chi2, n).mean())


class ExponentialRatePlugin(Learner):
    """
    Exp(λ̂) com λ̂ = n/ΣX; o χ² é infinito quando 2λ̂ <= λ

    A garantia usada é a do χ² truncado em n, estimada por Monte Carlo
    (λ̂/λ ~ n/Gamma(n, 1) não depende de λ) e marcada como estimada.
    """
    name = "exponential_rate_plugin"
    formula_id = "exponential_clipped_chi2_mc"
    estimated = True
    kinds = frozenset({FamilyKind.PRODUCT_EXPONENTIAL})

    def __init__(self, reps: int = CLIPPED_CHI2_REPS):
        self.reps = int(reps)

    def fit(self, rows):
        rows = np.asarray(rows, dtype=float)
        return rows.shape[0] / rows.sum(axis=0)

    def draw(self, param, count, gen):
        param = np.asarray(param, dtype=float)
        return gen.exponential(1.0 / param, size=(count,) + param.shape)

    def coordinate_guarantee(self, n):
        if n < 2:
            raise GuaranteeUnavailableError(f"garantia exponencial exige n >= 2, recebido {n}")
        return _clipped_exponential_chi2(int(n), self.reps)

    def chi2_to_truth(self, param, truth):
        param, truth = np.atleast_1d(param), np.atleast_1d(truth)
        if np.any(2.0 * param <= truth):
            return float("inf")
        per_coord = (param - truth) ** 2 / (truth * (2.0 * param - truth))
        return float(np.expm1(np.log1p(per_coord).sum()))


class PoissonRatePlugin(Learner):
    """Poi(λ̂) com λ̂ a média; sem garantia de χ² (o erro pode ser ≫ 1/n)"""
    name = "poisson_rate_plugin"
    formula_id = "poisson_plugin_no_guarantee"
    kinds = frozenset({FamilyKind.PRODUCT_POISSON, FamilyKind.POISSONIZED_DISCRETE})

    def fit(self, rows):
        return np.asarray(rows, dtype=float).mean(axis=0)

    def draw(self, param, count, gen):
        param = np.asarray(param, dtype=float)
        return gen.poisson(param, size=(count,) + param.shape).astype(float)

    def coordinate_guarantee(self, n):
        raise GuaranteeUnavailableError("estimador de Poisson por média não tem garantia de χ² da ordem 1/n")

    def chi2_to_truth(self, param, truth):
        param, truth = np.atleast_1d(param), np.atleast_1d(truth)
        with np.errstate(over="ignore"):
            return float(np.expm1(np.sum((param - truth) ** 2 / truth)))


class SoftThresholdSparse(Learner):
    """
    N(θ̂, 1) por coordenada com θ̂ a média com limiar suave √(C log n / n)

    A garantia soma o χ² truncado esperado: s coordenadas no pior θ de uma
    grade em múltiplos do limiar e d-s coordenadas em θ = 0.
    """
    name = "soft_threshold_sparse"
    formula_id = "sparse_soft_threshold_clipped_chi2_mc"
    estimated = True
    kinds = frozenset({FamilyKind.SPARSE_GAUSSIAN})
    theta_grid = (0.0, 0.5, 1.0, 2.0, 4.0, 8.0)

    def __init__(self, c: float = 3.0, sparsity: Optional[int] = None, reps: int = CLIPPED_CHI2_REPS):
        if c <= 2:
            raise ValidationError(f"limiar suave exige C > 2, recebido C={c}")
        self.c = float(c)
        self.sparsity = sparsity
        self.reps = int(reps)

    def threshold(self, n: int) -> float:
        return float(np.sqrt(self.c * np.log(n) / n))

    def fit(self, rows):
        rows = np.asarray(rows, dtype=float)
        return soft_threshold(rows.mean(axis=0), self.threshold(rows.shape[0]))

    def draw(self, param, count, gen):
        param = np.asarray(param, dtype=float)
        return param + gen.standard_normal((count,) + param.shape)

    def _at(self, n: int, theta: float) -> float:
        return _clipped_sparse_chi2(int(n), self.c, float(theta), self.reps)

    def coordinate_guarantee(self, n):
        if n < 2:
            raise GuaranteeUnavailableError(f"limiar suave exige n >= 2, recebido {n}")
        tau = self.threshold(n)
        return max(self._at(n, k * tau) for k in self.theta_grid)

    def chi2_guarantees(self, n, d):
        worst = self.coordinate_guarantee(n)
        s = d if self.sparsity is None else min(int(self.sparsity), d)
        return np.concatenate([np.full(s, worst), np.full(d - s, self._at(n, 0.0))])

    def chi2_to_truth(self, param, truth):
        return float(np.expm1(np.sum((np.asarray(param) - np.asarray(truth)) ** 2)))

    def __repr__(self):
        return f"SoftThresholdSparse(c={self.c}, sparsity={self.sparsity})"


class TopElementPlugin(Learner):
    """P̂ = (1, 0, ..., 0): toda a massa no símbolo 0; χ²(P̂, P) = 1/t - 1 para toda P"""
    name = "top_element_plugin"
    formula_id = "top_element_1_t"
    kinds = frozenset({FamilyKind.TOP_ELEMENT_DISCRETE})

    def __init__(self, t: float):
        if not 0 < t <= 1:
            raise ValidationError(f"massa do símbolo 0 deve estar em (0, 1], recebido {t}")
        self.t = float(t)

    def fit(self, rows):
        return 0

    def draw(self, param, count, gen):
        return np.zeros(count, dtype=np.int64)

    def chi2_guarantee(self, n, d=1):
        return 1.0 / self.t - 1.0

    def chi2_to_truth(self, param, truth):
        return 1.0 / float(np.asarray(truth)[0]) - 1.0

    def __repr__(self):
        return f"TopElementPlugin(t={self.t})"


LEARNERS = {
    "empirical_discrete": EmpiricalDiscrete,
    "gaussian_mean_plugin": GaussianMeanPlugin,
    "uniform_mle": UniformMLE,
    "exponential_rate_plugin": ExponentialRatePlugin,
    "poisson_rate_plugin": PoissonRatePlugin,
    "soft_threshold_sparse": SoftThresholdSparse,
    "top_element_plugin": TopElementPlugin,
}


def default_learner(family: FamilySpec) -> Learner:
    """Estimador usado pela CLI para cada família"""
    kind = family.kind
    if kind == FamilyKind.DISCRETE:
        return EmpiricalDiscrete(family.dim)
    if kind == FamilyKind.TOP_ELEMENT_DISCRETE:
        return TopElementPlugin(family.top_mass)
    if kind == FamilyKind.GAUSSIAN_MEAN:
        return GaussianMeanPlugin()
    if kind == FamilyKind.SPARSE_GAUSSIAN:
        return SoftThresholdSparse(sparsity=family.sparsity)
    if kind == FamilyKind.UNIFORM_RECT:
        return UniformMLE()
    if kind == FamilyKind.PRODUCT_EXPONENTIAL:
        return ExponentialRatePlugin()
    if kind in (FamilyKind.PRODUCT_POISSON, FamilyKind.POISSONIZED_DISCRETE):
        return PoissonRatePlugin()
    raise UnsupportedFamilyError(f"sem estimador registrado para {kind.value}")


# =============================================================================
# LIMITES
# =============================================================================

def shuffle_chi2_bound(chi2: float, n: int, m: int) -> float:
    """
    χ² da mistura embaralhada contra P^{⊗(n+m)}: (1 + m·χ²/(n+m))^m - 1

    Args:
        chi2: χ²(P̂, P) do estimador
        n: amostras reais no conjunto embaralhado
        m: amostras falsas
    """
    if chi2 < 0:
        raise DomainError(f"χ² negativo: {chi2}")
    if m == 0 or chi2 == 0:
        return 0.0
    with np.errstate(over="ignore"):
        return float(np.expm1(m * np.log1p(m * chi2 / (n + m))))


def _no_guarantee_report(formula_id: str, reason: str) -> BoundReport:
    return BoundReport(1.0, formula_id, 1.0, {"garantia de χ² disponível": False}, reason)


def shuffle_general_bound(learner: Learner, n: int, m: int, d: int = 1) -> BoundReport:
    """min(1, √(m²/n · r)) com r a garantia do estimador em n/2 amostras"""
    formula_id = f"shuffle_general[{learner.formula_id}]"
    try:
        guarantee = learner.chi2_guarantee(n // 2, d)
    except GuaranteeUnavailableError as e:
        return _no_guarantee_report(formula_id, str(e))
    return tv_bound_report(
        amplification_bound_general(n, m, guarantee),
        formula_id,
        {"n par": n % 2 == 0, "garantia de χ² disponível": True},
        "embaralhamento geral: TV <= √(m²/n · r(n/2))",
        estimated=learner.estimated,
    )


def shuffle_product_bound(learners: Sequence[Learner], n: int, m: int) -> BoundReport:
    """min(1, √(m²/n · Σ_j r_j)) com r_j as garantias por coordenada em n/2"""
    learners = list(learners)
    d = len(learners)
    formula_id = f"shuffle_product[{learners[0].formula_id}]" if d else "shuffle_product"
    try:
        if len({id(learner) for learner in learners}) == 1:
            guarantees = learners[0].chi2_guarantees(n // 2, d)
        else:
            guarantees = np.array([learner.coordinate_guarantee(n // 2) for learner in learners])
    except GuaranteeUnavailableError as e:
        return _no_guarantee_report(formula_id, str(e))
    return tv_bound_report(
        amplification_bound_product(n, m, guarantees),
        formula_id,
        {"n par": n % 2 == 0, "garantia de χ² disponível": True},
        "embaralhamento por coordenada: TV <= √(m²/n · Σ_j r_j(n/2))",
        estimated=any(learner.estimated for learner in learners),
    )


# =============================================================================
# AMPLIFICADORES
# =============================================================================

PRODUCT_SHUFFLE_KINDS = {
    FamilyKind.GAUSSIAN_MEAN,
    FamilyKind.SPARSE_GAUSSIAN,
    FamilyKind.PRODUCT_EXPONENTIAL,
    FamilyKind.UNIFORM_RECT,
    FamilyKind.PRODUCT_POISSON,
    FamilyKind.POISSONIZED_DISCRETE,
}


def _split_halves(data: Dataset) -> Tuple[np.ndarray, np.ndarray]:
    n = data.n
    if n % 2:
        raise RequiresEvenNError(f"divisão em metades exige n par, recebido {n}")
    if n < 2:
        raise InsufficientSamplesError(f"n >= 2 exigido, recebido {n}")
    half = n // 2
    return data.samples[:half], data.samples[half:]


def shuffle_amplify_general(data: Dataset, learner: Learner, m: int, rng: RngLike) -> AmplifierOutput:
    """
    Embaralhamento de linhas inteiras

    Args:
        data: n amostras (n par)
        learner: estimador compatível com a família
        m: amostras falsas
        rng: aleatoriedade (substream 0 para as falsas, 1 para a permutação)

    Returns:
        primeira metade intacta + permutação uniforme de (segunda metade, falsas)
    """
    if data.family.kind not in learner.kinds:
        raise ValidationError(f"estimador {learner.name} não serve para {data.family.kind.value}")
    if m < 0:
        raise ValidationError(f"m >= 0 exigido, recebido {m}")
    first, second = _split_halves(data)
    draw_gen, perm_gen = spawn_generators(rng, 2)

    param = learner.fit(first)
    fakes = learner.draw(param, m, draw_gen)
    pool = np.concatenate([second, np.asarray(fakes, dtype=second.dtype)], axis=0)
    permutation = perm_gen.permutation(pool.shape[0])
    samples = np.concatenate([first, pool[permutation]], axis=0)
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="shuffle_general",
        bound=shuffle_general_bound(learner, data.n, m, data.family.dim),
        metadata={
            "learner": repr(learner),
            "plugin": param,
            "fake_positions": first.shape[0] + np.flatnonzero(permutation >= second.shape[0]),
        },
    )


def shuffle_amplify_product(
    data: Dataset, learners: Union[Learner, Sequence[Learner]], m: int, rng: RngLike
) -> AmplifierOutput:
    """
    Embaralhamento coordenada a coordenada

    Cada coluna j tem seu estimador, suas falsas e sua permutação, todos
    sorteados da substream j.
    """
    family = data.family
    d = family.columns
    if family.kind not in PRODUCT_SHUFFLE_KINDS:
        raise UnsupportedFamilyError(f"embaralhamento por coordenada exige família produto, recebido {family.kind.value}")
    if isinstance(learners, Learner):
        learners = [learners] * d
    learners = list(learners)
    if len(learners) != d:
        raise ValidationError(f"{len(learners)} estimadores para {d} coordenadas")
    for learner in learners:
        if family.kind not in learner.kinds:
            raise ValidationError(f"estimador {learner.name} não serve para {family.kind.value}")
    if m < 0:
        raise ValidationError(f"m >= 0 exigido, recebido m={m}")
    first, second = _split_halves(data)

    columns = []
    params = []
    for j, gen in enumerate(spawn_generators(rng, d)):
        param = learners[j].fit(first[:, j])
        fakes = np.asarray(learners[j].draw(param, m, gen), dtype=float).reshape(m)
        pool = np.concatenate([second[:, j], fakes])
        columns.append(pool[gen.permutation(pool.size)])
        params.append(param)
    block = np.column_stack(columns) if columns else np.zeros((second.shape[0] + m, 0))
    samples = np.vstack([first, block])
    return AmplifierOutput(
        samples=samples,
        family=family,
        method="shuffle_product",
        bound=shuffle_product_bound(learners, data.n, m),
        metadata={"learner": repr(learners[0]), "plugin": params},
    )


SHUFFLE_METHODS = ("shuffle_general", "shuffle_product")


def shuffle_amplify(method: str, data: Dataset, m: int, rng: RngLike, learner: Optional[Learner] = None) -> AmplifierOutput:
    learner = learner or default_learner(data.family)
    if method == "shuffle_general":
        return shuffle_amplify_general(data, learner, m, rng)
    if method == "shuffle_product":
        return shuffle_amplify_product(data, learner, m, rng)
    raise ValidationError(f"método de embaralhamento desconhecido: {method!r}")


def shuffle_bound_for(method: str, family: FamilySpec, n: int, m: int, learner: Optional[Learner] = None) -> BoundReport:
    """Limite do embaralhamento sem executar"""
    learner = learner or default_learner(family)
    if method == "shuffle_general":
        if family.kind not in learner.kinds:
            raise ValidationError(f"estimador {learner.name} não serve para {family.kind.value}")
        return shuffle_general_bound(learner, n, m, family.dim)
    if method == "shuffle_product":
        if family.kind not in PRODUCT_SHUFFLE_KINDS:
            raise ValidationError(f"shuffle_product exige família produto, recebido {family.kind.value}")
        return shuffle_product_bound([learner] * family.columns, n, m)
    raise ValidationError(f"método de embaralhamento desconhecido: {method!r}")


# =============================================================================
# LINHAS DE BASE INGÊNUAS
# =============================================================================

def copy_append(data: Dataset, m: int, rng: RngLike) -> AmplifierOutput:
    """Acrescenta m cópias exatas de linhas observadas"""
    gen = as_generator(rng)
    rows = gen.integers(0, data.n, size=m)
    samples = np.concatenate([data.samples, data.samples[rows]], axis=0)
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="copy_append",
        bound=_no_guarantee_report("copy_append", "linha de base sem garantia"),
        metadata={"copied_rows": rows},
    )


def plain_append(data: Dataset, learner: Learner, m: int, rng: RngLike) -> AmplifierOutput:
    """Estimador treinado na primeira metade; m falsas coladas no fim, sem embaralhar"""
    first, _ = _split_halves(data)
    param = learner.fit(first)
    fakes = learner.draw(param, m, as_generator(rng))
    samples = np.concatenate([data.samples, np.asarray(fakes, dtype=data.samples.dtype)], axis=0)
    return AmplifierOutput(
        samples=samples,
        family=data.family,
        method="plain_append",
        bound=_no_guarantee_report("plain_append", "linha de base sem garantia"),
        metadata={"plugin": param},
    )


def uniform_fake_append(samples: np.ndarray, support: int, m: int, gen: np.random.Generator) -> np.ndarray:
    """Acrescenta m símbolos uniformes em {1, ..., support}"""
    fakes = gen.integers(1, support + 1, size=m)
    return np.concatenate([np.asarray(samples, dtype=np.int64).reshape(-1), fakes])


# =============================================================================
# VERIFICAÇÃO EXAUSTIVA
# =============================================================================

def mixture_chi2_exhaustive(first_half: Sequence[int], probs: Sequence[float], m: int) -> Tuple[float, float]:
    """
    χ² exato da mistura embaralhada para um modelo discreto pequeno

    Enumera todas as sequências de tamanho n/2+m em k símbolos. A mistura
    escolhe m posições uniformes para as falsas (lei P̂, a empírica da
    primeira metade) e as demais seguem P.

    Args:
        first_half: símbolos em {1, ..., k} usados para treinar P̂
        probs: P verdadeira (suporte completo)
        m: amostras falsas

    Returns:
        (χ²(P_mix, P^{⊗(n/2+m)}), χ²(P̂, P))
    """
    probs = np.asarray(probs, dtype=float)
    if np.any(probs <= 0):
        raise DomainError("enumeração exige P com suporte completo")
    k = probs.size
    first_half = np.asarray(first_half, dtype=np.int64)
    real = first_half.size
    length = real + m
    if k ** length > 2 ** 20:
        raise ValidationError(f"enumeração grande demais: {k}^{length} sequências")
    plugin = EmpiricalDiscrete(k).fit(first_half)
    plugin_chi2 = float(np.sum((plugin - probs) ** 2 / probs))

    # Todas as sequências (k^L × L) e todas as escolhas de posições falsas
    grids = np.stack(np.meshgrid(*[np.arange(k)] * length, indexing="ij"), axis=-1).reshape(-1, length)
    truth = np.prod(probs[grids], axis=1)
    fake_sets = np.array(list(_subsets(length, m)), dtype=bool).reshape(-1, length)
    per_set = np.where(fake_sets[:, np.newaxis, :], plugin[grids][np.newaxis], probs[grids][np.newaxis]).prod(axis=2)
    mixture = per_set.mean(axis=0)
    return float(np.sum(mixture ** 2 / truth) - 1.0), plugin_chi2


def _subsets(length: int, size: int):
    for combo in np.ndindex(*([2] * length)):
        if sum(combo) == size:
            yield combo


def hypergeometric_mixture_chi2(chi2: float, n: int, m: int) -> float:
    """
    Valor exato do χ² da mistura: E[(1 + χ²)^H] - 1

    H é a sobreposição entre dois conjuntos independentes de m posições
    falsas entre n+m (lei hipergeométrica).
    """
    if m == 0:
        return 0.0
    overlaps = np.arange(m + 1)
    weights = stats.hypergeom.pmf(overlaps, n + m, m, m)
    return float(np.sum(weights * (1.0 + chi2) ** overlaps) - 1.0)
