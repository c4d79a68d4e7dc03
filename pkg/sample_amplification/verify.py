"""
Lado do verificador

Estimativa de TV sobre estatísticas suficientes, baterias de detectores
calibrados em dados genuínos, Monte Carlo do erro de χ² dos estimadores e
o teste de Kolmogorov–Smirnov das marginais. O verificador conhece P: os
detectores recebem o parâmetro verdadeiro de cada réplica.
"""

from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import special, stats

from .amplify_shuffle import (
    SHUFFLE_METHODS,
    Learner,
    copy_append,
    default_learner,
    plain_append,
    shuffle_amplify,
    uniform_fake_append,
)
from .amplify_sufficiency import METHODS, AmplifierOutput, amplify, check_method
from .config import CALIBRATION_REPS, DEFAULT_LEVEL, MIN_BATTERY_REPS
from .errors import (
    CalibrationBudgetError,
    DomainError,
    InsufficientSamplesError,
    UnsupportedFamilyError,
    ValidationError,
)
from .families import (
    CONTINUOUS_KINDS,
    SUFFSTAT_KINDS,
    SYMBOL_KINDS,
    ComponentFamily,
    Dataset,
    FamilyKind,
    FamilySpec,
    ParamPoint,
    component_family,
    draw,
    log_density_suffstat,
    sample_suffstat,
    suffstat_of_array,
    validate_param,
)
from .numerics import RngLike, RngState, as_generator, chunk_sizes, mean_and_stderr


# =============================================================================
# RELATÓRIO
# =============================================================================

@dataclass
class VerifierReport:
    """
    Resultado de um detector contra um candidato

    Args:
        test: nome do detector
        level: nível δ (rejeição alvo em dados genuínos)
        rejection: taxa de rejeição no candidato
        reps: réplicas avaliadas
        stderr: erro padrão da taxa de rejeição
        seed: rótulo da subsequência de avaliação
        genuine_rejection: taxa de rejeição em dados genuínos novos
        genuine_stderr: erro padrão correspondente
    """
    test: str
    level: float
    rejection: float
    reps: int
    stderr: float
    seed: str
    genuine_rejection: float = float("nan")
    genuine_stderr: float = float("nan")

    @property
    def tv_lower_estimate(self) -> float:
        return float(min(1.0, max(0.0, self.rejection - self.level)))

    def as_dict(self) -> Dict:
        row = asdict(self)
        row["tv_lower"] = self.tv_lower_estimate
        return row


# =============================================================================
# SUBSEQUÊNCIAS
# =============================================================================

class StreamLedger:
    """
    Controle das subsequências de cada fase da bateria

    Calibração, avaliação genuína, avaliação do candidato e desempate usam
    subsequências fixas e distintas; pedir a mesma fase duas vezes é erro.
    """
    PURPOSES = {"calibration": 1, "genuine": 2, "candidate": 3, "tie_break": 4}

    def __init__(self, rng: RngLike):
        self.rng = rng
        self.claimed: Dict[str, str] = {}
        if isinstance(rng, RngState):
            self._children = None
        else:
            self._children = as_generator(rng).spawn(max(self.PURPOSES.values()) + 1)

    def claim(self, purpose: str) -> np.random.Generator:
        if purpose not in self.PURPOSES:
            raise ValidationError(f"fase desconhecida: {purpose!r}; opções: {sorted(self.PURPOSES)}")
        if purpose in self.claimed:
            raise ValidationError(f"subsequência de {purpose!r} já usada")
        index = self.PURPOSES[purpose]
        if self._children is None:
            state = self.rng.substream(index)
            self.claimed[purpose] = state.label()
            return state.generator()
        self.claimed[purpose] = f"spawn:{index}"
        return self._children[index]

    def disjoint(self) -> bool:
        labels = list(self.claimed.values())
        return len(labels) == len(set(labels))


# =============================================================================
# ENSAIOS (GERADORES DE RÉPLICAS)
# =============================================================================

# Um ensaio recebe um gerador e devolve (amostras, parâmetro verdadeiro)
Trial = Callable[[np.random.Generator], Tuple[np.ndarray, ParamPoint]]
Runner = Callable[[Dataset, int, np.random.Generator], AmplifierOutput]


@dataclass(frozen=True)
class TrialContext:
    """O que o verificador sabe além das amostras: família, n e m"""
    kind: FamilyKind
    dim: int
    n: int
    m: int
    family: Optional[FamilySpec] = None

    @classmethod
    def for_family(cls, family: FamilySpec, n: int, m: int) -> "TrialContext":
        return cls(family.kind, family.dim, n, m, family)

    @property
    def total(self) -> int:
        return self.n + self.m


def genuine_trial(family: FamilySpec, param: ParamPoint, total: int) -> Trial:
    """`total` amostras i.i.d. de P"""
    validate_param(family, param)

    def trial(gen):
        return draw(family, param, total, gen), param

    return trial


def amplifier_trial(family: FamilySpec, param: ParamPoint, n: int, m: int, run: Runner) -> Trial:
    """n amostras genuínas passadas por um amplificador"""
    validate_param(family, param)

    def trial(gen):
        data = Dataset(samples=draw(family, param, n, gen), family=family)
        return np.asarray(run(data, m, gen).samples), param

    return trial


def sufficiency_trial(method: str, family: FamilySpec, param: ParamPoint, n: int, m: int) -> Trial:
    check_method(method, family)
    return amplifier_trial(family, param, n, m, lambda data, extra, gen: amplify(method, data, extra, gen, param))


def shuffle_trial(
    method: str, family: FamilySpec, param: ParamPoint, n: int, m: int, learner: Optional[Learner] = None
) -> Trial:
    learner = learner or default_learner(family)
    return amplifier_trial(
        family, param, n, m, lambda data, extra, gen: shuffle_amplify(method, data, extra, gen, learner)
    )


def copy_append_trial(family: FamilySpec, param: ParamPoint, n: int, m: int) -> Trial:
    return amplifier_trial(family, param, n, m, copy_append)


def plain_append_trial(family: FamilySpec, param: ParamPoint, n: int, m: int, learner: Optional[Learner] = None) -> Trial:
    learner = learner or default_learner(family)
    return amplifier_trial(family, param, n, m, lambda data, extra, gen: plain_append(data, learner, extra, gen))


@dataclass(frozen=True)
class TopElementPrior:
    """
    Priori sobre distribuições com massa t no símbolo 0

    O resto da massa fica uniforme num subconjunto aleatório de
    max(1, d // 100) símbolos de {1, ..., d}. Vale para t abaixo de
    1/(2√d), fora da faixa de FamilySpec.
    """
    dim: int
    top_mass: float

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"d >= 1 exigido, recebido {self.dim}")
        if not 0 < self.top_mass < 1:
            raise ValidationError(f"t deve estar em (0, 1), recebido {self.top_mass}")

    @property
    def support_size(self) -> int:
        return max(1, self.dim // 100)

    @property
    def n_hard(self) -> int:
        """Tamanho amostral do regime difícil: ⌊1/(100t)⌋ (ao menos 1)"""
        return max(1, int(np.floor(1.0 / (100.0 * self.top_mass))))

    def context(self, n: int, m: int) -> TrialContext:
        return TrialContext(FamilyKind.TOP_ELEMENT_DISCRETE, self.dim, n, m)

    def draw_param(self, gen: np.random.Generator) -> ParamPoint:
        support = gen.choice(self.dim, size=self.support_size, replace=False) + 1
        probs = np.zeros(self.dim + 1)
        probs[0] = self.top_mass
        probs[support] = (1.0 - self.top_mass) / self.support_size
        return ParamPoint(probs=probs)

    def draw_samples(self, param: ParamPoint, count: int, gen: np.random.Generator) -> np.ndarray:
        return gen.choice(self.dim + 1, size=count, p=param.probs)

    def genuine_trial(self, total: int) -> Trial:
        def trial(gen):
            param = self.draw_param(gen)
            return self.draw_samples(param, total, gen), param

        return trial

    def uniform_fake_trial(self, n: int, m: int) -> Trial:
        """n genuínas + m símbolos uniformes em {1, ..., d}"""
        def trial(gen):
            param = self.draw_param(gen)
            samples = self.draw_samples(param, n, gen)
            return uniform_fake_append(samples, self.dim, m, gen), param

        return trial


# =============================================================================
# DETECTORES
# =============================================================================

class Detector:
    """Escore maior = mais suspeito; a região de rejeição é {escore > q}"""
    name = "detector"

    def applies(self, ctx: TrialContext) -> bool:
        raise NotImplementedError

    def score(self, samples: np.ndarray, param: ParamPoint, ctx: TrialContext) -> float:
        raise NotImplementedError


def _symbol_counts(samples: np.ndarray, kind: FamilyKind, size: int) -> np.ndarray:
    offset = 0 if kind == FamilyKind.TOP_ELEMENT_DISCRETE else 1
    symbols = np.asarray(samples).reshape(-1).astype(np.int64) - offset
    return np.bincount(symbols, minlength=size)[:size]


class SuffstatRegion(Detector):
    """Região de maior densidade de T_{n+m}: escore = -log densidade"""
    name = "suffstat_region"

    def applies(self, ctx):
        if ctx.kind in SYMBOL_KINDS:
            return True
        if ctx.family is None or ctx.kind not in SUFFSTAT_KINDS or ctx.kind == FamilyKind.LOW_RANK_COV:
            return False
        if ctx.kind == FamilyKind.GAUSSIAN_COV:
            return ctx.total >= ctx.dim
        if ctx.kind == FamilyKind.GAUSSIAN_MEAN_COV:
            return ctx.total - 1 >= ctx.dim
        if ctx.kind == FamilyKind.UNIFORM_RECT:
            return ctx.total >= 2
        return True

    def score(self, samples, param, ctx):
        if ctx.kind in SYMBOL_KINDS:
            counts = _symbol_counts(samples, ctx.kind, param.probs.size)
            total = counts.sum()
            log_pmf = special.gammaln(total + 1) - special.gammaln(counts + 1).sum() + special.xlogy(counts, param.probs).sum()
            return float(-log_pmf)
        stat = suffstat_of_array(ctx.family, samples)
        return float(-log_density_suffstat(ctx.family, param, stat, ctx.total))


class DuplicateRows(Detector):
    """Linhas repetidas; em leis contínuas nunca acontecem"""
    name = "duplicate"

    def applies(self, ctx):
        return ctx.kind in CONTINUOUS_KINDS

    def score(self, samples, param, ctx):
        rows = np.atleast_2d(samples)
        return float(rows.shape[0] - np.unique(rows, axis=0).shape[0])


class BlockMeanGap(Detector):
    """
    Distância entre a média das ⌊n/2⌋ primeiras linhas e a das m últimas

    Falsas sorteadas de um estimador da primeira metade ficam perto demais
    dela, então distâncias pequenas são suspeitas: escore = -‖gap‖².
    """
    name = "block_mean"

    def applies(self, ctx):
        return ctx.kind not in SYMBOL_KINDS and ctx.n // 2 >= 1 and ctx.m >= 1

    def score(self, samples, param, ctx):
        rows = np.atleast_2d(np.asarray(samples, dtype=float))
        head = rows[: ctx.n // 2].mean(axis=0)
        tail = rows[-ctx.m:].mean(axis=0)
        return float(-np.sum((head - tail) ** 2))


class RangeBox(Detector):
    """
    Pontos fora do retângulo

    Fora do retângulo verdadeiro: escore infinito. Dentro dele, conta as
    linhas após a primeira metade que escapam da caixa (mín, máx) da
    primeira metade; poucas escapadas são suspeitas.
    """
    name = "range"

    def applies(self, ctx):
        return ctx.kind == FamilyKind.UNIFORM_RECT

    def score(self, samples, param, ctx):
        rows = np.atleast_2d(np.asarray(samples, dtype=float))
        if np.any(rows < param.lower) or np.any(rows > param.upper):
            return float("inf")
        half = ctx.n // 2
        if half == 0:
            return 0.0
        low, high = rows[:half].min(axis=0), rows[:half].max(axis=0)
        rest = rows[half:]
        outside = np.any((rest < low) | (rest > high), axis=1)
        return float(-outside.sum())


class NewSymbol(Detector):
    """Símbolos fora do suporte de P (o símbolo 0 sempre é permitido)"""
    name = "new_symbol"

    def applies(self, ctx):
        return ctx.kind in SYMBOL_KINDS

    def score(self, samples, param, ctx):
        counts = _symbol_counts(samples, ctx.kind, param.probs.size)
        unseen = param.probs <= 0
        if ctx.kind == FamilyKind.TOP_ELEMENT_DISCRETE:
            unseen[0] = False
        return float(counts[unseen].sum())


DETECTORS: Tuple[Detector, ...] = (SuffstatRegion(), DuplicateRows(), BlockMeanGap(), RangeBox(), NewSymbol())


# =============================================================================
# CALIBRAÇÃO E BATERIA
# =============================================================================

@dataclass(frozen=True)
class Threshold:
    """Rejeita se escore > q; em escore == q rejeita com probabilidade gamma"""
    q: float
    gamma: float


def calibrate(scores: np.ndarray, level: float) -> Threshold:
    """
    Quantil 1-δ com desempate aleatório

    Em escores discretos, gamma = (δ - P(escore > q)) / P(escore == q) faz a
    rejeição genuína bater δ exatamente na amostra de calibração.
    """
    scores = np.asarray(scores, dtype=float)
    if not np.isfinite(scores).any():
        return Threshold(float("inf"), 0.0)
    # q é sempre um escore observado: P(> q) <= δ <= P(>= q)
    q = float(np.quantile(scores, 1.0 - level, method="inverted_cdf"))
    above = float(np.mean(scores > q))
    tied = float(np.mean(scores == q))
    gamma = 0.0 if tied == 0 else float(np.clip((level - above) / tied, 0.0, 1.0))
    return Threshold(q, gamma)


def _scores(trial: Trial, detectors: Sequence[Detector], ctx: TrialContext, reps: int, gen) -> np.ndarray:
    out = np.empty((reps, len(detectors)))
    for i in range(reps):
        samples, param = trial(gen)
        for j, detector in enumerate(detectors):
            out[i, j] = detector.score(samples, param, ctx)
    return out


def _decisions(scores: np.ndarray, threshold: Threshold, coins: np.ndarray) -> np.ndarray:
    return (scores > threshold.q) | ((scores == threshold.q) & (coins < threshold.gamma))


def detector_battery(
    candidate: Trial,
    genuine: Trial,
    ctx: TrialContext,
    level: float = DEFAULT_LEVEL,
    reps: int = 1000,
    rng: RngLike = None,
    calibration_reps: int = CALIBRATION_REPS,
    detectors: Optional[Sequence[Detector]] = None,
) -> List[VerifierReport]:
    """
    Roda cada detector aplicável, calibrado no nível δ em dados genuínos

    Args:
        candidate: ensaio do amplificador (ou linha de base) sob teste
        genuine: ensaio com n+m amostras genuínas
        ctx: família, n e m
        level: δ
        reps: réplicas de avaliação (candidato e genuínas novas)
        rng: RngState (subsequências 1-4) ou Generator
        calibration_reps: réplicas genuínas para os quantis
        detectors: subconjunto de DETECTORS (padrão: todos os aplicáveis)

    Returns:
        um VerifierReport por detector

    Raises:
        CalibrationBudgetError: reps ou calibration_reps abaixo de 100
    """
    if min(reps, calibration_reps) < MIN_BATTERY_REPS:
        raise CalibrationBudgetError(
            f"bateria exige ao menos {MIN_BATTERY_REPS} réplicas, recebido reps={reps}, calibração={calibration_reps}"
        )
    if not 0 < level < 1:
        raise ValidationError(f"nível δ deve estar em (0, 1), recebido {level}")
    if rng is None:
        raise ValidationError("detector_battery exige rng")
    active = [d for d in (detectors or DETECTORS) if d.applies(ctx)]
    if not active:
        return []

    ledger = StreamLedger(rng)
    calibration = _scores(genuine, active, ctx, calibration_reps, ledger.claim("calibration"))
    thresholds = [calibrate(calibration[:, j], level) for j in range(len(active))]

    genuine_scores = _scores(genuine, active, ctx, reps, ledger.claim("genuine"))
    candidate_scores = _scores(candidate, active, ctx, reps, ledger.claim("candidate"))
    coins = ledger.claim("tie_break").random((2, reps, len(active)))
    seed = ledger.claimed["candidate"]

    reports = []
    for j, detector in enumerate(active):
        rejected = _decisions(candidate_scores[:, j], thresholds[j], coins[1, :, j])
        genuine_rejected = _decisions(genuine_scores[:, j], thresholds[j], coins[0, :, j])
        rate, se = mean_and_stderr(rejected.astype(float))
        genuine_rate, genuine_se = mean_and_stderr(genuine_rejected.astype(float))
        reports.append(VerifierReport(detector.name, level, rate, reps, se, seed, genuine_rate, genuine_se))
    return reports


# =============================================================================
# TV EXATA POR ESTATÍSTICA SUFICIENTE
# =============================================================================

_IDENTITY_MAP_METHODS = {name for name in METHODS if name not in ("poisson_hybrid", "lowrank_cov")}


def tv_mc_suffstat(
    family: FamilySpec,
    param: ParamPoint,
    n: int,
    m: int,
    amplifier: str,
    reps: int,
    rng: RngLike,
) -> Tuple[float, float]:
    """
    TV entre L(T_n) e L(T_{n+m}) por razão de densidades

    Para amplificadores de suficiência com mapa identidade esta TV é o erro
    exato do amplificador: E_{T~L(T_n)}[(1 - q(T)/p(T))_+].

    Returns:
        (estimativa, erro padrão)

    Raises:
        UnsupportedFamilyError: embaralhamento ou mapa diferente da identidade
    """
    if amplifier in SHUFFLE_METHODS or amplifier not in _IDENTITY_MAP_METHODS:
        raise UnsupportedFamilyError(f"tv_mc_suffstat só vale para suficiência com mapa identidade, recebido {amplifier!r}")
    check_method(amplifier, family)
    validate_param(family, param)
    if n < 1 or m < 0:
        raise DomainError(f"exige n >= 1 e m >= 0, recebido n={n}, m={m}")
    if reps < 2:
        raise ValidationError("tv_mc_suffstat exige reps >= 2")
    if m == 0:
        return 0.0, 0.0

    gen = as_generator(rng)
    total = 0.0
    total_sq = 0.0
    width = family.dim * family.dim if family.kind in (FamilyKind.GAUSSIAN_COV, FamilyKind.GAUSSIAN_MEAN_COV) else family.dim
    for size in chunk_sizes(reps, width):
        stats_n = sample_suffstat(family, param, n, size, gen)
        log_p = log_density_suffstat(family, param, stats_n, n)
        log_q = log_density_suffstat(family, param, stats_n, n + m)
        with np.errstate(invalid="ignore", over="ignore"):
            diff = np.nan_to_num(np.asarray(log_q - log_p, dtype=float), nan=-np.inf)
        values = -np.expm1(np.minimum(diff, 0.0))
        total += values.sum()
        total_sq += np.square(values).sum()
    mean = total / reps
    variance = max(0.0, (total_sq - reps * mean * mean) / (reps - 1))
    return float(min(1.0, max(0.0, mean))), float(np.sqrt(variance / reps))


# =============================================================================
# ERRO DE χ² DOS ESTIMADORES
# =============================================================================

def chi2_error_mc(
    learner: Learner,
    family_1d: Union[str, ComponentFamily],
    param: float,
    n: int,
    clip_at_n: bool,
    reps: int,
    rng: RngLike,
) -> Tuple[float, float]:
    """
    Monte Carlo de E[χ²(P̂_n, P)] (ou de E[χ² ∧ n]) numa coordenada

    Args:
        learner: estimador (GaussianMeanPlugin, UniformMLE, ...)
        family_1d: lei da coordenada; para 'uniform_scale' o parâmetro é b
            de U[0, b]
        param: θ verdadeiro
        n: amostras usadas no ajuste
        clip_at_n: trunca cada χ² em n
        reps: réplicas
        rng: aleatoriedade

    Returns:
        (estimativa, erro padrão); sem truncamento a média pode ser infinita
    """
    family = component_family(family_1d)
    family.check(param)
    if n < 1 or reps < 2:
        raise DomainError(f"exige n >= 1 e reps >= 2, recebido n={n}, reps={reps}")
    truth = (0.0, param) if family.name == "uniform_scale" else param

    gen = as_generator(rng)
    values = np.empty(reps)
    done = 0
    for size in chunk_sizes(reps, n):
        block = family.sample(gen, param, (size, n))
        for row in block:
            values[done] = learner.chi2_to_truth(learner.fit(row[:, np.newaxis]), truth)
            done += 1
    if clip_at_n:
        values = np.minimum(values, n)
    if not np.all(np.isfinite(values)):
        return float("inf"), float("nan")
    return mean_and_stderr(values)


# =============================================================================
# KOLMOGOROV–SMIRNOV
# =============================================================================

def ks_marginal_test(
    data: Union[Dataset, np.ndarray],
    family_1d: Union[str, ComponentFamily],
    param: float,
    level: float = DEFAULT_LEVEL,
) -> bool:
    """
    Teste KS das amostras contra a CDF exata de p_θ

    O limiar vem da lei assintótica de √n·D_n (Kolmogorov) no nível dado.

    Returns:
        True se passa (não rejeita)
    """
    if isinstance(data, Dataset):
        if data.family.columns != 1:
            raise ValidationError(f"teste KS exige dados unidimensionais, recebido {data.family.columns} colunas")
        values = data.samples.reshape(-1)
    else:
        values = np.asarray(data, dtype=float).reshape(-1)
    if values.size < 8:
        raise InsufficientSamplesError(f"teste KS exige n >= 8, recebido {values.size}")
    if not 0 < level < 1:
        raise ValidationError(f"nível deve estar em (0, 1), recebido {level}")
    family = component_family(family_1d)
    family.check(param)
    statistic = stats.kstest(values, lambda x: family.cdf(x, param)).statistic
    threshold = stats.kstwobign.ppf(1.0 - level) / np.sqrt(values.size)
    return bool(statistic <= threshold)
