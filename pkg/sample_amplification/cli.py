#!/usr/bin/env python3
"""
Executor de experimentos de amplificação de amostras

Uso:
    # Amplificar 100 amostras gaussianas em 110
    sample-amp amplify --family GaussianMean --dim 4 --n 100 --m 10 --method gaussian_mean --output saida.csv

    # Maior m com erro exato <= 0.1
    sample-amp mstar --family GaussianMean --dim 100 --n 100 --eps 0.1 --method gaussian_mean_exact

    # Limites teóricos de vários métodos
    sample-amp bound --family Discrete --dim 50 --n 2000 --m 20 --method shuffle_general

    # Bateria de detectores contra um amplificador ou linha de base
    sample-amp verify --family GaussianMean --dim 64 --n 64 --m 16 --method plain_append --reps 2000

    # Grade completa a partir de um arquivo de experimento
    sample-amp experiment --config docs/experimentos/gaussiana.cfg

    # Certificado de limite inferior para coordenadas gaussianas
    sample-amp certify --family gaussian --dim 100 --n 50 --c 1 --reps 100000

Códigos de saída: 0 ok, 1 erro de validação, 2 amplificação provadamente impossível.
CSV vai para --output (ou stdout); o progresso vai para stderr.
"""

import argparse
import math
import sys
import time
import traceback
from typing import Callable, Dict, List, Optional

import pandas as pd
from joblib import Parallel, delayed

from . import amplify_shuffle, amplify_sufficiency, divergences, lower_bounds, verify
from .config import (
    CALIBRATION_REPS,
    DEFAULT_LEVEL,
    DEFAULT_SEED,
    MSTAR_CEILING,
    N_JOBS,
    ExperimentConfig,
    load_experiment_config,
)
from .errors import (
    AmplificationImpossibleError,
    InconclusiveCertificateError,
    SampleAmplificationError,
    ValidationError,
)
from .families import (
    COMPONENTS,
    FamilyKind,
    FamilySpec,
    dataset_to_frame,
    default_param,
    read_dataset_csv,
    sample,
    write_dataset_csv,
)
from .numerics import RngState


# =============================================================================
# CONFIGURAÇÕES
# =============================================================================
REPORT_COLUMNS = ["family", "d", "n", "m", "method", "value_kind", "value", "stderr", "formula_id", "seed", "error"]
VERIFY_COLUMNS = ["test", "family", "d", "n", "m", "method", "level", "rejection", "tv_lower", "stderr", "seed"]

EXACT_METHOD = "gaussian_mean_exact"
BASELINES = ("copy_append", "plain_append")

# Subsequências do RngState de cada comando
PARAM_STREAM = 0
DATA_STREAM = 1
AMPLIFIER_STREAM = 2
VERIFY_STREAM = 3


def log(message: str = ""):
    """Progresso e resumos vão para stderr (o CSV pode estar no stdout)"""
    print(message, file=sys.stderr)


def banner(title: str):
    log("=" * 80)
    log(title)
    log("=" * 80)


# =============================================================================
# FAMÍLIAS E MÉTODOS
# =============================================================================

def build_family(name: str, dim: int, sparsity=None, top_mass=None, rank=None) -> FamilySpec:
    try:
        kind = FamilyKind(name)
    except ValueError:
        raise ValidationError(f"família desconhecida: {name!r}; opções: {[k.value for k in FamilyKind]}")
    return FamilySpec(
        kind=kind,
        dim=int(dim),
        sparsity=int(sparsity) if sparsity is not None else None,
        top_mass=float(top_mass) if top_mass is not None else None,
        rank=int(rank) if rank is not None else None,
    )


def validate_method(method: str, kind: FamilyKind):
    """Rejeita combinação método/família antes de qualquer cálculo"""
    if method == EXACT_METHOD:
        if kind != FamilyKind.GAUSSIAN_MEAN:
            raise ValidationError(f"{EXACT_METHOD} exige GaussianMean, recebido {kind.value}")
        return
    if method in amplify_sufficiency.METHODS:
        expected = amplify_sufficiency.METHODS[method].kind
        if expected != kind:
            raise ValidationError(f"método {method!r} exige família {expected.value}, recebido {kind.value}")
        return
    if method == "shuffle_product" and kind not in amplify_shuffle.PRODUCT_SHUFFLE_KINDS:
        raise ValidationError(f"shuffle_product exige família produto, recebido {kind.value}")
    if method in amplify_shuffle.SHUFFLE_METHODS + BASELINES:
        return
    raise ValidationError(f"método desconhecido: {method!r}")


def error_function(method: str, family: FamilySpec) -> Callable[[int, int], divergences.BoundReport]:
    """Erro (limite ou TV exata) do método como função de (n, m)"""
    validate_method(method, family.kind)
    if method == EXACT_METHOD:
        return lambda n, m: divergences.gaussian_exact_error(n, m, family.dim)
    if method in amplify_sufficiency.METHODS:
        return lambda n, m: amplify_sufficiency.bound_for(method, family, n, m)
    if method in amplify_shuffle.SHUFFLE_METHODS:
        return lambda n, m: amplify_shuffle.shuffle_bound_for(method, family, n, m)
    raise ValidationError(f"método {method!r} não tem erro computável")


def value_kind(method: str) -> str:
    return "exact" if method == EXACT_METHOD else "bound"


def report_row(family: FamilySpec, n: int, m: int, method: str, kind: str, value, stderr, formula_id: str, seed, error: str = "") -> Dict:
    return {
        "family": family.kind.value if isinstance(family, FamilySpec) else family,
        "d": family.dim if isinstance(family, FamilySpec) else None,
        "n": n,
        "m": m,
        "method": method,
        "value_kind": kind,
        "value": value,
        "stderr": stderr,
        "formula_id": formula_id,
        "seed": seed,
        "error": error,
    }


def write_rows(rows: List[Dict], columns: List[str], output: Optional[str]):
    frame = pd.DataFrame(rows, columns=columns)
    if output in (None, "-"):
        sys.stdout.write(frame.to_csv(index=False, lineterminator="\n"))
    else:
        frame.to_csv(output, index=False, lineterminator="\n", encoding="utf-8")


# =============================================================================
# BUSCA DE m* E n*
# =============================================================================

def mstar(error: Callable[[int, int], divergences.BoundReport], n: int, eps: float, ceiling: int = MSTAR_CEILING) -> int:
    """
    Maior m em [0, ceiling] com erro(n, m) <= eps, por bisseção

    Args:
        error: erro monótono não decrescente em m
        n: amostras de entrada
        eps: tolerância em TV
        ceiling: teto da busca
    """
    if not 0 <= eps <= 1:
        raise ValidationError(f"eps deve estar em [0, 1], recebido {eps}")
    if error(n, ceiling).value <= eps:
        return ceiling
    low, high = 0, ceiling
    while high - low > 1:
        middle = (low + high) // 2
        if error(n, middle).value <= eps:
            low = middle
        else:
            high = middle
    return low


def nstar(error: Callable[[int, int], divergences.BoundReport], eps: float, n_min: int = 2, ceiling: int = MSTAR_CEILING) -> int:
    """Menor n com m*(n) >= 1, isto é, erro(n, 1) <= eps"""
    def admissible(n: int) -> bool:
        try:
            return error(n, 1).value <= eps
        except SampleAmplificationError:
            return False

    high = n_min
    while not admissible(high):
        if high >= ceiling:
            raise ValidationError(f"n* acima do teto de busca {ceiling}")
        high = min(ceiling, 2 * high)
    low = max(n_min - 1, high // 2)
    while high - low > 1:
        middle = (low + high) // 2
        if admissible(middle):
            high = middle
        else:
            low = middle
    return high


# =============================================================================
# COMANDOS
# =============================================================================

def family_from_args(args) -> FamilySpec:
    return build_family(args.family, args.dim, args.sparsity, args.top_mass, args.rank)


def cmd_amplify(args) -> int:
    family = family_from_args(args)
    method = args.method
    validate_method(method, family.kind)
    if method == EXACT_METHOD:
        raise ValidationError(f"{EXACT_METHOD} não é um amplificador")
    base = RngState(args.seed)
    param = default_param(family, base.substream(PARAM_STREAM))

    if args.input:
        log(f"📊 Lendo {args.input}")
        data = read_dataset_csv(args.input, family)
    else:
        if args.n is None:
            raise ValidationError("--n é obrigatório sem --input")
        log(f"📊 Gerando {args.n} amostras de {family.describe()}")
        data = sample(family, param, args.n, base.substream(DATA_STREAM))

    rng = base.substream(AMPLIFIER_STREAM)
    if method in amplify_sufficiency.METHODS:
        output = amplify_sufficiency.amplify(method, data, args.m, rng, param)
    elif method in amplify_shuffle.SHUFFLE_METHODS:
        output = amplify_shuffle.shuffle_amplify(method, data, args.m, rng)
    elif method == "copy_append":
        output = amplify_shuffle.copy_append(data, args.m, rng)
    else:
        output = amplify_shuffle.plain_append(data, amplify_shuffle.default_learner(family), args.m, rng)

    amplified = output.dataset(seed=rng.label())
    if args.output in (None, "-"):
        sys.stdout.write(dataset_to_frame(amplified).to_csv(index=False, float_format="%.17g", lineterminator="\n"))
    else:
        write_dataset_csv(amplified, args.output)
    row = report_row(
        family, data.n, args.m, method, value_kind(method), output.bound.value, None, output.bound.formula_id, args.seed
    )
    if args.output not in (None, "-"):
        sidecar = f"{args.output.rsplit('.', 1)[0]}.report.csv"
        write_rows([row], REPORT_COLUMNS, sidecar)
        log(f"✅ {amplified.n} amostras em {args.output} (relatório: {sidecar})")
    else:
        log(f"✅ {amplified.n} amostras; limite {output.bound.value:.6g} ({output.bound.formula_id})")
    return 0


def cmd_mstar(args) -> int:
    family = family_from_args(args)
    error = error_function(args.method, family)
    ceiling = args.ceiling
    rows = []
    if args.nstar:
        n_found = nstar(error, args.eps, ceiling=ceiling)
        log(f"📊 n* = {n_found} para ε = {args.eps}")
        rows.append(report_row(family, n_found, 1, f"nstar[{args.method}]", "exact", n_found, None, error(n_found, 1).formula_id, args.seed))
    else:
        if args.n is None:
            raise ValidationError("--n é obrigatório (ou use --nstar)")
        m_found = mstar(error, args.n, args.eps, ceiling)
        log(f"📊 m* = {m_found} para n = {args.n}, ε = {args.eps}")
        rows.append(report_row(family, args.n, m_found, f"mstar[{args.method}]", "exact", m_found, None, error(args.n, max(m_found, 1)).formula_id, args.seed))
    write_rows(rows, REPORT_COLUMNS, args.output)
    return 0


def cmd_bound(args) -> int:
    family = family_from_args(args)
    for method in args.method_list:
        validate_method(method, family.kind)
    rows = []
    for method in args.method_list:
        report = error_function(method, family)(args.n, args.m)
        status = "✅" if report.valid else "⚠️"
        log(f"{status} {method}: {report.value:.6g} ({report.formula_id})")
        rows.append(report_row(family, args.n, args.m, method, value_kind(method), report.value, None, report.formula_id, args.seed))
    write_rows(rows, REPORT_COLUMNS, args.output)
    return 0


def candidate_trial(method: str, family: FamilySpec, param, n: int, m: int) -> verify.Trial:
    validate_method(method, family.kind)
    if method in amplify_sufficiency.METHODS:
        return verify.sufficiency_trial(method, family, param, n, m)
    if method in amplify_shuffle.SHUFFLE_METHODS:
        return verify.shuffle_trial(method, family, param, n, m)
    if method == "copy_append":
        return verify.copy_append_trial(family, param, n, m)
    if method == "plain_append":
        return verify.plain_append_trial(family, param, n, m)
    raise ValidationError(f"{method!r} não gera amostras")


def cmd_verify(args) -> int:
    family = family_from_args(args)
    base = RngState(args.seed)
    param = default_param(family, base.substream(PARAM_STREAM))
    ctx = verify.TrialContext.for_family(family, args.n, args.m)
    candidate = candidate_trial(args.method, family, param, args.n, args.m)
    genuine = verify.genuine_trial(family, param, args.n + args.m)
    log(f"📊 Bateria de detectores: {args.method} em {family.describe()}, {args.reps} réplicas")
    reports = verify.detector_battery(
        candidate, genuine, ctx, args.level, args.reps, base.substream(VERIFY_STREAM), args.calibration_reps
    )
    rows = []
    for report in reports:
        log(f"   {report.test}: rejeição {report.rejection:.4f} ± {report.stderr:.4f} (genuíno {report.genuine_rejection:.4f})")
        rows.append({
            "test": report.test,
            "family": family.kind.value,
            "d": family.dim,
            "n": args.n,
            "m": args.m,
            "method": args.method,
            "level": report.level,
            "rejection": report.rejection,
            "tv_lower": report.tv_lower_estimate,
            "stderr": report.stderr,
            "seed": report.seed,
        })
    write_rows(rows, VERIFY_COLUMNS, args.output)
    return 0


def cmd_certify(args) -> int:
    d = args.dim
    n = args.n
    m = args.m if args.m is not None else max(1, math.ceil(args.c * n / math.sqrt(d)))
    base = RngState(args.seed)
    rows = []

    if args.kind == "product":
        if args.family not in COMPONENTS:
            raise ValidationError(f"certify product exige família unidimensional: {sorted(COMPONENTS)}")
        log(f"📊 Certificado produto: {args.family}, d={d}, n={n}, m={m}, {args.reps} réplicas")
        try:
            certificate = lower_bounds.product_lower_certificate(args.family, n, m, d, args.reps, base)
            block, gap, error = certificate.to_block(), certificate.bayes_risk_gap, ""
            log(f"✅ lacuna de risco {gap:.6g}")
        except InconclusiveCertificateError as e:
            gap, error = 0.0, f"inconclusivo: {e}"
            block = e.certificate.to_block() if e.certificate is not None else "inconclusive"
            log(f"⚠️  {error}")
        rows.append({**report_row(args.family, n, m, "product_certificate", "certificate_gap", gap, None, "voting_product_certificate", args.seed, error), "d": d})
        log(block)
    elif args.kind == "sparse":
        log(f"📊 Limite esparso: s={args.sparsity}, d={d}, n={n}, m={m}")
        gap = lower_bounds.sparse_amplification_floor(args.sparsity, d, n, m, args.reps, base)
        rows.append({**report_row("SparseGaussian", n, m, "sparse_floor", "certificate_gap", gap, None, "sparse_block_binomial", args.seed), "d": d})
        log(f"✅ lacuna {gap:.6g}")
    else:
        report = lower_bounds.covariance_lower_gap(n, d, m)
        status = "✅" if report.conclusive else "⚠️"
        log(f"{status} lacuna de g {report.g_gap:.6g} contra folga {report.slack:.6g}")
        rows.append({**report_row("GaussianCov", n, m, "stein_gap", "certificate_gap", report.g_gap, None, "stein_g_gap", args.seed, "" if report.conclusive else "inconclusivo: lacuna abaixo da folga"), "d": d})
    write_rows(rows, REPORT_COLUMNS, args.output)
    return 0


# =============================================================================
# EXPERIMENTO EM GRADE
# =============================================================================

def validate_config(config: ExperimentConfig) -> FamilyKind:
    try:
        kind = FamilyKind(config.family)
    except ValueError:
        raise ValidationError(f"família desconhecida no experimento: {config.family!r}")
    for method in config.methods:
        validate_method(method, kind)
    return kind


def run_cell(config: ExperimentConfig, cell: Dict, stream: int) -> Dict:
    """
    Uma célula da grade; nunca levanta exceção

    Returns:
        {'status': 'success' | 'error', 'error': str, 'rows': [...]}
    """
    method, d, n, m = cell["method"], cell["d"], cell["n"], cell["m"]
    rng = RngState(config.seed, stream=stream)
    try:
        family = build_family(config.family, d, **config.extras)
        report = error_function(method, family)(n, m)
        rows = [report_row(family, n, m, method, value_kind(method), report.value, None, report.formula_id, rng.label())]
        if config.reps > 0 and method in amplify_sufficiency.METHODS:
            param = default_param(family, rng.substream(PARAM_STREAM))
            try:
                estimate, stderr = verify.tv_mc_suffstat(family, param, n, m, method, config.reps, rng.substream(VERIFY_STREAM))
                rows.append(report_row(family, n, m, method, "mc_estimate", estimate, stderr, "suffstat_density_ratio_mc", rng.label()))
            except SampleAmplificationError as e:
                rows.append(report_row(family, n, m, method, "mc_estimate", None, None, "suffstat_density_ratio_mc", rng.label(), str(e)))
        return {"status": "success", "error": "", "rows": rows, "cell": cell}
    except SampleAmplificationError as e:
        row = report_row(config.family, n, m, method, value_kind(method), None, None, "", rng.label(), str(e))
        row["d"] = d
        return {"status": "error", "error": str(e), "rows": [row], "cell": cell, "structural": False}
    except Exception as e:
        row = report_row(config.family, n, m, method, value_kind(method), None, None, "", rng.label(), repr(e))
        row["d"] = d
        return {"status": "error", "error": repr(e), "rows": [row], "cell": cell, "structural": True}


def print_summary(results: List[Dict]):
    """Imprime resumo dos resultados"""
    log()
    banner("RESUMO")
    success_count = 0
    error_count = 0
    total_rows = 0
    for result in results:
        cell = result["cell"]
        label = f"{cell['method']} d={cell['d']} n={cell['n']} m={cell['m']}"
        total_rows += len(result["rows"])
        if result["status"] == "success":
            success_count += 1
        else:
            error_count += 1
            log(f"❌ {label}")
            log(f"   Erro: {result['error'][:200]}")
    log()
    log(f"Total de células: {len(results)}")
    log(f"✅ Sucesso: {success_count}")
    log(f"❌ Erros: {error_count}")
    log(f"📊 Total de linhas: {total_rows:,}")
    log()


def cmd_experiment(args) -> int:
    config = load_experiment_config(args.config)
    if args.seed is not None:
        config.seed = args.seed
    validate_config(config)
    cells = config.cells()
    output = args.output or config.output

    banner("EXPERIMENTO")
    log(f"Família: {config.family}")
    log(f"Métodos: {', '.join(config.methods) or '(nenhum)'}")
    log(f"Células: {len(cells)} | réplicas: {config.reps} | semente: {config.seed}")
    log()

    results = Parallel(n_jobs=N_JOBS)(delayed(run_cell)(config, cell, index) for index, cell in enumerate(cells))
    rows = [row for result in results for row in result["rows"]]
    write_rows(rows, REPORT_COLUMNS, output)
    print_summary(results)
    return 1 if any(result.get("structural") for result in results) else 0


# =============================================================================
# MAIN
# =============================================================================

class ArgumentParser(argparse.ArgumentParser):
    """Erros de argumento viram código 1 (o 2 é reservado para impossibilidade)"""

    def error(self, message):
        raise ValidationError(message)


def _common(parser: argparse.ArgumentParser, method: bool = True):
    parser.add_argument("--family", type=str, required=True, help="família (ex: GaussianMean) ou lei 1-d para certify")
    parser.add_argument("--dim", type=int, required=True, help="dimensão d (tamanho do suporte em famílias discretas)")
    parser.add_argument("--n", type=int, help="amostras de entrada")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help=f"semente base (padrão: {DEFAULT_SEED})")
    parser.add_argument("--output", type=str, help="CSV de saída (padrão: stdout)")
    parser.add_argument("--sparsity", type=int, help="s para SparseGaussian e certify sparse")
    parser.add_argument("--top-mass", dest="top_mass", type=float, help="t para TopElementDiscrete")
    parser.add_argument("--rank", type=int, help="posto d para LowRankCov")
    if method:
        parser.add_argument("--method", type=str, required=True, help="método (ex: gaussian_mean, shuffle_general)")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="sample-amp", description="Amplificação de amostras: algoritmos, limites e verificação")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    p = sub.add_parser("amplify", help="amplifica um dataset")
    _common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--input", type=str, help="CSV de entrada (sem ele, gera dados do parâmetro padrão)")
    p.set_defaults(handler=cmd_amplify)

    p = sub.add_parser("mstar", help="maior m com erro <= eps")
    _common(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--ceiling", type=int, default=MSTAR_CEILING)
    p.add_argument("--nstar", action="store_true", help="busca o menor n com m* >= 1")
    p.set_defaults(handler=cmd_mstar)

    p = sub.add_parser("bound", help="limites teóricos sem executar")
    _common(p, method=False)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--method", dest="method_list", action="append", required=True, help="repetível")
    p.set_defaults(handler=cmd_bound)

    p = sub.add_parser("verify", help="bateria de detectores calibrados")
    _common(p)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--calibration-reps", dest="calibration_reps", type=int, default=CALIBRATION_REPS)
    p.add_argument("--level", type=float, default=DEFAULT_LEVEL)
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("experiment", help="grade a partir de arquivo de experimento")
    p.add_argument("--config", type=str, required=True)
    p.add_argument("--output", type=str)
    p.add_argument("--seed", type=int)
    p.set_defaults(handler=cmd_experiment)

    p = sub.add_parser("certify", help="limites inferiores computáveis")
    _common(p, method=False)
    p.add_argument("--kind", choices=["product", "sparse", "covariance"], default="product")
    p.add_argument("--m", type=int, help="padrão: ⌈c·n/√d⌉")
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--reps", type=int, default=100000)
    p.set_defaults(handler=cmd_certify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Função principal; devolve o código de saída"""
    start_time = time.time()
    try:
        args = build_parser().parse_args(argv)
        code = args.handler(args)
    except AmplificationImpossibleError as e:
        log(f"❌ Amplificação impossível: {e}")
        return 2
    except SampleAmplificationError as e:
        log(f"❌ Erro de validação: {e}")
        return 1
    except KeyboardInterrupt:
        log("\n\n⚠️  Processo interrompido pelo usuário")
        return 1
    except Exception as e:
        log(f"\n❌ Erro: {e}")
        traceback.print_exc()
        return 1
    elapsed_time = time.time() - start_time
    log(f"⏱️  Tempo total: {elapsed_time:.1f}s")
    return code


if __name__ == "__main__":
    sys.exit(main())
