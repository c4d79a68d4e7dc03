"""
Exceções do pacote de amplificação de amostras

Todas herdam de ValueError, então quem já trata ValueError continua
funcionando. Apenas AmplificationImpossibleError vira código de saída 2 na CLI.
"""


class SampleAmplificationError(ValueError):
    """Erro base do pacote"""


class DomainError(SampleAmplificationError):
    """Argumento fora do domínio da função (ex: x <= 0 em log_gamma)"""


class ValidationError(SampleAmplificationError):
    """Parâmetro ou configuração inválida; a mensagem cita o invariante violado"""


class NotPSDError(SampleAmplificationError):
    """Matriz com autovalor abaixo do piso negativo tolerado"""


class NoSufficientStatisticError(SampleAmplificationError):
    """Família sem estatística suficiente registrada"""


class InsufficientSamplesError(SampleAmplificationError):
    """Número de amostras abaixo do mínimo exigido"""


class RequiresEvenNError(SampleAmplificationError):
    """Divisão da amostra em metades exige n par"""


class DegenerateSupportError(SampleAmplificationError):
    """Coordenada com mínimo igual ao máximo"""


class UnsupportedFamilyError(SampleAmplificationError):
    """Operação não disponível para a família ou o método"""


class GuaranteeUnavailableError(SampleAmplificationError):
    """Garantia de χ² fora do seu intervalo de validade"""


class AssumptionFailureError(SampleAmplificationError):
    """Não existe par de pontos com H² na faixa [1/(10n), 1/(5n)]"""


class CalibrationBudgetError(SampleAmplificationError):
    """Poucas réplicas para calibrar quantis"""


class AmplificationImpossibleError(SampleAmplificationError):
    """Amplificação provadamente impossível para os parâmetros dados"""


class InconclusiveCertificateError(SampleAmplificationError):
    """A folga de Monte Carlo engoliu o ganho de TV; não é uma refutação"""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate
