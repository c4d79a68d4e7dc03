"""
Amplificação de amostras

Transforma n amostras i.i.d. de uma distribuição desconhecida em n+m
amostras cuja lei conjunta fica a ε em variação total da lei i.i.d. com
n+m amostras. Inclui os amplificadores por suficiência e por
embaralhamento, os limites superiores e inferiores e o lado do
verificador.
"""

from .amplify_shuffle import shuffle_amplify, shuffle_bound_for
from .amplify_sufficiency import AmplifierOutput, amplify, bound_for
from .divergences import BoundReport
from .errors import AmplificationImpossibleError, SampleAmplificationError
from .families import Dataset, FamilyKind, FamilySpec, ParamPoint, default_param, sample
from .numerics import RngState

__version__ = "0.1.0"

__all__ = [
    "AmplificationImpossibleError",
    "AmplifierOutput",
    "BoundReport",
    "Dataset",
    "FamilyKind",
    "FamilySpec",
    "ParamPoint",
    "RngState",
    "SampleAmplificationError",
    "amplify",
    "bound_for",
    "default_param",
    "sample",
    "shuffle_amplify",
    "shuffle_bound_for",
]
