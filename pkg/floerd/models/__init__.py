# Importar los modelos del dominio
from floerd.models.complex import BasisElement, BifilteredComplex, DifferentialEntry
from floerd.models.metabolizer import LinkingForm, Metabolizer, TorsionGroup
from floerd.models.quotient import Tower, TruncatedHomology, TruncatedQuotientComplex

__all__ = [
    'BasisElement',
    'BifilteredComplex',
    'DifferentialEntry',
    'LinkingForm',
    'Metabolizer',
    'TorsionGroup',
    'Tower',
    'TruncatedHomology',
    'TruncatedQuotientComplex',
]
