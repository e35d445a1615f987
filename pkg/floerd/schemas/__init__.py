from floerd.schemas.complex import ComplexDocument, ValidationReport
from floerd.schemas.knots import AlexanderPoly, ConstraintReport, StaircaseData
from floerd.schemas.report import ObstructionReport
from floerd.schemas.response import APIResponse
from floerd.schemas.surgery import DBarEntry, DBarTable, DInvariantResult, Rational, TheoremBounds

__all__ = [
    'APIResponse',
    'AlexanderPoly',
    'ComplexDocument',
    'ConstraintReport',
    'DBarEntry',
    'DBarTable',
    'DInvariantResult',
    'ObstructionReport',
    'Rational',
    'StaircaseData',
    'TheoremBounds',
    'ValidationReport',
]
