"""Knot-expression mini-language.

Grammar::

    expr  := term ("+" term)*
    term  := INT "*" atom | atom
    atom  := "unknot" | "dtref" | "torus:" INT "," INT | "lp:" INT | "(" expr ")"

``A + B`` is the connected sum (tensor product of complexes) and ``k*A`` the
k-fold connected sum. Only the torus family T(p-1, p) is supported.
"""
import logging
import re
from typing import List, NamedTuple, Optional, Tuple, Union

from floerd.core.config import settings
from floerd.core.exceptions import ExpressionSyntaxError, PreconditionError, SizeGuardError
from floerd.models.complex import BifilteredComplex
from floerd.services.complex_service import ComplexService
from floerd.services.knot_service import DOUBLE_SIZE, KnotService

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<word>[a-z]+)|(?P<sym>[:,()*+]))")


class Atom(NamedTuple):
    kind: str
    args: Tuple[int, ...]
    position: int


class Power(NamedTuple):
    k: int
    expr: "Node"


class Sum(NamedTuple):
    terms: Tuple["Node", ...]


Node = Union[Atom, Power, Sum]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: List[Tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if match is None:
                rest = text[pos:]
                if not rest.strip():
                    break
                bad = pos + len(rest) - len(rest.lstrip())
                raise ExpressionSyntaxError(f"Unexpected character {text[bad]!r} at position {bad}", position=bad)
            kind = match.lastgroup
            self.tokens.append((kind, match.group(kind), match.start(kind)))
            pos = match.end()
        self.k = 0

    def peek(self) -> Tuple[str, str, int]:
        if self.k < len(self.tokens):
            return self.tokens[self.k]
        return ("end", "", len(self.text))

    def take(self, kind: str, value: Optional[str] = None) -> Tuple[str, str, int]:
        token = self.peek()
        if token[0] != kind or (value is not None and token[1] != value):
            expected = repr(value) if value is not None else kind
            found = "end of input" if token[0] == "end" else repr(token[1])
            raise ExpressionSyntaxError(
                f"Expected {expected} at position {token[2]}, found {found}", position=token[2]
            )
        self.k += 1
        return token

    def integer(self) -> int:
        return int(self.take("int")[1])

    def parse(self) -> Node:
        if not self.tokens:
            raise ExpressionSyntaxError("Empty knot expression", position=0)
        node = self.expr()
        token = self.peek()
        if token[0] != "end":
            raise ExpressionSyntaxError(f"Unexpected {token[1]!r} at position {token[2]}", position=token[2])
        return node

    def expr(self) -> Node:
        terms = [self.term()]
        while self.peek()[1] == "+":
            self.k += 1
            terms.append(self.term())
        return terms[0] if len(terms) == 1 else Sum(tuple(terms))

    def term(self) -> Node:
        if self.peek()[0] == "int":
            k = self.integer()
            self.take("sym", "*")
            return Power(k, self.atom())
        return self.atom()

    def atom(self) -> Node:
        kind, value, position = self.peek()
        if value == "(":
            self.k += 1
            inner = self.expr()
            self.take("sym", ")")
            return inner
        if kind != "word":
            found = "end of input" if kind == "end" else repr(value)
            raise ExpressionSyntaxError(f"Expected a knot at position {position}, found {found}", position=position)
        self.k += 1
        if value in ("unknot", "dtref"):
            return Atom(value, (), position)
        if value == "torus":
            self.take("sym", ":")
            a = self.integer()
            self.take("sym", ",")
            return Atom("torus", (a, self.integer()), position)
        if value == "lp":
            self.take("sym", ":")
            return Atom("lp", (self.integer(),), position)
        raise ExpressionSyntaxError(f"Unknown knot {value!r} at position {position}", position=position)


class ExpressionParser:
    """Parser y evaluador de expresiones de nudos"""

    @classmethod
    def parse(cls, text: str) -> Node:
        """
        Analiza una expresión.

        Raises:
            ExpressionSyntaxError: Con la posición del primer error
        """
        return _Parser(text).parse()

    @classmethod
    def format(cls, node: Node) -> str:
        """Forma canónica de la expresión."""
        if isinstance(node, Atom):
            if node.kind == "torus":
                return f"torus:{node.args[0]},{node.args[1]}"
            if node.kind == "lp":
                return f"lp:{node.args[0]}"
            return node.kind
        if isinstance(node, Power):
            inner = cls.format(node.expr)
            return f"{node.k}*({inner})" if isinstance(node.expr, Sum) else f"{node.k}*{inner}"
        return " + ".join(cls.format(term) for term in node.terms)

    @classmethod
    def normalize(cls, text: str) -> str:
        return cls.format(cls.parse(text))

    @classmethod
    def _check_atom(cls, atom: Atom) -> None:
        if atom.kind == "torus":
            a, b = atom.args
            if b != a + 1 or b % 2 == 0 or b < 3:
                raise PreconditionError(
                    f"Only torus knots T(p-1,p) with odd p >= 3 are supported, got torus:{a},{b}",
                    position=atom.position,
                )
        elif atom.kind == "lp":
            KnotService.check_lp_prime(atom.args[0])

    @classmethod
    def projected_size(cls, node: Node) -> int:
        """Número de generadores del complejo sin construirlo."""
        if isinstance(node, Atom):
            cls._check_atom(node)
            if node.kind == "unknot":
                return 1
            if node.kind == "dtref":
                return DOUBLE_SIZE
            if node.kind == "torus":
                return 2 * node.args[1] - 3
            return KnotService.lp_projected_size(node.args[0])
        if isinstance(node, Power):
            return cls.projected_size(node.expr) ** node.k
        size = 1
        for term in node.terms:
            size *= cls.projected_size(term)
        return size

    @classmethod
    def evaluate(cls, text: str, allow_large: bool = False) -> BifilteredComplex:
        """
        Construye el complejo de una expresión.

        Args:
            text: Expresión de nudo
            allow_large: Permite superar settings.MAX_GENERATORS

        Returns:
            BifilteredComplex con la forma canónica de la expresión como nombre

        Raises:
            ExpressionSyntaxError: Si la expresión está mal formada
            SizeGuardError: Si el tamaño proyectado supera el límite
        """
        node = cls.parse(text)
        projected = cls.projected_size(node)
        if projected > settings.MAX_GENERATORS and not allow_large:
            raise SizeGuardError(
                f"{cls.format(node)} would have {projected} generators (limit {settings.MAX_GENERATORS})",
                projected=projected, limit=settings.MAX_GENERATORS,
            )
        limit = max(projected, settings.MAX_GENERATORS)
        logger.info(f"Evaluando {cls.format(node)} ({projected} generadores)")
        c = cls._build(node, limit, allow_large)
        return c.with_name(cls.format(node))

    @classmethod
    def _build(cls, node: Node, limit: int, allow_large: bool) -> BifilteredComplex:
        if isinstance(node, Atom):
            if node.kind == "unknot":
                return ComplexService.unknot()
            if node.kind == "dtref":
                return KnotService.doubled_trefoil_model()
            if node.kind == "torus":
                return KnotService.torus_staircase(node.args[1])
            return KnotService.lp_complex(node.args[0], allow_large=True)
        if isinstance(node, Power):
            return ComplexService.tensor_power(cls._build(node.expr, limit, allow_large), node.k, max_generators=limit)
        result = cls._build(node.terms[0], limit, allow_large)
        for term in node.terms[1:]:
            result = ComplexService.tensor(result, cls._build(term, limit, allow_large), max_generators=limit)
        return result
