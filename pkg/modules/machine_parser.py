"""
Surface syntax for formal machines.

    expr      := term ('|' term)*
    term      := atom ('&' atom)*
    atom      := generator | '(' expr ')' | 'T' | 'F'
    generator := 'z' nat | 'u' nat | 'l"' binaryword '"' | 'i(' rational ',' rational ')'

'&' is distributed over '|' into a join of meets; no absorption is applied,
so parse_machine(print_machine(m)) == m for every machine the printer
produces. Whitespace is ignored.
"""
from fractions import Fraction

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken, VisitError

from modules.error_handler import InvalidGeneratorError, MachineSyntaxError, MachineSpaceError
from modules.generators import ell, interval, u, z
from modules.machines import FormalMachine, distribute

MACHINE_GRAMMAR = r"""
    start: expr

    ?expr: term
        | expr "|" term                          -> join

    ?term: atom
        | term "&" atom                          -> meet

    ?atom: generator
        | "(" expr ")"
        | "T"                                    -> top
        | "F"                                    -> bottom

    ?generator: "z" NAT                          -> zero
        | "u" NAT                                -> one
        | "l" WORD                               -> prefix
        | "i" "(" rational "," rational ")"      -> interval

    rational: INT ["/" NAT]

    NAT: /[0-9]+/
    INT: /-?[0-9]+/
    WORD: /"[01]*"/

    %import common.WS
    %ignore WS
"""


@v_args(inline=True)
class MachineBuilder(Transformer):
    """Builds a FormalMachine bottom-up from the parse tree"""

    def start(self, m):
        return m

    def join(self, a, b):
        return FormalMachine(a.branches | b.branches)

    def meet(self, a, b):
        return distribute(a, b)

    def top(self):
        return FormalMachine.top()

    def bottom(self):
        return FormalMachine.bottom()

    def zero(self, n):
        return FormalMachine.atom(z(int(n)))

    def one(self, n):
        return FormalMachine.atom(u(int(n)))

    def prefix(self, word):
        return FormalMachine.atom(ell(str(word)[1:-1]))

    def interval(self, lo, hi):
        return FormalMachine.atom(interval(lo, hi))

    def rational(self, num, den=None):
        if den is None:
            return Fraction(int(num))
        if int(den) == 0:
            raise InvalidGeneratorError(f"zero denominator in {num}/{den}")
        return Fraction(int(num), int(den))


# Global parser instance
_parser = None


def get_machine_parser() -> Lark:
    """Get the LALR parser for machine expressions (singleton)"""
    global _parser
    if _parser is None:
        _parser = Lark(MACHINE_GRAMMAR, start="start", parser="lalr")
    return _parser


def _position(text: str, e: UnexpectedInput):
    line, column = getattr(e, "line", -1), getattr(e, "column", -1)
    if line is None or line < 1:
        lines = text.split("\n")
        line, column = len(lines), len(lines[-1]) + 1
    return line, column


def parse_machine(text: str) -> FormalMachine:
    """
    Parse a machine expression.

    Raises:
        MachineSyntaxError: With the line and column of the offending input
        InvalidGeneratorError: For well-formed but invalid generators, e.g. i(2/3,1/3)
        IncompatiblePresentationError: When one expression mixes spaces
    """
    try:
        tree = get_machine_parser().parse(text)
    except UnexpectedCharacters as e:
        line, column = _position(text, e)
        raise MachineSyntaxError(f"unexpected character {e.char!r}", line, column) from None
    except UnexpectedToken as e:
        line, column = _position(text, e)
        if e.token.type == "$END":
            raise MachineSyntaxError("unexpected end of expression", line, column) from None
        raise MachineSyntaxError(f"unexpected {e.token.value!r}", line, column) from None
    except UnexpectedEOF as e:
        line, column = _position(text, e)
        raise MachineSyntaxError("unexpected end of expression", line, column) from None
    try:
        return MachineBuilder().transform(tree)
    except VisitError as e:
        if isinstance(e.orig_exc, MachineSpaceError):
            raise e.orig_exc from None
        raise


def print_machine(m: FormalMachine) -> str:
    """Canonical text of a machine; parse_machine inverts it"""
    return m.to_text()
