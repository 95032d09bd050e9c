"""
Line based file formats.

Every format is a sequence of whitespace separated records; blank lines and
anything after ``#`` are ignored.

    morass N            model THETA        cond
    level 0 1 0         leq 0 3            w a0 a3 a5
    ...                 dis 1 2            leq a0 a3
    level N 41 -        block 4 1          dis a3 a5

Oracle files hold ``n value`` lines with rational values and decision files
``index value condition`` lines such as ``12 1 0:1,3:0``.
"""
import io
import json
import logging
import os
from fractions import Fraction
from typing import IO, Callable, Dict, Iterator, List, Sequence, Tuple, TypeVar

from morasskit.balg import BoolPresentation, parse_generator
from morasskit.cohen import CohenCondition
from morasskit.errors import MorassKitError
from morasskit.lmodel import GenModel, presentation
from morasskit.morass import MorassPrefix
from morasskit.plam import PCondition

logger = logging.getLogger(__name__)

T = TypeVar("T")

Record = Tuple[int, List[str]]


class ParseError(MorassKitError):
    def __init__(self, message: str, file_path: str = "<stream>", line: int = 0):
        self.message = message
        self.file_path = file_path
        self.line = line
        super().__init__("{}:{}: {}".format(file_path, line, message))


class ReportEncoder(json.JSONEncoder):
    """Encodes rationals as ``p/q`` strings and sets as sorted lists."""

    def default(self, obj):
        if isinstance(obj, Fraction):
            return str(obj)
        if isinstance(obj, (set, frozenset)):
            return sorted(obj, key=lambda x: (type(x).__name__, x))
        return json.JSONEncoder.default(self, obj)


def dumps(obj) -> str:
    return json.dumps(obj, cls=ReportEncoder, sort_keys=True, indent=2)


def records(fp: IO[str], file_path: str = "<stream>") -> Iterator[Record]:
    for number, raw in enumerate(fp, start=1):
        tokens = raw.split("#", 1)[0].split()
        if tokens:
            yield number, tokens


def _int(token: str, file_path: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ParseError(
            "Expected an integer, found '{}'".format(token), file_path, line
        )


def _generator(token: str, file_path: str, line: int) -> int:
    try:
        return int(parse_generator(token))
    except ValueError as e:
        raise ParseError(str(e), file_path, line)


def _arity(tokens: List[str], count: int, file_path: str, line: int) -> None:
    if len(tokens) != count:
        raise ParseError(
            "'{}' takes {} fields, found {}".format(
                tokens[0], count - 1, len(tokens) - 1
            ),
            file_path,
            line,
        )


def _header(
    stream: Iterator[Record], keyword: str, file_path: str
) -> Tuple[int, List[str]]:
    try:
        line, tokens = next(stream)
    except StopIteration:
        raise ParseError("Empty file, expected '{}'".format(keyword), file_path, 0)
    if tokens[0] != keyword:
        raise ParseError(
            "Expected a '{}' header, found '{}'".format(keyword, tokens[0]),
            file_path,
            line,
        )
    return line, tokens


def parse_prefix(fp: IO[str], file_path: str = "<stream>") -> MorassPrefix:
    stream = records(fp, file_path)
    line, tokens = _header(stream, "morass", file_path)
    _arity(tokens, 2, file_path, line)
    N = _int(tokens[1], file_path, line)

    levels: List[int] = []
    splits: List[int] = []
    for line, tokens in stream:
        if tokens[0] != "level":
            raise ParseError("Unknown record '{}'".format(tokens[0]), file_path, line)
        _arity(tokens, 4, file_path, line)
        alpha = _int(tokens[1], file_path, line)
        if alpha != len(levels):
            raise ParseError(
                "Expected level {}, found level {}".format(len(levels), alpha),
                file_path,
                line,
            )
        levels.append(_int(tokens[2], file_path, line))
        if alpha < N:
            splits.append(_int(tokens[3], file_path, line))
        elif tokens[3] != "-":
            raise ParseError("The top level has no splitting point", file_path, line)

    if len(levels) != N + 1:
        raise ParseError(
            "Expected {} levels, found {}".format(N + 1, len(levels)), file_path, line
        )
    try:
        return MorassPrefix(tuple(levels), tuple(splits))
    except ValueError as e:
        raise ParseError(str(e), file_path, line)


def format_prefix(p: MorassPrefix) -> str:
    lines = ["morass {}".format(p.N)]
    for alpha in range(p.N):
        lines.append("level {} {} {}".format(alpha, p.theta(alpha), p.splits[alpha]))
    lines.append("level {} {} -".format(p.N, p.theta(p.N)))
    return "\n".join(lines) + "\n"


def parse_model(fp: IO[str], file_path: str = "<stream>") -> GenModel:
    stream = records(fp, file_path)
    line, tokens = _header(stream, "model", file_path)
    _arity(tokens, 2, file_path, line)
    theta = _int(tokens[1], file_path, line)

    leq, dis, block = set(), set(), set()
    for line, tokens in stream:
        kind = tokens[0]
        if kind not in ("leq", "dis", "block"):
            raise ParseError("Unknown record '{}'".format(kind), file_path, line)
        _arity(tokens, 3, file_path, line)
        x, y = (_int(t, file_path, line) for t in tokens[1:])
        if not 0 <= x < theta or (kind != "block" and not 0 <= y < theta):
            raise ParseError(
                "Point outside the universe of {} points".format(theta), file_path, line
            )
        if kind == "leq":
            leq.add((x, y))
        elif kind == "dis":
            dis.add(frozenset((x, y)))
        else:
            block.add((x, y))

    return GenModel(theta, frozenset(leq), frozenset(dis), tuple(block))


def format_model(m: GenModel) -> str:
    lines = ["model {}".format(m.theta)]
    lines.extend("leq {} {}".format(x, y) for x, y in m.sorted_leq())
    lines.extend("dis {} {}".format(*pair) for pair in m.sorted_dis())
    lines.extend("block {} {}".format(x, b) for x, b in m.block)
    return "\n".join(lines) + "\n"


def parse_condition(fp: IO[str], file_path: str = "<stream>") -> PCondition:
    stream = records(fp, file_path)
    _header(stream, "cond", file_path)

    w = None
    leq, dis = [], []
    for line, tokens in stream:
        kind = tokens[0]
        if kind == "w":
            if w is not None:
                raise ParseError("Second index set", file_path, line)
            w = [_generator(t, file_path, line) for t in tokens[1:]]
        elif kind in ("leq", "dis"):
            if w is None:
                raise ParseError("Relation before the index set", file_path, line)
            _arity(tokens, 3, file_path, line)
            pair = tuple(_generator(t, file_path, line) for t in tokens[1:])
            (leq if kind == "leq" else dis).append(pair)
        else:
            raise ParseError("Unknown record '{}'".format(kind), file_path, line)

    if w is None:
        raise ParseError("Missing index set", file_path, 0)
    try:
        return PCondition.build(w, leq, dis)
    except MorassKitError as e:
        raise ParseError(str(e), file_path, line)


def format_condition(p: PCondition) -> str:
    lines = ["cond", " ".join(["w"] + ["a{}".format(i) for i in p.indices])]
    lines.extend("leq a{} a{}".format(x, y) for x, y in sorted(p.presentation.leq))
    dis = sorted(tuple(sorted(pair)) for pair in p.presentation.dis)
    lines.extend("dis a{} a{}".format(x, y) for x, y in dis)
    return "\n".join(lines) + "\n"


def parse_presentation(fp: IO[str], file_path: str = "<stream>") -> BoolPresentation:
    """Reads either a ``model`` or a ``cond`` file as a presentation."""
    text = fp.read()
    first = next(records(io.StringIO(text), file_path), None)
    if first is not None and first[1][0] == "cond":
        return parse_condition(io.StringIO(text), file_path).presentation
    return presentation(parse_model(io.StringIO(text), file_path))


def parse_oracle(fp: IO[str], file_path: str = "<stream>") -> Dict[int, Fraction]:
    values: Dict[int, Fraction] = {}
    for line, tokens in records(fp, file_path):
        _arity(tokens, 2, file_path, line)
        n = _int(tokens[0], file_path, line)
        if n in values:
            raise ParseError("Second value for n = {}".format(n), file_path, line)
        try:
            values[n] = Fraction(tokens[1])
        except (ValueError, ZeroDivisionError):
            raise ParseError(
                "Invalid rational value '{}'".format(tokens[1]), file_path, line
            )
    return values


def parse_decisions(
    fp: IO[str], file_path: str = "<stream>"
) -> List[Tuple[int, CohenCondition, int]]:
    decisions = []
    for line, tokens in records(fp, file_path):
        _arity(tokens, 3, file_path, line)
        index = _int(tokens[0], file_path, line)
        value = _int(tokens[1], file_path, line)
        try:
            condition = CohenCondition.parse(tokens[2])
        except ValueError as e:
            raise ParseError(str(e), file_path, line)
        decisions.append((index, condition, value))
    return decisions


def format_decisions(decisions: Sequence[Tuple[int, CohenCondition, int]]) -> str:
    return "".join(
        "{} {} {}\n".format(index, value, condition.format())
        for index, condition, value in decisions
    )


def load(file_path: str, parser: Callable[[IO[str], str], T]) -> T:
    try:
        with open(file_path, "r") as fp:
            return parser(fp, file_path)
    except OSError as e:
        raise ParseError(e.strerror or str(e), file_path, 0)


def load_directory(
    directory: str, parser: Callable[[IO[str], str], T], suffix: str = ".cond"
) -> List[T]:
    """Parses every file with the suffix in the directory, in name order."""
    try:
        names = sorted(n for n in os.listdir(directory) if n.endswith(suffix))
    except OSError as e:
        raise ParseError(e.strerror or str(e), directory, 0)
    logger.debug("Reading {} files from {}".format(len(names), directory))
    return [load(os.path.join(directory, name), parser) for name in names]


def save(file_path: str, text: str) -> None:
    directory = os.path.dirname(file_path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(file_path, "w") as fp:
        fp.write(text)
