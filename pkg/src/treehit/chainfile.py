"""Plain-text chain files.

::

    # comment
    nodes 3
    0 - - - 0.5
    1 0 0.5 0.5 0
    2 1 0.5 0.5 0.5

Each data line is ``id parent mu lambda kappa``; the root line carries only
its self-loop probability.  Parents have smaller ids than their children
and appear before them.
"""
import numpy as np

from .chain import DEFAULT_TOL, make_spec, validate
from .tree import from_parent_array


class ChainFileError(ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _float(tok, what, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ChainFileError(f"bad {what} {tok!r}", lineno) from None
    if not np.isfinite(v):
        raise ChainFileError(f"{what} must be finite", lineno)
    return v


def parse(text, tol=DEFAULT_TOL, check=True):
    """Parse chain-file text into ``(tree, spec)``.

    Raises :class:`ChainFileError` with the offending line number; with
    ``check`` the chain must also pass :func:`treehit.chain.validate`.
    """
    n = None
    rows = {}
    lines_of = {}
    header_line = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if n is None:
            if len(tok) != 2 or tok[0] != "nodes":
                raise ChainFileError("expected header 'nodes N'", lineno)
            try:
                n = int(tok[1])
            except ValueError:
                raise ChainFileError(f"bad node count {tok[1]!r}", lineno) from None
            if n < 1:
                raise ChainFileError("node count must be positive", lineno)
            header_line = lineno
            continue
        if len(tok) != 5:
            raise ChainFileError("expected 'id parent mu lambda kappa'", lineno)
        try:
            x = int(tok[0])
        except ValueError:
            raise ChainFileError(f"bad node id {tok[0]!r}", lineno) from None
        if not 0 <= x < n:
            raise ChainFileError(f"node id {x} outside 0..{n - 1}", lineno)
        if x in rows:
            raise ChainFileError(f"node {x} defined twice (first on line {lines_of[x]})", lineno)
        if x == 0:
            if tok[1:4] != ["-", "-", "-"]:
                raise ChainFileError("root line must be '0 - - - kappa'", lineno)
            rows[0] = (-1, 0.0, 0.0, _float(tok[4], "kappa", lineno))
        else:
            try:
                p = int(tok[1])
            except ValueError:
                raise ChainFileError(f"bad parent {tok[1]!r}", lineno) from None
            if not 0 <= p < x:
                raise ChainFileError(f"parent {p} of node {x} must have a smaller id", lineno)
            if p not in rows:
                raise ChainFileError(f"parent {p} of node {x} not defined before it", lineno)
            rows[x] = (p, _float(tok[2], "mu", lineno), _float(tok[3], "lambda", lineno),
                       _float(tok[4], "kappa", lineno))
        lines_of[x] = lineno
    if n is None:
        raise ChainFileError("missing header 'nodes N'")
    if len(rows) != n:
        missing = sorted(set(range(n)) - set(rows))
        raise ChainFileError(f"{len(rows)} data lines for {n} nodes; missing {missing[:5]}", header_line)
    parent = np.array([rows[x][0] for x in range(n)], dtype=np.int64)
    tree = from_parent_array(parent)
    spec = make_spec(tree, [rows[x][2] for x in range(n)], [rows[x][1] for x in range(n)],
                     [rows[x][3] for x in range(n)])
    if check:
        report = validate(tree, spec, tol)
        if not report.ok:
            v = report.violations[0]
            raise ChainFileError(f"site {v.site} fails {v.kind} check ({v.value:.3g})",
                                 lines_of.get(v.site))
    return tree, spec


def load(path, **kw):
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read(), **kw)


def _num(v):
    # shortest text that reads back to the same double
    return repr(float(v))


def emit(tree, spec):
    """Chain-file text with one line per node in id order."""
    out = [f"nodes {tree.node_count}"]
    for x in range(tree.node_count):
        if x == 0:
            out.append(f"0 - - - {_num(spec.kappa[0])}")
        else:
            out.append(f"{x} {tree.parent[x]} {_num(spec.mu[x])} {_num(spec.lam[x])} "
                       f"{_num(spec.kappa[x])}")
    return "\n".join(out) + "\n"


def save(path, tree, spec):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit(tree, spec))
