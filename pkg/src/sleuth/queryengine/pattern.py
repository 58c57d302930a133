"""Linear graph-pattern queries: MATCH path, conjunctive WHERE, plain RETURN.

The accepted language is deliberately small so the evaluator stays
verifiable against brute-force enumeration: a single MATCH with a linear
path of at most three hops, equality predicates inside node patterns,
comparison conjunctions in WHERE, and variable or variable.property return
items.  Everything else is rejected explicitly, never silently ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import PatternSyntaxError, UnsupportedFeature
from ..store.graph import PropertyGraph
from ..store.tables import Table

MAX_HOPS = 3

_KEYWORDS = {"MATCH", "WHERE", "RETURN", "AND"}
_UNSUPPORTED_KEYWORDS = {
    "OPTIONAL": "optional match",
    "WITH": "with clause",
    "ORDER": "order by",
    "LIMIT": "limit",
    "SKIP": "skip",
    "UNION": "union",
    "CREATE": "write clause",
    "DELETE": "write clause",
    "SET": "write clause",
    "MERGE": "write clause",
}


# --- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class NodePattern:
    var: str
    label: str | None = None
    props: tuple = ()  # sorted (key, value) pairs


@dataclass(frozen=True)
class EdgePattern:
    direction: str  # out | in | any
    label: str | None = None


@dataclass(frozen=True)
class Condition:
    left: tuple[str, str]  # (var, prop)
    op: str  # = | <> | < | >
    right: object  # literal or (var, prop) tuple


@dataclass(frozen=True)
class ReturnItem:
    var: str
    prop: str | None = None

    def column_name(self) -> str:
        return self.var if self.prop is None else f"{self.var}.{self.prop}"


@dataclass(frozen=True)
class PatternQuery:
    nodes: tuple[NodePattern, ...]
    edges: tuple[EdgePattern, ...]
    where: tuple[Condition, ...] = ()
    returns: tuple[ReturnItem, ...] = ()


# --- lexer ---------------------------------------------------------------------


@dataclass
class _Token:
    kind: str
    value: object
    pos: int


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("<-[", i):
            tokens.append(_Token("EDGE_IN_OPEN", "<-[", i)); i += 3
        elif text.startswith("-[", i):
            tokens.append(_Token("EDGE_OPEN", "-[", i)); i += 2
        elif text.startswith("]->", i):
            tokens.append(_Token("EDGE_OUT_CLOSE", "]->", i)); i += 3
        elif text.startswith("]-", i):
            tokens.append(_Token("EDGE_CLOSE", "]-", i)); i += 2
        elif text.startswith("<>", i):
            tokens.append(_Token("OP", "<>", i)); i += 2
        elif ch in "()[]{}:,.*":
            tokens.append(_Token(ch, ch, i)); i += 1
        elif ch in "=<>":
            tokens.append(_Token("OP", ch, i)); i += 1
        elif ch in "'\"":
            j = text.find(ch, i + 1)
            if j < 0:
                raise PatternSyntaxError("unterminated string literal", position=i)
            tokens.append(_Token("STRING", text[i + 1:j], i))
            i = j + 1
        elif ch.isdigit() or (ch == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and (text[j].isdigit() or text[j] == "."):
                j += 1
            raw = text[i:j]
            tokens.append(_Token("NUMBER", float(raw) if "." in raw else int(raw), i))
            i = j
        elif ch.isalpha() or ch == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            upper = word.upper()
            if upper in _KEYWORDS:
                tokens.append(_Token(upper, word, i))
            elif upper in _UNSUPPORTED_KEYWORDS:
                raise UnsupportedFeature(_UNSUPPORTED_KEYWORDS[upper])
            else:
                tokens.append(_Token("IDENT", word, i))
            i = j
        else:
            raise PatternSyntaxError(f"unexpected character {ch!r}", position=i)
    tokens.append(_Token("EOF", None, n))
    return tokens


# --- parser ---------------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str) -> _Token:
        tok = self.peek()
        if tok.kind != kind:
            raise PatternSyntaxError(
                f"expected {kind} but found {tok.value!r}",
                position=tok.pos, expected=[kind])
        return self.advance()

    def parse(self) -> PatternQuery:
        self.expect("MATCH")
        nodes = [self.node_pattern()]
        edges: list[EdgePattern] = []
        while self.peek().kind in ("EDGE_OPEN", "EDGE_IN_OPEN"):
            edges.append(self.edge_pattern())
            nodes.append(self.node_pattern())
        if self.peek().kind == "MATCH":
            raise UnsupportedFeature("multiple match clauses")
        if len(edges) > MAX_HOPS:
            raise UnsupportedFeature(f"path longer than {MAX_HOPS} hops")
        where: list[Condition] = []
        if self.peek().kind == "WHERE":
            self.advance()
            where.append(self.condition())
            while self.peek().kind == "AND":
                self.advance()
                where.append(self.condition())
        self.expect("RETURN")
        returns = [self.return_item()]
        while self.peek().kind == ",":
            self.advance()
            returns.append(self.return_item())
        self.expect("EOF")
        query = PatternQuery(tuple(nodes), tuple(edges), tuple(where), tuple(returns))
        _validate(query)
        return query

    def node_pattern(self) -> NodePattern:
        self.expect("(")
        var = self.expect("IDENT").value
        label = None
        props: list[tuple[str, object]] = []
        if self.peek().kind == ":":
            self.advance()
            label = self.expect("IDENT").value
        if self.peek().kind == "{":
            self.advance()
            while True:
                key = self.expect("IDENT").value
                self.expect(":")
                props.append((key, self.literal()))
                if self.peek().kind == ",":
                    self.advance()
                    continue
                break
            self.expect("}")
        self.expect(")")
        return NodePattern(var, label, tuple(sorted(props)))

    def edge_pattern(self) -> EdgePattern:
        opener = self.advance()  # EDGE_OPEN or EDGE_IN_OPEN
        if self.peek().kind == "*":
            raise UnsupportedFeature("variable-length path")
        label = None
        if self.peek().kind == ":":
            self.advance()
            label = self.expect("IDENT").value
        if self.peek().kind == "IDENT":
            # An edge variable would be unreachable from RETURN in this subset.
            raise UnsupportedFeature("edge variables")
        closer = self.peek()
        if opener.kind == "EDGE_IN_OPEN":
            if closer.kind != "EDGE_CLOSE":
                raise PatternSyntaxError("expected ]- to close an incoming edge",
                                         position=closer.pos, expected=["]-"])
            self.advance()
            return EdgePattern("in", label)
        if closer.kind == "EDGE_OUT_CLOSE":
            self.advance()
            return EdgePattern("out", label)
        if closer.kind == "EDGE_CLOSE":
            self.advance()
            return EdgePattern("any", label)
        raise PatternSyntaxError("expected ]-> or ]- to close an edge",
                                 position=closer.pos, expected=["]->", "]-"])

    def condition(self) -> Condition:
        left = self.property_ref()
        op_tok = self.peek()
        if op_tok.kind != "OP":
            raise PatternSyntaxError(f"expected comparison operator, found {op_tok.value!r}",
                                     position=op_tok.pos, expected=["=", "<>", "<", ">"])
        self.advance()
        if self.peek().kind == "IDENT" and self.tokens[self.pos + 1].kind == ".":
            right: object = self.property_ref()
        else:
            right = self.literal()
        return Condition(left, op_tok.value, right)

    def property_ref(self) -> tuple[str, str]:
        var = self.expect("IDENT").value
        self.expect(".")
        prop = self.expect("IDENT").value
        return (var, prop)

    def return_item(self) -> ReturnItem:
        tok = self.expect("IDENT")
        if self.peek().kind == "(":
            raise UnsupportedFeature("aggregation")
        if self.peek().kind == ".":
            self.advance()
            prop = self.expect("IDENT").value
            if self.peek().kind == "(":
                raise UnsupportedFeature("aggregation")
            return ReturnItem(tok.value, prop)
        return ReturnItem(tok.value)

    def literal(self):
        tok = self.peek()
        if tok.kind in ("STRING", "NUMBER"):
            self.advance()
            return tok.value
        raise PatternSyntaxError(f"expected a literal, found {tok.value!r}",
                                 position=tok.pos, expected=["string", "number"])


def _validate(query: PatternQuery) -> None:
    bound = {np.var for np in query.nodes}
    for cond in query.where:
        refs = [cond.left] + ([cond.right] if isinstance(cond.right, tuple) else [])
        for var, _ in refs:
            if var not in bound:
                raise PatternSyntaxError(f"variable {var!r} is not bound in MATCH", position=0)
    if not query.returns:
        raise PatternSyntaxError("RETURN requires at least one item", position=0)
    for item in query.returns:
        if item.var not in bound:
            raise PatternSyntaxError(f"variable {item.var!r} is not bound in MATCH", position=0)


def parse_pattern(text: str) -> PatternQuery:
    return _Parser(_lex(text)).parse()


def unparse(query: PatternQuery) -> str:
    """Canonical text form; parse(unparse(q)) reproduces q exactly."""
    def fmt_value(v) -> str:
        if isinstance(v, str):
            return "'" + v + "'"
        return repr(v)

    parts = ["MATCH"]
    path = []
    for i, np in enumerate(query.nodes):
        chunk = "(" + np.var
        if np.label:
            chunk += ":" + np.label
        if np.props:
            inner = ", ".join(f"{k}: {fmt_value(v)}" for k, v in np.props)
            chunk += " {" + inner + "}"
        chunk += ")"
        path.append(chunk)
        if i < len(query.edges):
            ep = query.edges[i]
            lab = ":" + ep.label if ep.label else ""
            if ep.direction == "out":
                path.append(f"-[{lab}]->")
            elif ep.direction == "in":
                path.append(f"<-[{lab}]-")
            else:
                path.append(f"-[{lab}]-")
    parts.append("".join(path))
    if query.where:
        conds = []
        for cond in query.where:
            right = (f"{cond.right[0]}.{cond.right[1]}" if isinstance(cond.right, tuple)
                     else fmt_value(cond.right))
            conds.append(f"{cond.left[0]}.{cond.left[1]} {cond.op} {right}")
        parts.append("WHERE " + " AND ".join(conds))
    parts.append("RETURN " + ", ".join(i.column_name() for i in query.returns))
    return " ".join(parts)


# --- evaluator -------------------------------------------------------------------


def _compare(left, op: str, right) -> bool:
    if op == "=":
        return left == right
    if op == "<>":
        return left != right
    if left is None or right is None:
        return False
    numeric = (int, float)
    if isinstance(left, numeric) and not isinstance(left, bool) and \
            isinstance(right, numeric) and not isinstance(right, bool):
        return left < right if op == "<" else left > right
    if isinstance(left, str) and isinstance(right, str):
        return left < right if op == "<" else left > right
    return False


def eval_pattern(query: PatternQuery, graph: PropertyGraph) -> Table:
    """All satisfying assignments, set semantics, rows ordered by the
    lexicographic node-id tuple they were generated from."""
    node_ids = sorted(graph.nodes)

    def node_ok(np: NodePattern, node_id: str) -> bool:
        node = graph.nodes[node_id]
        if np.label is not None and node.label != np.label:
            return False
        return all(node.props.get(k) == v for k, v in np.props)

    def connects(src: str, dst: str, label: str | None) -> bool:
        return any(e.target == dst and (label is None or e.label == label)
                   for e in graph.out_edges(src))

    def edge_ok(ep: EdgePattern, a: str, b: str) -> bool:
        if graph.directed and ep.direction == "out":
            return connects(a, b, ep.label)
        if graph.directed and ep.direction == "in":
            return connects(b, a, ep.label)
        return connects(a, b, ep.label) or connects(b, a, ep.label)

    def candidates(i: int, binding: dict) -> list[str]:
        np = query.nodes[i]
        if np.var in binding:
            return [binding[np.var]]
        if i == 0:
            return node_ids
        prev = binding[query.nodes[i - 1].var]
        ep = query.edges[i - 1]
        if graph.directed and ep.direction == "out":
            cands = graph.successors(prev)
        elif graph.directed and ep.direction == "in":
            cands = {e.source for e in graph.in_edges(prev)}
        else:
            cands = graph.neighbors(prev)
        return sorted(cands)

    def where_ok(binding: dict) -> bool:
        for cond in query.where:
            var, prop = cond.left
            left = graph.nodes[binding[var]].props.get(prop)
            if isinstance(cond.right, tuple):
                rvar, rprop = cond.right
                right = graph.nodes[binding[rvar]].props.get(rprop)
            else:
                right = cond.right
            if not _compare(left, cond.op, right):
                return False
        return True

    results: list[tuple] = []
    seen: set[tuple] = set()

    def extend(i: int, binding: dict) -> None:
        if i == len(query.nodes):
            if not where_ok(binding):
                return
            row = []
            for item in query.returns:
                node = graph.nodes[binding[item.var]]
                row.append(node.node_id if item.prop is None else node.props.get(item.prop))
            key = tuple(row)
            if key not in seen:
                seen.add(key)
                results.append(key)
            return
        np = query.nodes[i]
        for cand in candidates(i, binding):
            if not node_ok(np, cand):
                continue
            if i > 0 and not edge_ok(query.edges[i - 1], binding[query.nodes[i - 1].var], cand):
                continue
            had = np.var in binding
            binding[np.var] = cand
            extend(i + 1, binding)
            if not had:
                del binding[np.var]

    extend(0, {})

    columns = []
    for idx, item in enumerate(query.returns):
        values = [row[idx] for row in results]
        if item.prop is None:
            cls = "identifier"
        elif values and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                            for v in values if v is not None):
            cls = "continuous"
        else:
            cls = "categorical"
        columns.append((item.column_name(), cls))
    return Table("bindings", columns, results)
