"""Parser and emitters for the textual behavior-tree format (".bts").

The format is line oriented. A model starts with ``bt <id> [init]`` at
column zero; each node line is indented exactly two spaces per depth, with
the root at depth one. Non-root lines may start with an edge keyword
(``seq``, ``par``, ``atom``, ``alt``; omitted means ``seq``), followed by

    CNAME <behavior> [@LINK,..] [!STATUS] [op=NAME[:LABEL]] [label=L] [rel="..."]

where the behavior name is wrapped in delimiters that encode its type:
``[b]`` state-realisation, ``?b?`` selection, ``??b??`` event, ``???b???``
guard, ``>b<`` / ``<b>`` internal input/output and ``>>b<<`` / ``<<b>>``
external input/output. Behavior names may contain spaces and parentheses;
they end at the closing delimiter. Trailing fields must appear in the
order shown. ``rel`` holds one quoted string of ``qualifier(preposition)
COMPONENT`` entries separated by ``;``.

Blank lines are ignored, as are lines whose first non-space character is
``#`` (used for file headers; the canonical emitter does not preserve
them). Tabs in indentation are rejected. The edge keywords are reserved
words on non-root lines; on a root line they are rejected outright.

``emit_bts`` produces the canonical form: two-space indentation, ``seq``
and ``!original`` left implicit, set values comma- or semicolon-sorted.
``emit_json``/``parse_json`` provide a lossless JSON interchange form.
"""

from __future__ import annotations

import json
import re

from .model import (
    EDGE_TYPES,
    NODE_OPERATORS,
    NODE_STATUSES,
    BehavioralModel,
    BehavioralUnit,
    DuplicateModelId,
    Edge,
    ModelError,
    ModelSet,
    MultipleRoots,
    SourceSpan,
    Triple,
    build_model,
)

__all__ = [
    "BtsSyntaxError",
    "IndentError",
    "UnknownBehaviorType",
    "UnknownEdgeKind",
    "SchemaError",
    "parse_bts",
    "emit_bts",
    "parse_json",
    "emit_json",
]


class BtsSyntaxError(Exception):
    """A malformed source construct; carries the offending location."""

    def __init__(self, span: SourceSpan, message: str) -> None:
        super().__init__(f"{span}: {message}")
        self.span = span
        self.reason = message


class IndentError(BtsSyntaxError):
    pass


class UnknownBehaviorType(BtsSyntaxError):
    pass


class UnknownEdgeKind(BtsSyntaxError):
    pass


class SchemaError(Exception):
    """Malformed JSON interchange document."""


EDGE_KEYWORDS = {
    "seq": "sequential",
    "par": "parallel",
    "atom": "atomic",
    "alt": "alternative",
}
_KEYWORD_OF_ETYPE = {v: k for k, v in EDGE_KEYWORDS.items()}

# Open/close delimiter pairs, tried longest-open-first so that e.g. "???"
# wins over "??" and ">>" over ">".
_DELIMS = (
    ("???", "???", "guard"),
    ("??", "??", "event"),
    ("?", "?", "selection"),
    (">>", "<<", "external-input"),
    ("<<", ">>", "external-output"),
    (">", "<", "internal-input"),
    ("<", ">", "internal-output"),
    ("[", "]", "state-realisation"),
)
_DELIM_OF_BTYPE = {btype: (op, cl) for op, cl, btype in _DELIMS}

_MODEL_RE = re.compile(r"^bt\s+([A-Za-z_][A-Za-z0-9_-]*)(\s+init)?\s*$")
_CNAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_-]*")
_REL_ENTRY_RE = re.compile(r"^([A-Za-z]+)\(([A-Za-z]+)\)\s+([A-Za-z_][A-Za-z0-9_-]*)$")


def _parse_unitspec(text: str, span: SourceSpan):
    """Parse one unit specification; returns its attribute mapping."""
    m = _CNAME_RE.match(text)
    if m is None:
        raise BtsSyntaxError(span, f"expected a component name, found {text[:20]!r}")
    cname = m.group(0)
    rest = text[m.end():]
    if not rest.startswith(" "):
        raise BtsSyntaxError(span, "expected whitespace after the component name")
    rest = rest.lstrip(" ")

    for opener, closer, btype in _DELIMS:
        if rest.startswith(opener):
            end = rest.find(closer, len(opener))
            if end < 0:
                raise BtsSyntaxError(span, f"missing closing {closer!r} for the behavior name")
            bname = rest[len(opener):end].strip()
            if not bname:
                raise BtsSyntaxError(span, "behavior name is empty")
            rest = rest[end + len(closer):]
            break
    else:
        raise UnknownBehaviorType(
            span, f"expected a behavior-type delimiter after {cname!r}, found {rest[:10]!r}"
        )

    attrs: dict = {
        "cname": cname,
        "bname": bname,
        "btype": btype,
        "tlink": frozenset(),
        "status": "original",
        "rel": frozenset(),
    }

    # Trailing fields, in fixed order: @tlinks, !status, op=, label=, rel="".
    seen = -1

    def check_order(idx: int, what: str) -> None:
        nonlocal seen
        if idx <= seen:
            raise BtsSyntaxError(span, f"{what} is out of order or repeated")
        seen = idx

    rest = rest.strip()
    while rest:
        if rest.startswith("@"):
            check_order(0, "the traceability field")
            token, _, rest = rest[1:].partition(" ")
            links = [t for t in token.split(",")]
            if not token or any(not t for t in links):
                raise BtsSyntaxError(span, "malformed traceability links")
            if len(set(links)) != len(links):
                raise BtsSyntaxError(span, "duplicate traceability link")
            attrs["tlink"] = frozenset(links)
        elif rest.startswith("!"):
            check_order(1, "the status field")
            token, _, rest = rest[1:].partition(" ")
            if token not in NODE_STATUSES:
                raise BtsSyntaxError(span, f"unknown status {token!r}")
            attrs["status"] = token
        elif rest.startswith("op="):
            check_order(2, "the operator field")
            token, _, rest = rest[3:].partition(" ")
            opname = token.split(":", 1)[0]
            if opname not in NODE_OPERATORS:
                raise BtsSyntaxError(span, f"unknown operator {opname!r}")
            attrs["op"] = token
        elif rest.startswith("label="):
            check_order(3, "the label field")
            token, _, rest = rest[6:].partition(" ")
            if not token:
                raise BtsSyntaxError(span, "empty label")
            attrs["label"] = token
        elif rest.startswith('rel="'):
            check_order(4, "the relation field")
            end = rest.find('"', 5)
            if end < 0:
                raise BtsSyntaxError(span, "unterminated rel string")
            entries = rest[5:end]
            rest = rest[end + 1:]
            tokens = set()
            for raw in entries.split(";"):
                em = _REL_ENTRY_RE.match(raw.strip())
                if em is None:
                    raise BtsSyntaxError(
                        span, f"malformed relation entry {raw.strip()!r}; "
                        "expected 'qualifier(preposition) COMPONENT'"
                    )
                qual, prep, comp = em.groups()
                tokens.add(f"{qual.lower()}({prep.lower()}) {comp}")
            attrs["rel"] = frozenset(tokens)
        else:
            raise BtsSyntaxError(span, f"unexpected trailing text {rest[:20]!r}")
        rest = rest.strip()
    return attrs


def parse_bts(text: str, filename: str = "<string>") -> ModelSet:
    """Parse source text into a validated model set."""
    models: list[BehavioralModel] = []
    seen_ids: set[str] = set()

    header_span: SourceSpan | None = None
    model_id = ""
    is_init = False
    units: list[BehavioralUnit] = []
    triples: list[tuple[Triple, SourceSpan]] = []
    stack: list[tuple[int, str]] = []  # (depth, unit id)

    def finish_model() -> None:
        nonlocal units, triples, stack
        if header_span is None:
            return
        if not units:
            raise BtsSyntaxError(header_span, f"model {model_id!r} has no units")
        _check_alt_groups(triples)
        try:
            model = build_model(
                model_id, is_init, units, [t for t, _ in triples], span=header_span
            )
        except ModelError as exc:
            wrapped = type(exc)(f"{header_span}: {exc}")
            wrapped.span = header_span
            raise wrapped from exc
        models.append(model)
        units = []
        triples = []
        stack = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if not stripped or stripped.startswith("#"):
            continue

        if not raw.startswith(" "):
            span = SourceSpan(filename, lineno, 1)
            m = _MODEL_RE.match(raw)
            if m is None:
                raise BtsSyntaxError(span, f"expected 'bt <id> [init]', found {raw!r}")
            finish_model()
            header_span = span
            model_id = m.group(1)
            if model_id in seen_ids:
                err = DuplicateModelId(f"{span}: duplicate model id {model_id!r}")
                err.span = span
                raise err
            seen_ids.add(model_id)
            is_init = m.group(2) is not None
            continue

        indent = len(raw) - len(raw.lstrip(" "))
        body = raw[indent:]
        span = SourceSpan(filename, lineno, indent + 1)
        if "\t" in raw[:indent] or body.startswith("\t"):
            raise BtsSyntaxError(span, "tabs are not allowed in indentation")
        if header_span is None:
            raise BtsSyntaxError(span, "node line before any 'bt' header")
        if indent % 2 != 0:
            raise IndentError(span, f"indentation must be a multiple of two spaces, got {indent}")
        depth = indent // 2

        if not stack:
            if depth != 1:
                raise IndentError(span, f"the root line must be indented two spaces, got {indent}")
        else:
            if depth > stack[-1][0] + 1:
                raise IndentError(
                    span, f"indentation jumps from depth {stack[-1][0]} to {depth}"
                )
            if depth == 1:
                err = MultipleRoots(f"{span}: model {model_id!r} has a second root line")
                err.span = span
                raise err

        first, _, remainder = body.partition(" ")
        etype = "sequential"
        spec = body
        if first in EDGE_KEYWORDS:
            if depth == 1:
                raise UnknownEdgeKind(span, "edge keywords are not allowed on the root line")
            etype = EDGE_KEYWORDS[first]
            spec = remainder.lstrip(" ")
            if not spec:
                raise BtsSyntaxError(span, "edge keyword without a unit")

        attrs = _parse_unitspec(spec, span)
        unit = BehavioralUnit(f"w{len(units)}", attrs, span=span)
        units.append(unit)

        while stack and stack[-1][0] >= depth:
            stack.pop()
        if stack:
            triples.append((Triple(stack[-1][1], Edge(etype), unit.id), span))
        stack.append((depth, unit.id))

    finish_model()
    if header_span is None:
        raise BtsSyntaxError(SourceSpan(filename, 1, 1), "no models in input")
    return ModelSet(models)


def _check_alt_groups(triples: list[tuple[Triple, SourceSpan]]) -> None:
    """All children of a unit must be 'alt' edges as soon as one is."""
    by_parent: dict[str, list[tuple[Triple, SourceSpan]]] = {}
    for t, span in triples:
        by_parent.setdefault(t.parent, []).append((t, span))
    for siblings in by_parent.values():
        kinds = {t.edge.etype for t, _ in siblings}
        if "alternative" in kinds and kinds != {"alternative"}:
            _, span = next(s for s in siblings if s[0].edge.etype != "alternative")
            raise UnknownEdgeKind(
                span, "siblings of an 'alt' edge must all be 'alt' edges"
            )


# --- canonical text emission -------------------------------------------------

def _render_unitspec(unit: BehavioralUnit) -> str:
    cname = unit.attrs.get("cname")
    bname = unit.attrs.get("bname")
    btype = unit.attrs.get("btype")
    if not (isinstance(cname, str) and isinstance(bname, str) and isinstance(btype, str)):
        raise ValueError(f"unit {unit.id} lacks scalar cname/bname/btype")
    if btype not in _DELIM_OF_BTYPE:
        raise ValueError(f"unit {unit.id} has unknown behavior type {btype!r}")
    opener, closer = _DELIM_OF_BTYPE[btype]
    parts = [f"{cname} {opener}{bname}{closer}"]
    tlink = unit.attrs.get("tlink") or frozenset()
    if tlink:
        parts.append("@" + ",".join(sorted(tlink)))
    status = unit.attrs.get("status")
    if isinstance(status, str) and status != "original":
        parts.append("!" + status)
    op = unit.attrs.get("op")
    if isinstance(op, str) and op:
        parts.append("op=" + op)
    label = unit.attrs.get("label")
    if isinstance(label, str) and label:
        parts.append("label=" + label)
    rel = unit.attrs.get("rel") or frozenset()
    if rel:
        parts.append('rel="' + "; ".join(sorted(rel)) + '"')
    return " ".join(parts)


def emit_bts(model_set: ModelSet) -> str:
    """Render the canonical text form; reparsing yields an equal model set."""
    blocks: list[str] = []
    for model in model_set:
        edges: dict[str, list[tuple[str, str]]] = {}
        for t in model.triples:
            edges.setdefault(t.parent, []).append((t.child, t.edge.etype))
        lines = [f"bt {model.model_id} init" if model.is_init else f"bt {model.model_id}"]

        def walk(unit_id: str, depth: int, etype: str | None) -> None:
            keyword = ""
            if etype is not None and etype != "sequential":
                keyword = _KEYWORD_OF_ETYPE[etype] + " "
            lines.append("  " * depth + keyword + _render_unitspec(model.units[unit_id]))
            for child, child_etype in edges.get(unit_id, ()):
                walk(child, depth + 1, child_etype)

        walk(model.root, 1, None)
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


# --- JSON interchange ---------------------------------------------------------

def _attrs_to_json(unit: BehavioralUnit) -> dict:
    out = {}
    for name, value in unit.attrs.items():
        out[name] = value if isinstance(value, str) else sorted(value)
    return out


def emit_json(model_set: ModelSet) -> str:
    data = {
        "models": [
            {
                "id": m.model_id,
                "init": m.is_init,
                "units": [
                    {
                        "id": u.id,
                        "attrs": _attrs_to_json(u),
                        **(
                            {"span": {"file": u.span.file, "line": u.span.line,
                                      "column": u.span.column}}
                            if u.span is not None else {}
                        ),
                    }
                    for u in m
                ],
                "edges": [
                    {"parent": t.parent, "child": t.child, "etype": t.edge.etype}
                    for t in m.triples
                ],
            }
            for m in model_set
        ]
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise SchemaError(message)


def parse_json(text: str) -> ModelSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from exc
    _require(isinstance(data, dict), "top level must be an object")
    _require(set(data) == {"models"}, f"top-level keys must be ['models'], got {sorted(data)}")
    _require(isinstance(data["models"], list), "'models' must be a list")

    models = []
    for mi, m in enumerate(data["models"]):
        where = f"models[{mi}]"
        _require(isinstance(m, dict), f"{where} must be an object")
        _require(
            set(m) == {"id", "init", "units", "edges"},
            f"{where} keys must be id/init/units/edges, got {sorted(m)}",
        )
        _require(isinstance(m["id"], str) and m["id"], f"{where}.id must be a non-empty string")
        _require(isinstance(m["init"], bool), f"{where}.init must be a boolean")
        _require(isinstance(m["units"], list) and m["units"], f"{where}.units must be a non-empty list")
        _require(isinstance(m["edges"], list), f"{where}.edges must be a list")

        units = []
        for ui, u in enumerate(m["units"]):
            uwhere = f"{where}.units[{ui}]"
            _require(isinstance(u, dict), f"{uwhere} must be an object")
            _require(
                set(u) <= {"id", "attrs", "span"} and {"id", "attrs"} <= set(u),
                f"{uwhere} keys must be id/attrs[/span], got {sorted(u)}",
            )
            _require(isinstance(u["id"], str) and u["id"], f"{uwhere}.id must be a non-empty string")
            _require(isinstance(u["attrs"], dict), f"{uwhere}.attrs must be an object")
            attrs = {}
            for name, value in u["attrs"].items():
                _require(isinstance(name, str) and name.strip() != "",
                         f"{uwhere}.attrs has an empty attribute name")
                if isinstance(value, str):
                    attrs[name] = value
                elif isinstance(value, list):
                    _require(all(isinstance(v, str) for v in value),
                             f"{uwhere}.attrs[{name!r}] items must be strings")
                    _require(len(set(value)) == len(value),
                             f"{uwhere}.attrs[{name!r}] contains duplicate tokens")
                    attrs[name] = frozenset(value)
                else:
                    raise SchemaError(f"{uwhere}.attrs[{name!r}] must be a string or list")
            span = None
            if "span" in u:
                s = u["span"]
                _require(isinstance(s, dict) and set(s) == {"file", "line", "column"},
                         f"{uwhere}.span keys must be file/line/column")
                _require(isinstance(s["file"], str), f"{uwhere}.span.file must be a string")
                _require(isinstance(s["line"], int) and s["line"] >= 1,
                         f"{uwhere}.span.line must be an integer >= 1")
                _require(isinstance(s["column"], int) and s["column"] >= 1,
                         f"{uwhere}.span.column must be an integer >= 1")
                span = SourceSpan(s["file"], s["line"], s["column"])
            units.append(BehavioralUnit(u["id"], attrs, span=span))

        triples = []
        for ei, e in enumerate(m["edges"]):
            ewhere = f"{where}.edges[{ei}]"
            _require(isinstance(e, dict) and set(e) == {"parent", "child", "etype"},
                     f"{ewhere} keys must be parent/child/etype")
            _require(all(isinstance(e[k], str) for k in ("parent", "child", "etype")),
                     f"{ewhere} fields must be strings")
            _require(e["etype"] in EDGE_TYPES,
                     f"{ewhere}.etype must be one of {list(EDGE_TYPES)}, got {e['etype']!r}")
            triples.append(Triple(e["parent"], Edge(e["etype"]), e["child"]))

        models.append(build_model(m["id"], m["init"], units, triples))
    return ModelSet(models)
