"""Importer for a small textual architecture syntax.

The grammar (EBNF in docs/aadl_subset.md) covers component declarations in
six categories with optional features (event data ports), subcomponents and
port connections. Components become elements, and so do their ports,
subcomponents and connections; nested things get the component id as a dot
prefix and their ``parent`` set.

Parsing never raises: problems accumulate as diagnostics with source
positions, the offending declaration is dropped, and the rest of the model
is still returned. ``export_architecture`` writes a model back out so an
imported model can round-trip (ports lose their direction and subcomponent
classifiers are not part of the model; both are syntax-level only).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import ArchElement, ArchitectureModel

CATEGORIES = ("data", "device", "process", "subprogram", "system", "thread")
_SECTIONS = ("features", "subcomponents", "connections")
_UNSUPPORTED = ("properties", "annex", "modes", "flows")

_TOKEN_RE = re.compile(r"->|[A-Za-z][A-Za-z0-9_]*|[:;.]|\S")
_COMMENT_RE = re.compile(r"--[^\n]*")


class ExportError(ValueError):
    """The model holds something the textual subset cannot express."""


@dataclass(frozen=True)
class ImportDiagnostic:
    severity: str
    line: int
    column: int
    message: str

    def to_dict(self) -> dict[str, object]:
        return {
            "severity": self.severity,
            "line": self.line,
            "column": self.column,
            "message": self.message,
        }


@dataclass(frozen=True)
class _Token:
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    for line_no, line in enumerate(_COMMENT_RE.sub("", text).splitlines(), start=1):
        for match in _TOKEN_RE.finditer(line):
            tokens.append(_Token(match.group(), line_no, match.start() + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0
        self.diagnostics: list[ImportDiagnostic] = []
        self.elements: list[ArchElement] = []
        # component name -> set of its declared port names, for connection checks
        self.ports: dict[str, set[str]] = {}
        # local subcomponent name -> classifier component name (or None if opaque)
        self.classifiers: dict[str, dict[str, str | None]] = {}

    # -- token plumbing

    def peek(self) -> _Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> _Token | None:
        token = self.peek()
        if token is not None:
            self.pos += 1
        return token

    def at(self, text: str) -> bool:
        token = self.peek()
        return token is not None and token.text == text

    def _where(self) -> tuple[int, int]:
        token = self.peek() or (self.tokens[-1] if self.tokens else None)
        return (token.line, token.column) if token else (1, 1)

    def error(self, message: str, token: _Token | None = None) -> None:
        line, column = (token.line, token.column) if token else self._where()
        self.diagnostics.append(ImportDiagnostic("error", line, column, message))

    def expect(self, text: str) -> bool:
        if self.at(text):
            self.take()
            return True
        self.error(f"expected {text!r}")
        return False

    def ident(self, what: str) -> str | None:
        token = self.peek()
        if token is not None and re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", token.text):
            self.take()
            return token.text
        self.error(f"expected {what}")
        return None

    def skip_past_semicolon(self) -> None:
        while True:
            token = self.take()
            if token is None or token.text == ";":
                return

    def skip_to_section_or_end(self) -> None:
        while True:
            token = self.peek()
            if token is None or token.text in _SECTIONS + _UNSUPPORTED + ("end",):
                return
            self.take()

    # -- grammar

    def parse(self) -> None:
        while self.peek() is not None:
            if self.peek().text not in CATEGORIES:
                self.error(f"expected a component category, got {self.peek().text!r}")
                while self.peek() is not None and self.peek().text not in CATEGORIES:
                    self.take()
                continue
            self.component()

    def component(self) -> None:
        category = self.take().text
        if self.at("implementation"):
            self.error("unsupported construct: component implementations")
            self._skip_component_body()
            return
        name = self.ident("component name")
        if name is None:
            self._skip_component_body()
            return
        duplicate = name in self.ports
        if duplicate:
            self.error(f"component {name} is already declared")
        self.ports.setdefault(name, set())
        self.classifiers.setdefault(name, {})
        locals_seen: set[str] = set()
        collected: list[ArchElement] = []
        connection_count = 0

        while True:
            token = self.peek()
            if token is None:
                self.error(f"unterminated component {name}")
                break
            if token.text == "end":
                self.take()
                closing_token = self.peek()
                closing = self.ident("closing component name")
                if closing is not None and closing != name:
                    self.error(f"end label {closing!r} does not close {name!r}", closing_token)
                self.expect(";")
                break
            if token.text == "features":
                self.take()
                self._features(name, locals_seen, collected, duplicate)
            elif token.text == "subcomponents":
                self.take()
                self._subcomponents(name, locals_seen, collected, duplicate)
            elif token.text == "connections":
                self.take()
                connection_count = self._connections(name, locals_seen, collected, connection_count)
            elif token.text in _UNSUPPORTED:
                self.error(f"unsupported construct: {token.text}")
                self.take()
                self.skip_to_section_or_end()
            else:
                self.error(f"expected a section or 'end', got {token.text!r}")
                self.take()

        if not duplicate:
            self.elements.append(ArchElement(id=name, name=name, kind=category, parent=None))
            self.elements.extend(collected)

    def _skip_component_body(self) -> None:
        while self.peek() is not None and not self.at("end"):
            self.take()
        if self.at("end"):
            self.take()
            while self.peek() is not None and not self.at(";"):
                self.take()
            self.expect(";")

    def _claim_local(self, component: str, local: str, locals_seen: set[str]) -> bool:
        if local in locals_seen:
            self.error(f"{local} is already declared in {component}")
            return False
        locals_seen.add(local)
        return True

    def _features(
        self, component: str, locals_seen: set[str], collected: list[ArchElement], duplicate: bool
    ) -> None:
        while self.peek() is not None and self.peek().text not in _SECTIONS + _UNSUPPORTED + ("end",):
            port = self.ident("port name")
            if port is None or not self.expect(":"):
                self.skip_past_semicolon()
                continue
            direction = self.peek().text if self.peek() else ""
            if direction not in ("in", "out"):
                self.error("expected port direction 'in' or 'out'")
                self.skip_past_semicolon()
                continue
            self.take()
            if not (self.expect("event") and self.expect("data") and self.expect("port")):
                self.skip_past_semicolon()
                continue
            self.expect(";")
            if not self._claim_local(component, port, locals_seen):
                continue
            if not duplicate:
                self.ports[component].add(port)
                collected.append(
                    ArchElement(id=f"{component}.{port}", name=port, kind="port", parent=component)
                )

    def _subcomponents(
        self, component: str, locals_seen: set[str], collected: list[ArchElement], duplicate: bool
    ) -> None:
        while self.peek() is not None and self.peek().text not in _SECTIONS + _UNSUPPORTED + ("end",):
            local = self.ident("subcomponent name")
            if local is None or not self.expect(":"):
                self.skip_past_semicolon()
                continue
            token = self.peek()
            if token is None or token.text not in CATEGORIES:
                self.error("expected a subcomponent category")
                self.skip_past_semicolon()
                continue
            category = self.take().text
            classifier: str | None = None
            if not self.at(";"):
                classifier = self.ident("classifier name")
                if classifier is not None and classifier not in self.ports:
                    self.error(f"unknown classifier {classifier}")
                    self.skip_past_semicolon()
                    continue
            self.expect(";")
            if not self._claim_local(component, local, locals_seen):
                continue
            if not duplicate:
                self.classifiers[component][local] = classifier
                collected.append(
                    ArchElement(id=f"{component}.{local}", name=local, kind=category, parent=component)
                )

    def _port_ref(self) -> str | None:
        first = self.ident("port reference")
        if first is None:
            return None
        if self.at("."):
            self.take()
            second = self.ident("port name after '.'")
            if second is None:
                return None
            return f"{first}.{second}"
        return first

    def _check_ref(self, component: str, ref: str) -> bool:
        """A reference is bad only when a declaration proves it wrong."""
        if "." not in ref:
            if ref not in self.ports.get(component, set()):
                self.error(f"undeclared port {ref} in {component}")
                return False
            return True
        sub, port = ref.split(".", 1)
        if sub not in self.classifiers.get(component, {}):
            self.error(f"unknown subcomponent {sub} in {component}")
            return False
        classifier = self.classifiers[component][sub]
        if classifier is not None and port not in self.ports.get(classifier, set()):
            self.error(f"undeclared port {port} on {classifier}")
            return False
        return True

    def _connections(
        self, component: str, locals_seen: set[str], collected: list[ArchElement], count: int
    ) -> int:
        while self.peek() is not None and self.peek().text not in _SECTIONS + _UNSUPPORTED + ("end",):
            label: str | None = None
            token = self.peek()
            if token is not None and token.text != "port":
                label = self.ident("connection name")
                if label is None or not self.expect(":"):
                    self.skip_past_semicolon()
                    continue
            if not self.expect("port"):
                self.skip_past_semicolon()
                continue
            src = self._port_ref()
            if src is None or not self.expect("->"):
                self.skip_past_semicolon()
                continue
            dst = self._port_ref()
            if dst is None:
                self.skip_past_semicolon()
                continue
            self.expect(";")
            count += 1
            if not (self._check_ref(component, src) and self._check_ref(component, dst)):
                continue
            if label is None:
                label = f"conn{count}"
                while label in locals_seen:
                    count += 1
                    label = f"conn{count}"
            if not self._claim_local(component, label, locals_seen):
                continue
            collected.append(
                ArchElement(
                    id=f"{component}.{label}", name=f"{src} -> {dst}", kind="connection", parent=component
                )
            )
        return count


def import_architecture(text: str) -> tuple[ArchitectureModel, list[ImportDiagnostic]]:
    """Parse subset text into an architecture model plus diagnostics."""
    parser = _Parser(_tokenize(text))
    parser.parse()
    elements = tuple(sorted(parser.elements, key=lambda e: e.id))
    return ArchitectureModel(elements=elements), parser.diagnostics


def export_architecture(model: ArchitectureModel) -> str:
    """Write a model back as subset text; inverse of import up to syntax sugar."""
    roots = [el for el in sorted(model.elements, key=lambda e: e.id) if el.parent is None]
    children: dict[str, list[ArchElement]] = {el.id: [] for el in roots}
    for el in sorted(model.elements, key=lambda e: e.id):
        if el.parent is None:
            continue
        if el.parent not in children:
            raise ExportError(f"{el.id}: nesting deeper than one level cannot be written")
        children[el.parent].append(el)

    lines: list[str] = []
    for root in roots:
        if root.kind not in CATEGORIES:
            raise ExportError(f"{root.id}: kind {root.kind!r} is not a component category")
        lines.append(f"{root.kind} {root.name}")
        ports = [el for el in children[root.id] if el.kind == "port"]
        subs = [el for el in children[root.id] if el.kind in CATEGORIES]
        conns = [el for el in children[root.id] if el.kind == "connection"]
        leftovers = set(children[root.id]) - set(ports) - set(subs) - set(conns)
        if leftovers:
            bad = sorted(leftovers, key=lambda e: e.id)[0]
            raise ExportError(f"{bad.id}: kind {bad.kind!r} cannot be written in the subset")
        if ports:
            lines.append("  features")
            for el in ports:
                lines.append(f"    {el.name}: out event data port;")
        if subs:
            lines.append("  subcomponents")
            for el in subs:
                lines.append(f"    {el.name}: {el.kind};")
        if conns:
            lines.append("  connections")
            for el in conns:
                local = el.id.removeprefix(f"{root.id}.")
                lines.append(f"    {local}: port {el.name};")
        lines.append(f"end {root.name};")
        lines.append("")
    return "\n".join(lines)
