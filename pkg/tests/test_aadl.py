from __future__ import annotations

import pytest

from reqimpact.aadl import ExportError, export_architecture, import_architecture
from reqimpact.model import ArchElement, ArchitectureModel, validate_architecture_model
from conftest import fixture_path

CONNECTED = """
device D
  features
    p_out: out event data port;
end D;

system S
  features
    s_in: in event data port;
  subcomponents
    d1: device D;
    d2: device;
  connections
    c1: port d1.p_out -> s_in;
    port d2.anything -> s_in;
end S;
"""


def errors(diagnostics):
    return [d for d in diagnostics if d.severity == "error"]


def by_id(model):
    return {el.id: el for el in model.elements}


def test_import_fixture_file():
    text = fixture_path("rpm", "architecture.aadl").read_text(encoding="utf-8")
    model, diagnostics = import_architecture(text)
    assert diagnostics == []
    elements = by_id(model)
    assert sorted(elements) == [
        "CPC",
        "CPC.AR",
        "CPC.WC",
        "HPC",
        "HPC.AS",
        "HPC.SDM",
        "HPC.WS",
        "SD",
        "SD.sd_temp_edp1",
        "SDC",
        "SDC.sdc_temp_edp1",
        "SDC.sdc_temp_edp2",
    ]
    assert elements["SD"].kind == "device"
    assert elements["SD"].parent is None
    port = elements["SD.sd_temp_edp1"]
    assert (port.name, port.kind, port.parent) == ("sd_temp_edp1", "port", "SD")
    sub = elements["HPC.SDM"]
    assert (sub.name, sub.kind, sub.parent) == ("SDM", "process", "HPC")
    assert validate_architecture_model(model) == []


def test_import_connections_and_opaque_subcomponents():
    model, diagnostics = import_architecture(CONNECTED)
    assert diagnostics == []
    elements = by_id(model)
    named = elements["S.c1"]
    assert (named.name, named.kind, named.parent) == ("d1.p_out -> s_in", "connection", "S")
    # the unlabeled connection gets a generated local name
    auto = elements["S.conn2"]
    assert auto.name == "d2.anything -> s_in"
    # d2 has no classifier, so its port cannot be proven wrong
    assert elements["S.d2"].kind == "device"


def test_connection_reference_checks():
    bad = CONNECTED.replace("port d1.p_out -> s_in;", "port d1.say_what -> s_in;")
    model, diagnostics = import_architecture(bad)
    assert [d.message for d in errors(diagnostics)] == ["undeclared port say_what on D"]
    assert "S.c1" not in by_id(model)

    bad = CONNECTED.replace("port d1.p_out -> s_in;", "port ghost.p_out -> s_in;")
    _, diagnostics = import_architecture(bad)
    assert [d.message for d in errors(diagnostics)] == ["unknown subcomponent ghost in S"]

    bad = CONNECTED.replace("port d1.p_out -> s_in;", "port nowhere -> s_in;")
    _, diagnostics = import_architecture(bad)
    assert [d.message for d in errors(diagnostics)] == ["undeclared port nowhere in S"]


def test_classifiers_must_be_declared_first():
    text = """
system S
  subcomponents
    d1: device D;
end S;
"""
    model, diagnostics = import_architecture(text)
    assert [d.message for d in errors(diagnostics)] == ["unknown classifier D"]
    assert sorted(by_id(model)) == ["S"]


def test_duplicate_component_is_reported_once():
    text = """
device A
end A;
device A
  features
    p1: out event data port;
end A;
"""
    model, diagnostics = import_architecture(text)
    assert [d.message for d in errors(diagnostics)] == ["component A is already declared"]
    # the first declaration wins; the second's port is not attached
    assert sorted(by_id(model)) == ["A"]


def test_unsupported_constructs_are_skipped():
    text = """
system S
  properties
    Period = 10;
  subcomponents
    t1: thread;
end S;

process implementation P.impl
end P.impl;
"""
    model, diagnostics = import_architecture(text)
    messages = [d.message for d in errors(diagnostics)]
    assert "unsupported construct: properties" in messages
    assert "unsupported construct: component implementations" in messages
    # the rest of the component still parses
    assert "S.t1" in by_id(model)


def test_end_label_mismatch():
    text = """
device A
end B;
"""
    model, diagnostics = import_architecture(text)
    assert [d.message for d in errors(diagnostics)] == ["end label 'B' does not close 'A'"]
    assert "A" in by_id(model)


def test_diagnostics_carry_positions():
    _, diagnostics = import_architecture("device A\nend B;\n")
    assert len(diagnostics) == 1
    assert (diagnostics[0].line, diagnostics[0].column) == (2, 5)
    assert diagnostics[0].to_dict()["severity"] == "error"


def test_export_then_reimport_is_identity():
    for source in (fixture_path("rpm", "architecture.aadl").read_text(encoding="utf-8"), CONNECTED):
        model, diagnostics = import_architecture(source)
        assert errors(diagnostics) == []
        text = export_architecture(model)
        again, diagnostics = import_architecture(text)
        assert diagnostics == []
        assert again == model
        # and the text itself is a fixed point
        assert export_architecture(again) == text


def test_export_rejects_what_the_subset_cannot_say():
    deep = ArchitectureModel(
        elements=(
            ArchElement(id="a", name="a", kind="system"),
            ArchElement(id="a.b", name="b", kind="process", parent="a"),
            ArchElement(id="a.b.c", name="c", kind="thread", parent="a.b"),
        )
    )
    with pytest.raises(ExportError, match="deeper than one level"):
        export_architecture(deep)

    weird = ArchitectureModel(elements=(ArchElement(id="x", name="x", kind="galaxy"),))
    with pytest.raises(ExportError, match="not a component category"):
        export_architecture(weird)

    nested_weird = ArchitectureModel(
        elements=(
            ArchElement(id="a", name="a", kind="system"),
            ArchElement(id="a.x", name="x", kind="bus", parent="a"),
        )
    )
    with pytest.raises(ExportError, match="cannot be written"):
        export_architecture(nested_weird)
