import os

import pytest

from conftest import ROOT

pytest.importorskip("streamlit")
from streamlit.testing.v1 import AppTest  # noqa: E402

APP = os.path.join(ROOT, "app.py")


@pytest.fixture
def app(tmp_path, monkeypatch):
    # the page writes qde.log and qde_last_check.json into the working directory
    monkeypatch.chdir(tmp_path)
    at = AppTest.from_file(APP, default_timeout=60)
    at.run()
    return at


def test_default_example_renders(app, tmp_path):
    assert not app.exception
    assert app.title[0].value == "Quaternion QDE Lab"
    assert app.session_state["problem"]["name"] == "ex51"
    assert len(app.table) >= 4
    assert "App start" in (tmp_path / "qde.log").read_text(encoding="utf-8")


def test_switch_example_and_run_check(app, tmp_path):
    app.selectbox(key="example_name").select("ex62").run()
    app.slider(key="t").set_value(0.5).run()
    assert app.session_state["problem"]["name"] == "ex62"
    app.button(key="run_check").click().run()
    assert not app.exception
    metrics = {m.label: m.value for m in app.metric}
    assert metrics["Failed"] == "0"
    assert (tmp_path / "qde_last_check.json").exists()


def test_pasted_problem_errors_are_shown(app):
    app.radio(key="source").set_value("Paste JSON").run()
    app.text_area[0].input('{"matrix": {"rows": [["1 2"]]}}').run()
    assert not app.exception
    assert any("could not be read" in e.value for e in app.error)
