# app.py - Quaternion QDE Lab (Streamlit workbench)

import json

import streamlit as st

from qde_cli import printed_form_gates, run_gates
from qde_config import configure_logging
from qde_problem import problem_from_dict
from qde_spectra import full_spectrum
from qde_system import exp_at, fundamental_matrix
from qde_workbench import (
    basis_rows,
    gate_rows,
    load_last_check,
    matrix_rows,
    safe_run,
    save_last_check,
    spectrum_rows,
)
from qde_worked import worked_example, worked_names

st.set_page_config(
    page_title="Quaternion QDE Lab",
    layout="wide",
    initial_sidebar_state="expanded",
)

# --- LOGGING (qde.log) ---
logger = configure_logging(log_file="qde.log", level="INFO")

logger.info("App start / rerun")

ERROR_TEXT = {
    "bad_input": "The problem could not be read",
    "numerical": "The computation failed",
    "unknown": "Unexpected error",
}


def _show_error(value, code):
    st.error(f"{ERROR_TEXT.get(code, code)}: {value}")


# --- SIDEBAR: problem selection ---
with st.sidebar:
    st.header("Problem")
    source = st.radio("Source", ["Worked example", "Paste JSON"], key="source")
    if source == "Worked example":
        name = st.selectbox("Example", worked_names(), key="example_name")
        example, err = safe_run(worked_example, name)
        if err:
            _show_error(example, err)
        else:
            st.session_state["problem"] = {"name": name, "matrix": example.matrix, "printed": True}
            st.caption(example.title)
    else:
        raw = st.text_area("ProblemFile JSON", value='{"matrix": {"rows": [["i", 1], [0, "1+i"]]}}', height=200)
        parsed, err = safe_run(lambda text: problem_from_dict(json.loads(text), name="pasted"), raw)
        if err:
            _show_error(parsed, err)
        elif parsed.matrix is None:
            st.warning("The problem has no matrix.")
        else:
            st.session_state["problem"] = {"name": "pasted", "matrix": parsed.matrix, "printed": False}
    t = st.slider("t", min_value=0.0, max_value=5.0, value=1.0, step=0.05, key="t")

st.title("Quaternion QDE Lab")

problem = st.session_state.get("problem")
if not problem:
    st.info("Choose a worked example or paste a problem in the sidebar.")
    st.stop()

a = problem["matrix"]
st.subheader(f"System {problem['name']}")
with st.expander("Coefficient matrix A", expanded=True):
    st.table(matrix_rows(a))

tab_spec, tab_basis, tab_exp, tab_gates = st.tabs(["Spectrum", "Fundamental basis", "exp(At)", "Gates"])

with tab_spec:
    spectrum, err = safe_run(full_spectrum, a)
    if err:
        _show_error(spectrum, err)
    else:
        st.table(spectrum_rows(spectrum))

with tab_basis:
    basis, err = safe_run(fundamental_matrix, a)
    if err:
        _show_error(basis, err)
        basis = None
    else:
        st.table(basis_rows(basis))

with tab_exp:
    e, err = safe_run(exp_at, a, t, basis=basis) if basis is not None else safe_run(exp_at, a, t, method="series")
    if err:
        _show_error(e, err)
    else:
        st.caption(f"exp(A·{t:g})")
        st.table(matrix_rows(e))

with tab_gates:
    last = load_last_check()
    if last["rows"]:
        st.caption(f"Last check: {last['problem']} ({last['failed']} failed)")
    if st.button("Run check", key="run_check"):

        def _all_gates():
            results = run_gates(a, system=problem["name"], t=t if t > 0 else 1.0)
            if problem["printed"]:
                results += printed_form_gates(problem["name"])
            return results

        results, err = safe_run(_all_gates)
        if err:
            _show_error(results, err)
        else:
            rows = gate_rows(results)
            save_last_check(problem["name"], rows)
            last = load_last_check()
    if last["rows"]:
        cols = st.columns(2)
        cols[0].metric("Gates", len(last["rows"]))
        cols[1].metric("Failed", last["failed"])
        st.table(last["rows"])
