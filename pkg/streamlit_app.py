# In parallel-cfs/streamlit_app.py

import tempfile
from pathlib import Path

import pandas as pd
import streamlit as st
from dotenv import load_dotenv

from selection_graph import run_selection
from tools.config import EngineConfig, SearchConfig, log_level
from tools.errors import CfsError
from tools.utils import configure_logging

# --- Initialization ---
load_dotenv()
configure_logging(log_level())

st.set_page_config(page_title="Feature Selection", page_icon="📊", layout="centered")
st.title("📊 Correlation-based Feature Selection")

# --- Session State Setup ---
if "history" not in st.session_state:
    st.session_state.history = []


def _save_upload(upload) -> Path:
    tmp = Path(tempfile.mkdtemp()) / upload.name
    tmp.write_bytes(upload.getvalue())
    return tmp


upload = st.file_uploader("Dataset (CSV with a header row)", type=["csv"])
if upload is None:
    st.info("Upload a CSV to begin. Numeric columns are discretized automatically.")
    st.stop()

preview = pd.read_csv(upload, nrows=20, dtype=str)
st.dataframe(preview, use_container_width=True)

with st.form("run_form"):
    class_column = st.selectbox("Class column", list(preview.columns), index=len(preview.columns) - 1)
    engine = st.selectbox("Engine", ["horizontal", "vertical", "sequential"])
    workers = st.number_input("Workers", min_value=1, max_value=64, value=EngineConfig.from_env().workers)
    discrete = st.checkbox("Input is already integer coded")
    locally_predictive = st.checkbox("Add locally predictive features", value=True)
    submitted = st.form_submit_button("Select features")

if submitted:
    path = _save_upload(upload)
    try:
        with st.spinner("Searching..."):
            state = run_selection(
                input_path=path,
                class_column=class_column,
                engine=EngineConfig.from_env(layout=engine, workers=int(workers)),
                search=SearchConfig.from_env(locally_predictive=locally_predictive),
                discrete=discrete,
                with_timings=True,
            )
    except CfsError as e:
        st.error(str(e))
        st.stop()

    report = state["report"]
    st.session_state.history.append(
        {
            "file": upload.name,
            "engine": engine,
            "workers": int(workers),
            "selected": ", ".join(report.selected),
            "merit": round(report.merit, 6),
            "pairs_computed": report.pairs_computed,
            "total_ms": round(sum(report.timings_ms.values()), 1),
        }
    )

    st.subheader("Selected features")
    st.write(", ".join(report.selected) or "none")
    col1, col2, col3 = st.columns(3)
    col1.metric("Merit", f"{report.merit:.4f}")
    col2.metric("Search merit", f"{report.search_merit:.4f}")
    col3.metric("Pairs computed", report.pairs_computed)
    st.bar_chart(pd.Series(report.timings_ms, name="ms"))
    with st.expander("Report JSON"):
        st.code(report.to_json(), language="json")

if st.session_state.history:
    st.subheader("Previous runs")
    st.dataframe(pd.DataFrame(st.session_state.history), use_container_width=True)
