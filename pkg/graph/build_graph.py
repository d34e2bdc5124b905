from pathlib import Path
from typing import Optional, Tuple

from langgraph.graph import END, StateGraph

from config.settings import get_config
from execution.trial_runner import prepare, run_trials, summarize
from schemas.experiment import ExperimentConfig, ExperimentState
from utils.fs import FileSystemUtils


def output_paths(config: ExperimentConfig) -> Tuple[Path, Path]:
    """JSON-lines records and the CSV summary next to them"""
    if config.out_path:
        records = Path(config.out_path)
    else:
        name = f"{config.scheme.value}-n{config.n}-{config.adversary}-seed{config.seed}.jsonl"
        records = Path(get_config("output_dir")) / name
    return records, records.with_suffix(".summary.csv")



def wire_path(records_path: Path, trial: int) -> Path:
    """Received-wire dump of one failing qubit trial, next to the records"""
    return records_path.with_name(f"{records_path.stem}.trial{trial}.wire")


def create_workflow():
    """Build the prepare -> simulate -> check -> persist experiment workflow"""

    workflow = StateGraph(ExperimentState)

    # Define nodes
    def prepare_node(state: ExperimentState) -> dict:
        print("🧭 Preparing sync string and protocol parameters...")
        s, params = prepare(state.config)
        if params is not None:
            print(f"   r={params.r} N={params.N} s={params.s} r'={params.r_prime} l={params.l}")
        return {"sync_string": s, "params": params}

    def simulate_node(state: ExperimentState) -> dict:
        print(f"🎲 Running {state.config.trials} trials ({state.config.adversary})...")
        records = run_trials(state.config, state.sync_string, state.params, workers=state.workers)
        return {"records": records}

    def check_node(state: ExperimentState) -> dict:
        print("✅ Checking error bounds...")
        summary = summarize(state.config, state.records)
        if summary.violations:
            print(f"   ⚠️  {summary.violations} trial(s) violated a bound")
        return {"summary": summary}

    def persist_node(state: ExperimentState) -> dict:
        print("💾 Writing results...")
        records_path, summary_path = output_paths(state.config)
        FileSystemUtils.write_jsonl(records_path, state.records)
        row = state.summary.csv_row()
        FileSystemUtils.write_csv(summary_path, list(row), [row])
        written = [str(records_path), str(summary_path)]
        for record in state.records:
            if record.wire is not None:
                path = wire_path(records_path, record.trial)
                FileSystemUtils.write_file(path, record.wire)
                written.append(str(path))
        return {"written_files": written}

    def should_simulate(state: ExperimentState) -> str:
        """Nothing to simulate for an empty run"""
        if state.config.trials > 0:
            return "simulate"
        return "check"

    # Add nodes
    workflow.add_node("prepare", prepare_node)
    workflow.add_node("simulate", simulate_node)
    workflow.add_node("check", check_node)
    workflow.add_node("persist", persist_node)

    # Add edges
    workflow.set_entry_point("prepare")
    workflow.add_conditional_edges("prepare", should_simulate, {
        "simulate": "simulate",
        "check": "check"
    })
    workflow.add_edge("simulate", "check")
    workflow.add_edge("check", "persist")
    workflow.add_edge("persist", END)

    return workflow.compile()


def run_experiment(config: ExperimentConfig, workers: Optional[int] = None) -> ExperimentState:
    """Run the workflow and hand back the final state as a model"""
    final_state = create_workflow().invoke(ExperimentState(config=config, workers=workers))
    # LangGraph returns a dictionary, not ExperimentState object
    if isinstance(final_state, dict):
        return ExperimentState(**final_state)
    return final_state
