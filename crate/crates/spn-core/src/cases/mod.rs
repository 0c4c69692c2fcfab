//! Reproducible desk-scale scenarios: the construction-process model with
//! schedule feasibility checking, and rule-checking pipes over synthetic
//! data.

pub mod construction;
pub mod pipes;

pub use construction::{
    assess_terminal_state, generate_construction_model, model_shape, parse_schedule,
    run_construction, BuildingSpec,
    CaseError, ChainConfig, Discipline, Feasibility, ScheduleEntry, StuckToken, Verdict,
};
pub use pipes::{
    build_pipe, generate_checking_data, pipes_for_checking_data, pipes_model_graph,
    property_existence_pipe, run_pipes, CheckingPipe, PipeOutcome, PipeReport,
};
