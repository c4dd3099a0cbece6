use std::path::PathBuf;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Json,
    Text,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Outer iterations before giving up; at least 1.
    pub max_iterations: usize,
    /// Record a per-call trace and per-iteration approximation snapshots.
    pub trace: bool,
    pub dimacs_path: Option<PathBuf>,
    pub output_format: OutputFormat,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 1000,
            trace: false,
            dimacs_path: None,
            output_format: OutputFormat::Json,
        }
    }
}

impl SolverConfig {
    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n.max(1);
        self
    }

    pub fn with_trace(mut self, trace: bool) -> Self {
        self.trace = trace;
        self
    }
}
