//! Scenario files, the `check`/`build`/`verify` commands and their reports.

pub mod error;
pub mod report;
pub mod run;
pub mod scenario;

pub use error::WorkbenchError;
pub use report::{Outcome, Report};
pub use run::{run, Command, Flags};
pub use scenario::Scenario;

/// The shipped scenarios, by name.
pub mod corpus {
    pub const BUILTINS: [(&str, &str); 4] = [
        ("z-example", include_str!("../scenarios/z-example.json")),
        ("keller-free", include_str!("../scenarios/keller-free.json")),
        ("a2-quiver", include_str!("../scenarios/a2-quiver.json")),
        ("mutation-negative", include_str!("../scenarios/mutation-negative.json")),
    ];

    pub fn builtin(name: &str) -> Option<&'static str> {
        BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
    }
}

/// A builtin name, or otherwise a path to a scenario file.
pub fn load_scenario(name_or_path: &str) -> Result<Scenario, WorkbenchError> {
    if let Some(text) = corpus::builtin(name_or_path) {
        return Scenario::parse(text);
    }
    let text = std::fs::read_to_string(name_or_path)
        .map_err(|source| WorkbenchError::Io { path: name_or_path.into(), source })?;
    Scenario::parse(&text)
}
