use std::io::Read;

use cerny_lab::families::FamilySpec;
use cerny_lab::Automaton;

use crate::UsageError;

/// Loads `-` (stdin), a builtin spec, or a file path.
pub fn load(input: &str) -> Result<Automaton, UsageError> {
    if input == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| UsageError(format!("reading stdin: {e}")))?;
        return Automaton::parse(&text).map_err(|e| UsageError(format!("<stdin>: {e}")));
    }
    if let Some(spec) = FamilySpec::parse(input) {
        return spec.build().map_err(|e| UsageError(format!("{input}: {e}")));
    }
    if ["cerny:", "tr:", "random:"].iter().any(|p| input.starts_with(p)) {
        return Err(UsageError(format!(
            "{input}: malformed builtin, expected cerny:N, tr:N or random:N:M:SEED"
        )));
    }
    let text = std::fs::read_to_string(input).map_err(|e| UsageError(format!("{input}: {e}")))?;
    Automaton::parse(&text).map_err(|e| UsageError(format!("{input}: {e}")))
}
