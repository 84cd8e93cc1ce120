use std::io::{self, BufRead, IsTerminal, Write};

use crate::relcore::RelName;

/// Asks whether a missing table may be downloaded.
pub trait Prompter: Send + Sync {
    /// Whether a person can answer. When false the prompt policy behaves
    /// as auto.
    fn interactive(&self) -> bool;
    fn confirm(&self, name: &RelName, url: &str) -> bool;
}

/// Asks on standard error and reads the answer from standard input when
/// both are terminals. An empty answer means yes.
#[derive(Debug, Clone, Copy, Default)]
pub struct TtyPrompter;

impl Prompter for TtyPrompter {
    fn interactive(&self) -> bool {
        io::stdin().is_terminal() && io::stderr().is_terminal()
    }

    fn confirm(&self, name: &RelName, url: &str) -> bool {
        let mut err = io::stderr();
        let _ = write!(err, "{name} is not cached; download it from {url}? (Y/n) ");
        let _ = err.flush();
        let mut answer = String::new();
        if io::stdin().lock().read_line(&mut answer).is_err() {
            return false;
        }
        matches!(answer.trim(), "" | "y" | "Y" | "yes" | "Yes")
    }
}

/// Never interactive.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoPrompt;

impl Prompter for NoPrompt {
    fn interactive(&self) -> bool {
        false
    }

    fn confirm(&self, _: &RelName, _: &str) -> bool {
        true
    }
}
