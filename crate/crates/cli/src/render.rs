use crate::commands::Outcome;
use crate::Command;

pub fn text(command: Command, outcome: &Outcome) -> String {
    let mut out = format!("fracsusy {}\n", command.name());
    for line in &outcome.summary {
        out.push_str(line);
        out.push('\n');
    }
    out.push_str(if outcome.pass { "PASS\n" } else { "FAIL\n" });
    out
}
