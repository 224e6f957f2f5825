use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::os::unix::process::CommandExt;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use super::{BackendConfig, BackendKind, SolveOutcome};
use crate::qbf::QbfInstance;

/// Environment variable holding the default solver command template.
pub const SOLVER_ENV: &str = "HYPERQSAT_SOLVER";

pub fn default_solver_template() -> Option<String> {
    std::env::var(SOLVER_ENV)
        .ok()
        .filter(|s| !s.trim().is_empty())
}

/// Collects the literals of all `V` lines. Each line is a list of signed
/// integers, optionally closed by `0`.
pub fn parse_certificate(stdout: &str) -> Result<Vec<i32>, String> {
    let mut lits = Vec::new();
    for line in stdout.lines() {
        let Some(rest) = line.strip_prefix('V') else {
            continue;
        };
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            continue;
        }
        for tok in rest.split_whitespace() {
            let l: i32 = tok
                .parse()
                .map_err(|_| format!("malformed certificate literal `{tok}`"))?;
            if l != 0 {
                lits.push(l);
            }
        }
    }
    Ok(lits)
}

/// Writes `inst` to a temporary QDIMACS file and runs the configured
/// command on it through `sh -c`.
pub fn solve_external(inst: &QbfInstance, cfg: &BackendConfig) -> SolveOutcome {
    let BackendKind::External(template) = &cfg.kind else {
        return SolveOutcome::Unknown("backend is not external".into());
    };
    if !template.contains("{file}") {
        return SolveOutcome::Unknown("solver command lacks the {file} placeholder".into());
    }
    let mut file = match tempfile::Builder::new().suffix(".qdimacs").tempfile() {
        Ok(f) => f,
        Err(e) => return SolveOutcome::Unknown(format!("cannot create temporary file: {e}")),
    };
    if let Err(e) = file
        .write_all(inst.to_qdimacs().as_bytes())
        .and_then(|()| file.flush())
    {
        return SolveOutcome::Unknown(format!("cannot write instance: {e}"));
    }
    let path = file.path().display().to_string();
    let command = template.replace("{file}", &shell_quote(&path));
    let (status, stdout) = match run(&command, cfg.time_limit) {
        Ok(r) => r,
        Err(reason) => return SolveOutcome::Unknown(reason),
    };
    match status {
        Some(10) => {}
        Some(20) => return SolveOutcome::Unsat,
        Some(code) => return SolveOutcome::Unknown(format!("solver error: exit status {code}")),
        None => return SolveOutcome::Unknown("solver error: killed by signal".into()),
    }
    let lits = match parse_certificate(&stdout) {
        Ok(l) => l,
        Err(reason) => return SolveOutcome::Unknown(reason),
    };
    let given: HashSet<i32> = lits.into_iter().collect();
    let mut outer = BTreeMap::new();
    for v in inst.outer() {
        let id = v.id() as i32;
        let value = if given.contains(&id) {
            true
        } else if given.contains(&-id) {
            false
        } else if cfg.strict_certificate {
            return SolveOutcome::Unknown(format!("certificate misses variable {id}"));
        } else {
            false
        };
        outer.insert(inst.vars.prop(*v).clone(), value);
    }
    SolveOutcome::Sat(outer)
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

/// Runs `command` in its own process group, killing the whole group when
/// `limit` elapses. Returns the exit code (`None` if signalled) and stdout.
fn run(command: &str, limit: Duration) -> Result<(Option<i32>, String), String> {
    let mut child = Command::new("sh")
        .arg("-c")
        .arg(command)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .process_group(0)
        .spawn()
        .map_err(|e| format!("cannot spawn solver: {e}"))?;
    let mut pipe = child.stdout.take().expect("stdout is piped");
    let reader = thread::spawn(move || {
        let mut buf = Vec::new();
        pipe.read_to_end(&mut buf).map(|_| buf)
    });
    let deadline = Instant::now() + limit;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) if Instant::now() >= deadline => {
                let _ = Command::new("kill")
                    .args(["-KILL", "--", &format!("-{}", child.id())])
                    .stderr(Stdio::null())
                    .status();
                let _ = child.kill();
                let _ = child.wait();
                let _ = reader.join();
                return Err("solver timeout".into());
            }
            Ok(None) => thread::sleep(Duration::from_millis(2)),
            Err(e) => return Err(format!("cannot wait for solver: {e}")),
        }
    };
    let stdout = reader
        .join()
        .map_err(|_| "solver output reader panicked".to_string())?
        .map_err(|e| format!("cannot read solver output: {e}"))?;
    Ok((status.code(), String::from_utf8_lossy(&stdout).into_owned()))
}
