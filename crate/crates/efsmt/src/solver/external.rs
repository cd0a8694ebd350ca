//! Adapter speaking SMT-LIB 2 text over the standard I/O of a child
//! process.
//!
//! The child is spawned lazily at the first check so the logic line can be
//! chosen from the atoms actually asserted; the full command history is
//! kept, which also allows a transparent respawn when a later assertion
//! upgrades the logic from linear to nonlinear arithmetic. Every failure —
//! spawn, write, timeout, malformed reply — degrades to an unknown verdict
//! with a reason.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver};
use std::time::{Duration, Instant};

use super::smtlib::{self, SatReply};
use super::{CheckResult, SolverError};
use crate::ir::{Formula, VarDecl};

/// How to reach the external solver.
#[derive(Debug, Clone)]
pub struct ExternalConfig {
    pub command: String,
    pub args: Vec<String>,
    /// Per-check deadline.
    pub timeout: Duration,
}

impl ExternalConfig {
    pub fn new(command: impl Into<String>) -> Self {
        ExternalConfig {
            command: command.into(),
            args: Vec::new(),
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone)]
enum LogEntry {
    Assert(Formula),
    Push,
    Pop,
}

#[derive(Debug)]
pub(crate) struct ExternalSolver {
    cfg: ExternalConfig,
    log: Vec<LogEntry>,
    child: Option<Session>,
    nonlinear: bool,
}

impl ExternalSolver {
    pub(crate) fn new(cfg: ExternalConfig) -> Result<Self, SolverError> {
        Ok(ExternalSolver {
            cfg,
            log: Vec::new(),
            child: None,
            nonlinear: false,
        })
    }

    pub(crate) fn assert(&mut self, f: &Formula) {
        if !self.nonlinear && smtlib::is_nonlinear(f) {
            // The live child was started with a linear logic; force a
            // respawn with the nonlinear one at the next check.
            self.nonlinear = true;
            self.child = None;
        }
        self.log.push(LogEntry::Assert(f.clone()));
    }

    pub(crate) fn push(&mut self) {
        self.log.push(LogEntry::Push);
    }

    pub(crate) fn pop(&mut self) {
        self.log.push(LogEntry::Pop);
    }

    pub(crate) fn check(&mut self, decls: &[VarDecl]) -> CheckResult {
        match self.check_inner(decls) {
            Ok(r) => r,
            Err(reason) => {
                // A broken pipe or garbled reply leaves the child in an
                // unusable state; drop it so the next check starts fresh.
                self.child = None;
                CheckResult::Unknown(reason)
            }
        }
    }

    fn check_inner(&mut self, decls: &[VarDecl]) -> Result<CheckResult, String> {
        if self.child.is_none() {
            let mut session = Session::spawn(&self.cfg).map_err(|e| e.to_string())?;
            session.send(&format!(
                "(set-logic {})",
                smtlib::logic_for(decls, self.nonlinear)
            ))?;
            for d in decls {
                for line in smtlib::declare_lines(d) {
                    session.send(&line)?;
                }
            }
            self.child = Some(session);
            // Replay the whole history into the fresh process.
            let log = self.log.clone();
            let session = self.child.as_mut().unwrap();
            for entry in &log {
                session.send_entry(entry, decls)?;
                session.sent += 1;
            }
        } else {
            let session = self.child.as_mut().unwrap();
            let pending: Vec<LogEntry> = self.log[session.sent..].to_vec();
            for entry in &pending {
                session.send_entry(entry, decls)?;
                session.sent += 1;
            }
        }

        let session = self.child.as_mut().unwrap();
        session.send("(check-sat)")?;
        let deadline = Instant::now() + self.cfg.timeout;
        let verdict = session.read_line(deadline)?;
        match smtlib::parse_check_sat(&verdict) {
            SatReply::Unsat => Ok(CheckResult::Unsat),
            SatReply::Unknown(reason) => Ok(CheckResult::Unknown(reason)),
            SatReply::Sat => {
                if decls.is_empty() {
                    return Ok(CheckResult::Sat(crate::ir::Assignment::new()));
                }
                let names: Vec<String> = decls
                    .iter()
                    .map(|d| smtlib::symbol(&d.name))
                    .collect();
                session.send(&format!("(get-value ({}))", names.join(" ")))?;
                let reply = session.read_balanced(deadline)?;
                let model = smtlib::parse_get_value(&reply, decls)
                    .map_err(|e| format!("model parse failure: {e}"))?;
                Ok(CheckResult::Sat(model))
            }
        }
    }
}

#[derive(Debug)]
struct Session {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    /// Number of log entries already sent to this process.
    sent: usize,
}

impl Session {
    fn spawn(cfg: &ExternalConfig) -> Result<Session, SolverError> {
        let mut child = Command::new(&cfg.command)
            .args(&cfg.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|source| SolverError::Spawn {
                command: cfg.command.clone(),
                source,
            })?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        std::thread::spawn(move || {
            let mut reader = BufReader::new(stdout);
            loop {
                let mut line = String::new();
                match reader.read_line(&mut line) {
                    Ok(0) => break,
                    Ok(_) => {
                        if tx.send(Ok(line)).is_err() {
                            break;
                        }
                    }
                    Err(e) => {
                        let _ = tx.send(Err(e));
                        break;
                    }
                }
            }
        });
        Ok(Session {
            child,
            stdin,
            lines: rx,
            sent: 0,
        })
    }

    fn send(&mut self, line: &str) -> Result<(), String> {
        writeln!(self.stdin, "{line}").map_err(|e| format!("write to solver failed: {e}"))?;
        self.stdin
            .flush()
            .map_err(|e| format!("flush to solver failed: {e}"))
    }

    fn send_entry(&mut self, entry: &LogEntry, decls: &[VarDecl]) -> Result<(), String> {
        match entry {
            LogEntry::Assert(f) => self.send(&smtlib::assert_line(f, decls)),
            LogEntry::Push => self.send("(push 1)"),
            LogEntry::Pop => self.send("(pop 1)"),
        }
    }

    /// One nonempty line within the deadline.
    fn read_line(&mut self, deadline: Instant) -> Result<String, String> {
        loop {
            let remaining = deadline
                .checked_duration_since(Instant::now())
                .ok_or_else(|| "timeout waiting for solver reply".to_string())?;
            match self.lines.recv_timeout(remaining) {
                Ok(Ok(line)) => {
                    if !line.trim().is_empty() {
                        return Ok(line);
                    }
                }
                Ok(Err(e)) => return Err(format!("read from solver failed: {e}")),
                Err(mpsc::RecvTimeoutError::Timeout) => {
                    let _ = self.child.kill();
                    return Err(format!(
                        "solver exceeded the {:?} timeout",
                        deadline.elapsed() + Duration::from_secs(0)
                    ));
                }
                Err(mpsc::RecvTimeoutError::Disconnected) => {
                    return Err("solver process closed its output".into())
                }
            }
        }
    }

    /// Accumulates lines until the parentheses balance.
    fn read_balanced(&mut self, deadline: Instant) -> Result<String, String> {
        let mut buf = String::new();
        loop {
            buf.push_str(&self.read_line(deadline)?);
            let mut depth: i64 = 0;
            let mut seen_any = false;
            for c in buf.chars() {
                match c {
                    '(' => {
                        depth += 1;
                        seen_any = true;
                    }
                    ')' => depth -= 1,
                    _ => {}
                }
            }
            if seen_any && depth <= 0 {
                return Ok(buf);
            }
            if !seen_any && !buf.trim().is_empty() {
                // A bare token (e.g. an error word) will never balance.
                return Ok(buf);
            }
        }
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
