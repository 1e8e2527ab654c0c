//! Objective backed by a resident child process speaking line-delimited JSON.
//!
//! For each evaluation one request line goes to the child's stdin and one
//! response line is read back from its stdout:
//!
//! ```text
//! -> {"x":[3.2,-1.6,-4.8,3.2]}
//! <- {"kwh":760.0}
//! ```
//!
//! A child may answer `{"error":"..."}` instead, which surfaces as a protocol
//! error. Closing the child's stdin asks it to shut down.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use shapebench_core::{EnergyKwh, EvalError, Objective, ShapeVector, SyntheticParams};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalObjectiveConfig {
    /// Executable followed by its arguments.
    pub command: Vec<String>,
    /// Per-request timeout in milliseconds.
    pub timeout_ms: u64,
    /// Restart the child once if it dies before answering.
    pub restart_on_crash: bool,
}

impl ExternalObjectiveConfig {
    pub fn new(command: Vec<String>) -> Self {
        ExternalObjectiveConfig {
            command,
            timeout_ms: 300_000,
            restart_on_crash: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.command.is_empty() || self.command[0].is_empty() {
            return Err(Error::Config(
                "objective.external.command must not be empty".into(),
            ));
        }
        if self.timeout_ms == 0 {
            return Err(Error::Config(
                "objective.external.timeout_ms must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

struct Worker {
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<std::io::Result<String>>,
}

impl Worker {
    fn spawn(command: &[String]) -> Result<Self, EvalError> {
        let mut child = Command::new(&command[0])
            .args(&command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| EvalError::Process(format!("cannot start `{}`: {e}", command[0])))?;
        let stdin = child.stdin.take();
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Worker {
            child,
            stdin,
            lines: rx,
        })
    }

    /// Closes stdin, waits briefly for the child to exit, kills it otherwise.
    /// Returns the exit status as text.
    fn shutdown(mut self) -> String {
        drop(self.stdin.take());
        let deadline = Instant::now() + Duration::from_millis(500);
        while Instant::now() < deadline {
            if let Ok(Some(status)) = self.child.try_wait() {
                return status.to_string();
            }
            thread::sleep(Duration::from_millis(5));
        }
        let _ = self.child.kill();
        match self.child.wait() {
            Ok(status) => format!("killed, {status}"),
            Err(e) => format!("killed, {e}"),
        }
    }
}

enum Exchange {
    Answered(String),
    Died(String),
}

/// Objective that forwards every evaluation to a child process.
pub struct ExternalObjective {
    cfg: ExternalObjectiveConfig,
    worker: Option<Worker>,
    restarted: bool,
    count: u64,
}

impl ExternalObjective {
    /// Starts the child process.
    pub fn spawn(cfg: ExternalObjectiveConfig) -> Result<Self, EvalError> {
        let worker = Worker::spawn(&cfg.command)?;
        Ok(ExternalObjective {
            cfg,
            worker: Some(worker),
            restarted: false,
            count: 0,
        })
    }

    pub fn config(&self) -> &ExternalObjectiveConfig {
        &self.cfg
    }

    fn exchange(&mut self, request: &str) -> Result<Exchange, EvalError> {
        if self.worker.is_none() {
            self.worker = Some(Worker::spawn(&self.cfg.command)?);
        }
        let worker = self.worker.as_mut().expect("worker started above");
        let written = match worker.stdin.as_mut() {
            Some(stdin) => stdin
                .write_all(request.as_bytes())
                .and_then(|_| stdin.flush()),
            None => Err(std::io::ErrorKind::BrokenPipe.into()),
        };
        if let Err(e) = written {
            // A broken pipe means the child is gone; let the reader confirm.
            if e.kind() != std::io::ErrorKind::BrokenPipe {
                return Err(EvalError::Process(format!("cannot write request: {e}")));
            }
        }
        match worker
            .lines
            .recv_timeout(Duration::from_millis(self.cfg.timeout_ms))
        {
            Ok(Ok(line)) => Ok(Exchange::Answered(line)),
            Ok(Err(e)) => Err(EvalError::Process(format!("cannot read response: {e}"))),
            Err(RecvTimeoutError::Timeout) => {
                if let Some(w) = self.worker.take() {
                    w.shutdown();
                }
                Err(EvalError::Timeout(format!(
                    "no response within {} ms",
                    self.cfg.timeout_ms
                )))
            }
            Err(RecvTimeoutError::Disconnected) => {
                let status = self.worker.take().expect("worker present").shutdown();
                Ok(Exchange::Died(status))
            }
        }
    }
}

/// Parses one response line.
pub fn parse_response(line: &str) -> Result<EnergyKwh, EvalError> {
    let value: Value = serde_json::from_str(line.trim())
        .map_err(|e| EvalError::Protocol(format!("malformed response {line:?}: {e}")))?;
    let Value::Object(map) = value else {
        return Err(EvalError::Protocol(format!(
            "response is not an object: {line:?}"
        )));
    };
    if let Some(err) = map.get("error") {
        let msg = err
            .as_str()
            .map(str::to_owned)
            .unwrap_or_else(|| err.to_string());
        return Err(EvalError::Protocol(format!(
            "simulator reported an error: {msg}"
        )));
    }
    let kwh = map
        .get("kwh")
        .and_then(Value::as_f64)
        .ok_or_else(|| EvalError::Protocol(format!("response lacks a numeric `kwh`: {line:?}")))?;
    EnergyKwh::new(kwh)
}

/// Formats one request line, newline included. Components keep full
/// round-trip precision.
pub fn format_request(x: &[f64]) -> String {
    let mut s = serde_json::json!({ "x": x }).to_string();
    s.push('\n');
    s
}

impl Objective for ExternalObjective {
    fn evaluate(&mut self, x: &ShapeVector) -> Result<EnergyKwh, EvalError> {
        self.count += 1;
        let request = format_request(x);
        loop {
            match self.exchange(&request)? {
                Exchange::Answered(line) => return parse_response(&line),
                Exchange::Died(status) => {
                    if self.cfg.restart_on_crash && !self.restarted {
                        self.restarted = true;
                        continue;
                    }
                    return Err(EvalError::Process(format!(
                        "simulator exited before responding ({status})"
                    )));
                }
            }
        }
    }

    fn eval_count(&self) -> u64 {
        self.count
    }
}

impl Drop for ExternalObjective {
    fn drop(&mut self) {
        if let Some(w) = self.worker.take() {
            w.shutdown();
        }
    }
}

/// Serves the synthetic landscape over the line protocol until `input` ends.
/// This is the reference implementation of a simulator child.
pub fn serve_synthetic<R: BufRead, W: Write>(
    params: &SyntheticParams,
    input: R,
    mut output: W,
) -> std::io::Result<()> {
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let reply = match serde_json::from_str::<Value>(&line) {
            Ok(v) => match v.get("x").and_then(Value::as_array) {
                Some(xs) => match xs.iter().map(Value::as_f64).collect::<Option<Vec<f64>>>() {
                    Some(x) => match params.value(&x) {
                        Ok(kwh) => serde_json::json!({ "kwh": kwh }),
                        Err(e) => serde_json::json!({ "error": e.to_string() }),
                    },
                    None => serde_json::json!({ "error": "x must be an array of numbers" }),
                },
                None => serde_json::json!({ "error": "missing `x`" }),
            },
            Err(e) => serde_json::json!({ "error": format!("malformed request: {e}") }),
        };
        writeln!(output, "{reply}")?;
        output.flush()?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn response_parsing() {
        assert_eq!(parse_response(r#"{"kwh": 760.5}"#).unwrap().value(), 760.5);
        assert!(matches!(
            parse_response("not json"),
            Err(EvalError::Protocol(_))
        ));
        assert!(matches!(
            parse_response(r#"{"kwh": -1}"#),
            Err(EvalError::Protocol(_))
        ));
        assert!(matches!(
            parse_response(r#"{"kwh": "1"}"#),
            Err(EvalError::Protocol(_))
        ));
        assert!(matches!(
            parse_response(r#"[1]"#),
            Err(EvalError::Protocol(_))
        ));
        let e = parse_response(r#"{"error": "diverged"}"#).unwrap_err();
        assert!(e.to_string().contains("diverged"));
    }

    #[test]
    fn request_round_trips_precision() {
        let x = [0.1 + 0.2, -1.0 / 3.0, 1e-300, 11.5];
        let line = format_request(&x);
        assert!(line.ends_with('\n'));
        let v: Value = serde_json::from_str(&line).unwrap();
        let back: Vec<f64> = v["x"]
            .as_array()
            .unwrap()
            .iter()
            .map(|e| e.as_f64().unwrap())
            .collect();
        assert_eq!(back, x);
    }

    #[test]
    fn serve_answers_each_line() {
        let input = b"{\"x\":[3.2,-1.6,-4.8,3.2]}\n\nnope\n{\"x\":[1,2]}\n{\"y\":1}\n";
        let mut out = Vec::new();
        serve_synthetic(&SyntheticParams::default(), &input[..], &mut out).unwrap();
        let lines: Vec<&str> = std::str::from_utf8(&out).unwrap().lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(parse_response(lines[0]).unwrap().value(), 760.0);
        for l in &lines[1..] {
            assert!(l.contains("error"), "{l}");
        }
    }

    #[test]
    fn config_validation() {
        assert!(ExternalObjectiveConfig::new(vec![]).validate().is_err());
        assert!(ExternalObjectiveConfig::new(vec!["sim".into()])
            .validate()
            .is_ok());
        let cfg = ExternalObjectiveConfig {
            timeout_ms: 0,
            ..ExternalObjectiveConfig::new(vec!["sim".into()])
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn missing_executable_is_a_process_error() {
        let cfg = ExternalObjectiveConfig::new(vec!["/nonexistent/simulator".into()]);
        assert!(matches!(
            ExternalObjective::spawn(cfg),
            Err(EvalError::Process(_))
        ));
    }
}
