use std::collections::{HashMap, HashSet};
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use log::{info, warn};
use serde::{Deserialize, Serialize};

use crate::dataset::EvalTask;
use crate::error::DatasetError;

use super::client::ModelClient;
use super::Transport;

/// One (task, k) request outcome. Exactly one of `response` and `error` is
/// set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord")]
pub struct CompletionRecord {
    pub task_id: String,
    pub k: usize,
    pub prompt: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub response: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub latency_ms: u64,
    pub attempts: u32,
}

#[derive(Deserialize)]
struct RawRecord {
    task_id: String,
    k: usize,
    prompt: String,
    response: Option<String>,
    error: Option<String>,
    latency_ms: u64,
    attempts: u32,
}

impl TryFrom<RawRecord> for CompletionRecord {
    type Error = String;

    fn try_from(r: RawRecord) -> Result<Self, String> {
        if r.response.is_some() == r.error.is_some() {
            return Err(format!(
                "record ({}, {}) must have exactly one of response and error",
                r.task_id, r.k
            ));
        }
        Ok(Self {
            task_id: r.task_id,
            k: r.k,
            prompt: r.prompt,
            response: r.response,
            error: r.error,
            latency_ms: r.latency_ms,
            attempts: r.attempts,
        })
    }
}

impl CompletionRecord {
    pub fn is_success(&self) -> bool {
        self.response.is_some()
    }

    fn key(&self) -> (String, usize) {
        (self.task_id.clone(), self.k)
    }
}

fn io_err(path: &Path, source: std::io::Error) -> DatasetError {
    DatasetError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads a ledger. A torn final line from an interrupted run is dropped;
/// any other malformed line is an error.
pub fn load_ledger(path: &Path) -> Result<Vec<CompletionRecord>, DatasetError> {
    let contents = match fs::read_to_string(path) {
        Ok(c) => c,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(path, e)),
    };
    let lines: Vec<(usize, &str)> = contents
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let mut out = Vec::with_capacity(lines.len());
    for (pos, &(i, line)) in lines.iter().enumerate() {
        match serde_json::from_str::<CompletionRecord>(line) {
            Ok(r) => out.push(r),
            Err(e) if pos + 1 == lines.len() && !contents.ends_with('\n') => {
                warn!("ignoring truncated final ledger line {}: {e}", i + 1);
            }
            Err(e) => {
                return Err(DatasetError::Parse {
                    line: i + 1,
                    message: e.to_string(),
                })
            }
        }
    }
    Ok(out)
}

struct Ledger {
    path: PathBuf,
    writer: Mutex<BufWriter<File>>,
}

impl Ledger {
    fn open(path: &Path) -> Result<Self, DatasetError> {
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| io_err(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            writer: Mutex::new(BufWriter::new(file)),
        })
    }

    fn append(&self, record: &CompletionRecord) -> Result<(), DatasetError> {
        let mut line = serde_json::to_string(record).expect("records serialize");
        line.push('\n');
        let mut w = self.writer.lock().unwrap_or_else(|p| p.into_inner());
        w.write_all(line.as_bytes())
            .and_then(|_| w.flush())
            .map_err(|e| io_err(&self.path, e))
    }
}

/// Rewrites the ledger with one record per key in canonical order.
fn compact(path: &Path, records: &[CompletionRecord]) -> Result<(), DatasetError> {
    let tmp = path.with_extension("jsonl.tmp");
    let mut w = BufWriter::new(File::create(&tmp).map_err(|e| io_err(&tmp, e))?);
    for r in records {
        serde_json::to_writer(&mut w, r).expect("records serialize");
        w.write_all(b"\n").map_err(|e| io_err(&tmp, e))?;
    }
    w.flush().map_err(|e| io_err(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Queries every (task, k) pair with at most `max_parallel` requests in
/// flight.
///
/// With a `ledger`, successful records already in it are reused and new
/// outcomes are appended as they complete; on return the file holds the
/// returned records in canonical order. Failed requests become error
/// records and never abort the batch.
pub fn run_batch<T: Transport>(
    tasks: &[EvalTask],
    client: &ModelClient<T>,
    ledger: Option<&Path>,
    max_parallel: usize,
) -> Result<Vec<CompletionRecord>, DatasetError> {
    let mut latest: HashMap<(String, usize), CompletionRecord> = HashMap::new();
    if let Some(path) = ledger {
        for r in load_ledger(path)? {
            latest.insert(r.key(), r);
        }
    }
    let done: HashSet<(String, usize)> = latest
        .iter()
        .filter(|(_, r)| r.is_success())
        .map(|(k, _)| k.clone())
        .collect();

    let pending: Vec<(usize, usize)> = tasks
        .iter()
        .enumerate()
        .flat_map(|(t, task)| (0..task.controls.len()).map(move |k| (t, k)))
        .filter(|&(t, k)| !done.contains(&(tasks[t].id.clone(), k)))
        .collect();
    info!(
        "{} requests pending, {} reused from ledger",
        pending.len(),
        done.len()
    );

    let writer = ledger.map(Ledger::open).transpose()?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<CompletionRecord>> = Mutex::new(Vec::with_capacity(pending.len()));
    let write_error: Mutex<Option<DatasetError>> = Mutex::new(None);
    let simulated = client.transport().simulated();

    let workers = max_parallel.max(1).min(pending.len().max(1));
    thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(t, k)) = pending.get(i) else { break };
                let task = &tasks[t];
                let prompt = task.prompt(k);
                let start = Instant::now();
                let outcome = client.complete(&prompt);
                let latency_ms = if simulated {
                    0
                } else {
                    start.elapsed().as_millis() as u64
                };
                let (response, error, attempts) = match outcome {
                    Ok(c) => (Some(c.text), None, c.attempts),
                    Err(f) => {
                        warn!("task {} k={k} failed: {}", task.id, f.error);
                        (None, Some(f.error.to_string()), f.attempts)
                    }
                };
                let record = CompletionRecord {
                    task_id: task.id.clone(),
                    k,
                    prompt: prompt.text(),
                    response,
                    error,
                    latency_ms,
                    attempts,
                };
                if let Some(w) = &writer {
                    if let Err(e) = w.append(&record) {
                        write_error.lock().unwrap().get_or_insert(e);
                        next.store(pending.len(), Ordering::Relaxed);
                    }
                }
                results.lock().unwrap().push(record);
            });
        }
    });
    if let Some(e) = write_error.into_inner().unwrap() {
        return Err(e);
    }
    drop(writer);

    for r in results.into_inner().unwrap() {
        latest.insert(r.key(), r);
    }
    let mut out = Vec::new();
    for task in tasks {
        for k in 0..task.controls.len() {
            if let Some(r) = latest.remove(&(task.id.clone(), k)) {
                out.push(r);
            }
        }
    }
    if let Some(path) = ledger {
        compact(path, &out)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controls::{ControlSubset, ControlVector};
    use crate::dataset::Prompt;
    use crate::error::ClientError;
    use crate::feature::{Feature, FeatureVector};
    use crate::modelclient::{ConstructiveTransport, EndpointConfig};
    use std::sync::atomic::AtomicU32;

    fn tasks(n: usize, k: usize) -> Vec<EvalTask> {
        (0..n)
            .map(|i| EvalTask {
                id: format!("task{i}"),
                instruction: "Write something.".into(),
                input: String::new(),
                subset: ControlSubset::new(vec![Feature::TWord]).unwrap(),
                controls: (0..k)
                    .map(|j| ControlVector::from_pairs([(Feature::TWord, (3 + i + j) as f64)]))
                    .collect(),
                sampled: vec![FeatureVector::zeros(); k],
                reference: FeatureVector::zeros(),
                sigma: 0.1,
            })
            .collect()
    }

    fn cfg() -> EndpointConfig {
        EndpointConfig {
            max_retries: 1,
            backoff_ms: 0,
            ..Default::default()
        }
    }

    struct Counting {
        calls: AtomicU32,
    }

    impl Transport for Counting {
        fn send(&self, p: &Prompt) -> Result<String, ClientError> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            ConstructiveTransport.send(p)
        }
        fn simulated(&self) -> bool {
            true
        }
    }

    struct FailOne;

    impl Transport for FailOne {
        fn send(&self, p: &Prompt) -> Result<String, ClientError> {
            if p.user.contains("[t_word: 12]") {
                Err(ClientError::Timeout)
            } else {
                Ok("ok.".into())
            }
        }
    }

    #[test]
    fn cardinality_and_order() {
        let client = ModelClient::new(ConstructiveTransport, &cfg());
        let recs = run_batch(&tasks(10, 5), &client, None, 4).unwrap();
        assert_eq!(recs.len(), 50);
        for (i, r) in recs.iter().enumerate() {
            assert_eq!(
                (r.task_id.as_str(), r.k),
                (format!("task{}", i / 5).as_str(), i % 5)
            );
            assert!(r.is_success());
        }
    }

    #[test]
    fn failures_are_isolated() {
        let ts = tasks(10, 5);
        let expected_failures = ts
            .iter()
            .flat_map(|t| t.controls.iter())
            .filter(|c| c.get(Feature::TWord) == Some(12.0))
            .count();
        let client = ModelClient::new(FailOne, &cfg());
        let recs = run_batch(&ts, &client, None, 3).unwrap();
        assert_eq!(recs.len(), 50);
        let failed: Vec<_> = recs.iter().filter(|r| !r.is_success()).collect();
        assert_eq!(failed.len(), expected_failures);
        assert!(failed
            .iter()
            .all(|r| r.attempts == 2 && r.error.as_deref() == Some("request timed out")));
    }

    #[test]
    fn resume_only_issues_missing_requests() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("responses.jsonl");
        let ts = tasks(10, 5);
        let full = ModelClient::new(ConstructiveTransport, &cfg());
        let all = run_batch(&ts, &full, Some(&path), 4).unwrap();
        // Keep 30 records, leave a torn line behind.
        let kept: Vec<String> = all[..30]
            .iter()
            .map(|r| serde_json::to_string(r).unwrap())
            .collect();
        fs::write(&path, kept.join("\n") + "\n{\"task_id\":\"tas").unwrap();

        let counting = ModelClient::new(
            Counting {
                calls: AtomicU32::new(0),
            },
            &cfg(),
        );
        let resumed = run_batch(&ts, &counting, Some(&path), 4).unwrap();
        assert_eq!(counting.transport().calls.load(Ordering::SeqCst), 20);
        assert_eq!(resumed, all);
        assert_eq!(load_ledger(&path).unwrap(), all);
    }

    #[test]
    fn parallelism_does_not_change_records() {
        let ts = tasks(12, 5);
        let client = ModelClient::new(ConstructiveTransport, &cfg());
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.jsonl"), dir.path().join("b.jsonl"));
        let ra = run_batch(&ts, &client, Some(&a), 1).unwrap();
        let rb = run_batch(&ts, &client, Some(&b), 16).unwrap();
        assert_eq!(ra, rb);
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    }

    #[test]
    fn record_requires_exactly_one_outcome() {
        let both = r#"{"task_id":"a","k":0,"prompt":"p","response":"r","error":"e","latency_ms":0,"attempts":1}"#;
        assert!(serde_json::from_str::<CompletionRecord>(both).is_err());
        let none = r#"{"task_id":"a","k":0,"prompt":"p","latency_ms":0,"attempts":1}"#;
        assert!(serde_json::from_str::<CompletionRecord>(none).is_err());
    }
}
