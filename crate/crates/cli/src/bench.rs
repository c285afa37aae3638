use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;

use momst::instance::{generate, parse_instance, InstanceSpec};
use momst::{Algorithm, MultiGraph, PipelineOptions};

use crate::record::{run, RunRecord, COLUMNS};

#[derive(Debug, Clone)]
pub enum Source {
    File(PathBuf),
    Spec(InstanceSpec),
}

impl Source {
    pub fn id(&self) -> String {
        match self {
            Source::File(p) => p.file_stem().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned()),
            Source::Spec(s) => s.id(),
        }
    }

    fn load(&self) -> Result<MultiGraph, String> {
        match self {
            Source::File(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
                parse_instance(&text).map_err(|e| e.to_string())
            }
            Source::Spec(s) => generate(s).map_err(|e| e.to_string()),
        }
    }
}

/// Files directly under `dir` with the `.momst` extension, by name.
pub fn instance_files(dir: &Path) -> io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "momst") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Worker count: available cores, capped by `MOMST_THREADS` when set.
pub fn worker_count() -> usize {
    let cores = thread::available_parallelism().map_or(1, |n| n.get());
    let cap = std::env::var("MOMST_THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok());
    cap.map_or(cores, |c| c.min(cores)).max(1)
}

fn run_job(source: &Source, graph: &Result<MultiGraph, String>, algorithm: Algorithm, options: &PipelineOptions) -> RunRecord {
    let id = source.id();
    let graph = match graph {
        Ok(g) => g,
        Err(e) => return RunRecord::failed(&id, algorithm, None, e.clone()),
    };
    let options = PipelineOptions { algorithm, ..options.clone() };
    match run(&id, graph, &options) {
        Ok((record, _)) => record,
        Err(e) => RunRecord::failed(&id, algorithm, Some(graph), e.to_string()),
    }
}

/// Runs every (source, algorithm) pair and writes one CSV row each, in
/// source-major order. Rows are flushed as soon as all earlier rows are out.
/// Returns the number of rows written.
pub fn run_bench<W: Write>(
    sources: &[Source],
    algorithms: &[Algorithm],
    options: &PipelineOptions,
    out: W,
    workers: usize,
    mut on_row: impl FnMut(&RunRecord),
) -> io::Result<usize> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(COLUMNS)?;
    csv.flush()?;

    let graphs: Vec<Result<MultiGraph, String>> = sources.iter().map(Source::load).collect();
    let jobs: Vec<(usize, Algorithm)> =
        (0..sources.len()).flat_map(|i| algorithms.iter().map(move |&a| (i, a))).collect();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, RunRecord)>();

    thread::scope(|scope| -> io::Result<usize> {
        for _ in 0..workers.clamp(1, jobs.len().max(1)) {
            let tx = tx.clone();
            let (next, jobs, graphs) = (&next, &jobs, &graphs);
            scope.spawn(move || loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, algorithm)) = jobs.get(k) else {
                    break;
                };
                let record = run_job(&sources[i], &graphs[i], algorithm, options);
                if tx.send((k, record)).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        let mut written = 0;
        for (k, record) in rx {
            pending.insert(k, record);
            while let Some(record) = pending.remove(&written) {
                csv.write_record(record.fields())?;
                csv.flush()?;
                on_row(&record);
                written += 1;
            }
        }
        Ok(written)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use momst::instance::{Correlation, Family};

    fn spec(n: usize, seed: u64) -> Source {
        Source::Spec(InstanceSpec { family: Family::Complete { n }, dim: 2, correlation: Correlation::Uncorrelated, seed })
    }

    fn bench(workers: usize) -> String {
        let mut buf = Vec::new();
        let sources = [spec(5, 1), Source::File("/nonexistent.momst".into()), spec(6, 2)];
        let n = run_bench(
            &sources,
            &[Algorithm::IgMda, Algorithm::Bn],
            &PipelineOptions { preprocess: true, ..Default::default() },
            &mut buf,
            workers,
            |_| {},
        )
        .unwrap();
        assert_eq!(n, 6);
        String::from_utf8(buf).unwrap()
    }

    fn without_timing(csv: &str) -> Vec<Vec<String>> {
        let mut r = csv::Reader::from_reader(csv.as_bytes());
        r.records()
            .map(|row| {
                let row = row.unwrap();
                row.iter().enumerate().filter(|(i, _)| *i != 9 && *i != 10).map(|(_, v)| v.to_string()).collect()
            })
            .collect()
    }

    #[test]
    fn rows_are_ordered_and_errors_recorded() {
        let out = bench(3);
        let rows = without_timing(&out);
        assert_eq!(rows.len(), 6);
        let order: Vec<(&str, &str)> = rows.iter().map(|r| (r[0].as_str(), r[1].as_str())).collect();
        assert_eq!(order[0].1, "igmda");
        assert_eq!(order[1].1, "bn");
        assert_eq!(order[2], ("nonexistent", "igmda"));
        assert_eq!(rows[2][5], "error");
        assert_eq!(rows[0][5], "solved");
        // both algorithms agree on the solution count
        assert_eq!(rows[0][6], rows[1][6]);
        assert_eq!(rows, without_timing(&bench(1)));
    }
}
