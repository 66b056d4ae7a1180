//! Census of indecomposable cycle sets: counts per size, per-class flags,
//! and a resumable shard-by-shard driver.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::search::{Plan, SearchOptions, SearchStats};
use super::{canonical_sorted, Filter};
use crate::analysis::{analyze, is_indecomposable};
use crate::error::{Error, Result};
use crate::qcycle::QCycleSet;

/// Flags of one indecomposable class. Tables and points are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub n: usize,
    pub sigma: Vec<Vec<usize>>,
    pub one_generator: bool,
    pub irreducible: bool,
    pub multipermutation: bool,
    pub multipermutation_level: Option<usize>,
    pub irretractable: bool,
    pub squaring_transitive: bool,
    pub generators: Vec<usize>,
}

/// Counts for one size. `total` counts all classes and is absent when the
/// search was restricted to indecomposable tables; the rest count
/// indecomposable classes only.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub n: usize,
    pub total: Option<usize>,
    pub indecomposable: usize,
    pub one_generator: usize,
    pub irreducible: usize,
    pub multipermutation: usize,
    pub multipermutation_among_irreducible: usize,
    pub irretractable: usize,
    pub one_generator_not_irreducible: usize,
    pub not_one_generator: usize,
}

pub fn classify(x: &QCycleSet) -> Result<ClassRecord> {
    let r = analyze(x)?;
    Ok(ClassRecord {
        n: x.n(),
        sigma: x.sigma_table().iter().map(|row| row.iter().map(|v| v + 1).collect()).collect(),
        one_generator: r.one_generator,
        irreducible: r.irreducible,
        multipermutation: r.multipermutation,
        multipermutation_level: r.multipermutation_level,
        irretractable: r.irretractable,
        squaring_transitive: r.squaring_transitive,
        generators: r.generators,
    })
}

impl ClassificationRecord {
    pub fn tally(n: usize, total: Option<usize>, classes: &[ClassRecord]) -> ClassificationRecord {
        let count = |f: &dyn Fn(&ClassRecord) -> bool| classes.iter().filter(|c| f(c)).count();
        let one_generator = count(&|c| c.one_generator);
        let irreducible = count(&|c| c.irreducible);
        ClassificationRecord {
            n,
            total,
            indecomposable: classes.len(),
            one_generator,
            irreducible,
            multipermutation: count(&|c| c.multipermutation),
            multipermutation_among_irreducible: count(&|c| c.irreducible && c.multipermutation),
            irretractable: count(&|c| c.irretractable),
            one_generator_not_irreducible: one_generator - irreducible,
            not_one_generator: classes.len() - one_generator,
        }
    }

    /// Plain-text summary in the wording used for published census tables.
    pub fn summary(&self) -> String {
        format!(
            "size {n}: {total} cycle sets, {ind} indecomposable cycle sets; \
             {og} one-generator, {ognir} one-generator cycle sets that are not irreducible, \
             {irr} irreducible cycle sets ({mpi} of them are multipermutation), \
             {nog} indecomposable cycle sets that are not one-generator, \
             {ret} irretractable, {mp} multipermutation",
            n = self.n,
            total = self.total.map_or_else(|| "(not counted)".to_string(), |t| t.to_string()),
            ind = self.indecomposable,
            og = self.one_generator,
            ognir = self.one_generator_not_irreducible,
            irr = self.irreducible,
            mpi = self.multipermutation_among_irreducible,
            nog = self.not_one_generator,
            ret = self.irretractable,
            mp = self.multipermutation,
        )
    }
}

/// Limits for a census run.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    /// Search indecomposable tables only; `total` is then not counted.
    pub indecomposable_only: bool,
    /// Stop starting new shards after this many seconds.
    pub max_seconds: Option<f64>,
    /// JSON-lines file recording finished shards; reread on start.
    pub checkpoint: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub enum CensusOutcome {
    Complete { record: ClassificationRecord, classes: Vec<ClassRecord>, stats: SearchStats },
    Incomplete { done_shards: usize, total_shards: usize },
}

#[derive(Serialize, Deserialize)]
struct CheckpointHeader {
    n: usize,
    indecomposable_only: bool,
    shards: usize,
    version: String,
}

#[derive(Serialize, Deserialize)]
struct ShardLine {
    shard: usize,
    emitted: usize,
    /// Transitive tables, 0-based and row-major.
    indecomposable: Vec<Vec<u8>>,
    stats: SearchStats,
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Parse { line: 0, col: 0, msg: format!("checkpoint: {e}") }
}

fn read_checkpoint(path: &PathBuf, n: usize, indecomposable_only: bool, shards: usize) -> Result<Vec<ShardLine>> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(io_err(e)),
    };
    let mut lines = BufReader::new(file).lines();
    let header: CheckpointHeader = match lines.next() {
        None => return Ok(Vec::new()),
        Some(l) => serde_json::from_str(&l.map_err(io_err)?).map_err(io_err)?,
    };
    if header.n != n || header.shards != shards || header.indecomposable_only != indecomposable_only {
        return Err(io_err(format!(
            "written for n={} with {} shards (indecomposable only: {})",
            header.n, header.shards, header.indecomposable_only
        )));
    }
    let mut out = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        // A torn final line from an interrupted run is dropped.
        match serde_json::from_str::<ShardLine>(&line) {
            Ok(s) => out.push(s),
            Err(e) => eprintln!("checkpoint line {} ignored: {e}", i + 2),
        }
    }
    Ok(out)
}

/// Runs (or resumes) the census for size `n`.
pub fn classification_report(n: usize, budget: &Budget) -> Result<CensusOutcome> {
    if n == 0 || n > super::search::MAX_N {
        return Err(Error::SizeOutOfRange(n));
    }
    let plan = Plan::new(SearchOptions { n, indecomposable: budget.indecomposable_only });
    let total_shards = plan.shard_count();
    let mut done: Vec<ShardLine> = match &budget.checkpoint {
        Some(p) => read_checkpoint(p, n, budget.indecomposable_only, total_shards)?,
        None => Vec::new(),
    };
    let mut finished = vec![false; total_shards];
    for s in &done {
        if s.shard < total_shards {
            finished[s.shard] = true;
        }
    }
    let mut sink = match &budget.checkpoint {
        Some(p) => {
            let fresh = !p.exists() || std::fs::metadata(p).map(|m| m.len() == 0).unwrap_or(true);
            let mut f = OpenOptions::new().create(true).append(true).open(p).map_err(io_err)?;
            if fresh {
                let h = CheckpointHeader { n, indecomposable_only: budget.indecomposable_only, shards: total_shards, version: crate::VERSION.into() };
                writeln!(f, "{}", serde_json::to_string(&h).map_err(io_err)?).map_err(io_err)?;
            }
            Some(f)
        }
        None => None,
    };
    let start = Instant::now();
    let todo: Vec<usize> = (0..total_shards).filter(|&i| !finished[i]).collect();
    let batch = rayon::current_num_threads().max(1);
    for chunk in todo.chunks(batch) {
        if let Some(limit) = budget.max_seconds {
            if start.elapsed().as_secs_f64() > limit {
                break;
            }
        }
        let outs = plan.run_many(chunk);
        for (&i, out) in chunk.iter().zip(outs) {
            let indecomposable = out
                .tables
                .iter()
                .filter(|t| super::table_to_cycle_set(n, t).map(|x| is_indecomposable(&x)).unwrap_or(false))
                .cloned()
                .collect();
            let line = ShardLine { shard: i, emitted: out.tables.len(), indecomposable, stats: out.stats };
            if let Some(f) = sink.as_mut() {
                writeln!(f, "{}", serde_json::to_string(&line).map_err(io_err)?).map_err(io_err)?;
                f.flush().map_err(io_err)?;
            }
            finished[i] = true;
            done.push(line);
        }
    }
    let done_count = finished.iter().filter(|&&f| f).count();
    if done_count < total_shards {
        return Ok(CensusOutcome::Incomplete { done_shards: done_count, total_shards });
    }
    let total = (!budget.indecomposable_only).then(|| done.iter().map(|s| s.emitted).sum());
    let stats = done.iter().fold(SearchStats::default(), |a, s| a.merge(s.stats));
    let tables: Vec<Vec<u8>> = done.into_iter().flat_map(|s| s.indecomposable).collect();
    let reps = canonical_sorted(n, &tables)?;
    let classes = reps.iter().map(classify).collect::<Result<Vec<_>>>()?;
    let record = ClassificationRecord::tally(n, total, &classes);
    Ok(CensusOutcome::Complete { record, classes, stats })
}

/// Indecomposable classes only, without checkpointing.
pub fn indecomposable_classes(n: usize) -> Result<Vec<QCycleSet>> {
    super::enumerate_cycle_sets(n, Filter { indecomposable: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_census() {
        for (n, ind) in [(1, 1), (2, 1), (3, 1), (4, 5), (5, 1), (6, 10)] {
            let CensusOutcome::Complete { record, .. } = classification_report(n, &Budget::default()).unwrap() else {
                panic!("no budget set");
            };
            assert_eq!(record.indecomposable, ind, "n = {n}");
        }
    }

    #[test]
    fn indecomposable_only_agrees() {
        let b = Budget { indecomposable_only: true, ..Budget::default() };
        let CensusOutcome::Complete { record, classes, .. } = classification_report(6, &b).unwrap() else {
            panic!("no time limit");
        };
        assert_eq!(record.total, None);
        assert_eq!(classes.len(), 10);
    }

    #[test]
    fn checkpoint_resumes() {
        let dir = std::env::temp_dir().join(format!("ybe-ckpt-{}", std::process::id()));
        let _ = std::fs::remove_file(&dir);
        let b = Budget { checkpoint: Some(dir.clone()), ..Budget::default() };
        let first = classification_report(5, &b).unwrap();
        let second = classification_report(5, &b).unwrap();
        let (CensusOutcome::Complete { record: r1, .. }, CensusOutcome::Complete { record: r2, .. }) = (first, second) else {
            panic!("complete");
        };
        assert_eq!(r1, r2);
        assert_eq!(r1.total, Some(88));
        std::fs::remove_file(&dir).unwrap();
    }

    #[test]
    fn zero_budget_is_incomplete() {
        let b = Budget { max_seconds: Some(-1.0), ..Budget::default() };
        assert!(matches!(classification_report(5, &b).unwrap(), CensusOutcome::Incomplete { done_shards: 0, .. }));
    }
}
