//! Published values next to computed ones, one row per claim.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::analysis::{analyze, closure, is_indecomposable};
use crate::brace::one_generator_brace_report;
use crate::canon::are_isomorphic;
use crate::constructions::{rump_family, x1, x2, x3, zp_shift};
use crate::enumerate::{classification_report, Budget, CensusOutcome, ClassRecord, ClassificationRecord};
use crate::error::Result;
use crate::permbrace::permutation_brace;
use crate::qcycle::QCycleSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub section: String,
    pub item: String,
    pub published: String,
    pub computed: String,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Section {
    Census,
    Examples,
    Braces,
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    /// Wall-clock limit for the census section; sizes not finished in time
    /// are skipped.
    pub max_seconds: Option<f64>,
    /// Run the size-9 census.
    pub include_n9: bool,
    /// Directory for census checkpoints, one file per size.
    pub checkpoint_dir: Option<PathBuf>,
}

fn row(section: &str, item: &str, published: impl ToString, computed: impl ToString) -> Row {
    let (published, computed) = (published.to_string(), computed.to_string());
    let status = if published == computed { Status::Pass } else { Status::Fail };
    Row { section: section.into(), item: item.into(), published, computed, status }
}

fn skipped(section: &str, item: &str, published: impl ToString, why: &str) -> Row {
    Row { section: section.into(), item: item.into(), published: published.to_string(), computed: why.into(), status: Status::Skipped }
}

pub fn run(sections: &[Section], opts: &Options) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for s in sections {
        match s {
            Section::Census => census_rows(opts, &mut rows)?,
            Section::Examples => example_rows(&mut rows)?,
            Section::Braces => brace_rows(&mut rows)?,
        }
    }
    Ok(rows)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn census(n: usize, indecomposable_only: bool, opts: &Options, start: Instant) -> Result<Option<(ClassificationRecord, Vec<ClassRecord>)>> {
    let remaining = opts.max_seconds.map(|m| m - start.elapsed().as_secs_f64());
    if remaining.is_some_and(|r| r <= 0.0) {
        return Ok(None);
    }
    let budget = Budget {
        indecomposable_only,
        max_seconds: remaining,
        checkpoint: opts.checkpoint_dir.as_ref().map(|d| d.join(format!("census-{n}.jsonl"))),
    };
    Ok(match classification_report(n, &budget)? {
        CensusOutcome::Complete { record, classes, .. } => Some((record, classes)),
        CensusOutcome::Incomplete { .. } => None,
    })
}

fn census_rows(opts: &Options, rows: &mut Vec<Row>) -> Result<()> {
    let sec = "census";
    let start = Instant::now();
    for n in [2, 3, 5, 6, 7] {
        let item = format!("n={n}: every indecomposable cycle set is irreducible");
        match census(n, true, opts, start)? {
            Some((r, _)) => rows.push(row(sec, &item, "yes", yes(r.irreducible == r.indecomposable))),
            None => rows.push(skipped(sec, &item, "yes", "budget exceeded")),
        }
    }
    match census(4, true, opts, start)? {
        Some((r, classes)) => {
            rows.push(row(sec, "n=4: all indecomposable cycle sets are one-generator", "yes", yes(r.one_generator == r.indecomposable)));
            rows.push(row(sec, "n=4: indecomposable cycle sets that are not irreducible", 2, r.indecomposable - r.irreducible));
            let same = classes.iter().all(|c| c.irreducible != c.irretractable);
            rows.push(row(sec, "n=4: the non-irreducible ones are the irretractable ones", "yes", yes(same)));
        }
        None => rows.push(skipped(sec, "n=4", "-", "budget exceeded")),
    }
    match census(8, false, opts, start)? {
        Some((r, classes)) => {
            rows.push(row(sec, "n=8: indecomposable cycle sets", 100, r.indecomposable));
            rows.push(row(sec, "n=8: one-generator cycle sets that are not irreducible", 17, r.one_generator_not_irreducible));
            rows.push(row(sec, "n=8: irreducible cycle sets", 81, r.irreducible));
            rows.push(row(sec, "n=8: irreducible multipermutation cycle sets", 39, r.multipermutation_among_irreducible));
            rows.push(row(sec, "n=8: indecomposable cycle sets that are not one-generator", 2, r.not_one_generator));
            let named = [x1(), x2()];
            let matched: Vec<bool> = named
                .iter()
                .map(|b| {
                    classes
                        .iter()
                        .filter(|c| !c.one_generator)
                        .any(|c| are_isomorphic(&class_structure(c), b).is_some())
                })
                .collect();
            rows.push(row(sec, "n=8: those two are X1 and X2", "yes", yes(r.not_one_generator == 2 && matched.iter().all(|&m| m))));
        }
        None => rows.push(skipped(sec, "n=8", 100, "budget exceeded")),
    }
    if opts.include_n9 {
        match census(9, true, opts, start)? {
            Some((r, _)) => {
                rows.push(row(sec, "n=9: indecomposable cycle sets", 16, r.indecomposable));
                rows.push(row(sec, "n=9: irreducible cycle sets", 15, r.irreducible));
                rows.push(row(sec, "n=9: irreducible multipermutation cycle sets", 13, r.multipermutation_among_irreducible));
                rows.push(row(sec, "n=9: one-generator cycle sets that are not irreducible", 1, r.one_generator_not_irreducible));
            }
            None => rows.push(skipped(sec, "n=9", 16, "budget exceeded")),
        }
    } else {
        rows.push(skipped(sec, "n=9", 16, "not requested"));
    }
    Ok(())
}

/// The cycle set of a census record.
pub fn class_structure(c: &ClassRecord) -> QCycleSet {
    let t = c.sigma.iter().map(|r| r.iter().map(|v| v - 1).collect()).collect();
    QCycleSet::cycle_set(t).expect("census records hold valid tables")
}

fn example_rows(rows: &mut Vec<Row>) -> Result<()> {
    let sec = "examples";
    let a3 = analyze(&x3())?;
    rows.push(row(sec, "X3 is generated by 1", "yes", yes(a3.generators.contains(&1))));
    for (name, x) in [("X1", x1()), ("X2", x2())] {
        let a = analyze(&x)?;
        rows.push(row(sec, &format!("{name} is indecomposable"), "yes", yes(a.indecomposable)));
        rows.push(row(sec, &format!("{name} is one-generator"), "no", yes(a.one_generator)));
    }
    rows.push(row(sec, "X1 and X2 are isomorphic", "no", yes(are_isomorphic(&x1(), &x2()).is_some())));
    let z = analyze(&zp_shift(5)?)?;
    rows.push(row(sec, "zp_shift(5) is irreducible", "yes", yes(z.irreducible)));
    for k in [1u32, 2] {
        let x = rump_family(k)?;
        let a = analyze(&x)?;
        let q = 1usize << k;
        let sizes_ok = (0..x.n()).all(|p| {
            let size = closure(&x, &[p]).count_ones(..);
            size == if p / q == p % q { 1 } else { 4 }
        });
        rows.push(row(sec, &format!("rump({k}) is indecomposable"), "yes", yes(is_indecomposable(&x))));
        rows.push(row(sec, &format!("rump({k}) is irretractable"), "yes", yes(a.irretractable)));
        rows.push(row(sec, &format!("rump({k}): <x> has size 1 on the diagonal, 4 elsewhere"), "yes", yes(sizes_ok)));
        if k == 2 {
            rows.push(row(sec, "rump(2) is one-generator", "no", yes(a.one_generator)));
        }
    }
    Ok(())
}

fn brace_rows(rows: &mut Vec<Row>) -> Result<()> {
    let sec = "braces";
    let pb2 = permutation_brace(&x2())?;
    let b2 = &pb2.brace;
    let bases2 = b2.transitive_cycle_bases()?;
    rows.push(row(sec, "perm brace of X2: size", 32, b2.n()));
    rows.push(row(sec, "perm brace of X2: transitive cycle bases", 2, bases2.len()));
    let all_x2 = bases2.iter().all(|b| b.structure.n() == 8 && are_isomorphic(&b.structure, &x2()).is_some());
    rows.push(row(sec, "perm brace of X2: every transitive cycle base is isomorphic to X2", "yes", yes(all_x2)));
    rows.push(row(sec, "perm brace of X2 is one-generator", "no", yes(one_generator_brace_report(b2)?.one_generator)));
    let pb1 = permutation_brace(&x1())?;
    let b1 = &pb1.brace;
    rows.push(row(sec, "perm brace of X1 is one-generator", "yes", yes(one_generator_brace_report(b1)?.one_generator)));
    let has_x3 = b1
        .transitive_cycle_bases()?
        .iter()
        .any(|b| b.structure.n() == 8 && are_isomorphic(&b.structure, &x3()).is_some());
    rows.push(row(sec, "perm brace of X1: a transitive cycle base of size 8 isomorphic to X3", "yes", yes(has_x3)));
    Ok(())
}

/// Exit status for a finished table: 0 all pass, 1 any fail, 2 skips only.
pub fn exit_code(rows: &[Row]) -> i32 {
    if rows.iter().any(|r| r.status == Status::Fail) {
        1
    } else if rows.iter().any(|r| r.status == Status::Skipped) {
        2
    } else {
        0
    }
}

/// Fixed-width table with a trailing status column.
pub fn render(rows: &[Row]) -> String {
    let w = rows.iter().map(|r| r.item.len()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<9} {:<w$} {:>9} {:>16}  STATUS\n", "SECTION", "ITEM", "PUBLISHED", "COMPUTED");
    for r in rows {
        let status = match r.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        };
        out.push_str(&format!("{:<9} {:<w$} {:>9} {:>16}  {status}\n", r.section, r.item, r.published, r.computed));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let mut rows = vec![row("s", "a", 1, 1)];
        assert_eq!(exit_code(&rows), 0);
        rows.push(skipped("s", "b", 1, "x"));
        assert_eq!(exit_code(&rows), 2);
        rows.push(row("s", "c", 1, 2));
        assert_eq!(exit_code(&rows), 1);
    }
}
