//! Project directories on disk.
//!
//! ```text
//! kill_matrix.csv   test_id,<mutant_id>,...     one row per test, cells 0/1
//! mutants.csv       mutant_id,operator
//! statements.csv    test_id,<requirement_id>,... cells 0/1
//! branches.csv      test_id,<requirement_id>,... cells 0/1
//! faults.csv        fault_id,triggering_tests   tests separated by ';' (optional)
//! ```
//!
//! Load errors carry the file, the 1-based line and the 1-based column.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::model::{
    CoverageKind, CoverageMatrix, FaultCase, FaultId, KillMatrix, MutantId, ProjectBundle, RequirementId, TestId,
};

pub const KILL_MATRIX_FILE: &str = "kill_matrix.csv";
pub const MUTANTS_FILE: &str = "mutants.csv";
pub const STATEMENTS_FILE: &str = "statements.csv";
pub const BRANCHES_FILE: &str = "branches.csv";
pub const FAULTS_FILE: &str = "faults.csv";

struct Record {
    line: u64,
    fields: Vec<String>,
}

fn read_records(path: &Path) -> Result<Vec<Record>> {
    if !path.is_file() {
        return Err(Error::load(path, 0, 0, "missing file"));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::load(path, 0, 0, e.to_string()))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            Error::load(path, line, 0, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        out.push(Record {
            line,
            fields: record.iter().map(str::to_string).collect(),
        });
    }
    Ok(out)
}

fn expect_header(path: &Path, records: &[Record], expected: &[&str]) -> Result<()> {
    let Some(header) = records.first() else {
        return Err(Error::load(path, 1, 1, "empty file, expected a header row"));
    };
    for (i, want) in expected.iter().enumerate() {
        match header.fields.get(i) {
            Some(got) if got == want => {}
            Some(got) => {
                return Err(Error::load(
                    path,
                    header.line,
                    i as u64 + 1,
                    format!("expected header `{want}`, found `{got}`"),
                ))
            }
            None => {
                return Err(Error::load(path, header.line, i as u64 + 1, format!("missing header `{want}`")))
            }
        }
    }
    Ok(())
}

/// A `test_id,<col>,...` 0/1 matrix with row line numbers kept for later errors.
struct BoolTable {
    path: PathBuf,
    columns: Vec<String>,
    tests: Vec<(String, u64)>,
    rows: Vec<Vec<bool>>,
}

fn read_bool_table(path: &Path) -> Result<BoolTable> {
    let records = read_records(path)?;
    expect_header(path, &records, &["test_id"])?;
    let header = &records[0];
    let columns: Vec<String> = header.fields[1..].to_vec();
    let mut seen = HashMap::new();
    for (i, c) in columns.iter().enumerate() {
        let col = i as u64 + 2;
        if c.is_empty() {
            return Err(Error::load(path, header.line, col, "empty column id"));
        }
        if let Some(first) = seen.insert(c.as_str(), col) {
            return Err(Error::load(
                path,
                header.line,
                col,
                format!("duplicate column id `{c}` (first at column {first})"),
            ));
        }
    }
    let mut tests = Vec::new();
    let mut rows = Vec::new();
    let mut seen_tests: HashMap<String, u64> = HashMap::new();
    for rec in &records[1..] {
        if rec.fields.len() == 1 && rec.fields[0].is_empty() {
            continue;
        }
        if rec.fields.len() != columns.len() + 1 {
            return Err(Error::load(
                path,
                rec.line,
                (rec.fields.len().min(columns.len() + 1) + 1) as u64,
                format!("row has {} cells, header has {}", rec.fields.len(), columns.len() + 1),
            ));
        }
        let test = &rec.fields[0];
        if test.is_empty() {
            return Err(Error::load(path, rec.line, 1, "empty test id"));
        }
        if let Some(first) = seen_tests.insert(test.clone(), rec.line) {
            return Err(Error::load(
                path,
                rec.line,
                1,
                format!("duplicate test id `{test}` (first on line {first})"),
            ));
        }
        let row = rec.fields[1..]
            .iter()
            .enumerate()
            .map(|(i, cell)| match cell.as_str() {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::load(
                    path,
                    rec.line,
                    i as u64 + 2,
                    format!("malformed cell `{other}`, expected 0 or 1"),
                )),
            })
            .collect::<Result<Vec<bool>>>()?;
        tests.push((test.clone(), rec.line));
        rows.push(row);
    }
    Ok(BoolTable {
        path: path.to_path_buf(),
        columns,
        tests,
        rows,
    })
}

fn test_ids(table: &BoolTable) -> Result<Vec<TestId>> {
    table.tests.iter().map(|(t, _)| TestId::new(t.clone())).collect()
}

/// Every test of `reference` must appear in `other` and vice versa.
fn check_same_tests(reference: &BoolTable, other: &BoolTable) -> Result<()> {
    let other_set: BTreeSet<&str> = other.tests.iter().map(|(t, _)| t.as_str()).collect();
    if let Some((t, line)) = reference.tests.iter().find(|(t, _)| !other_set.contains(t.as_str())) {
        return Err(Error::load(
            &reference.path,
            *line,
            1,
            format!("test `{t}` is absent from {}", other.path.display()),
        ));
    }
    let ref_set: BTreeSet<&str> = reference.tests.iter().map(|(t, _)| t.as_str()).collect();
    if let Some((t, line)) = other.tests.iter().find(|(t, _)| !ref_set.contains(t.as_str())) {
        return Err(Error::load(
            &other.path,
            *line,
            1,
            format!("test `{t}` is absent from {}", reference.path.display()),
        ));
    }
    Ok(())
}

fn read_operators(path: &Path, kill: &BoolTable) -> Result<Vec<String>> {
    let records = read_records(path)?;
    expect_header(path, &records, &["mutant_id", "operator"])?;
    let mut operators: HashMap<String, (String, u64)> = HashMap::new();
    for rec in &records[1..] {
        if rec.fields.len() == 1 && rec.fields[0].is_empty() {
            continue;
        }
        if rec.fields.len() != 2 {
            return Err(Error::load(path, rec.line, 1, format!("expected 2 cells, found {}", rec.fields.len())));
        }
        let (mutant, op) = (&rec.fields[0], &rec.fields[1]);
        if mutant.is_empty() {
            return Err(Error::load(path, rec.line, 1, "empty mutant id"));
        }
        if op.is_empty() {
            return Err(Error::load(path, rec.line, 2, format!("mutant `{mutant}` has no operator")));
        }
        if operators.insert(mutant.clone(), (op.clone(), rec.line)).is_some() {
            return Err(Error::load(path, rec.line, 1, format!("duplicate mutant id `{mutant}`")));
        }
    }
    let header_line = 1;
    let mut out = Vec::with_capacity(kill.columns.len());
    for (i, m) in kill.columns.iter().enumerate() {
        match operators.remove(m) {
            Some((op, _)) => out.push(op),
            None => {
                return Err(Error::load(
                    &kill.path,
                    header_line,
                    i as u64 + 2,
                    format!("mutant `{m}` has no row in {}", path.display()),
                ))
            }
        }
    }
    if let Some((m, (_, line))) = operators.into_iter().min_by_key(|(_, (_, line))| *line) {
        return Err(Error::load(
            path,
            line,
            1,
            format!("mutant `{m}` is absent from {}", kill.path.display()),
        ));
    }
    Ok(out)
}

fn read_faults(path: &Path, kill: &BoolTable) -> Result<Vec<FaultCase>> {
    let records = read_records(path)?;
    expect_header(path, &records, &["fault_id", "triggering_tests"])?;
    let known: BTreeSet<&str> = kill.tests.iter().map(|(t, _)| t.as_str()).collect();
    let mut seen = BTreeSet::new();
    let mut faults = Vec::new();
    for rec in &records[1..] {
        if rec.fields.len() == 1 && rec.fields[0].is_empty() {
            continue;
        }
        if rec.fields.len() != 2 {
            return Err(Error::load(path, rec.line, 1, format!("expected 2 cells, found {}", rec.fields.len())));
        }
        let id = &rec.fields[0];
        if id.is_empty() {
            return Err(Error::load(path, rec.line, 1, "empty fault id"));
        }
        if !seen.insert(id.clone()) {
            return Err(Error::load(path, rec.line, 1, format!("duplicate fault id `{id}`")));
        }
        let mut triggering = BTreeSet::new();
        for t in rec.fields[1].split(';').map(str::trim).filter(|t| !t.is_empty()) {
            if !known.contains(t) {
                return Err(Error::load(path, rec.line, 2, format!("unknown triggering test `{t}`")));
            }
            triggering.insert(TestId::new(t)?);
        }
        if triggering.is_empty() {
            return Err(Error::load(path, rec.line, 2, format!("fault `{id}` has no triggering test")));
        }
        faults.push(FaultCase::new(FaultId::new(id.clone())?, triggering)?);
    }
    Ok(faults)
}

fn coverage(table: &BoolTable, kind: CoverageKind) -> Result<CoverageMatrix> {
    CoverageMatrix::new(
        test_ids(table)?,
        table
            .columns
            .iter()
            .map(|c| RequirementId::new(c.clone()))
            .collect::<Result<_>>()?,
        kind,
        &table.rows,
    )
}

/// Loads and cross-validates a project directory. The project id is the
/// directory name. A missing `faults.csv` yields a bundle without faults.
pub fn load_project(dir: &Path) -> Result<ProjectBundle> {
    let kill_t = read_bool_table(&dir.join(KILL_MATRIX_FILE))?;
    let operators = read_operators(&dir.join(MUTANTS_FILE), &kill_t)?;
    let stmt_t = read_bool_table(&dir.join(STATEMENTS_FILE))?;
    check_same_tests(&kill_t, &stmt_t)?;
    let br_t = read_bool_table(&dir.join(BRANCHES_FILE))?;
    check_same_tests(&kill_t, &br_t)?;
    let faults_path = dir.join(FAULTS_FILE);
    let faults = if faults_path.exists() {
        read_faults(&faults_path, &kill_t)?
    } else {
        Vec::new()
    };

    let kill = KillMatrix::new(
        test_ids(&kill_t)?,
        kill_t
            .columns
            .iter()
            .map(|c| MutantId::new(c.clone()))
            .collect::<Result<_>>()?,
        operators,
        &kill_t.rows,
    )?;
    let id = dir
        .canonicalize()
        .ok()
        .as_deref()
        .unwrap_or(dir)
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "project".to_string());
    ProjectBundle::new(
        id,
        kill,
        coverage(&stmt_t, CoverageKind::Statement)?,
        coverage(&br_t, CoverageKind::Branch)?,
        faults,
    )
}

pub(crate) fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::io(path, io),
            other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
        })
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

pub(crate) fn write_rows<I, R>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(|e| csv_error(path, e))?;
    for row in rows {
        let row: Vec<String> = row.into_iter().collect();
        w.write_record(&row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn bit(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn write_bool_table(path: &Path, tests: &[TestId], columns: Vec<String>, rows: Vec<Vec<bool>>) -> Result<()> {
    let header: Vec<String> = std::iter::once("test_id".to_string()).chain(columns).collect();
    write_rows(
        path,
        &header,
        tests
            .iter()
            .zip(rows)
            .map(|(t, row)| std::iter::once(t.to_string()).chain(row.into_iter().map(bit)).collect::<Vec<_>>()),
    )
}

/// Writes the five project files into `dir`, creating it if needed.
pub fn write_project(dir: &Path, bundle: &ProjectBundle) -> Result<()> {
    create_dir(dir)?;
    let kill = bundle.kill();
    write_bool_table(
        &dir.join(KILL_MATRIX_FILE),
        kill.tests(),
        kill.mutants().iter().map(ToString::to_string).collect(),
        kill.rows(),
    )?;
    write_rows(
        &dir.join(MUTANTS_FILE),
        &["mutant_id".to_string(), "operator".to_string()],
        kill.mutants()
            .iter()
            .zip(kill.operators())
            .map(|(m, op)| vec![m.to_string(), op.clone()]),
    )?;
    for (file, matrix) in [(STATEMENTS_FILE, bundle.statements()), (BRANCHES_FILE, bundle.branches())] {
        write_bool_table(
            &dir.join(file),
            matrix.tests(),
            matrix.requirements().iter().map(ToString::to_string).collect(),
            matrix.rows(),
        )?;
    }
    write_rows(
        &dir.join(FAULTS_FILE),
        &["fault_id".to_string(), "triggering_tests".to_string()],
        bundle.faults().iter().map(|f| {
            let tests: Vec<&str> = f.triggering().iter().map(|t| t.as_str()).collect();
            vec![f.fault_id().to_string(), tests.join(";")]
        }),
    )
}
