//! CSV readers and writers for the design plan, the dataset and force traces.
//!
//! Readers locate columns by header name; errors carry the row number.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use lft_core::geometry::DerivedGeometry;
use lft_core::{ClassLabel, CrashMetrics, CrushTrace, DesignPoint, Objective};

use crate::error::{CliError, CliResult};

pub const DESIGN_HEADER: [&str; 6] = ["index", "n", "m", "d_mm", "t_mm", "h_mm"];

pub const DATASET_HEADER: [&str; 17] = [
    "index",
    "n",
    "m",
    "d_mm",
    "t_mm",
    "h_mm",
    "omega_deg",
    "l_mm",
    "mass_kg",
    "tea_kj",
    "sea_kj_per_kg",
    "pm_kn",
    "pcf_kn",
    "cfe_pct",
    "label_eff",
    "label_tea",
    "label_light",
];

pub const TRACE_HEADER: [&str; 2] = ["x_mm", "F_kN"];

/// Writes through a sibling temporary file and a rename, so readers never
/// see a half-written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = Path::new(&tmp);
    fs::write(tmp, contents).map_err(|e| CliError::io(tmp, e))?;
    fs::rename(tmp, path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::json(path, e))?;
    s.push('\n');
    write_atomic(path, s.as_bytes())
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::json(path, e))
}

/// Renders rows as CSV with the given header.
pub fn csv_bytes<I, R>(header: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row.into_iter().collect::<Vec<_>>()).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// A CSV file read into memory, addressed by header name.
pub struct CsvTable {
    path: PathBuf,
    headers: Vec<String>,
    records: Vec<csv::StringRecord>,
}

impl CsvTable {
    pub fn read(path: &Path) -> CliResult<Self> {
        let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
        let headers = reader.headers().map_err(|e| CliError::schema(path, format!("header: {e}")))?.iter().map(str::to_string).collect();
        let mut records = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            records.push(rec.map_err(|e| CliError::schema(path, format!("row {}: {e}", i + 1)))?);
        }
        Ok(CsvTable { path: path.to_path_buf(), headers, records })
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.headers.iter().any(|h| h == name)
    }

    pub fn column(&self, name: &str) -> CliResult<usize> {
        self.headers.iter().position(|h| h == name).ok_or_else(|| CliError::schema(&self.path, format!("missing column {name:?}")))
    }

    pub fn raw(&self, row: usize, col: usize) -> &str {
        self.records[row].get(col).unwrap_or("")
    }

    /// Parses one cell; errors name the 1-based data row and the column.
    pub fn get<T: FromStr>(&self, row: usize, col: usize) -> CliResult<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = self.raw(row, col);
        raw.parse::<T>().map_err(|e| {
            CliError::schema(&self.path, format!("row {}, column {:?}: cannot parse {raw:?}: {e}", row + 1, self.headers[col]))
        })
    }

    pub fn label(&self, row: usize, col: usize) -> CliResult<Option<ClassLabel>> {
        if self.raw(row, col).is_empty() {
            return Ok(None);
        }
        self.get(row, col).map(Some)
    }

    pub fn schema_error(&self, row: usize, message: impl std::fmt::Display) -> CliError {
        CliError::schema(&self.path, format!("row {}: {message}", row + 1))
    }
}

pub fn write_designs(path: &Path, designs: &[DesignPoint]) -> CliResult<()> {
    let rows = designs
        .iter()
        .enumerate()
        .map(|(i, dp)| vec![i.to_string(), dp.n.to_string(), dp.m.to_string(), dp.d.to_string(), dp.t.to_string(), dp.h.to_string()]);
    write_atomic(path, &csv_bytes(&DESIGN_HEADER, rows))
}

fn read_design(table: &CsvTable, row: usize, cols: &[usize; 5]) -> CliResult<DesignPoint> {
    let dp = DesignPoint::new(
        table.get(row, cols[0])?,
        table.get(row, cols[1])?,
        table.get(row, cols[2])?,
        table.get(row, cols[3])?,
        table.get(row, cols[4])?,
    );
    dp.validate().map_err(|e| table.schema_error(row, e))?;
    Ok(dp)
}

fn design_columns(table: &CsvTable) -> CliResult<[usize; 5]> {
    Ok([table.column("n")?, table.column("m")?, table.column("d_mm")?, table.column("t_mm")?, table.column("h_mm")?])
}

/// Reads the design columns of a designs or dataset file. Rows must be in
/// index order starting at 0.
pub fn read_designs(path: &Path) -> CliResult<Vec<DesignPoint>> {
    let table = CsvTable::read(path)?;
    let idx = table.column("index")?;
    let cols = design_columns(&table)?;
    (0..table.len())
        .map(|r| {
            let index: usize = table.get(r, idx)?;
            if index != r {
                return Err(table.schema_error(r, format!("index {index} out of order, expected {r}")));
            }
            read_design(&table, r, &cols)
        })
        .collect()
}

/// One line of `dataset.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetRow {
    pub index: usize,
    pub design: DesignPoint,
    pub omega_deg: f64,
    pub l_mm: f64,
    pub metrics: CrashMetrics,
    /// In [`Objective::ALL`] order; `None` before labeling.
    pub labels: [Option<ClassLabel>; 3],
}

impl DatasetRow {
    pub fn new(index: usize, design: DesignPoint, geometry: &DerivedGeometry, metrics: CrashMetrics) -> Self {
        DatasetRow { index, design, omega_deg: geometry.omega_degrees(), l_mm: geometry.strut_length, metrics, labels: [None; 3] }
    }

    pub fn label(&self, objective: Objective) -> Option<ClassLabel> {
        self.labels[objective_slot(objective)]
    }

    fn record(&self) -> Vec<String> {
        let d = &self.design;
        let m = &self.metrics;
        let mut out = vec![
            self.index.to_string(),
            d.n.to_string(),
            d.m.to_string(),
            d.d.to_string(),
            d.t.to_string(),
            d.h.to_string(),
            self.omega_deg.to_string(),
            self.l_mm.to_string(),
            m.mass.to_string(),
            m.tea.to_string(),
            m.sea.to_string(),
            m.pm.to_string(),
            m.pcf.to_string(),
            m.cfe.to_string(),
        ];
        out.extend(self.labels.iter().map(|l| l.map_or(String::new(), |l| l.to_string())));
        out
    }
}

pub fn objective_slot(objective: Objective) -> usize {
    Objective::ALL.iter().position(|&o| o == objective).expect("objective listed")
}

pub fn label_column(objective: Objective) -> String {
    format!("label_{}", objective.short())
}

pub fn dataset_bytes(rows: &[DatasetRow]) -> Vec<u8> {
    csv_bytes(&DATASET_HEADER, rows.iter().map(DatasetRow::record))
}

pub fn write_dataset(path: &Path, rows: &[DatasetRow]) -> CliResult<()> {
    write_atomic(path, &dataset_bytes(rows))
}

/// Reads a full dataset; every schema column must be present, label cells
/// may be empty.
pub fn read_dataset(path: &Path) -> CliResult<Vec<DatasetRow>> {
    let table = CsvTable::read(path)?;
    let cols: Vec<usize> = DATASET_HEADER.iter().map(|h| table.column(h)).collect::<CliResult<_>>()?;
    let design_cols = [cols[1], cols[2], cols[3], cols[4], cols[5]];
    (0..table.len())
        .map(|r| {
            let f = |i: usize| table.get::<f64>(r, cols[i]);
            let (tea, pm) = (f(9)?, f(11)?);
            let metrics = CrashMetrics { mass: f(8)?, tea, sea: f(10)?, pm, pcf: f(12)?, cfe: f(13)?, z: 1000.0 * tea / pm };
            Ok(DatasetRow {
                index: table.get(r, cols[0])?,
                design: read_design(&table, r, &design_cols)?,
                omega_deg: f(6)?,
                l_mm: f(7)?,
                metrics,
                labels: [table.label(r, cols[14])?, table.label(r, cols[15])?, table.label(r, cols[16])?],
            })
        })
        .collect()
}

/// Design variables and one objective's labels; other columns are ignored.
/// Rows with an empty label are an error.
pub fn read_training_rows(path: &Path, objective: Objective) -> CliResult<Vec<(DesignPoint, ClassLabel)>> {
    let table = CsvTable::read(path)?;
    let cols = design_columns(&table)?;
    let lc = table.column(&label_column(objective))?;
    (0..table.len())
        .map(|r| {
            let dp = read_design(&table, r, &cols)?;
            let label = table.label(r, lc)?.ok_or_else(|| table.schema_error(r, format!("empty {}", label_column(objective))))?;
            Ok((dp, label))
        })
        .collect()
}

pub fn trace_bytes(trace: &CrushTrace) -> Vec<u8> {
    csv_bytes(&TRACE_HEADER, trace.samples().map(|(x, f)| vec![x.to_string(), f.to_string()]))
}

pub fn write_trace(path: &Path, trace: &CrushTrace) -> CliResult<()> {
    write_atomic(path, &trace_bytes(trace))
}

pub fn read_trace(path: &Path) -> CliResult<CrushTrace> {
    let table = CsvTable::read(path)?;
    let (xc, fc) = (table.column(TRACE_HEADER[0])?, table.column(TRACE_HEADER[1])?);
    let mut x = Vec::with_capacity(table.len());
    let mut f = Vec::with_capacity(table.len());
    for r in 0..table.len() {
        x.push(table.get::<f64>(r, xc)?);
        f.push(table.get::<f64>(r, fc)?);
    }
    CrushTrace::new(x, f).map_err(|e| CliError::schema(path, e.to_string()))
}
