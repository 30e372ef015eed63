use std::io::{Read, Write};
use std::path::Path;

use super::metrics::Metrics;
use super::HarnessError;

pub const CSV_HEADER: [&str; 11] = [
    "experiment",
    "topic",
    "window_start_frac",
    "window_size_frac",
    "p",
    "precision",
    "recall",
    "f1",
    "tp",
    "fp",
    "fn",
];

/// One line of the results CSV. Delta rows carry signed differences, so
/// counts are signed here.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub topic: String,
    pub window_start_frac: f64,
    pub window_size_frac: f64,
    pub p: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: i64,
    pub fp: i64,
    pub fn_: i64,
}

impl ResultRow {
    pub fn from_metrics(
        experiment: &str,
        topic: &str,
        window_start_frac: f64,
        window_size_frac: f64,
        p: f64,
        m: &Metrics,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            topic: topic.to_string(),
            window_start_frac,
            window_size_frac,
            p,
            precision: m.precision,
            recall: m.recall,
            f1: m.f1,
            tp: m.tp as i64,
            fp: m.fp as i64,
            fn_: m.fn_ as i64,
        }
    }

    /// `after - before` for every metric and count.
    pub fn delta(experiment: &str, topic: &str, p: f64, before: &Metrics, after: &Metrics) -> Self {
        Self {
            experiment: experiment.to_string(),
            topic: topic.to_string(),
            window_start_frac: 0.0,
            window_size_frac: 1.0,
            p,
            precision: after.precision - before.precision,
            recall: after.recall - before.recall,
            f1: after.f1 - before.f1,
            tp: after.tp as i64 - before.tp as i64,
            fp: after.fp as i64 - before.fp as i64,
            fn_: after.fn_ as i64 - before.fn_ as i64,
        }
    }

    fn record(&self) -> [String; 11] {
        let f = |v: f64| format!("{v:.6}");
        [
            self.experiment.clone(),
            self.topic.clone(),
            f(self.window_start_frac),
            f(self.window_size_frac),
            f(self.p),
            f(self.precision),
            f(self.recall),
            f(self.f1),
            self.tp.to_string(),
            self.fp.to_string(),
            self.fn_.to_string(),
        ]
    }

    fn parse(record: &csv::StringRecord) -> Result<Self, String> {
        if record.len() != CSV_HEADER.len() {
            return Err(format!(
                "expected {} fields, found {}",
                CSV_HEADER.len(),
                record.len()
            ));
        }
        let real = |i: usize| -> Result<f64, String> {
            record[i].parse::<f64>().map_err(|_| {
                format!(
                    "column '{}': '{}' is not a number",
                    CSV_HEADER[i], &record[i]
                )
            })
        };
        let int = |i: usize| -> Result<i64, String> {
            record[i].parse::<i64>().map_err(|_| {
                format!(
                    "column '{}': '{}' is not an integer",
                    CSV_HEADER[i], &record[i]
                )
            })
        };
        Ok(Self {
            experiment: record[0].to_string(),
            topic: record[1].to_string(),
            window_start_frac: real(2)?,
            window_size_frac: real(3)?,
            p: real(4)?,
            precision: real(5)?,
            recall: real(6)?,
            f1: real(7)?,
            tp: int(8)?,
            fp: int(9)?,
            fn_: int(10)?,
        })
    }
}

pub fn write_results(out: impl Write, rows: &[ResultRow]) -> csv::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in rows {
        writer.write_record(row.record())?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the results CSV: one header line, then one line per row with
/// reals at 6 decimal places.
pub fn export_results(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let path = path.as_ref();
    if rows.is_empty() {
        return Err(HarnessError::EmptyResults);
    }
    let file = std::fs::File::create(path).map_err(|e| HarnessError::Csv {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    write_results(std::io::BufWriter::new(file), rows).map_err(|source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

pub fn parse_results(input: impl Read) -> Result<Vec<ResultRow>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = reader.headers().map_err(|e| e.to_string())?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(format!(
            "unexpected header '{}'",
            header.iter().collect::<Vec<_>>().join(",")
        ));
    }
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        rows.push(ResultRow::parse(&record).map_err(|e| format!("row {}: {e}", i + 2))?);
    }
    Ok(rows)
}

pub fn read_results(path: impl AsRef<Path>) -> Result<Vec<ResultRow>, HarnessError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| HarnessError::Csv {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    parse_results(file).map_err(|reason| HarnessError::ResultsFormat {
        path: path.to_path_buf(),
        reason,
    })
}
