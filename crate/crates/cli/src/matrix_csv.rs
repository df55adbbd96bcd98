//! Prediction-matrix CSV: `example_id,label,<predictor ids...>`, one row per
//! example, labels `0`/`1`, scores as decimal text in `[0, 1]`.

use std::io::{Read, Write};

use ensel_core::PredictionMatrix;

use crate::error::CliError;

pub fn write_matrix<W: Write>(out: W, matrix: &PredictionMatrix) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let mut header = vec!["example_id".to_string(), "label".to_string()];
    header.extend(matrix.ids().iter().cloned());
    w.write_record(&header).map_err(runtime)?;
    let mut row = Vec::with_capacity(header.len());
    for (i, &label) in matrix.labels().iter().enumerate() {
        row.clear();
        row.push(i.to_string());
        row.push(if label { "1" } else { "0" }.to_string());
        row.extend((0..matrix.n_predictors()).map(|p| matrix.scores(p)[i].to_string()));
        w.write_record(&row).map_err(runtime)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix<R: Read>(input: R) -> Result<PredictionMatrix, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = r.headers().map_err(runtime)?.clone();
    if header.len() < 3 || &header[0] != "example_id" || &header[1] != "label" {
        return Err(CliError::Runtime(
            "expected header `example_id,label,<predictor ids...>`".into(),
        ));
    }
    let ids: Vec<String> = header.iter().skip(2).map(str::to_string).collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); ids.len()];
    let mut labels = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(runtime)?;
        let row = line + 2;
        labels.push(match &record[1] {
            "0" => false,
            "1" => true,
            other => {
                return Err(CliError::Runtime(format!(
                    "line {row}: label must be 0 or 1, got `{other}`"
                )))
            }
        });
        for (p, col) in columns.iter_mut().enumerate() {
            let field = &record[p + 2];
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| CliError::Runtime(format!("line {row}: `{field}` is not a number")))?;
            col.push(v);
        }
    }
    Ok(PredictionMatrix::new(ids, columns, labels)?)
}

fn runtime(e: csv::Error) -> CliError {
    CliError::Runtime(format!("csv: {e}"))
}
