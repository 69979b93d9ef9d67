//! CSV reports: `method,lambda,sigma,fold,mse,psnr`.

use std::path::Path;

use pxfes::eval::ReportRow;

use crate::CliError;

pub fn write_csv(path: &Path, rows: &[ReportRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["method", "lambda", "sigma", "fold", "mse", "psnr"])?;
    for row in rows {
        w.write_record([
            row.method.name().to_owned(),
            row.lambda.to_string(),
            row.sigma.map(|s| s.to_string()).unwrap_or_default(),
            row.fold.to_string(),
            row.mse.to_string(),
            row.psnr.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Csv(e.into_error().into()))?;
    pxfes::model_io::write_atomic(path, &bytes)?;
    Ok(())
}
