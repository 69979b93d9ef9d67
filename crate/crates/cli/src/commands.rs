use std::path::Path;

use pxfes::config::{DEFAULT_LAMBDA_GRID, DEFAULT_SIGMA_GRID};
use pxfes::eval::ReportRow;
use pxfes::image::{encode, ImageFormat};
use pxfes::model_io::write_atomic;
use pxfes::{
    center_crop_resize, cross_validate, evaluate, load_dataset_root, load_image, load_model, montage, save_model,
    to_grayscale, Candidate, ColorMode, ExpressionMapping, Image, Method, Model, PairedDataset, Regressor,
};

use crate::args::{ApplyArgs, Command, CvArgs, DataArgs, EvalArgs, InspectArgs, MontageArgs, TrainArgs};
use crate::{report, CliError, Summary};

pub fn dispatch(command: Command) -> Result<Summary, CliError> {
    match command {
        Command::Train(a) => train(a),
        Command::Apply(a) => apply(a),
        Command::Eval(a) => eval(a),
        Command::Cv(a) => cv(a),
        Command::Inspect(a) => inspect(a),
        Command::Montage(a) => montage_cmd(a),
    }
}

fn load_data(args: &DataArgs) -> Result<PairedDataset, CliError> {
    Ok(load_dataset_root(&args.data, args.geometry.height, args.geometry.width, args.color_mode.into())?)
}

fn write_image(img: &Image, path: &Path) -> Result<(), CliError> {
    write_atomic(path, &encode(img, ImageFormat::from_path(path))?)?;
    Ok(())
}

fn describe(summary: &mut Summary, model: &Model) {
    let (h, w, c) = model.dims();
    summary
        .push("method", model.method())
        .push("height", h)
        .push("width", w)
        .push("channels", c)
        .push("lambda", model.lambda());
    if let Model::PixelKr(m) = model {
        summary.push("sigma", m.sigma()).push("n_train", m.n_train());
    }
    summary.push("params", model.parameter_count()).push("stored_values", model.stored_values());
}

fn train(args: TrainArgs) -> Result<Summary, CliError> {
    let ds = load_data(&args.data)?;
    let method: Method = args.method.into();
    let sigma = args.sigma.unwrap_or_else(|| ExpressionMapping::from(args.mapping).default_sigma());
    let candidate = Candidate { lambda: args.lambda, sigma: (method == Method::PixelKr).then_some(sigma) };
    let model = candidate.train(method, &ds)?;
    save_model(&model, &args.out)?;
    let mut s = Summary::new("train");
    describe(&mut s, &model);
    s.push("n_pairs", ds.len()).push("out", args.out.display());
    Ok(s)
}

/// Bring an arbitrary input image to the model's geometry and channel count.
fn conform(img: Image, model: &Model) -> Result<Image, CliError> {
    let (h, w, c) = model.dims();
    let img = match (c, img.channels()) {
        (1, 3) => to_grayscale(&img),
        (3, 1) => return Err(CliError::Usage("model expects RGB input".into())),
        _ => img,
    };
    Ok(center_crop_resize(&img, h, w)?)
}

fn apply(args: ApplyArgs) -> Result<Summary, CliError> {
    let model: Model = load_model(&args.model)?;
    let input = conform(load_image(&args.input)?, &model)?;
    let output = model.apply(&input)?;
    write_image(&output, &args.out)?;
    let mut s = Summary::new("apply");
    s.push("method", model.method()).push("out", args.out.display());
    Ok(s)
}

fn eval(args: EvalArgs) -> Result<Summary, CliError> {
    let model: Model = load_model(&args.model)?;
    let (h, w, c) = model.dims();
    let color = if c == 3 { ColorMode::PerChannel } else { ColorMode::Grayscale };
    let ds: PairedDataset = load_dataset_root(&args.data, h, w, color)?;
    let report = evaluate(&model, &ds)?;
    if let Some(out) = &args.out {
        let rows: Vec<ReportRow> = report
            .per_pair_mse
            .iter()
            .enumerate()
            .map(|(i, &mse)| ReportRow {
                method: model.method(),
                lambda: model.lambda(),
                sigma: model.sigma(),
                fold: i,
                mse,
                psnr: pxfes::eval::psnr_from_mse(mse),
            })
            .collect();
        report::write_csv(out, &rows)?;
    }
    let mut s = Summary::new("eval");
    s.push("method", model.method())
        .push("n_pairs", report.n_pairs)
        .push("mean_mse", report.mean_mse)
        .push("mean_psnr", report.mean_psnr);
    Ok(s)
}

fn cv(args: CvArgs) -> Result<Summary, CliError> {
    let ds = load_data(&args.data)?;
    let method: Method = args.method.into();
    let lambdas = args.lambdas.unwrap_or_else(|| DEFAULT_LAMBDA_GRID.to_vec());
    let sigmas = args.sigmas.unwrap_or_else(|| DEFAULT_SIGMA_GRID.to_vec());
    if args.folds < 2 || args.folds > ds.len() {
        return Err(CliError::Usage(format!("--folds must be in 2..={}, got {}", ds.len(), args.folds)));
    }
    let result = cross_validate(&ds, method, &lambdas, Some(&sigmas), args.folds, args.seed)?;
    if let Some(out) = &args.out {
        report::write_csv(out, &result.rows())?;
    }
    let mut s = Summary::new("cv");
    s.push("method", method).push("best_lambda", result.best.lambda);
    if let Some(sigma) = result.best.sigma {
        s.push("best_sigma", sigma);
    }
    s.push("best_mse", result.best_score)
        .push("candidates", result.grid.len())
        .push("folds", result.k)
        .push("seed", result.seed);
    Ok(s)
}

fn inspect(args: InspectArgs) -> Result<Summary, CliError> {
    let path = args.path.or(args.model).expect("clap enforces one model path");
    let model: Model = load_model(&path)?;
    let mut s = Summary::new("inspect");
    describe(&mut s, &model);
    Ok(s)
}

fn montage_cmd(args: MontageArgs) -> Result<Summary, CliError> {
    let rows = args
        .rows
        .iter()
        .map(|row| row.split(',').map(|p| load_image(p.trim()).map_err(CliError::from)).collect())
        .collect::<Result<Vec<Vec<Image>>, _>>()?;
    let grid = montage(&rows, args.gap, args.gap_value)?;
    write_image(&grid, &args.out)?;
    let mut s = Summary::new("montage");
    s.push("rows", rows.len())
        .push("cols", rows[0].len())
        .push("height", grid.height())
        .push("width", grid.width())
        .push("out", args.out.display());
    Ok(s)
}
