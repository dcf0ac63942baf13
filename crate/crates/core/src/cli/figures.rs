//! One-command regeneration of the figure analogues.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::output::{write_file, CsvDoc};
use super::svg::{line_plot, Series};
use super::CliError;
use crate::decline::{ArpsParams, ModelKind};
use crate::fpt::{durbin_density, DurbinForm};
use crate::sim::{cumulative_path, simulate_path, NoiseSpec, Scheme, TimeGrid};

/// Arps exponents shown in every figure.
pub const FIGURE_B_VALUES: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Files written by [`write_figures`], in order.
pub const FIGURE_FILES: [&str; 10] = [
    "fig1.csv",
    "fig1.svg",
    "fig2.csv",
    "fig2.svg",
    "fig3.csv",
    "fig3.svg",
    "fig4a.csv",
    "fig4a.svg",
    "fig4b.csv",
    "fig4b.svg",
];

const Q0: f64 = 380.0;
const D0: f64 = 3e-4;
const DT: f64 = 1.0;
const PATH_HORIZON: f64 = 1e4;
const DENSITY_HORIZON: f64 = 5e3;
const LEVEL: f64 = 100.0;

#[derive(Serialize)]
struct FigureConfig {
    figure: &'static str,
    content: &'static str,
    model: ModelKind,
    scheme: Option<Scheme>,
    q0: f64,
    d0: f64,
    sigma2: f64,
    b_values: [f64; 5],
    dt: f64,
    horizon: f64,
    seed: Option<u64>,
    x: Option<f64>,
}

fn labels() -> Vec<String> {
    FIGURE_B_VALUES.iter().map(|b| format!("b={b}")).collect()
}

#[allow(clippy::too_many_arguments)]
fn write_pair(
    dir: &Path,
    stem: &str,
    config: &FigureConfig,
    extra: &[(&str, Vec<f64>)],
    t: &[f64],
    curves: &[Vec<f64>],
    title: &str,
    y_label: &str,
) -> Result<(), CliError> {
    let mut header = vec!["t".to_string()];
    header.extend(labels());
    let mut columns: Vec<&[f64]> = vec![t];
    columns.extend(curves.iter().map(|c| c.as_slice()));
    let mut doc = CsvDoc::from_columns(header, &columns);
    doc.comment_json("config", config)?;
    for (key, values) in extra {
        doc.comment_json(key, values)?;
    }
    write_file(&dir.join(format!("{stem}.csv")), &doc.render()?)?;
    let names = labels();
    let series: Vec<Series> = curves
        .iter()
        .zip(&names)
        .map(|(c, label)| Series {
            label: label.clone(),
            x: t,
            y: c,
        })
        .collect();
    write_file(
        &dir.join(format!("{stem}.svg")),
        line_plot(title, "t", y_label, &series).as_bytes(),
    )
}

/// Paths for every `b` driven by the same noise stream.
fn shared_noise_paths(model: ModelKind, sigma2: f64, grid: &TimeGrid, seed: u64) -> Result<Vec<Vec<f64>>, CliError> {
    FIGURE_B_VALUES
        .iter()
        .map(|&b| {
            let params = ArpsParams::with_sigma2(Q0, D0, b, sigma2)?;
            let path = simulate_path(&params, model, Scheme::EulerMaruyama, grid, NoiseSpec::new(seed, 0))?;
            Ok(path)
        })
        .map(|p: Result<_, CliError>| p.map(|p| p.values))
        .collect()
}

/// Writes the CSV and SVG analogues of the four figures into `dir` and
/// returns the file names.
pub fn write_figures(dir: &Path, seed: u64) -> Result<Vec<String>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let grid = TimeGrid::uniform(DT, PATH_HORIZON)?;
    let t = grid.points();
    let path_config = |figure, content, model, sigma2| FigureConfig {
        figure,
        content,
        model,
        scheme: Some(Scheme::EulerMaruyama),
        q0: Q0,
        d0: D0,
        sigma2,
        b_values: FIGURE_B_VALUES,
        dt: DT,
        horizon: PATH_HORIZON,
        seed: Some(seed),
        x: None,
    };

    let const_paths = shared_noise_paths(ModelKind::ConstantVol, 1.0, &grid, seed)?;
    write_pair(
        dir,
        "fig1",
        &path_config("fig1", "rate paths", ModelKind::ConstantVol, 1.0),
        &[],
        t,
        &const_paths,
        "Constant volatility, sigma^2 = 1, shared noise",
        "rate",
    )?;

    let linear_paths = shared_noise_paths(ModelKind::LinearVol, 0.01, &grid, seed)?;
    write_pair(
        dir,
        "fig2",
        &path_config("fig2", "rate paths", ModelKind::LinearVol, 0.01),
        &[],
        t,
        &linear_paths,
        "Linear volatility, sigma^2 = 0.01, shared noise",
        "rate",
    )?;

    let density_grid = TimeGrid::uniform(DT, DENSITY_HORIZON)?;
    let mut densities = Vec::new();
    let mut integrals = Vec::new();
    for &b in &FIGURE_B_VALUES {
        let params = ArpsParams::with_sigma2(Q0, D0, b, 0.01)?;
        let curve = durbin_density(&params, LEVEL, &density_grid, DurbinForm::Corrected)?;
        integrals.push(curve.integral);
        densities.push(curve.values);
    }
    write_pair(
        dir,
        "fig3",
        &FigureConfig {
            figure: "fig3",
            content: "Durbin hitting-time density, corrected form",
            model: ModelKind::LinearVol,
            scheme: None,
            q0: Q0,
            d0: D0,
            sigma2: 0.01,
            b_values: FIGURE_B_VALUES,
            dt: DT,
            horizon: DENSITY_HORIZON,
            seed: None,
            x: Some(LEVEL),
        },
        &[("integrals", integrals)],
        density_grid.points(),
        &densities,
        "Hitting-time density of x = 100, linear volatility",
        "density",
    )?;

    let cumulate = |paths: &[Vec<f64>]| -> Result<Vec<Vec<f64>>, CliError> {
        paths
            .iter()
            .map(|v| {
                let p = crate::sim::Path::new(grid.clone(), v.clone())?;
                Ok(cumulative_path(&p).values)
            })
            .collect()
    };
    write_pair(
        dir,
        "fig4a",
        &path_config("fig4a", "cumulative production", ModelKind::ConstantVol, 1.0),
        &[],
        t,
        &cumulate(&const_paths)?,
        "Cumulative production, constant volatility",
        "cumulative production",
    )?;
    write_pair(
        dir,
        "fig4b",
        &path_config("fig4b", "cumulative production", ModelKind::LinearVol, 0.01),
        &[],
        t,
        &cumulate(&linear_paths)?,
        "Cumulative production, linear volatility",
        "cumulative production",
    )?;
    Ok(FIGURE_FILES.iter().map(|s| s.to_string()).collect())
}
