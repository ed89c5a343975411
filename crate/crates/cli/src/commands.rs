use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::seq::index::sample;
use rfsurrogate_bnn::data::{input_scaler, rows_for};
use rfsurrogate_bnn::{BayesNet, Mode, NetConfig, Optimizer};
use rfsurrogate_core::fmt::f17;
use rfsurrogate_core::metrics::metrics;
use rfsurrogate_core::response::channel_label;
use rfsurrogate_core::{Dataset, DbResponse, MetricReport, Record, RngStream, Split};
use rfsurrogate_online::{conventional_seconds, history_csv, run, run_baseline, selections_csv, LoopConfig, Report};
use rfsurrogate_oracle::{OracleKind, OracleSpec};
use rfsurrogate_sampling::{field_csv, uaw_afs, uncertainty_field};
use rfsurrogate_vecfit::{fit, FitConfig};

use crate::config::setting;
use crate::{touchstone, CliError, RunConfig};

/// Flags shared by every subcommand, already merged into the configuration.
#[derive(Debug, Clone)]
pub struct Common {
    pub config: RunConfig,
    pub seed: u64,
    pub out: PathBuf,
}

impl Common {
    /// `--seed` and `--out` override the file's values when given.
    pub fn new(config: RunConfig, seed: Option<u64>, out: Option<PathBuf>) -> Self {
        let seed = seed.unwrap_or(config.online.seed);
        let out = out.unwrap_or_else(|| config.out.clone());
        Self { config, seed, out }
    }

    fn loop_config(&self) -> LoopConfig {
        let mut cfg = self.config.online.clone();
        cfg.seed = self.seed;
        cfg
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_err(&path, e))
}

fn metric_fields(m: &MetricReport) -> String {
    m.rows().iter().map(|(_, v)| f17(*v)).collect::<Vec<_>>().join(",")
}

/// Fits the configured Touchstone file or oracle response; writes
/// `model.txt`, `metrics.csv` and `fitted.s2p` (or `.s1p`).
pub fn cmd_fit(c: &Common) -> Result<MetricReport, CliError> {
    let f = &c.config.fit;
    let (samples, reference) = match &f.input {
        Some(path) => {
            let ts = touchstone::read(path)?;
            (ts.response.clone(), ts.response)
        }
        None => {
            let oracle = c.config.oracle()?;
            let point = oracle
                .space
                .point(f.geometry)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let grid = oracle.dense_grid()?;
            let idx = grid.uniform_indices(f.samples.min(grid.len()));
            let samples = oracle.simulate(&point, &grid.select(&idx)?)?;
            (samples, oracle.simulate(&point, &grid)?)
        }
    };
    let outcome = fit(&samples, &FitConfig::new(f.order).with_iterations(f.iterations))?;
    let fitted = outcome.model.evaluate(reference.grid())?;
    let m = metrics(&reference.to_db(), &fitted.to_db())?;
    write(&c.out, "model.txt", &outcome.model.to_text())?;
    write(&c.out, "metrics.csv", &m.to_csv())?;
    let name = format!("fitted.s{}p", fitted.ports());
    let text = touchstone::render(&fitted, touchstone::Format::Ri, touchstone::FreqUnit::Hz, 50.0)?;
    write(&c.out, &name, &text)?;
    Ok(m)
}

/// One method's vector-fit errors on one structure and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct AfsRow {
    pub structure: OracleKind,
    pub seed: u64,
    pub method: &'static str,
    pub frequencies: Vec<usize>,
    /// `None` when the fit itself failed.
    pub metrics: Option<MetricReport>,
}

impl AfsRow {
    pub fn rmse(&self) -> f64 {
        self.metrics.map_or(f64::INFINITY, |m| m.rmse)
    }
}

fn fit_error(oracle: &OracleSpec, point: &rfsurrogate_core::DesignPoint, idx: &[usize], cfg: &FitConfig, reference: &DbResponse) -> Result<Option<MetricReport>, CliError> {
    let grid = reference.grid();
    let samples = oracle.simulate(point, &grid.select(idx)?)?;
    let fitted = match fit(&samples, cfg).and_then(|o| o.model.evaluate(grid)) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("warning: {} fit on {} points failed: {e}", oracle.kind, idx.len());
            return Ok(None);
        }
    };
    Ok(Some(metrics(reference, &fitted.to_db())?))
}

/// Uncertainty row of `target` from a pilot network trained on other geometries.
fn pilot_uncertainty(c: &Common, oracle: &OracleSpec, picks: &[usize], root: &RngStream) -> Result<Vec<f64>, CliError> {
    let a = &c.config.afs;
    let grid = oracle.dense_grid()?;
    let freq = grid.uniform_indices(a.pilot_frequencies.min(grid.len()));
    let sub = grid.select(&freq)?;
    let mut ds = Dataset::new(grid.clone());
    for &pi in &picks[1..] {
        let point = oracle.space.point(pi)?;
        let response = oracle.simulate(&point, &sub)?.to_db();
        ds.push(Record {
            point,
            point_index: pi,
            freq_indices: freq.clone(),
            response,
            split: Split::Train,
        })?;
    }
    let cfg = NetConfig {
        mode: Mode::Point,
        widths: a.pilot_widths.clone(),
        head_width: a.pilot_widths.last().copied().unwrap_or(32),
        epochs: a.pilot_epochs,
        learning_rate: a.pilot_learning_rate,
        optimizer: Optimizer::adam(),
        seed: root.seed(),
        ..NetConfig::default()
    };
    cfg.validate()?;
    let nc = ds.records()[0].response.n_channels();
    let mut net = BayesNet::new(cfg, input_scaler(&oracle.space, &grid, Mode::Point)?, nc, 1)?;
    net.fit(&rows_for(Mode::Point, &ds, Split::Train)?, None, &root.child("pilot"))?;
    let target = oracle.space.point(picks[0])?;
    let field = uncertainty_field(&net, vec![picks[0]], &[target], &grid, a.ensemble, &root.child("field"))?;
    Ok(field.row(0).to_vec())
}

/// Uniform versus uncertainty-aware frequency selection for vector fitting at
/// an equal budget, per structure and seed. Writes `afs_seeds.csv`,
/// `afs_frequencies.csv` and the per-structure median table `afs_summary.csv`.
pub fn cmd_afs(c: &Common) -> Result<Vec<AfsRow>, CliError> {
    let a = &c.config.afs;
    let fit_cfg = FitConfig::new(a.order()).with_iterations(a.iterations);
    let mut rows = Vec::new();
    for &kind in &a.structures {
        let oracle = c.config.oracle_for(kind)?;
        let grid = oracle.dense_grid()?;
        if a.budget > grid.len() {
            return Err(CliError::Config(format!("afs budget {} exceeds the {}-point band", a.budget, grid.len())));
        }
        for k in 0..a.seeds as u64 {
            let seed = c.seed.wrapping_add(k);
            let root = RngStream::new(seed, "afs").child(kind.name());
            let size = oracle.space.size();
            let picks: Vec<usize> = if size > 1 {
                sample(&mut root.child("geometries"), size, (a.pilot_geometries + 1).min(size)).into_vec()
            } else {
                vec![0, 0]
            };
            let target = oracle.space.point(picks[0])?;
            let reference = oracle.dense_reference(&target)?;
            let u = pilot_uncertainty(c, &oracle, &picks, &root)?;
            let uaw = uaw_afs(&grid, &u, a.budget, &mut root.child("frequency"))?.indices;
            let uniform = grid.uniform_indices(a.budget);
            for (method, idx) in [("uniform", uniform), ("uaw", uaw)] {
                let m = fit_error(&oracle, &target, &idx, &fit_cfg, &reference)?;
                rows.push(AfsRow {
                    structure: kind,
                    seed,
                    method,
                    frequencies: idx,
                    metrics: m,
                });
            }
        }
    }

    let mut per_seed = String::from("structure,seed,method,mae,rmse,psnr\n");
    let mut freqs = String::from("structure,seed,method,frequency_index,frequency_hz\n");
    for r in &rows {
        let grid = c.config.oracle_for(r.structure)?.dense_grid()?;
        let (mae, rmse, psnr) = r.metrics.map_or((f64::INFINITY, f64::INFINITY, f64::NAN), |m| (m.mae, m.rmse, m.psnr));
        let _ = writeln!(per_seed, "{},{},{},{},{},{}", r.structure, r.seed, r.method, f17(mae), f17(rmse), f17(psnr));
        for &k in &r.frequencies {
            let _ = writeln!(freqs, "{},{},{},{k},{}", r.structure, r.seed, r.method, f17(grid.points()[k]));
        }
    }
    let mut table = String::from("structure,method,mae,rmse,psnr,wins,seeds\n");
    for &kind in &a.structures {
        let of = |method: &'static str| rows.iter().filter(move |r| r.structure == kind && r.method == method);
        let wins = of("uaw").zip(of("uniform")).filter(|(u, n)| u.rmse() < n.rmse()).count();
        for method in ["uniform", "uaw"] {
            let med = |f: fn(&MetricReport) -> f64| median(of(method).map(|r| r.metrics.as_ref().map_or(f64::INFINITY, f)).collect());
            let w = if method == "uaw" { wins } else { a.seeds - wins };
            let _ = writeln!(
                table,
                "{kind},{method},{},{},{},{w},{}",
                f17(med(|m| m.mae)),
                f17(med(|m| m.rmse)),
                f17(med(|m| m.psnr)),
                a.seeds
            );
        }
    }
    write(&c.out, "afs_seeds.csv", &per_seed)?;
    write(&c.out, "afs_frequencies.csv", &freqs)?;
    write(&c.out, "afs_summary.csv", &table)?;
    Ok(rows)
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

const SUMMARY_HEADER: &str = "setting,train_size,freq_num,train_cells,sim_time_min,mae,mse,rmse,r2,psnr,ledger_ratio";

fn summary_row(r: &Report, conventional: f64) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        r.setting,
        r.train_geometries,
        r.freq_num,
        r.train_cells,
        f17(r.sim_seconds / 60.0),
        metric_fields(&r.metrics),
        f17(r.sim_seconds / conventional)
    )
}

fn write_run(dir: &Path, r: &Report, conventional: f64) -> Result<(), CliError> {
    write(dir, "summary.csv", &format!("{SUMMARY_HEADER}\n{}\n", summary_row(r, conventional)))?;
    write(dir, "history.csv", &history_csv(&r.history))
}

/// Ensemble-mean predictions and spread on the validation geometries.
fn predictions_csv(net: &BayesNet, state: &rfsurrogate_online::LoopState, m: usize, stream: &RngStream) -> Result<String, CliError> {
    let mut out = String::from("point_index,frequency_hz,channel,reference_db,predicted_db,std_db\n");
    let grid = state.dataset.grid();
    for r in state.dataset.split(Split::Validation) {
        let sub = grid.select(&r.freq_indices)?;
        let x = net.query_inputs(std::slice::from_ref(&r.point), &sub)?;
        let e = net.ensemble_predict(&x, m, stream)?;
        let mean: Vec<f64> = e.mean.iter().copied().collect();
        let draws: Vec<Vec<f64>> = e.samples.iter().map(|s| s.iter().copied().collect()).collect();
        let nc = r.response.n_channels();
        for (k, &f) in sub.points().iter().enumerate() {
            for (ci, &ch) in r.response.channels().iter().enumerate() {
                let j = k * nc + ci;
                let var = draws.iter().map(|d| (d[j] - mean[j]).powi(2)).sum::<f64>() / draws.len() as f64;
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.point_index,
                    f17(f),
                    channel_label(ch),
                    f17(r.response.value(k, ci)),
                    f17(mean[j]),
                    f17(var.sqrt())
                );
            }
        }
    }
    Ok(out)
}

/// Runs the online loop; writes `history.csv`, `selections.csv`,
/// `summary.csv`, `net.json`, `uncertainty.csv` and `predictions.csv`.
pub fn cmd_loop(c: &Common) -> Result<Report, CliError> {
    let oracle = c.config.oracle()?;
    let cfg = c.loop_config();
    let (net, report, state) = run(&cfg, &oracle)?;
    let conventional = conventional_seconds(&cfg, &oracle)?;
    write_run(&c.out, &report, conventional)?;
    let grid = state.dataset.grid();
    write(&c.out, "selections.csv", &selections_csv(&report.history, &oracle.space, grid.points()))?;
    write(&c.out, "net.json", &net.to_json()?)?;
    let stream = RngStream::new(cfg.seed, "export");
    let points = state
        .validation
        .iter()
        .map(|&i| oracle.space.point(i))
        .collect::<Result<Vec<_>, _>>()?;
    if !points.is_empty() {
        let field = uncertainty_field(&net, state.validation.clone(), &points, grid, cfg.ensemble, &stream.child("field"))?;
        write(&c.out, "uncertainty.csv", &field_csv(&field, &oracle.space))?;
    }
    write(&c.out, "predictions.csv", &predictions_csv(&net, &state, cfg.ensemble, &stream.child("predictions"))?)?;
    Ok(report)
}

/// Runs each configured setting into `<out>/<setting>/` and collects the
/// rows into `<out>/baseline.csv`.
pub fn cmd_baseline(c: &Common) -> Result<Vec<Report>, CliError> {
    let oracle = c.config.oracle()?;
    let cfg = c.loop_config();
    let conventional = conventional_seconds(&cfg, &oracle)?;
    let mut reports = Vec::new();
    let mut table = format!("{SUMMARY_HEADER}\n");
    for name in &c.config.baseline.settings {
        let kind = setting(name).ok_or_else(|| CliError::Config(format!("unknown setting {name:?}")))?;
        let report = match kind {
            None => {
                let mut r = run(&cfg, &oracle)?.1;
                r.setting = name.clone();
                r
            }
            Some(b) => run_baseline(b, &cfg, &oracle)?,
        };
        write_run(&c.out.join(name), &report, conventional)?;
        table.push_str(&summary_row(&report, conventional));
        table.push('\n');
        reports.push(report);
    }
    write(&c.out, "baseline.csv", &table)?;
    Ok(reports)
}

fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Config(format!("{}: empty file", path.display())))?
        .split(',')
        .map(String::from)
        .collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect::<Vec<_>>()).collect::<Vec<_>>();
    if let Some(bad) = rows.iter().position(|r| r.len() != header.len()) {
        return Err(CliError::Config(format!("{}: row {} has the wrong column count", path.display(), bad + 2)));
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize, CliError> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| CliError::Config(format!("{}: missing column {name}", path.display())))
}

/// Joins run directories into `comparison.csv` (one row per setting) and
/// `curves.csv` (validation history of every run).
pub fn cmd_report(c: &Common) -> Result<String, CliError> {
    let mut inputs = c.config.report.inputs.clone();
    if inputs.is_empty() {
        let entries = std::fs::read_dir(&c.out).map_err(|e| io_err(&c.out, e))?;
        for e in entries {
            let p = e.map_err(|e| io_err(&c.out, e))?.path();
            if p.join("summary.csv").is_file() {
                inputs.push(p);
            }
        }
        inputs.sort();
    }
    if inputs.is_empty() {
        return Err(CliError::Config(format!("no run directories with summary.csv under {}", c.out.display())));
    }
    let mut table = String::from("setting,train_size,freq_num,sim_time_min,mse,rmse,r2,psnr\n");
    let mut curves = String::from("setting,iteration,val_rmse,val_r2,cumulative_sim_seconds,n_records\n");
    for dir in &inputs {
        let path = dir.join("summary.csv");
        let (header, rows) = read_csv(&path)?;
        let cols = ["setting", "train_size", "freq_num", "sim_time_min", "mse", "rmse", "r2", "psnr"]
            .iter()
            .map(|n| column(&header, n, &path))
            .collect::<Result<Vec<_>, _>>()?;
        for r in &rows {
            let fields: Vec<&str> = cols.iter().map(|&i| r[i].as_str()).collect();
            table.push_str(&fields.join(","));
            table.push('\n');
        }
        let hist = dir.join("history.csv");
        if hist.is_file() {
            let name = rows.first().map_or_else(|| dir.display().to_string(), |r| r[cols[0]].clone());
            let (_, hrows) = read_csv(&hist)?;
            for h in hrows {
                let _ = writeln!(curves, "{name},{}", h.join(","));
            }
        }
    }
    write(&c.out, "comparison.csv", &table)?;
    write(&c.out, "curves.csv", &curves)?;
    Ok(table)
}
