use std::collections::BTreeSet;

use rand::seq::index::sample;
use rayon::prelude::*;
use rfsurrogate_bnn::data::{input_scaler, rows_for};
use rfsurrogate_bnn::{BayesNet, Mode, NetConfig};
use rfsurrogate_core::metrics::metrics_slices;
use rfsurrogate_core::{Dataset, DesignPoint, FrequencyGrid, MetricReport, Record, RngStream, Split};
use rfsurrogate_oracle::OracleSpec;
use rfsurrogate_sampling::{aggregate_geometry, sample_geometry, uaw_afs, uncertainty_field, MixtureConfig};

use crate::state::{HistoryEntry, LoopState, Selection};
use crate::{FrequencyPolicy, LoopConfig, LoopError, Result};

/// Simulates each `(lattice index, frequency indices)` pair; records come
/// back sorted by lattice index.
fn simulate(oracle: &OracleSpec, grid: &FrequencyGrid, jobs: Vec<(usize, Vec<usize>)>, split: Split) -> Result<Vec<Record>> {
    let mut records = jobs
        .into_par_iter()
        .map(|(pi, mut freq)| -> Result<Record> {
            freq.sort_unstable();
            let point = oracle.space.point(pi)?;
            let sub = grid.select(&freq)?;
            let response = oracle.simulate(&point, &sub)?.to_db();
            Ok(Record {
                point,
                point_index: pi,
                freq_indices: freq,
                response,
                split,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    records.sort_by_key(|r| r.point_index);
    Ok(records)
}

fn channels(oracle: &OracleSpec) -> usize {
    let p = if oracle.kind == rfsurrogate_oracle::OracleKind::Rational {
        oracle.model.as_ref().map_or(1, |m| m.ports())
    } else {
        2
    };
    p * p
}

/// Untrained network sized for `oracle`; its initialization depends on both
/// `config.seed` and the run seed.
pub fn build_net(config: &NetConfig, oracle: &OracleSpec, grid: &FrequencyGrid, seed: u64) -> Result<BayesNet> {
    let mut cfg = config.clone();
    cfg.seed = config.seed.wrapping_add(seed);
    let scaler = input_scaler(&oracle.space, grid, cfg.mode)?;
    let out_len = if cfg.mode == Mode::Point { 1 } else { grid.len() };
    Ok(BayesNet::new(cfg, scaler, channels(oracle), out_len)?)
}

/// Random initial geometries at evenly spaced frequencies plus a densely
/// simulated validation set; no training yet.
pub fn initialize(config: &LoopConfig, oracle: &OracleSpec) -> Result<LoopState> {
    config.validate()?;
    let grid = oracle.dense_grid()?;
    let size = oracle.space.size();
    if config.initial_geometries == 0 || config.validation_geometries + config.initial_geometries > size {
        return Err(LoopError::Config(format!(
            "{} validation plus {} initial geometries exceed the {size}-point lattice",
            config.validation_geometries, config.initial_geometries
        )));
    }
    let root = RngStream::new(config.seed, "loop");
    let mut validation = sample(&mut root.child("validation"), size, config.validation_geometries).into_vec();
    validation.sort_unstable();
    let reserved: BTreeSet<usize> = validation.iter().copied().collect();
    let pool: Vec<usize> = (0..size).filter(|i| !reserved.contains(i)).collect();
    let mut initial: Vec<usize> = sample(&mut root.child("initial"), pool.len(), config.initial_geometries)
        .into_iter()
        .map(|k| pool[k])
        .collect();
    initial.sort_unstable();
    let freq = grid.uniform_indices(config.initial_frequencies);
    let mut dataset = Dataset::new(grid.clone());
    let train = simulate(oracle, &grid, initial.iter().map(|&i| (i, freq.clone())).collect(), Split::Train)?;
    let sim_cells = train.iter().map(Record::cells).sum();
    for r in train {
        dataset.push(r)?;
    }
    let all: Vec<usize> = (0..grid.len()).collect();
    for r in simulate(oracle, &grid, validation.iter().map(|&i| (i, all.clone())).collect(), Split::Validation)? {
        dataset.push(r)?;
    }
    let net = build_net(&config.net, oracle, &grid, config.seed)?;
    Ok(LoopState {
        iteration: 0,
        recent: (0..initial.len()).collect(),
        explored: initial.into_iter().collect(),
        validation,
        dataset,
        net,
        history: Vec::new(),
        sim_cells,
        cost_per_point: oracle.cost_per_point,
        exhausted: false,
        converged: false,
    })
}

/// dB metrics of the ensemble-mean prediction on the validation records,
/// or on the training records when no geometry was held out.
pub fn evaluate(net: &BayesNet, dataset: &Dataset, m: usize, stream: &RngStream) -> Result<MetricReport> {
    let mut recs: Vec<&Record> = dataset.split(Split::Validation).collect();
    if recs.is_empty() {
        recs = dataset.split(Split::Train).collect();
    }
    if recs.is_empty() {
        return Err(LoopError::EmptyDataset);
    }
    let grid = dataset.grid();
    let mut reference = Vec::new();
    let mut estimate = Vec::new();
    for r in recs {
        let sub = grid.select(&r.freq_indices)?;
        let x = net.query_inputs(std::slice::from_ref(&r.point), &sub)?;
        let e = net.ensemble_predict(&x, m, stream)?;
        reference.extend_from_slice(r.response.values());
        estimate.extend(e.mean.iter().copied());
    }
    Ok(metrics_slices(&reference, &estimate)?)
}

fn training_rows(net: &BayesNet, dataset: &Dataset, records: &[usize]) -> Result<rfsurrogate_bnn::TrainData> {
    let subset = dataset.subset(records.iter().map(|&i| &dataset.records()[i]))?;
    Ok(rows_for(net.config.mode, &subset, Split::Train)?)
}

/// One pass of train → quantify → sample → simulate.
pub fn iterate(mut state: LoopState, config: &LoopConfig, oracle: &OracleSpec) -> Result<LoopState> {
    if state.exhausted {
        return Ok(state);
    }
    let grid = state.dataset.grid().clone();
    let k = state.iteration + 1;
    let stream = RngStream::new(config.seed, "loop").child(&format!("iteration{k}"));
    let size = oracle.space.size();
    let reserved: BTreeSet<usize> = state.validation.iter().copied().collect();
    let unexplored: Vec<usize> = (0..size)
        .filter(|i| !state.explored.contains(i) && !reserved.contains(i))
        .collect();
    if unexplored.is_empty() {
        state.exhausted = true;
        return Ok(state);
    }
    let mut selected = Vec::new();
    let mut fallback = false;
    if config.batch_geometries > 0 {
        let epochs = if state.iteration == 0 {
            config.net.epochs
        } else {
            config.online_epochs()
        };
        if !state.recent.is_empty() {
            let rows = training_rows(&state.net, &state.dataset, &state.recent)?;
            state.net.fit(&rows, Some(epochs), &stream.child("fit"))?;
        }
        let candidates: Vec<usize> = if unexplored.len() > config.candidate_cap {
            let mut pick: Vec<usize> = sample(&mut stream.child("candidates"), unexplored.len(), config.candidate_cap)
                .into_iter()
                .map(|j| unexplored[j])
                .collect();
            pick.sort_unstable();
            pick
        } else {
            unexplored.clone()
        };
        let batch = config.batch_geometries.min(candidates.len());
        let n_freq = config.batch_frequencies.min(grid.len());
        let needs_field = config.lambda < 1.0 || config.frequency_policy == FrequencyPolicy::Uaw;
        let points: Vec<DesignPoint> = candidates.iter().map(|&i| oracle.space.point(i)).collect::<rfsurrogate_core::Result<_>>()?;
        let field = if needs_field {
            Some(uncertainty_field(&state.net, candidates.clone(), &points, &grid, config.ensemble, &stream.child("field"))?)
        } else {
            None
        };
        let agg = field.as_ref().map_or_else(|| vec![0.0; candidates.len()], aggregate_geometry);
        let pool: Vec<usize> = (0..candidates.len()).collect();
        let draw = sample_geometry(
            &agg,
            &pool,
            &MixtureConfig {
                lambda: config.lambda,
                batch,
            },
            &mut stream.child("geometry"),
        )?;
        fallback = draw.uniform_fallback && config.lambda < 1.0;
        let freq_stream = stream.child("frequency");
        let mut jobs = Vec::with_capacity(batch);
        for &c in &draw.indices {
            let freq = match (&field, config.frequency_policy) {
                (Some(f), FrequencyPolicy::Uaw) => {
                    uaw_afs(&grid, f.row(c), n_freq, &mut freq_stream.indexed(candidates[c] as u64))?.indices
                }
                _ => grid.uniform_indices(n_freq),
            };
            jobs.push((candidates[c], freq));
        }
        jobs.sort_by_key(|j| j.0);
        let records = simulate(oracle, &grid, jobs, Split::Train)?;
        let start = state.dataset.len();
        for r in records {
            state.sim_cells += r.cells();
            state.explored.insert(r.point_index);
            selected.push(Selection {
                point_index: r.point_index,
                freq_indices: r.freq_indices.clone(),
            });
            state.dataset.push(r)?;
        }
        state.recent = (start..state.dataset.len()).collect();
    }
    let validation = evaluate(&state.net, &state.dataset, config.ensemble, &stream.child("validation"))?;
    state.iteration = k;
    state.converged = config.rmse_threshold.is_some_and(|t| validation.rmse < t);
    state.history.push(HistoryEntry {
        iteration: k,
        validation,
        cumulative_sim_seconds: state.sim_seconds(),
        n_records: state.dataset.cells(Split::Train),
        selected,
        uniform_fallback: fallback,
    });
    if state.explored.len() + reserved.len() == size {
        state.exhausted = true;
    }
    Ok(state)
}

/// Summary shared by the loop and every baseline setting.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub setting: String,
    pub train_geometries: usize,
    /// Frequencies per training geometry (the largest, if they differ).
    pub freq_num: usize,
    pub train_cells: usize,
    pub sim_seconds: f64,
    pub metrics: MetricReport,
    /// R² is undefined or rests on fewer than two training cells.
    pub r2_degenerate: bool,
    pub history: Vec<HistoryEntry>,
}

/// Trains the final network on every accumulated training record.
pub fn finalize(state: &LoopState, config: &LoopConfig, oracle: &OracleSpec) -> Result<(BayesNet, Report)> {
    let train: Vec<usize> = state
        .dataset
        .records()
        .iter()
        .enumerate()
        .filter(|(_, r)| r.split == Split::Train)
        .map(|(i, _)| i)
        .collect();
    if train.is_empty() {
        return Err(LoopError::EmptyDataset);
    }
    let root = RngStream::new(config.seed, "loop").child("final");
    let mut net = if config.final_warm_start {
        state.net.clone()
    } else {
        build_net(&config.net, oracle, state.dataset.grid(), config.seed)?
    };
    let rows = training_rows(&net, &state.dataset, &train)?;
    net.fit(&rows, Some(config.final_epochs), &root.child("fit"))?;
    let metrics = evaluate(&net, &state.dataset, config.ensemble, &root.child("validation"))?;
    let recs = state.dataset.split(Split::Train);
    let report = Report {
        setting: String::new(),
        train_geometries: state.dataset.split(Split::Train).count(),
        freq_num: recs.map(Record::cells).max().unwrap_or(0),
        train_cells: state.sim_cells,
        sim_seconds: state.sim_seconds(),
        r2_degenerate: metrics.r_squared.is_none() || state.sim_cells < 2,
        metrics,
        history: state.history.clone(),
    };
    Ok((net, report))
}

/// Full online run: initialize, iterate until a stop rule fires, finalize.
pub fn run(config: &LoopConfig, oracle: &OracleSpec) -> Result<(BayesNet, Report, LoopState)> {
    let mut state = initialize(config, oracle)?;
    while !state.is_done(config.max_iterations) {
        state = iterate(state, config, oracle)?;
    }
    let (net, mut report) = finalize(&state, config, oracle)?;
    report.setting = "uaw".into();
    Ok((net, report, state))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// Every pool geometry at the full dense grid, deterministic network.
    Conventional,
    RandomUniform,
    RandomUaw,
}

impl Baseline {
    pub fn name(self) -> &'static str {
        match self {
            Baseline::Conventional => "conventional",
            Baseline::RandomUniform => "random-uniform",
            Baseline::RandomUaw => "random-uaw",
        }
    }
}

/// Dense-lattice simulation cost of the conventional setting, in seconds.
pub fn conventional_seconds(config: &LoopConfig, oracle: &OracleSpec) -> Result<f64> {
    let g = oracle.dense_grid()?.len();
    let pool = oracle.space.size().saturating_sub(config.validation_geometries);
    Ok((pool * g) as f64 * oracle.cost_per_point)
}

/// The conventional setting's data: every non-validation geometry at the
/// full dense grid, with the configuration it is trained under
/// (deterministic network, no online iterations).
pub fn conventional_state(config: &LoopConfig, oracle: &OracleSpec) -> Result<(LoopConfig, LoopState)> {
    let mut cfg = config.clone();
    cfg.net.deterministic = true;
    cfg.initial_geometries = oracle.space.size().saturating_sub(config.validation_geometries);
    cfg.initial_frequencies = oracle.dense_grid()?.len();
    let state = initialize(&cfg, oracle)?;
    Ok((cfg, state))
}

pub fn run_baseline(kind: Baseline, config: &LoopConfig, oracle: &OracleSpec) -> Result<Report> {
    let mut report = match kind {
        Baseline::RandomUniform | Baseline::RandomUaw => {
            let mut cfg = config.clone();
            cfg.lambda = 1.0;
            cfg.frequency_policy = if kind == Baseline::RandomUniform {
                FrequencyPolicy::Uniform
            } else {
                FrequencyPolicy::Uaw
            };
            run(&cfg, oracle)?.1
        }
        Baseline::Conventional => {
            let (cfg, state) = conventional_state(config, oracle)?;
            finalize(&state, &cfg, oracle)?.1
        }
    };
    report.setting = kind.name().into();
    Ok(report)
}
