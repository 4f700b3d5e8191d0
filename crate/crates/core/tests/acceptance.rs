//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! fails.

mod common;

use std::fs;
use std::process::ExitCode;

use fashion_abm::engine::{run_sweep_with, Schedule, SweepCell};
use fashion_abm::influence::{blend, peer_contribution, peer_update, PeerTerm};
use fashion_abm::oracle::{check_scenario, compare_with_engine};
use fashion_abm::output::{emit_outputs, histogram};
use fashion_abm::{presets, run, MetricsSeries, OutputKind, Simulation, Tracked};
use rayon::prelude::*;

const SEEDS: u64 = 20;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn share(hits: usize, n: usize) -> f64 {
    hits as f64 / n as f64
}

fn kernels() -> Verdict {
    let mut bad = Vec::new();
    for seed in 0..3 {
        bad.extend(common::kernel_mismatches(200, seed, 1e-12));
    }
    verdict(bad.is_empty(), format!("6 kernels x 600 random inputs + worked values, {} mismatches {:?}", bad.len(), bad.first()))
}

fn worked_peer_example() -> Verdict {
    let (o, _) = peer_contribution(0.5, 0.9, 0.9, Some(0.2));
    // one heard peer with full weight on its terms
    let whole = peer_update(0.5, 1.0, &[PeerTerm { opinion: 0.9, behavior: 0.9, s_pp: 0.0 }], Some(0.2));
    let pass = o == 1.0 - 0.9 && (o - 0.1).abs() <= 1e-12 && (whole - 0.1).abs() <= 1e-12;
    verdict(pass, format!("reflected peer opinion {o:?}, update {whole:?}"))
}

fn blend_shape() -> Verdict {
    let grid = |k: usize, n: usize| k as f64 / (n - 1) as f64;
    let (mut fixed, mut ident, mut full, mut overshoot) = (0, 0, 0, 0);
    for i in 0..101 {
        let prior = grid(i, 101);
        for j in 0..101 {
            let promoted = grid(j, 101);
            for k in 0..11 {
                let s = k as f64 / 10.0;
                let v = blend(prior, promoted, s, 2.0);
                if i == j && v != prior {
                    fixed += 1;
                }
                if k == 0 && v != prior {
                    ident += 1;
                }
                if k == 10 && v != promoted {
                    full += 1;
                }
                if (v - prior).abs() > s * (promoted - prior).abs() {
                    overshoot += 1;
                }
            }
        }
    }
    verdict(
        fixed + ident + full + overshoot == 0,
        format!("101x101x11 grid: fixed-point {fixed}, S=0 {ident}, S=1 {full}, overshoot {overshoot} violations"),
    )
}

fn engine_equivalence() -> Verdict {
    let mut failures = Vec::new();
    for seed in 0..5 {
        match compare_with_engine(&check_scenario(12, 3, seed)) {
            Ok(None) => {}
            Ok(Some(at)) => failures.push(format!("seed {seed} diverges at {at:?}")),
            Err(e) => failures.push(format!("seed {seed}: {e}")),
        }
    }
    verdict(failures.is_empty(), format!("12 agents, 3 ticks, 5 seeds bit-identical; {failures:?}"))
}

fn determinism() -> Verdict {
    let c1 = presets::preset("C1").unwrap();
    let cell = c1.cells().remove(0).scenario.with_seed(42);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        emit_outputs(&run(&cell).unwrap(), &OutputKind::ALL, d.path(), "C1").unwrap();
    }
    let same_files = OutputKind::ALL.iter().all(|k| {
        fs::read(dirs[0].path().join(k.file_name())).unwrap() == fs::read(dirs[1].path().join(k.file_name())).unwrap()
    });

    let mut short = c1.clone();
    short.engine.ticks = 60;
    let seeds = [42, 7, 3];
    let sweeps: Vec<_> = [Schedule::Parallel, Schedule::Sequential, Schedule::Reversed]
        .iter()
        .map(|&s| run_sweep_with(&short, &[], &seeds, s).unwrap())
        .collect();
    let same_sweeps = sweeps[0] == sweeps[1] && sweeps[0] == sweeps[2];
    verdict(
        same_files && same_sweeps,
        format!("C1 seed 42 outputs byte-identical: {same_files}; sweep parallel = sequential = reversed: {same_sweeps}"),
    )
}

fn unit(x: f64) -> bool {
    (0.0..=1.0).contains(&x)
}

/// Steps one run, checking every agent every tick.
fn bounded_run(scenario: &fashion_abm::ScenarioConfig) -> Result<(), String> {
    let mut sim = Simulation::new(scenario).map_err(|e| e.to_string())?;
    let n = sim.agents().len();
    loop {
        for a in sim.agents() {
            let s = &a.susceptibilities;
            if !a.attributes.to_array().into_iter().all(unit) || ![s.s_pp, s.s_sm, s.s_gov, a.purchase_prob].into_iter().all(unit) {
                return Err(format!("agent {} out of range at tick {}", a.id, sim.tick()));
            }
        }
        if histogram(sim.agents()).iter().sum::<usize>() != n {
            return Err(format!("histogram mass differs at tick {}", sim.tick()));
        }
        if !sim.step() {
            break;
        }
    }
    let m = sim.metrics();
    for what in Tracked::ALL {
        if !m.mean(what).iter().all(|v| unit(*v)) {
            return Err(format!("mean {what:?} out of range"));
        }
    }
    let g = m.mean(Tracked::GovSusceptibility);
    for (i, w) in g.windows(2).enumerate() {
        let tick = m.ticks[i];
        if sim.campaign_active(tick) {
            if w[1] > w[0] {
                return Err(format!("mean s_gov rose at tick {}", tick + 1));
            }
        } else if w[1] != w[0] {
            return Err(format!("mean s_gov moved with no campaign at tick {}", tick + 1));
        }
    }
    Ok(())
}

fn boundedness() -> Verdict {
    let jobs: Vec<(&str, usize, u64)> = presets::PRESET_NAMES
        .iter()
        .flat_map(|&name| {
            let cells = presets::preset(name).unwrap().cells().len();
            (0..cells).flat_map(move |c| (0..5).map(move |seed| (name, c, seed)))
        })
        .collect();
    let failures: Vec<String> = jobs
        .par_iter()
        .filter_map(|&(name, c, seed)| {
            let cell = presets::preset(name).unwrap().cells().remove(c).scenario.with_seed(seed);
            bounded_run(&cell).err().map(|e| format!("{name} cell {c} seed {seed}: {e}"))
        })
        .collect();
    verdict(failures.is_empty(), format!("{} runs (13 presets, every cell, 5 seeds), {} failures {:?}", jobs.len(), failures.len(), failures.first()))
}

fn sweep(name: &str) -> Vec<SweepCell> {
    let seeds: Vec<u64> = (0..SEEDS).collect();
    run_sweep_with(&presets::preset(name).unwrap(), &[], &seeds, Schedule::Parallel).unwrap()
}

fn cell(cells: &[SweepCell], value: f64) -> &[(u64, MetricsSeries)] {
    &cells.iter().find(|c| c.assignments[0].1 == value).unwrap().runs
}

fn communication_ordering() -> Vec<Verdict> {
    let a1 = sweep("A1");
    let runs: Vec<_> = [0.1, 0.3, 0.5].iter().map(|&d| cell(&a1, d)).collect();
    let n = SEEDS as usize;
    let (mut increasing, mut env_negative) = (0, 0);
    for i in 0..n {
        let wk: Vec<f64> = runs
            .iter()
            .map(|r| (r[i].1.final_net_change(Tracked::Wca) + r[i].1.final_net_change(Tracked::Know)) / 2.0)
            .collect();
        if wk[0] < wk[1] && wk[1] < wk[2] {
            increasing += 1;
        }
        if runs.iter().all(|r| r[i].1.final_net_change(Tracked::Env) < 0.0) {
            env_negative += 1;
        }
    }
    vec![
        verdict(share(increasing, n) >= 0.7, format!("(wca+know)/2 net change increasing in delta: {increasing}/{n} seeds (need 70%)")),
        verdict(share(env_negative, n) >= 0.7, format!("env net change negative at every delta: {env_negative}/{n} seeds (need 70%)")),
    ]
}

fn stance_ordering() -> Vec<Verdict> {
    let c1 = sweep("C1");
    let dp = |zeta: f64, i: usize| cell(&c1, zeta)[i].1.final_net_change(Tracked::PurchaseProb);
    let n = SEEDS as usize;
    let (mut diminishing, mut lower) = (0, 0);
    for i in 0..n {
        if (dp(1.5, i) - dp(1.2, i)).abs() < (dp(1.2, i) - dp(1.0, i)).abs() {
            diminishing += 1;
        }
        // same seed, same baseline: final means order like net changes
        let end = |z: f64| *cell(&c1, z)[i].1.mean(Tracked::PurchaseProb).last().unwrap();
        if end(1.2) < end(0.8) {
            lower += 1;
        }
    }
    vec![
        verdict(share(diminishing, n) >= 0.7, format!("|dp(1.5)-dp(1.2)| < |dp(1.2)-dp(1.0)|: {diminishing}/{n} seeds (need 70%)")),
        verdict(share(lower, n) >= 0.9, format!("final purchase prob zeta 1.2 < zeta 0.8: {lower}/{n} seeds (need 90%)")),
    ]
}

/// Mean wca change from the halt tick to the end of the run.
fn retention(m: &MetricsSeries, halt: u64) -> f64 {
    let w = m.mean(Tracked::Wca);
    w[w.len() - 1] - w[m.record_at(halt).unwrap()]
}

fn halt_resilience() -> Verdict {
    let c4 = sweep("C4");
    let halt = presets::HALT_TICK;
    let (low, high) = (cell(&c4, 0.1), cell(&c4, 0.3));
    let n = SEEDS as usize;
    let wins = (0..n).filter(|&i| retention(&high[i].1, halt) > retention(&low[i].1, halt)).count();
    verdict(share(wins, n) >= 0.7, format!("wca retention after halt, tau 0.3 > tau 0.1: {wins}/{n} seeds (need 70%)"))
}

fn main() -> ExitCode {
    let mut results: Vec<(String, Verdict)> = vec![
        ("1".into(), kernels()),
        ("2".into(), worked_peer_example()),
        ("3".into(), blend_shape()),
        ("4".into(), engine_equivalence()),
        ("5".into(), determinism()),
        ("6".into(), boundedness()),
    ];
    for (part, v) in ["7a", "7b"].into_iter().zip(communication_ordering()) {
        results.push((part.into(), v));
    }
    for (part, v) in ["8a", "8b"].into_iter().zip(stance_ordering()) {
        results.push((part.into(), v));
    }
    results.push(("9".into(), halt_resilience()));

    let mut failed = 0;
    for (id, v) in &results {
        println!("criterion {id}: {} - {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
