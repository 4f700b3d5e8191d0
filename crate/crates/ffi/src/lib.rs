//! C ABI for the simulator.
//!
//! Every fallible function returns a `FabmStatus`. On anything other than
//! `FABM_STATUS_OK` a description is available from `fabm_last_error`
//! until the next failing call on the same thread. Results are written
//! through out-pointers, which must be valid and non-null.
//!
//! Simulations are opaque `FabmSimulation` handles created by
//! `fabm_simulation_from_*` and released with `fabm_simulation_free`.
//! A handle must not be used from two threads at once.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fashion_abm::influence::{self, PeerTerm};
use fashion_abm::model::{purchase_probability, AgentAttributes};
use fashion_abm::output::emit_outputs;
use fashion_abm::{
    parse_config, presets, Error, OutputKind, RegressionCoefficients, RunOutput, ScenarioConfig,
    Simulation, Tracked,
};

/// Result codes. Zero is success.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FabmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OutOfRange = 3,
    Config = 4,
    Parse = 5,
    Io = 6,
    Csv = 7,
    Panic = 99,
}

/// Values accepted by `fabm_simulation_mean`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FabmTracked {
    Env = 0,
    Wca = 1,
    Know = 2,
    Trust = 3,
    PurchaseProb = 4,
    GovSusceptibility = 5,
}

/// One peer as seen by `fabm_peer_update`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct FabmPeerTerm {
    pub opinion: f64,
    pub behavior: f64,
    pub s_pp: f64,
}

/// Opaque simulation handle.
pub struct FabmSimulation {
    sim: Simulation,
    outputs: Vec<OutputKind>,
    label: String,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).unwrap_or_default());
}

fn fail(status: FabmStatus, message: impl Into<String>) -> FabmStatus {
    set_error(message);
    status
}

fn from_error(e: Error) -> FabmStatus {
    let status = match &e {
        Error::InvalidSpec(_) => FabmStatus::InvalidArgument,
        Error::OutOfRange { .. } => FabmStatus::OutOfRange,
        Error::Parse { .. } => FabmStatus::Parse,
        Error::Config { .. } => FabmStatus::Config,
        Error::CsvValue { .. } | Error::CsvSchema(_) | Error::Csv(_) => FabmStatus::Csv,
        Error::Io { .. } => FabmStatus::Io,
    };
    fail(status, e.to_string())
}

/// Runs `body`, turning panics into `FABM_STATUS_PANIC`.
fn guard(body: impl FnOnce() -> FabmStatus) -> FabmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(FabmStatus::Panic, format!("internal error: {msg}"))
        }
    }
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FabmStatus {
    if out.is_null() {
        return fail(FabmStatus::NullPointer, "output pointer is null");
    }
    out.write(value);
    FabmStatus::Ok
}

unsafe fn read_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, FabmStatus> {
    if ptr.is_null() {
        return Err(fail(FabmStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(ptr)
        .to_str()
        .map_err(|_| fail(FabmStatus::InvalidArgument, format!("{what} is not valid UTF-8")))
}

fn check_unit(name: &str, v: f64) -> Result<(), FabmStatus> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(fail(FabmStatus::OutOfRange, format!("{name} = {v} is outside [0, 1]")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<(), FabmStatus> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(fail(FabmStatus::InvalidArgument, format!("{name} is not finite")))
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Message for the last failure on this thread; empty if none. The pointer
/// stays valid until the next failing call on this thread.
#[no_mangle]
pub extern "C" fn fabm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn fabm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Purchase probability for nine attributes (sex, age, env, exp, wca,
/// know, trust, access, freq) under the survey coefficients.
///
/// # Safety
/// `attributes` must point to 9 readable doubles.
#[no_mangle]
pub unsafe extern "C" fn fabm_purchase_probability(attributes: *const f64, out: *mut f64) -> FabmStatus {
    guard(|| {
        if attributes.is_null() {
            return fail(FabmStatus::NullPointer, "attributes is null");
        }
        let mut values = [0.0; 9];
        values.copy_from_slice(std::slice::from_raw_parts(attributes, 9));
        for (name, v) in fashion_abm::model::ATTRIBUTE_NAMES.iter().zip(values) {
            tri!(check_unit(name, v));
        }
        let attrs = AgentAttributes::from_array(values);
        write_out(out, purchase_probability(&attrs, &RegressionCoefficients::SURVEY))
    })
}

/// Peer-pressure update of one opinion. `tau < 0` means non-polarized.
///
/// # Safety
/// `peers` must point to `count` readable terms (it may be null if `count` is 0).
#[no_mangle]
pub unsafe extern "C" fn fabm_peer_update(
    self_opinion: f64,
    s_pp_self: f64,
    peers: *const FabmPeerTerm,
    count: usize,
    tau: f64,
    out: *mut f64,
) -> FabmStatus {
    guard(|| {
        tri!(check_unit("self_opinion", self_opinion));
        tri!(check_unit("s_pp_self", s_pp_self));
        tri!(check_finite("tau", tau));
        if peers.is_null() && count > 0 {
            return fail(FabmStatus::NullPointer, "peers is null");
        }
        let slice = if count == 0 { &[][..] } else { std::slice::from_raw_parts(peers, count) };
        let mut terms = Vec::with_capacity(count);
        for p in slice {
            tri!(check_unit("peer opinion", p.opinion));
            tri!(check_unit("peer behavior", p.behavior));
            tri!(check_unit("peer s_pp", p.s_pp));
            terms.push(PeerTerm {
                opinion: p.opinion,
                behavior: p.behavior,
                s_pp: p.s_pp,
            });
        }
        let tau = (tau >= 0.0).then_some(tau);
        write_out(out, influence::peer_update(self_opinion, s_pp_self, &terms, tau))
    })
}

/// Capped social-media feedback for one opinion.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_sm_feedback(opinion: f64, s_sm: f64, beta: f64, out: *mut f64) -> FabmStatus {
    guard(|| {
        tri!(check_unit("opinion", opinion));
        tri!(check_unit("s_sm", s_sm));
        tri!(check_finite("beta", beta));
        write_out(out, influence::sm_feedback(opinion, s_sm, beta))
    })
}

/// Damped move from `prior` toward `promoted`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_blend(
    prior: f64,
    promoted: f64,
    susceptibility: f64,
    gamma: f64,
    out: *mut f64,
) -> FabmStatus {
    guard(|| {
        tri!(check_unit("prior", prior));
        tri!(check_unit("promoted", promoted));
        tri!(check_unit("susceptibility", susceptibility));
        tri!(check_finite("gamma", gamma));
        write_out(out, influence::blend(prior, promoted, susceptibility, gamma))
    })
}

/// Opinion promoted by a campaign of stance `zeta`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_gov_feedback(mean_opinion: f64, zeta: f64, out: *mut f64) -> FabmStatus {
    guard(|| {
        tri!(check_unit("mean_opinion", mean_opinion));
        tri!(check_finite("zeta", zeta));
        write_out(out, influence::gov_feedback(mean_opinion, zeta))
    })
}

/// One tick of campaign fatigue.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_fatigue_step(s_gov: f64, tick: u64, fatigue_rate: f64, out: *mut f64) -> FabmStatus {
    guard(|| {
        tri!(check_unit("s_gov", s_gov));
        tri!(check_finite("fatigue_rate", fatigue_rate));
        write_out(out, influence::fatigue_step(s_gov, tick, fatigue_rate))
    })
}

/// Number of built-in presets.
#[no_mangle]
pub extern "C" fn fabm_preset_count() -> usize {
    presets::PRESET_NAMES.len()
}

/// Static name of preset `index`, or null when out of range.
#[no_mangle]
pub extern "C" fn fabm_preset_name(index: usize) -> *const c_char {
    const NAMES: [&CStr; 13] = [
        c"A1", c"A2", c"A3", c"B1", c"B2", c"B3", c"B4", c"B5", c"C1", c"C2", c"C3", c"C4", c"C5",
    ];
    NAMES.get(index).map_or(std::ptr::null(), |n| n.as_ptr())
}

fn cell_count(scenario: &ScenarioConfig) -> usize {
    scenario.grid.iter().map(|a| a.values.len()).product()
}

fn build(scenario: ScenarioConfig, cell: usize, seed: Option<u64>) -> Result<Box<FabmSimulation>, FabmStatus> {
    scenario.validate().map_err(from_error)?;
    let cells = scenario.cells();
    let Some(chosen) = cells.into_iter().nth(cell) else {
        return Err(fail(
            FabmStatus::OutOfRange,
            format!("cell {cell} does not exist ({} cells)", cell_count(&scenario)),
        ));
    };
    let label = chosen.label();
    let mut single = chosen.scenario;
    if let Some(seed) = seed {
        single.engine.seed = seed;
    }
    let sim = Simulation::new(&single).map_err(from_error)?;
    Ok(Box::new(FabmSimulation {
        sim,
        outputs: scenario.outputs,
        label,
    }))
}

unsafe fn store(out: *mut *mut FabmSimulation, handle: Box<FabmSimulation>) -> FabmStatus {
    write_out(out, Box::into_raw(handle))
}

/// Number of grid cells in a preset.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_preset_cell_count(name: *const c_char, out: *mut usize) -> FabmStatus {
    guard(|| {
        let name = tri!(read_str(name, "name"));
        let Some(scenario) = presets::preset(name) else {
            return fail(FabmStatus::InvalidArgument, format!("unknown preset `{name}`"));
        };
        write_out(out, cell_count(&scenario))
    })
}

/// Creates a simulation for one cell of a preset with the given seed.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_from_preset(
    name: *const c_char,
    cell: usize,
    seed: u64,
    out: *mut *mut FabmSimulation,
) -> FabmStatus {
    guard(|| {
        if out.is_null() {
            return fail(FabmStatus::NullPointer, "output pointer is null");
        }
        let name = tri!(read_str(name, "name"));
        let Some(scenario) = presets::preset(name) else {
            return fail(FabmStatus::InvalidArgument, format!("unknown preset `{name}`"));
        };
        store(out, tri!(build(scenario, cell, Some(seed))))
    })
}

/// Creates a simulation for one cell of a config given as text. Relative
/// population CSV paths resolve against the working directory.
///
/// # Safety
/// `config` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_from_config(
    config: *const c_char,
    cell: usize,
    out: *mut *mut FabmSimulation,
) -> FabmStatus {
    guard(|| {
        if out.is_null() {
            return fail(FabmStatus::NullPointer, "output pointer is null");
        }
        let text = tri!(read_str(config, "config"));
        let scenario = tri!(parse_config(text).map_err(from_error));
        store(out, tri!(build(scenario, cell, None)))
    })
}

unsafe fn handle<'a>(sim: *mut FabmSimulation) -> Result<&'a mut FabmSimulation, FabmStatus> {
    sim.as_mut().ok_or_else(|| fail(FabmStatus::NullPointer, "simulation handle is null"))
}

/// Advances one tick. `advanced` (may be null) is set to false once the
/// run has already reached its last tick.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_step(sim: *mut FabmSimulation, advanced: *mut bool) -> FabmStatus {
    guard(|| {
        let h = tri!(handle(sim));
        let moved = h.sim.step();
        if !advanced.is_null() {
            advanced.write(moved);
        }
        FabmStatus::Ok
    })
}

/// Runs all remaining ticks.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_run(sim: *mut FabmSimulation) -> FabmStatus {
    guard(|| {
        tri!(handle(sim)).sim.run_to_end();
        FabmStatus::Ok
    })
}

/// Ticks completed so far.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_tick(sim: *const FabmSimulation, out: *mut u64) -> FabmStatus {
    guard(|| {
        let h = tri!(handle(sim.cast_mut()));
        write_out(out, h.sim.tick())
    })
}

/// Number of agents.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_agent_count(sim: *const FabmSimulation, out: *mut usize) -> FabmStatus {
    guard(|| {
        let h = tri!(handle(sim.cast_mut()));
        write_out(out, h.sim.agents().len())
    })
}

/// Current population mean of `what`, a `FabmTracked` value.
///
/// # Safety
/// `sim` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_mean(
    sim: *const FabmSimulation,
    what: u32,
    out: *mut f64,
) -> FabmStatus {
    guard(|| {
        let h = tri!(handle(sim.cast_mut()));
        let Some(&tracked) = Tracked::ALL.get(what as usize) else {
            return fail(FabmStatus::InvalidArgument, format!("unknown tracked quantity {what}"));
        };
        let (mean, _) = fashion_abm::engine::mean_variance(h.sim.agents(), tracked);
        write_out(out, mean)
    })
}

/// Writes the scenario's configured outputs for the state so far into
/// `dir`, creating it if needed.
///
/// # Safety
/// `sim` must be a live handle; `dir` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_write_outputs(sim: *const FabmSimulation, dir: *const c_char) -> FabmStatus {
    guard(|| {
        let h = tri!(handle(sim.cast_mut()));
        let dir = tri!(read_str(dir, "dir"));
        let run = RunOutput {
            metrics: h.sim.metrics().clone(),
            agents: h.sim.agents().to_vec(),
        };
        match emit_outputs(&run, &h.outputs, Path::new(dir), &h.label) {
            Ok(_) => FabmStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn fabm_simulation_free(sim: *mut FabmSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}
