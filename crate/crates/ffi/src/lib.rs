//! C interface to `temporal-lab`.
//!
//! Scenarios and tables live behind opaque handles that the caller frees
//! with the matching `*_free`. Every fallible function returns a
//! [`TlStatus`]; on failure [`tl_last_error`] describes the cause until the
//! next call on the same thread. Settings are numbered from 0, outcome
//! index 0 is -1 and index 1 is +1.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use temporal_lab::bounds::{
    hv_correlator_feasible, hv_table_feasible, tsirelson_feasible, FeasibilityVerdict,
};
use temporal_lab::hardy::{hardy_check, hardy_max_temporal, DEFAULT_TOL};
use temporal_lab::instrument::round_trip;
use temporal_lab::io::{parse_scenario, parse_table, ScenarioJson, TableJson};
use temporal_lab::operator::Outcome;
use temporal_lab::presets::{preset, Preset};
use temporal_lab::scenario::{
    correlators, full_table, temporal_joint, CorrelatorMatrix, ProbabilityTable, TemporalScenario,
};
use temporal_lab::signaling::{channel_capacity, InducedChannel};
use temporal_lab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    BackwardSignaling = 4,
    BudgetExceeded = 5,
    UnknownPreset = 6,
    Panic = 7,
}

/// A temporal scenario.
pub struct TlScenario(TemporalScenario);

/// A table of joint probabilities `P(r,s|k,l)`.
pub struct TlTable(ProbabilityTable);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> TlStatus {
    match e {
        Error::Parse(_) => TlStatus::Parse,
        Error::BackwardSignaling { .. } => TlStatus::BackwardSignaling,
        Error::BudgetExceeded { .. } => TlStatus::BudgetExceeded,
        Error::UnknownPreset(_) => TlStatus::UnknownPreset,
        _ => TlStatus::InvalidArgument,
    }
}

struct Fail(TlStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(TlStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records failures and turns panics into [`TlStatus::Panic`].
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> TlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TlStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            TlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(TlStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn scenario<'a>(p: *const TlScenario) -> Result<&'a TemporalScenario, Fail> {
    p.as_ref().map(|s| &s.0).ok_or_else(|| null("scenario"))
}

unsafe fn table<'a>(p: *const TlTable) -> Result<&'a ProbabilityTable, Fail> {
    p.as_ref().map(|t| &t.0).ok_or_else(|| null("table"))
}

unsafe fn write_array(dst: *mut f64, values: &[f64], what: &str) -> Result<(), Fail> {
    if dst.is_null() {
        return Err(null(what));
    }
    std::slice::from_raw_parts_mut(dst, values.len()).copy_from_slice(values);
    Ok(())
}

fn string_out(s: String, dst: &mut *mut c_char) -> Result<(), Fail> {
    *dst = CString::new(s)
        .map_err(|_| Fail(TlStatus::InvalidArgument, "string contains nul".into()))?
        .into_raw();
    Ok(())
}

/// Message for the last failure on this thread, or null. Owned by the
/// library.
#[no_mangle]
pub extern "C" fn tl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn tl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn tl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a scenario in the JSON schema.
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_from_json(
    json: *const c_char,
    result: *mut *mut TlScenario,
) -> TlStatus {
    guard(|| {
        let dst = out(result, "result")?;
        let sc = parse_scenario(text(json, "json")?)?;
        *dst = Box::into_raw(Box::new(TlScenario(sc)));
        Ok(())
    })
}

/// One of the built-in scenarios, by name.
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_preset(
    name: *const c_char,
    result: *mut *mut TlScenario,
) -> TlStatus {
    guard(|| {
        let dst = out(result, "result")?;
        let name = text(name, "name")?;
        match preset(name)? {
            Preset::Scenario(sc) => *dst = Box::into_raw(Box::new(TlScenario(sc))),
            Preset::Table(_) => {
                return Err(Fail(
                    TlStatus::InvalidArgument,
                    format!("preset {name} is a table"),
                ))
            }
        }
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tl_scenario_free(sc: *mut TlScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Dimension and numbers of settings.
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_shape(
    sc: *const TlScenario,
    dim: *mut usize,
    m: *mut usize,
    n: *mut usize,
) -> TlStatus {
    guard(|| {
        let s = scenario(sc)?;
        *out(dim, "dim")? = s.dim();
        *out(m, "m")? = s.m();
        *out(n, "n")? = s.n();
        Ok(())
    })
}

/// `P(r,s|k,l)` into `p[2 * r + s]`; `p` holds 4 values.
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_joint(
    sc: *const TlScenario,
    k: usize,
    l: usize,
    p: *mut f64,
) -> TlStatus {
    guard(|| {
        let j = temporal_joint(scenario(sc)?, k, l)?;
        write_array(p, &[j.p[0][0], j.p[0][1], j.p[1][0], j.p[1][1]], "p")
    })
}

/// Correlators `C[k][l]` row-major into `c`, which holds `len >= m * n`
/// values.
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_correlators(
    sc: *const TlScenario,
    c: *mut f64,
    len: usize,
) -> TlStatus {
    guard(|| {
        let s = scenario(sc)?;
        let cm = correlators(s);
        if c.is_null() {
            return Err(null("c"));
        }
        if len < cm.entries().len() {
            return Err(Fail(
                TlStatus::InvalidArgument,
                format!("buffer holds {len}, need {}", cm.entries().len()),
            ));
        }
        std::slice::from_raw_parts_mut(c, cm.entries().len()).copy_from_slice(cm.entries());
        Ok(())
    })
}

/// The scenario in the JSON schema; free with [`tl_string_free`].
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_to_json(
    sc: *const TlScenario,
    json: *mut *mut c_char,
) -> TlStatus {
    guard(|| {
        let s = serde_json::to_string(&ScenarioJson::from(scenario(sc)?)).expect("serializable");
        string_out(s, out(json, "json")?)
    })
}

/// All joint probabilities of a scenario.
#[no_mangle]
pub unsafe extern "C" fn tl_scenario_table(
    sc: *const TlScenario,
    result: *mut *mut TlTable,
) -> TlStatus {
    guard(|| {
        let dst = out(result, "result")?;
        *dst = Box::into_raw(Box::new(TlTable(full_table(scenario(sc)?)?)));
        Ok(())
    })
}

/// Parses a table `{m, n, values[r][s][k][l]}`.
#[no_mangle]
pub unsafe extern "C" fn tl_table_from_json(
    json: *const c_char,
    result: *mut *mut TlTable,
) -> TlStatus {
    guard(|| {
        let dst = out(result, "result")?;
        *dst = Box::into_raw(Box::new(TlTable(parse_table(text(json, "json")?)?)));
        Ok(())
    })
}

/// A built-in table, or the table of a built-in scenario.
#[no_mangle]
pub unsafe extern "C" fn tl_table_preset(
    name: *const c_char,
    result: *mut *mut TlTable,
) -> TlStatus {
    guard(|| {
        let dst = out(result, "result")?;
        *dst = Box::into_raw(Box::new(TlTable(preset(text(name, "name")?)?.table()?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tl_table_free(t: *mut TlTable) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tl_table_get(
    t: *const TlTable,
    r: usize,
    s: usize,
    k: usize,
    l: usize,
    value: *mut f64,
) -> TlStatus {
    guard(|| {
        let t = table(t)?;
        if r > 1 || s > 1 {
            return Err(Fail(
                TlStatus::InvalidArgument,
                "outcome index must be 0 or 1".into(),
            ));
        }
        if k >= t.m() || l >= t.n() {
            return Err(Fail(
                TlStatus::InvalidArgument,
                format!("setting ({k}, {l}) out of range"),
            ));
        }
        *out(value, "value")? = t.get(Outcome::BOTH[r], Outcome::BOTH[s], k, l);
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tl_table_to_json(t: *const TlTable, json: *mut *mut c_char) -> TlStatus {
    guard(|| {
        let s = serde_json::to_string(&TableJson::from(table(t)?)).expect("serializable");
        string_out(s, out(json, "json")?)
    })
}

fn write_verdict(
    v: &FeasibilityVerdict,
    feasible: *mut bool,
    residual: *mut f64,
) -> Result<(), Fail> {
    unsafe {
        *out(feasible, "feasible")? = v.feasible;
        if let Some(r) = residual.as_mut() {
            *r = v.residual;
        }
    }
    Ok(())
}

/// Is the table a mixture of deterministic tables? `residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn tl_table_hv_feasible(
    t: *const TlTable,
    feasible: *mut bool,
    residual: *mut f64,
) -> TlStatus {
    guard(|| write_verdict(&hv_table_feasible(table(t)?)?, feasible, residual))
}

/// Builds the generalized-measurement model of the table and reports how
/// far its statistics are from the table.
#[no_mangle]
pub unsafe extern "C" fn tl_table_round_trip(t: *const TlTable, residual: *mut f64) -> TlStatus {
    guard(|| {
        let (_, err) = round_trip(table(t)?)?;
        *out(residual, "residual")? = err;
        Ok(())
    })
}

unsafe fn correlator_matrix(c: *const f64, m: usize, n: usize) -> Result<CorrelatorMatrix, Fail> {
    if c.is_null() {
        return Err(null("c"));
    }
    if m == 0 || n == 0 {
        return Err(Fail(
            TlStatus::InvalidArgument,
            "empty correlator matrix".into(),
        ));
    }
    let flat = std::slice::from_raw_parts(c, m * n);
    Ok(CorrelatorMatrix::from_rows(
        &flat.chunks(n).map(<[f64]>::to_vec).collect::<Vec<_>>(),
    )?)
}

/// Quantum realizability of the row-major `m x n` correlators `c`.
#[no_mangle]
pub unsafe extern "C" fn tl_tsirelson_feasible(
    c: *const f64,
    m: usize,
    n: usize,
    feasible: *mut bool,
    residual: *mut f64,
) -> TlStatus {
    guard(|| {
        write_verdict(
            &tsirelson_feasible(&correlator_matrix(c, m, n)?)?,
            feasible,
            residual,
        )
    })
}

/// Hidden-variable realizability of the row-major `m x n` correlators `c`.
#[no_mangle]
pub unsafe extern "C" fn tl_hv_correlator_feasible(
    c: *const f64,
    m: usize,
    n: usize,
    feasible: *mut bool,
    residual: *mut f64,
) -> TlStatus {
    guard(|| {
        write_verdict(
            &hv_correlator_feasible(&correlator_matrix(c, m, n)?)?,
            feasible,
            residual,
        )
    })
}

/// Capacity in bits of the binary channel with `P(+1|k) = p_plus[k]`, and
/// the optimal input distribution (2 values, may be null).
#[no_mangle]
pub unsafe extern "C" fn tl_binary_channel_capacity(
    p_plus_1: f64,
    p_plus_2: f64,
    bits: *mut f64,
    input: *mut f64,
) -> TlStatus {
    guard(|| {
        let cap = channel_capacity(&InducedChannel::new(p_plus_1, p_plus_2)?);
        *out(bits, "bits")? = cap.capacity_bits;
        if !input.is_null() {
            write_array(input, &cap.input_distribution[..2], "input")?;
        }
        Ok(())
    })
}

/// Hardy residual norms (3 values) and the paradox probability
/// `P(+1,+1|1,1)` of a 2x2 scenario. `satisfied` may be null.
#[no_mangle]
pub unsafe extern "C" fn tl_hardy_check(
    sc: *const TlScenario,
    residuals: *mut f64,
    paradox: *mut f64,
    satisfied: *mut bool,
) -> TlStatus {
    guard(|| {
        let r = hardy_check(scenario(sc)?, DEFAULT_TOL)?;
        write_array(residuals, &r.constraint_residuals, "residuals")?;
        *out(paradox, "paradox")? = r.paradox_value;
        if let Some(s) = satisfied.as_mut() {
            *s = r.constraints_satisfied;
        }
        Ok(())
    })
}

/// Maximizes the temporal Hardy probability on `C^dim`. `best` may be null;
/// otherwise it receives the optimal scenario.
#[no_mangle]
pub unsafe extern "C" fn tl_hardy_max_temporal(
    dim: usize,
    restarts: usize,
    seed: u64,
    value: *mut f64,
    best: *mut *mut TlScenario,
) -> TlStatus {
    guard(|| {
        if dim < 2 || restarts == 0 {
            return Err(Fail(
                TlStatus::InvalidArgument,
                "need dim >= 2 and restarts >= 1".into(),
            ));
        }
        let v = out(value, "value")?;
        let opt = hardy_max_temporal(dim, restarts, seed);
        *v = opt.value;
        if let Some(dst) = best.as_mut() {
            *dst = Box::into_raw(Box::new(TlScenario(opt.scenario)));
        }
        Ok(())
    })
}
