//! C ABI over the `cnfgame` library.
//!
//! Every fallible function returns a [`CnfgameStatus`]; on failure the message
//! is available from [`cnfgame_last_error_message`] on the same thread. Handles
//! are opaque and must be released with their matching `_free` function.
//! Strings returned through `char **` out-parameters are owned by the caller
//! and released with [`cnfgame_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cnfgame::constructions::Construction;
use cnfgame::format::{parse_instance, serialize_instance};
use cnfgame::harness::{
    random_instance, run_match_specs, sweep_bound, verify_construction, MatchReport, RandomSpec, SweepSpec,
};
use cnfgame::solver::{SolveError, Solver, SolverConfig};
use cnfgame::strategy::StrategySpec;
use cnfgame::{GameInstance, Pattern, Player, PotentialScheme};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnfgameStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    LimitExceeded = 5,
    Strategy = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnfgamePlayer {
    T = 0,
    F = 1,
}

impl From<Player> for CnfgamePlayer {
    fn from(p: Player) -> Self {
        match p {
            Player::T => CnfgamePlayer::T,
            Player::F => CnfgamePlayer::F,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnfgameInstanceInfo {
    pub universe_size: u32,
    pub clause_count: u64,
    pub first: CnfgamePlayer,
    pub last: CnfgamePlayer,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CnfgameSolveResult {
    pub winner: CnfgamePlayer,
    /// False only when every variable is already assigned.
    pub has_principal_move: bool,
    pub principal_var: u32,
    pub principal_value: bool,
    pub nodes_explored: u64,
}

/// A parsed or generated game instance.
pub struct CnfgameInstance(GameInstance);

/// The outcome of a played match.
pub struct CnfgameReport {
    report: MatchReport,
    json: CString,
}

struct Failure(CnfgameStatus, String);

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> FfiResult<()>) -> CnfgameStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error("");
            CnfgameStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(&format!("panic: {msg}"));
            CnfgameStatus::Panic
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure(CnfgameStatus::InvalidArgument, e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(Failure(CnfgameStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CnfgameStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn read_opt_str<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        read_str(p, what).map(Some)
    }
}

unsafe fn instance<'a>(p: *const CnfgameInstance) -> FfiResult<&'a GameInstance> {
    p.as_ref()
        .map(|i| &i.0)
        .ok_or_else(|| Failure(CnfgameStatus::NullPointer, "instance is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(Failure(CnfgameStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

fn owned_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s).map(CString::into_raw).map_err(invalid)
}

fn boxed_instance(g: GameInstance) -> *mut CnfgameInstance {
    Box::into_raw(Box::new(CnfgameInstance(g)))
}

fn solve_failure(e: SolveError) -> Failure {
    match e {
        SolveError::LimitExceeded { .. } => Failure(CnfgameStatus::LimitExceeded, e.to_string()),
        other => Failure(CnfgameStatus::Strategy, other.to_string()),
    }
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cnfgame_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The message of the last failed call on this thread, or an empty string.
/// Valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn cnfgame_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance file's text.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_instance_parse(text: *const c_char, out: *mut *mut CnfgameInstance) -> CnfgameStatus {
    guard(|| {
        let text = read_str(text, "text")?;
        let g = parse_instance(text).map_err(|e| Failure(CnfgameStatus::Parse, e.to_string()))?;
        write_out(out, boxed_instance(g))
    })
}

/// Builds a named construction (`xor-pairs`, `odd-tf` or `fib-tt`) of width `k`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_instance_generate(
    name: *const c_char,
    k: u32,
    out: *mut *mut CnfgameInstance,
) -> CnfgameStatus {
    guard(|| {
        let c: Construction = read_str(name, "name")?.parse().map_err(invalid)?;
        let g = c.build(k as usize).map_err(invalid)?;
        write_out(out, boxed_instance(g))
    })
}

/// Draws `m` distinct random `k`-clauses over `n` variables; `pattern` is one
/// of `TT`, `TF`, `FT`, `FF`.
///
/// # Safety
/// `pattern` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_instance_random(
    k: u32,
    m: u32,
    n: u32,
    pattern: *const c_char,
    seed: u64,
    out: *mut *mut CnfgameInstance,
) -> CnfgameStatus {
    guard(|| {
        let pattern: Pattern = read_str(pattern, "pattern")?.parse().map_err(invalid)?;
        let spec = RandomSpec {
            k: k as usize,
            m: m as usize,
            n,
            pattern,
            seed,
        };
        write_out(out, boxed_instance(random_instance(spec).map_err(invalid)?))
    })
}

/// # Safety
/// `inst` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_instance_free(inst: *mut CnfgameInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_instance_info(
    inst: *const CnfgameInstance,
    out: *mut CnfgameInstanceInfo,
) -> CnfgameStatus {
    guard(|| {
        let g = instance(inst)?;
        write_out(
            out,
            CnfgameInstanceInfo {
                universe_size: g.universe_size(),
                clause_count: g.cnf().len() as u64,
                first: g.first().into(),
                last: g.last().into(),
            },
        )
    })
}

/// Writes the instance in file format; free the result with `cnfgame_string_free`.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_instance_serialize(
    inst: *const CnfgameInstance,
    out: *mut *mut c_char,
) -> CnfgameStatus {
    guard(|| {
        let text = serialize_instance(instance(inst)?);
        write_out(out, owned_string(text)?)
    })
}

/// Decides the winner under optimal play.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_solve(
    inst: *const CnfgameInstance,
    parallel: bool,
    out: *mut CnfgameSolveResult,
) -> CnfgameStatus {
    guard(|| {
        let g = instance(inst)?;
        let config = SolverConfig {
            parallel,
            ..SolverConfig::from_env()
        };
        let r = Solver::new(g, config).map_err(solve_failure)?.solve_root();
        let mv = r.principal_move;
        write_out(
            out,
            CnfgameSolveResult {
                winner: r.winner.into(),
                has_principal_move: mv.is_some(),
                principal_var: mv.map_or(0, |m| m.var),
                principal_value: mv.is_some_and(|m| m.value),
                nodes_explored: r.nodes_explored,
            },
        )
    })
}

/// Plays the named strategies against each other. `audit` is a scheme name
/// (`sqrt2`, `parity`, `three-halves`) or null.
///
/// # Safety
/// `inst` must be a live handle, the strings NUL-terminated (or null for
/// `audit`), and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_play(
    inst: *const CnfgameInstance,
    t_strategy: *const c_char,
    f_strategy: *const c_char,
    audit: *const c_char,
    out: *mut *mut CnfgameReport,
) -> CnfgameStatus {
    guard(|| {
        let g = instance(inst)?;
        let t: StrategySpec = read_str(t_strategy, "t_strategy")?.parse().map_err(invalid)?;
        let f: StrategySpec = read_str(f_strategy, "f_strategy")?.parse().map_err(invalid)?;
        let audit: Option<PotentialScheme> = read_opt_str(audit, "audit")?
            .map(|s| s.parse().map_err(invalid))
            .transpose()?;
        let report = run_match_specs(g, t, f, audit).map_err(|e| Failure(CnfgameStatus::Strategy, e.to_string()))?;
        let json = serde_json::to_string(&report).map_err(invalid)?;
        let json = CString::new(json).map_err(invalid)?;
        write_out(out, Box::into_raw(Box::new(CnfgameReport { report, json })))
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_report_winner(report: *const CnfgameReport, out: *mut CnfgamePlayer) -> CnfgameStatus {
    guard(|| {
        let r = report
            .as_ref()
            .ok_or_else(|| Failure(CnfgameStatus::NullPointer, "report is null".into()))?;
        write_out(out, r.report.winner.into())
    })
}

/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_report_audit_failures(report: *const CnfgameReport, out: *mut u64) -> CnfgameStatus {
    guard(|| {
        let r = report
            .as_ref()
            .ok_or_else(|| Failure(CnfgameStatus::NullPointer, "report is null".into()))?;
        write_out(out, r.report.audit_failures.len() as u64)
    })
}

/// The report as JSON, borrowed from the handle; null if `report` is null.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_report_json(report: *const CnfgameReport) -> *const c_char {
    report.as_ref().map_or(ptr::null(), |r| r.json.as_ptr())
}

/// # Safety
/// `report` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_report_free(report: *mut CnfgameReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Checks a construction's shape and that its F strategy beats every T line.
/// `json_out` may be null; otherwise it receives the report, to be freed with
/// `cnfgame_string_free`.
///
/// # Safety
/// `name` must be NUL-terminated; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_verify(
    name: *const c_char,
    k: u32,
    passed: *mut bool,
    json_out: *mut *mut c_char,
) -> CnfgameStatus {
    guard(|| {
        let c: Construction = read_str(name, "name")?.parse().map_err(invalid)?;
        let report = verify_construction(c, k as usize).map_err(invalid)?;
        write_out(passed, report.passed)?;
        if !json_out.is_null() {
            json_out.write(owned_string(serde_json::to_string(&report).map_err(invalid)?)?);
        }
        Ok(())
    })
}

/// Runs T's potential strategy for `scheme` against exhaustive F on instances
/// with `clauses` clauses of width `k`. `json_out` as in `cnfgame_verify`.
///
/// # Safety
/// The strings must be NUL-terminated; `passed` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnfgame_sweep(
    k: u32,
    pattern: *const c_char,
    scheme: *const c_char,
    clauses: u32,
    seeds: u64,
    passed: *mut bool,
    json_out: *mut *mut c_char,
) -> CnfgameStatus {
    guard(|| {
        let spec = SweepSpec {
            k: k as usize,
            pattern: read_str(pattern, "pattern")?.parse().map_err(invalid)?,
            scheme: read_str(scheme, "scheme")?.parse().map_err(invalid)?,
            clauses: clauses as usize,
            seeds,
        };
        let summary = sweep_bound(&spec).map_err(invalid)?;
        write_out(passed, summary.passed)?;
        if !json_out.is_null() {
            json_out.write(owned_string(serde_json::to_string(&summary).map_err(invalid)?)?);
        }
        Ok(())
    })
}
