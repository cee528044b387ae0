//! C interface to the `qbnet` engine.
//!
//! Every function returns a [`QbnetStatus`]. Results go through out
//! pointers. Nets live behind an opaque [`QbnetNet`] handle that the caller
//! releases with [`qbnet_net_free`]. Strings handed out by the library are
//! released with [`qbnet_string_free`].
//!
//! When a call fails, [`qbnet_last_error`] returns a message for the most
//! recent failure on the calling thread.
//!
//! Component lists, evidence and catalog parameters are passed as text with
//! items separated by `;`. For example `z.plus=1; u.minus={0 1}`.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use qbnet::catalog::{self, BuiltNet, Params};
use qbnet::classical::{chi_c, classical_distribution, Distribution};
use qbnet::cli::netfile::{emit_net, parse_net};
use qbnet::cli::{load, parse_evidence};
use qbnet::fuzzy::DirectProductSet;
use qbnet::lattice::{propagate, Kernel, LatticeSpec};
use qbnet::pathsum::{pathsum_classical_distribution, pathsum_quantum_distribution};
use qbnet::quantum::{chi, parent_cb_net, quantum_distribution};
use qbnet::Error;

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbnetStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidNet = 4,
    InvalidQuery = 5,
    ContradictoryEvidence = 6,
    CyclicGraph = 7,
    StateSpaceTooLarge = 8,
    UnknownName = 9,
    InvalidParams = 10,
    Io = 11,
    BufferTooSmall = 12,
    Internal = 13,
}

/// How a conditional is evaluated.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbnetMode {
    /// Probabilities. Quantum nets are read through their parent classical net.
    Classical = 0,
    /// Amplitudes, quantum nets only.
    Quantum = 1,
    /// Path enumeration in the net's own kind.
    PathSum = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbnetKernel {
    Exact = 0,
    Gaussian = 1,
}

/// Opaque net handle.
pub struct QbnetNet {
    inner: BuiltNet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> QbnetStatus {
    use QbnetStatus as S;
    match e {
        Error::Parse { .. } => S::Parse,
        Error::InvalidNet(_) | Error::InvalidGraph(_) | Error::InvalidState { .. } => S::InvalidNet,
        Error::InvalidQuery(_) | Error::OverlappingComponents(_) => S::InvalidQuery,
        Error::ContradictoryEvidence => S::ContradictoryEvidence,
        Error::CyclicGraph => S::CyclicGraph,
        Error::StateSpaceTooLarge { .. } => S::StateSpaceTooLarge,
        Error::UnknownNode(_) | Error::UnknownComponent(_) | Error::UnknownEntry(_) => S::UnknownName,
        Error::InvalidParams(_) | Error::DegeneratePhase => S::InvalidParams,
        Error::Io(_) => S::Io,
    }
}

/// Failure carried to the boundary: a status and a message.
struct Fail(QbnetStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QbnetStatus::NullArgument, format!("`{what}` is null"))
}

/// Runs `f`, records any failure and turns panics into `Internal`.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QbnetStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QbnetStatus::Ok,
        Ok(Err(Fail(s, m))) => {
            set_error(m);
            s
        }
        Err(_) => {
            set_error("internal error".into());
            QbnetStatus::Internal
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(QbnetStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

/// Null is treated as the empty string.
unsafe fn opt_c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        Ok("")
    } else {
        c_str(p, what)
    }
}

unsafe fn net_ref<'a>(p: *const QbnetNet) -> Result<&'a BuiltNet, Fail> {
    p.as_ref().map(|n| &n.inner).ok_or_else(|| null("net"))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn items(s: &str) -> Vec<String> {
    s.split(';')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

fn set_of(s: &str) -> Result<DirectProductSet, Fail> {
    Ok(parse_evidence(&items(s))?)
}

unsafe fn hand_out(net: BuiltNet, out: *mut *mut QbnetNet) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    out.write(Box::into_raw(Box::new(QbnetNet { inner: net })));
    Ok(())
}

unsafe fn hand_out_string(s: String, out: *mut *mut c_char) -> Result<(), Fail> {
    let c = CString::new(s).map_err(|_| Fail(QbnetStatus::Internal, "string contains NUL".into()))?;
    write(out, c.into_raw(), "out")
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qbnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a net from its text form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_net_from_text(text: *const c_char, out: *mut *mut QbnetNet) -> QbnetStatus {
    guard(|| hand_out(parse_net(c_str(text, "text")?)?, out))
}

/// Loads a net file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_net_from_file(path: *const c_char, out: *mut *mut QbnetNet) -> QbnetStatus {
    guard(|| hand_out(load(Path::new(c_str(path, "path")?))?, out))
}

/// Builds a catalog net. `params` holds `name=value` items and may be null.
///
/// # Safety
/// `id` must be a NUL-terminated string, `params` null or one, and `out` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_catalog_build(
    id: *const c_char,
    params: *const c_char,
    out: *mut *mut QbnetNet,
) -> QbnetStatus {
    guard(|| {
        let id = c_str(id, "id")?;
        let list = items(opt_c_str(params, "params")?);
        let p = Params::parse(list.iter().map(String::as_str))?;
        hand_out(catalog::build(id, &p)?, out)
    })
}

/// Releases a net. Null is ignored.
///
/// # Safety
/// `net` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qbnet_net_free(net: *mut QbnetNet) {
    if !net.is_null() {
        drop(Box::from_raw(net));
    }
}

/// Writes 1 for a quantum net and 0 for a classical one.
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_net_is_quantum(net: *const QbnetNet, out: *mut c_int) -> QbnetStatus {
    guard(|| {
        let q = matches!(net_ref(net)?, BuiltNet::Quantum(_));
        write(out, q as c_int, "out")
    })
}

/// Text form of a net. Release with [`qbnet_string_free`].
///
/// # Safety
/// `net` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_net_to_text(net: *const QbnetNet, out: *mut *mut c_char) -> QbnetStatus {
    guard(|| hand_out_string(emit_net(net_ref(net)?), out))
}

/// Releases a string from this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qbnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Counts validation problems. When `report` is not null it receives one
/// line per problem, to be released with [`qbnet_string_free`].
///
/// # Safety
/// `net` must be a live handle, `count` a valid pointer and `report` null
/// or valid.
#[no_mangle]
pub unsafe extern "C" fn qbnet_validate(
    net: *const QbnetNet,
    count: *mut usize,
    report: *mut *mut c_char,
) -> QbnetStatus {
    guard(|| {
        let v = catalog::validate_built(net_ref(net)?);
        write(count, v.len(), "count")?;
        if !report.is_null() {
            let lines: String = v.iter().map(|x| format!("{x}\n")).collect();
            hand_out_string(lines, report)?;
        }
        Ok(())
    })
}

fn distribution(net: &BuiltNet, mode: QbnetMode, comps: &[&str], e: &DirectProductSet) -> Result<Distribution, Fail> {
    let d = match (mode, net) {
        (QbnetMode::Classical, BuiltNet::Classical(n)) => classical_distribution(n, comps, e),
        (QbnetMode::Classical, BuiltNet::Quantum(n)) => classical_distribution(&parent_cb_net(n), comps, e),
        (QbnetMode::Quantum, BuiltNet::Quantum(n)) => quantum_distribution(n, comps, e),
        (QbnetMode::Quantum, BuiltNet::Classical(_)) => {
            Err(Error::InvalidQuery("quantum mode needs a quantum net".into()))
        }
        (QbnetMode::PathSum, BuiltNet::Classical(n)) => pathsum_classical_distribution(n, comps, e),
        (QbnetMode::PathSum, BuiltNet::Quantum(n)) => pathsum_quantum_distribution(n, comps, e),
    };
    Ok(d?)
}

/// `P(hypothesis | evidence)`. The hypothesis is a list of sharp
/// `component=value` items; evidence items may be sets.
///
/// # Safety
/// `net` must be a live handle, `hypothesis` a NUL-terminated string,
/// `evidence` null or one, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_conditional(
    net: *const QbnetNet,
    mode: QbnetMode,
    hypothesis: *const c_char,
    evidence: *const c_char,
    out: *mut f64,
) -> QbnetStatus {
    guard(|| {
        let net = net_ref(net)?;
        let h = set_of(c_str(hypothesis, "hypothesis")?)?
            .as_sharp()
            .filter(|h| !h.is_empty())
            .ok_or_else(|| {
                Fail(
                    QbnetStatus::InvalidQuery,
                    "hypothesis must give one value per component".into(),
                )
            })?;
        let e = set_of(opt_c_str(evidence, "evidence")?)?;
        let comps: Vec<&str> = h.keys().map(String::as_str).collect();
        let values: Vec<i32> = h.values().copied().collect();
        let d = distribution(net, mode, &comps, &e)?;
        write(out, d.probability(&values).unwrap_or(0.0), "out")
    })
}

/// Non-additivity factor of the hypothesis components under the evidence.
/// Quantum nets only.
///
/// # Safety
/// `net` must be a live handle, `components` a NUL-terminated string,
/// `evidence` null or one, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_f_qna(
    net: *const QbnetNet,
    components: *const c_char,
    evidence: *const c_char,
    out: *mut f64,
) -> QbnetStatus {
    guard(|| {
        let net = net_ref(net)?;
        let comps = items(c_str(components, "components")?);
        let comps: Vec<&str> = comps.iter().map(String::as_str).collect();
        let e = set_of(opt_c_str(evidence, "evidence")?)?;
        let d = distribution(net, QbnetMode::Quantum, &comps, &e)?;
        write(out, d.f_qna, "out")
    })
}

/// Weight of a constraint: the filtered probability sum for classical nets
/// and the squared coherent sum for quantum nets.
///
/// # Safety
/// `net` must be a live handle, `constraint` null or a NUL-terminated
/// string, and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_chi(net: *const QbnetNet, constraint: *const c_char, out: *mut f64) -> QbnetStatus {
    guard(|| {
        let f = set_of(opt_c_str(constraint, "constraint")?)?;
        let v = match net_ref(net)? {
            BuiltNet::Classical(n) => chi_c(n, &f)?,
            BuiltNet::Quantum(n) => chi(n, &f)?,
        };
        write(out, v, "out")
    })
}

/// Free particle on a periodic lattice of `nx` sites, started at the middle
/// site and stepped `nt` times. Writes `nx` amplitudes to `out` as
/// interleaved real and imaginary parts, so `out` must hold `2 * capacity`
/// doubles. `len` receives `nx` even when the buffer is too small.
///
/// # Safety
/// `out` must point to `2 * capacity` doubles and `len` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qbnet_lattice_propagate(
    nx: usize,
    dx: f64,
    nt: usize,
    dt: f64,
    kernel: QbnetKernel,
    out: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> QbnetStatus {
    guard(|| {
        let spec = LatticeSpec::new(nx, dx, nt, dt);
        spec.check()?;
        write(len, nx, "len")?;
        if capacity < nx {
            return Err(Fail(
                QbnetStatus::BufferTooSmall,
                format!("need room for {nx} amplitudes"),
            ));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let k = match kernel {
            QbnetKernel::Exact => Kernel::Exact,
            QbnetKernel::Gaussian => Kernel::Gaussian,
        };
        let amps = propagate(&spec, k)?;
        let buf = std::slice::from_raw_parts_mut(out, 2 * nx);
        for (i, a) in amps.iter().enumerate() {
            buf[2 * i] = a.re;
            buf[2 * i + 1] = a.im;
        }
        Ok(())
    })
}
