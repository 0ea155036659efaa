//! C ABI over `babai-core`.
//!
//! Lattices and protocols are opaque heap handles released with their
//! `*_free` function. Every call returns a [`BabaiStatus`]; on failure the
//! message is kept per thread and can be copied out with
//! [`babai_last_error_message`]. Panics are caught at the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use babai_core::analysis::{perr_2d_closed_form, perr_3d_polyhedral, perr_mc_uniform, AnalysisError};
use babai_core::cvp::{babai_point, closest_point, CvpError};
use babai_core::lattice::{catalog_lookup, parse_lattice_json, LatticeBasis, LatticeError};
use babai_core::protocol::{DbpMessage, Protocol, ProtocolError, SetOptions, SetPolicy, SourceSpec};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BabaiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Precondition = 4,
    Geometry = 5,
    Numeric = 6,
    Panic = 7,
}

/// Opaque lattice handle.
pub struct BabaiLattice {
    basis: LatticeBasis,
}

/// Opaque protocol handle.
pub struct BabaiProtocol {
    inner: Protocol,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(BabaiStatus, String);

type Res<T> = Result<T, Failure>;

fn fail<T>(status: BabaiStatus, msg: impl Into<String>) -> Res<T> {
    Err(Failure(status, msg.into()))
}

impl From<LatticeError> for Failure {
    fn from(e: LatticeError) -> Self {
        let status = match e {
            LatticeError::Parse { .. }
            | LatticeError::Format(_)
            | LatticeError::UnknownLattice(_)
            | LatticeError::Scalar(_)
            | LatticeError::DimensionMismatch(_) => BabaiStatus::Parse,
            LatticeError::UnsupportedDimension { .. } => BabaiStatus::Precondition,
            LatticeError::Geometry(_) | LatticeError::NoObtuseSuperbaseFound => BabaiStatus::Geometry,
            _ => BabaiStatus::Numeric,
        };
        Failure(status, e.to_string())
    }
}

impl From<CvpError> for Failure {
    fn from(e: CvpError) -> Self {
        let status = match e {
            CvpError::DimensionMismatch { .. } => BabaiStatus::InvalidArgument,
            CvpError::DimensionTooLarge { .. } => BabaiStatus::Precondition,
            #[allow(unreachable_patterns)]
            _ => BabaiStatus::Numeric,
        };
        Failure(status, e.to_string())
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        let status = match &e {
            AnalysisError::Lattice(_) | AnalysisError::Geometry(_) => BabaiStatus::Geometry,
            e if e.is_condition() => BabaiStatus::Precondition,
            _ => BabaiStatus::Numeric,
        };
        Failure(status, e.to_string())
    }
}

impl From<ProtocolError> for Failure {
    fn from(e: ProtocolError) -> Self {
        let status = match e {
            ProtocolError::NoRationalWithinTolerance { .. } | ProtocolError::UnsupportedForExact(_) => BabaiStatus::Precondition,
            ProtocolError::MissingMessage { .. } | ProtocolError::Invalid(_) => BabaiStatus::InvalidArgument,
            _ => BabaiStatus::Numeric,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn guard(f: impl FnOnce() -> Res<()>) -> BabaiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            BabaiStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("panic: {msg}"));
            BabaiStatus::Panic
        }
    }
}

unsafe fn c_str<'a>(p: *const c_char) -> Res<&'a str> {
    if p.is_null() {
        return fail(BabaiStatus::NullPointer, "null string");
    }
    CStr::from_ptr(p).to_str().or_else(|_| fail(BabaiStatus::Parse, "string is not UTF-8"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Res<&'a T> {
    p.as_ref().map_or_else(|| fail(BabaiStatus::NullPointer, format!("null {what}")), Ok)
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Res<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return fail(BabaiStatus::NullPointer, format!("null {what}"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Res<&'a mut [T]> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return fail(BabaiStatus::NullPointer, format!("null {what}"));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Res<()> {
    if out.is_null() {
        return fail(BabaiStatus::NullPointer, format!("null {what}"));
    }
    out.write(v);
    Ok(())
}

fn check_len(got: usize, n: usize, what: &str) -> Res<()> {
    if got != n {
        return fail(BabaiStatus::InvalidArgument, format!("{what} has length {got}, lattice dimension is {n}"));
    }
    Ok(())
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes). Returns the full message
/// length in bytes, excluding the terminator.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn babai_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Parses a lattice from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_lattice_from_json(json: *const c_char, out: *mut *mut BabaiLattice) -> BabaiStatus {
    guard(|| {
        let basis = parse_lattice_json(c_str(json)?)?;
        put(out, Box::into_raw(Box::new(BabaiLattice { basis })), "out")
    })
}

/// Looks up a named lattice (`Z3`, `FCC`, `BCC`, `A2`, ...).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_lattice_from_catalog(name: *const c_char, out: *mut *mut BabaiLattice) -> BabaiStatus {
    guard(|| {
        let name = c_str(name)?;
        let entry = catalog_lookup(name)?;
        let Some(basis) = entry.basis else {
            return fail(BabaiStatus::Precondition, format!("catalog entry '{name}' has no explicit basis"));
        };
        put(out, Box::into_raw(Box::new(BabaiLattice { basis })), "out")
    })
}

/// # Safety
/// `lat` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn babai_lattice_free(lat: *mut BabaiLattice) {
    if !lat.is_null() {
        drop(Box::from_raw(lat));
    }
}

/// # Safety
/// `lat` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_lattice_dimension(lat: *const BabaiLattice, out: *mut usize) -> BabaiStatus {
    guard(|| put(out, deref(lat, "lattice")?.basis.dim(), "out"))
}

/// Writes the upper-triangular form row-major into `out` (`n * n` doubles).
///
/// # Safety
/// `lat` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn babai_lattice_triangular(lat: *const BabaiLattice, out: *mut f64, len: usize) -> BabaiStatus {
    guard(|| {
        let b = &deref(lat, "lattice")?.basis;
        let n = b.dim();
        check_len(len, n * n, "output")?;
        let out = slice_mut(out, len, "out")?;
        let r = b.triangular();
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = r[(i, j)];
            }
        }
        Ok(())
    })
}

unsafe fn cvp_call(
    lat: *const BabaiLattice,
    x: *const f64,
    n: usize,
    u_out: *mut i64,
    point_out: *mut f64,
    dist2_out: *mut f64,
    f: fn(&LatticeBasis, &[f64]) -> Result<babai_core::cvp::CvpResult, CvpError>,
) -> BabaiStatus {
    guard(|| {
        let b = &deref(lat, "lattice")?.basis;
        check_len(n, b.dim(), "x")?;
        let r = f(b, slice(x, n, "x")?)?;
        slice_mut(u_out, n, "u_out")?.copy_from_slice(&r.u);
        if !point_out.is_null() {
            std::slice::from_raw_parts_mut(point_out, n).copy_from_slice(&r.point);
        }
        if !dist2_out.is_null() {
            dist2_out.write(r.dist2);
        }
        Ok(())
    })
}

/// Nearest-plane (Babai) point of `x`. `point_out` and `dist2_out` may be null.
///
/// # Safety
/// `x` and `u_out` must hold `n` elements, `point_out` (if non-null) `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn babai_nearest_plane(
    lat: *const BabaiLattice,
    x: *const f64,
    n: usize,
    u_out: *mut i64,
    point_out: *mut f64,
    dist2_out: *mut f64,
) -> BabaiStatus {
    cvp_call(lat, x, n, u_out, point_out, dist2_out, babai_point)
}

/// Exact closest lattice point of `x` (n <= 8).
///
/// # Safety
/// Same as [`babai_nearest_plane`].
#[no_mangle]
pub unsafe extern "C" fn babai_closest_point(
    lat: *const BabaiLattice,
    x: *const f64,
    n: usize,
    u_out: *mut i64,
    point_out: *mut f64,
    dist2_out: *mut f64,
) -> BabaiStatus {
    cvp_call(lat, x, n, u_out, point_out, dist2_out, closest_point)
}

/// Error probability for the basis `{(1,0), (a,b)}`.
///
/// # Safety
/// `p_e_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_perr_closed_form_2d(a: f64, b: f64, p_e_out: *mut f64) -> BabaiStatus {
    guard(|| put(p_e_out, perr_2d_closed_form(a, b)?.report.p_e, "p_e_out"))
}

/// Exact 3-D error probability. With `search_permutations` non-zero the
/// smallest value over the six column orders is returned.
///
/// # Safety
/// `lat` must be a live handle; `p_e_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_perr_polyhedral_3d(
    lat: *const BabaiLattice,
    search_permutations: i32,
    p_e_out: *mut f64,
) -> BabaiStatus {
    guard(|| {
        let b = &deref(lat, "lattice")?.basis;
        put(p_e_out, perr_3d_polyhedral(b, search_permutations != 0)?.report.p_e, "p_e_out")
    })
}

/// Monte Carlo error probability under uniform input on the Voronoi cell.
/// `std_error_out` may be null. `workers == 0` uses the default.
///
/// # Safety
/// `lat` must be a live handle; `p_e_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_perr_mc_uniform(
    lat: *const BabaiLattice,
    samples: u64,
    seed: u64,
    workers: usize,
    p_e_out: *mut f64,
    std_error_out: *mut f64,
) -> BabaiStatus {
    guard(|| {
        let b = &deref(lat, "lattice")?.basis;
        let workers = if workers == 0 { babai_core::mc::DEFAULT_WORKERS } else { workers };
        let r = perr_mc_uniform(b, samples, seed, workers)?;
        put(p_e_out, r.p_e, "p_e_out")?;
        if !std_error_out.is_null() {
            std_error_out.write(r.uncertainty);
        }
        Ok(())
    })
}

/// Builds the distributed protocol. `source` is e.g. `uniform:A=5` or
/// `gaussian:sigma=0.1`; with `full_sets` non-zero every residue is allowed.
///
/// # Safety
/// `lat` must be a live handle, `source` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn babai_protocol_new(
    lat: *const BabaiLattice,
    source: *const c_char,
    full_sets: i32,
    out: *mut *mut BabaiProtocol,
) -> BabaiStatus {
    guard(|| {
        let b = &deref(lat, "lattice")?.basis;
        let spec: SourceSpec = c_str(source)?.parse().or_else(|e: String| fail(BabaiStatus::Parse, e))?;
        let policy = if full_sets != 0 { SetPolicy::Full } else { SetPolicy::Reachable(SetOptions::default()) };
        let inner = Protocol::new(b, &spec, policy)?;
        put(out, Box::into_raw(Box::new(BabaiProtocol { inner })), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn babai_protocol_free(p: *mut BabaiProtocol) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Sensor `m` (1-based) encodes its triangular-frame coordinate `x_m`.
///
/// # Safety
/// `p` must be a live handle; `u_tilde_out` and `s_out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn babai_protocol_encode(
    p: *const BabaiProtocol,
    m: usize,
    x_m: f64,
    u_tilde_out: *mut i64,
    s_out: *mut i64,
) -> BabaiStatus {
    guard(|| {
        let p = &deref(p, "protocol")?.inner;
        if !(1..=p.dim()).contains(&m) {
            return fail(BabaiStatus::InvalidArgument, format!("sensor index {m} outside 1..={}", p.dim()));
        }
        if !x_m.is_finite() {
            return fail(BabaiStatus::InvalidArgument, "x_m is not finite");
        }
        let msg = p.encode(m, x_m);
        let s = i64::try_from(msg.s).or_else(|_| fail(BabaiStatus::Numeric, "s_m does not fit in 64 bits"))?;
        put(u_tilde_out, msg.u_tilde, "u_tilde_out")?;
        put(s_out, s, "s_out")
    })
}

/// Decodes one message per sensor; `u_tilde[m-1]`, `s[m-1]` belong to sensor `m`.
///
/// # Safety
/// `u_tilde`, `s` and `u_out` must hold `n` elements.
#[no_mangle]
pub unsafe extern "C" fn babai_protocol_decode(
    p: *const BabaiProtocol,
    u_tilde: *const i64,
    s: *const i64,
    n: usize,
    u_out: *mut i64,
) -> BabaiStatus {
    guard(|| {
        let p = &deref(p, "protocol")?.inner;
        check_len(n, p.dim(), "message array")?;
        let (ut, s) = (slice(u_tilde, n, "u_tilde")?, slice(s, n, "s")?);
        let msgs: Vec<DbpMessage> =
            (0..n).map(|i| DbpMessage { m: i + 1, u_tilde: ut[i], s: i128::from(s[i]) }).collect();
        let u = p.decode(&msgs)?;
        slice_mut(u_out, n, "u_out")?.copy_from_slice(&u);
        Ok(())
    })
}
