//! C ABI over the `gamow` crate.
//!
//! Every fallible function returns a [`GdStatus`] and writes its result through
//! an out-pointer. After a non-`Ok` status, [`gd_last_error_message`] returns a
//! description of the failure on the calling thread. Handles are opaque and
//! must be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use gamow::darboux::{deform1, deform2, DeformedPotential2};
use gamow::resonances::{analytic_resonances, bound_states, refine_pole, Parity, Resonance};
use gamow::scattering::{delta, transmission_coefficient};
use gamow::{Error, GamowFunction, PotentialKind, PotentialSpec, Variant};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdStatus {
    Ok = 0,
    InvalidArgument = 1,
    NullPointer = 2,
    Domain = 3,
    Pole = 4,
    NoPeaks = 5,
    NoConvergence = 6,
    WrongQuadrant = 7,
    NotAPole = 8,
    Quadrant = 9,
    Node = 10,
    ZeroVelocity = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdKind {
    Well = 0,
    Barrier = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GdVariant {
    Decaying = 0,
    Capture = 1,
    Decreasing = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GdComplex {
    pub re: f64,
    pub im: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GdResonance {
    /// m (from 0) for wells, n (from 1) for barriers.
    pub index: u32,
    pub energy: f64,
    /// Γ/2.
    pub half_width: f64,
    /// Kinetic parameter √(E − iΓ/2); the exact pole for refined rows, a
    /// Newton seed for analytic ones.
    pub k: GdComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GdBoundState {
    pub index: u32,
    /// 0 for even, 1 for odd.
    pub parity: u32,
    pub rho: f64,
    pub energy: f64,
}

/// Square well or barrier.
pub struct GdSpec {
    inner: PotentialSpec,
}

/// Gamow-Siegert, capture or decreasing solution.
pub struct GdGamow {
    inner: GamowFunction,
}

/// Real second-order deformation built from a transformation function.
pub struct GdDeform2 {
    inner: DeformedPotential2,
}

impl From<Complex64> for GdComplex {
    fn from(z: Complex64) -> Self {
        GdComplex { re: z.re, im: z.im }
    }
}

impl From<GdComplex> for Complex64 {
    fn from(z: GdComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

impl From<&Resonance> for GdResonance {
    fn from(r: &Resonance) -> Self {
        GdResonance {
            index: r.index,
            energy: r.energy,
            half_width: r.half_width(),
            k: r.kinetic().into(),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn status(&self) -> GdStatus {
        match self {
            Failure::Null(_) => GdStatus::NullPointer,
            Failure::Invalid(_) => GdStatus::InvalidArgument,
            Failure::Lib(e) => match e {
                Error::InvalidParameter { .. } => GdStatus::InvalidArgument,
                Error::Domain(_) => GdStatus::Domain,
                Error::Pole { .. } => GdStatus::Pole,
                Error::NoPeaks { .. } => GdStatus::NoPeaks,
                Error::NoConvergence { .. } => GdStatus::NoConvergence,
                Error::WrongQuadrant { .. } => GdStatus::WrongQuadrant,
                Error::NotAPole { .. } => GdStatus::NotAPole,
                Error::Quadrant { .. } => GdStatus::Quadrant,
                Error::Node { .. } => GdStatus::Node,
                Error::ZeroVelocity { .. } => GdStatus::ZeroVelocity,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Null(name) => format!("null pointer passed as `{name}`"),
            Failure::Invalid(msg) => msg.clone(),
            Failure::Lib(e) => e.to_string(),
        }
    }
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

/// Run `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GdStatus::Ok,
        Ok(Err(failure)) => {
            set_last_error(failure.message());
            failure.status()
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            GdStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(name))
}

unsafe fn out<'a, T>(p: *mut T, name: &'static str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or(Failure::Null(name))
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length excluding the NUL, so
/// a caller can retry with a larger buffer.
///
/// # Safety
/// `buf` must be NULL or point to at least `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gd_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            std::ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// Create a potential. `v0` and `b` must be finite and positive.
///
/// # Safety
/// `out_spec` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn gd_spec_new(kind: GdKind, v0: f64, b: f64, out_spec: *mut *mut GdSpec) -> GdStatus {
    guard(|| {
        let slot = out(out_spec, "out_spec")?;
        let kind = match kind {
            GdKind::Well => PotentialKind::Well,
            GdKind::Barrier => PotentialKind::Barrier,
        };
        let inner = PotentialSpec::new(kind, v0, b)?;
        *slot = Box::into_raw(Box::new(GdSpec { inner }));
        Ok(())
    })
}

/// # Safety
/// `spec` must be NULL or a handle from [`gd_spec_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gd_spec_free(spec: *mut GdSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Transmission coefficient T(E) for real `energy` > 0.
///
/// # Safety
/// `spec` must be a live handle and `out_t` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_transmission(spec: *const GdSpec, energy: f64, out_t: *mut f64) -> GdStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        let slot = out(out_t, "out_t")?;
        *slot = transmission_coefficient(&spec.inner, energy)?;
        Ok(())
    })
}

/// Δ(k), whose zeros in the fourth quadrant are the resonance poles.
///
/// # Safety
/// `spec` must be a live handle and `out_delta` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_delta(spec: *const GdSpec, k: GdComplex, out_delta: *mut GdComplex) -> GdStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        let slot = out(out_delta, "out_delta")?;
        *slot = delta(&spec.inner, k.into()).into();
        Ok(())
    })
}

/// Newton refinement of a pole from a fourth-quadrant guess. The returned
/// index is 0; use [`gd_analytic_resonances`] for labelled seeds.
///
/// # Safety
/// `spec` must be a live handle and `out_resonance` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_refine_pole(
    spec: *const GdSpec,
    guess: GdComplex,
    tol: f64,
    max_iter: u32,
    out_resonance: *mut GdResonance,
) -> GdStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        let slot = out(out_resonance, "out_resonance")?;
        let r = refine_pole(&spec.inner, guess.into(), tol, max_iter as usize)?;
        *slot = (&r).into();
        Ok(())
    })
}

/// Write the first `count` analytic resonances into `out_rows`.
///
/// # Safety
/// `spec` must be a live handle and `out_rows` must have room for `count` rows.
#[no_mangle]
pub unsafe extern "C" fn gd_analytic_resonances(
    spec: *const GdSpec,
    count: usize,
    out_rows: *mut GdResonance,
) -> GdStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        if out_rows.is_null() {
            return Err(Failure::Null("out_rows"));
        }
        let rows = analytic_resonances(&spec.inner, count)?;
        let dst = std::slice::from_raw_parts_mut(out_rows, count);
        for (d, r) in dst.iter_mut().zip(&rows) {
            *d = r.into();
        }
        Ok(())
    })
}

/// Bound states of a well. Writes up to `capacity` rows and stores the total
/// number of states in `out_count`; pass `capacity = 0` to query the count.
///
/// # Safety
/// `spec` must be a live handle, `out_count` writable, and `out_rows` must have
/// room for `capacity` rows (it may be NULL when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn gd_bound_states(
    spec: *const GdSpec,
    out_rows: *mut GdBoundState,
    capacity: usize,
    out_count: *mut usize,
) -> GdStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        let count = out(out_count, "out_count")?;
        if capacity > 0 && out_rows.is_null() {
            return Err(Failure::Null("out_rows"));
        }
        let states = bound_states(&spec.inner)?;
        *count = states.len();
        if capacity > 0 {
            let dst = std::slice::from_raw_parts_mut(out_rows, capacity);
            for (d, s) in dst.iter_mut().zip(&states) {
                *d = GdBoundState {
                    index: s.index as u32,
                    parity: match s.parity {
                        Parity::Even => 0,
                        Parity::Odd => 1,
                    },
                    rho: s.rho,
                    energy: s.energy,
                };
            }
        }
        Ok(())
    })
}

/// Build a transformation function. For `Decaying` and `Capture`, `k` must be
/// a fourth-quadrant pole. For `Decreasing`, `k` is either that pole or the
/// conjugate parameter in the upper half plane.
///
/// # Safety
/// `spec` must be a live handle and `out_gamow` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_gamow_new(
    spec: *const GdSpec,
    k: GdComplex,
    variant: GdVariant,
    out_gamow: *mut *mut GdGamow,
) -> GdStatus {
    guard(|| {
        let spec = deref(spec, "spec")?;
        let slot = out(out_gamow, "out_gamow")?;
        let k: Complex64 = k.into();
        let inner = match variant {
            GdVariant::Decreasing if k.im > 0.0 => GamowFunction::decreasing(&spec.inner, k)?,
            GdVariant::Decreasing => GamowFunction::build(&spec.inner, k, Variant::Decreasing)?,
            GdVariant::Decaying => GamowFunction::build(&spec.inner, k, Variant::Decaying)?,
            GdVariant::Capture => GamowFunction::build(&spec.inner, k, Variant::Capture)?,
        };
        *slot = Box::into_raw(Box::new(GdGamow { inner }));
        Ok(())
    })
}

/// # Safety
/// `gamow` must be NULL or a handle from [`gd_gamow_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gd_gamow_free(gamow: *mut GdGamow) {
    if !gamow.is_null() {
        drop(Box::from_raw(gamow));
    }
}

/// Value and derivative of the transformation function at `x`. Either output
/// pointer may be NULL.
///
/// # Safety
/// `gamow` must be a live handle; non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn gd_gamow_eval(
    gamow: *const GdGamow,
    x: f64,
    out_u: *mut GdComplex,
    out_du: *mut GdComplex,
) -> GdStatus {
    guard(|| {
        let g = deref(gamow, "gamow")?;
        if !x.is_finite() {
            return Err(Failure::Invalid(format!("x must be finite, got {x}")));
        }
        let (u, du) = g.inner.evaluate(x);
        if let Some(slot) = out_u.as_mut() {
            *slot = u.into();
        }
        if let Some(slot) = out_du.as_mut() {
            *slot = du.into();
        }
        Ok(())
    })
}

/// Complex energy k² of the transformation function.
///
/// # Safety
/// `gamow` must be a live handle and `out_energy` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_gamow_energy(gamow: *const GdGamow, out_energy: *mut GdComplex) -> GdStatus {
    guard(|| {
        let g = deref(gamow, "gamow")?;
        *out(out_energy, "out_energy")? = g.inner.energy().into();
        Ok(())
    })
}

/// First-order (complex) deformed potential at `x`.
///
/// # Safety
/// `gamow` must be a live handle and `out_v` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_deform1_value(gamow: *const GdGamow, x: f64, out_v: *mut GdComplex) -> GdStatus {
    guard(|| {
        let g = deref(gamow, "gamow")?;
        let slot = out(out_v, "out_v")?;
        *slot = deform1(&g.inner).evaluate(x)?.into();
        Ok(())
    })
}

/// Second-order deformation from a transformation function. Fails with
/// `ZeroVelocity` or `Node` when the result would be singular.
///
/// # Safety
/// `gamow` must be a live handle and `out_deform` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_deform2_new(gamow: *const GdGamow, out_deform: *mut *mut GdDeform2) -> GdStatus {
    guard(|| {
        let g = deref(gamow, "gamow")?;
        let slot = out(out_deform, "out_deform")?;
        let inner = deform2(&g.inner)?;
        *slot = Box::into_raw(Box::new(GdDeform2 { inner }));
        Ok(())
    })
}

/// Real second-order deformed potential at `x`.
///
/// # Safety
/// `deform` must be a live handle and `out_v` writable.
#[no_mangle]
pub unsafe extern "C" fn gd_deform2_value(deform: *const GdDeform2, x: f64, out_v: *mut f64) -> GdStatus {
    guard(|| {
        let d = deref(deform, "deform")?;
        let slot = out(out_v, "out_v")?;
        *slot = d.inner.evaluate(x)?;
        Ok(())
    })
}

/// # Safety
/// `deform` must be NULL or a handle from [`gd_deform2_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gd_deform2_free(deform: *mut GdDeform2) {
    if !deform.is_null() {
        drop(Box::from_raw(deform));
    }
}
