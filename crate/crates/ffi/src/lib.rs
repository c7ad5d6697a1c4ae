//! C interface to the `hyperbif` solvers.
//!
//! Every function returns an [`HbStatus`] and passes results through out
//! pointers. Solver objects are opaque handles released by the matching
//! `*_free` function. Panics never cross the boundary: they are caught and
//! reported as `HB_STATUS_PANIC`. The message of the most recent failure on
//! the calling thread is available through [`hb_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hyperbif::bifurcation::{certify_local_bifurcation, locate_bifurcation};
use hyperbif::dtn::sigma_eigenvalue;
use hyperbif::harmonics::{check_g1, group_restricted_spectrum, GroupKind, GroupSpectrum, SymmetryGroup};
use hyperbif::radial::{solve_exterior_ground_state, solve_unit_ground_state, UnitProfileCache};
use hyperbif::spectral::ground_eigenvalue;
use hyperbif::{Error, ErrorKind, ModelParams, NumericsConfig, RadialProfile};

/// Status codes. The nonzero solver codes match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbStatus {
    Ok = 0,
    /// Invalid parameters or incompatible inputs.
    Validation = 2,
    /// A solver failed to converge or found no bracket.
    Solver = 3,
    /// A verified property failed.
    Violation = 4,
    /// A required pointer argument was null.
    NullPointer = 5,
    /// A panic was caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HbGroupKind {
    /// Dihedral group of the given order, in dimension 2 or 3.
    Dihedral = 0,
    Tetrahedral = 1,
    Octahedral = 2,
    Icosahedral = 3,
    /// Symmetry group of the 600-cell, dimension 4.
    HyperIcosahedral = 4,
    Trivial = 5,
}

/// A sampled radial ground state.
pub struct HbProfile {
    profile: RadialProfile,
    slope: f64,
}

/// A symmetry group together with its invariant degrees.
pub struct HbGroup {
    group: SymmetryGroup,
    spectrum: GroupSpectrum,
}

/// A located and certified bifurcation point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct HbBifurcation {
    pub degree: usize,
    pub lambda_star: f64,
    pub radius_star: f64,
    pub sigma_star: f64,
    /// Nonzero when every certificate check passed.
    pub certified: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

enum Failure {
    Core(Error),
    Null(&'static str),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = std::result::Result<(), Failure>;

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Outcome) -> HbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HbStatus::Ok
        }
        Ok(Err(Failure::Core(e))) => {
            set_error(e.to_string());
            match e.kind() {
                ErrorKind::Validation => HbStatus::Validation,
                ErrorKind::Solver => HbStatus::Solver,
                ErrorKind::Violation => HbStatus::Violation,
            }
        }
        Ok(Err(Failure::Null(name))) => {
            set_error(format!("null pointer argument: {name}"));
            HbStatus::NullPointer
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            HbStatus::Panic
        }
    }
}

fn non_null<'a, T>(p: *const T, name: &'static str) -> std::result::Result<&'a T, Failure> {
    // SAFETY: callers pass either null or a pointer obtained from this library.
    unsafe { p.as_ref() }.ok_or(Failure::Null(name))
}

fn write_out<T>(p: *mut T, value: T, name: &'static str) -> Outcome {
    if p.is_null() {
        return Err(Failure::Null(name));
    }
    // SAFETY: non-null and, per the contract, valid for writes.
    unsafe { p.write(value) };
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hb_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains NUL"),
    };
    VERSION.as_ptr()
}

/// Copy the last error message of this thread into `buf` (truncated and
/// NUL-terminated). Returns the buffer size needed for the full message.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn hb_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = (bytes.len() - 1).min(len - 1);
            // SAFETY: `buf` holds at least `len > n` bytes.
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

fn params(n: usize, p: f64) -> hyperbif::Result<ModelParams> {
    ModelParams::new(n, p)
}

fn boxed_profile(out: *mut *mut HbProfile, shot: hyperbif::radial::shooting::ShootingResult) -> Outcome {
    let handle = Box::into_raw(Box::new(HbProfile {
        profile: shot.profile,
        slope: shot.slope_star,
    }));
    if out.is_null() {
        // SAFETY: freshly allocated above.
        drop(unsafe { Box::from_raw(handle) });
        return Err(Failure::Null("out"));
    }
    // SAFETY: checked non-null.
    unsafe { out.write(handle) };
    Ok(())
}

/// Ground state `w_R` of the exterior problem outside the ball of radius
/// `radius`, with default numerics.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn hb_solve_exterior(n: usize, p: f64, radius: f64, out: *mut *mut HbProfile) -> HbStatus {
    guard(|| {
        let shot = solve_exterior_ground_state(&params(n, p)?, radius, &NumericsConfig::default())?;
        boxed_profile(out, shot)
    })
}

/// Ground state `u_λ` on the exterior of the unit ball at scaling `lambda`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn hb_solve_unit(n: usize, p: f64, lambda: f64, out: *mut *mut HbProfile) -> HbStatus {
    guard(|| {
        let shot = solve_unit_ground_state(&params(n, p)?, lambda, &NumericsConfig::default())?;
        boxed_profile(out, shot)
    })
}

/// Number of samples in `profile`.
///
/// # Safety
/// `profile` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_len(profile: *const HbProfile, out: *mut usize) -> HbStatus {
    guard(|| write_out(out, non_null(profile, "profile")?.profile.len(), "out"))
}

/// Copy nodes, values and (when `derivatives` is non-null) derivatives.
/// `len` must equal the profile length.
///
/// # Safety
/// Each non-null array must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_copy(
    profile: *const HbProfile,
    nodes: *mut f64,
    values: *mut f64,
    derivatives: *mut f64,
    len: usize,
) -> HbStatus {
    guard(|| {
        let h = non_null(profile, "profile")?;
        let w = &h.profile;
        if len != w.len() {
            return Err(Error::InvalidParams(format!("buffer length {len} differs from profile length {}", w.len())).into());
        }
        if nodes.is_null() {
            return Err(Failure::Null("nodes"));
        }
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        // SAFETY: both arrays hold `len` doubles per the contract.
        unsafe {
            std::ptr::copy_nonoverlapping(w.nodes().as_ptr(), nodes, len);
            std::ptr::copy_nonoverlapping(w.values.as_ptr(), values, len);
            if !derivatives.is_null() {
                std::ptr::copy_nonoverlapping(w.derivatives.as_ptr(), derivatives, len);
            }
        }
        Ok(())
    })
}

/// Interpolated value and derivative at `r`; either output may be null.
///
/// # Safety
/// `profile` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_eval(profile: *const HbProfile, r: f64, value: *mut f64, derivative: *mut f64) -> HbStatus {
    guard(|| {
        let w = &non_null(profile, "profile")?.profile;
        if !(r >= w.r0()) || !r.is_finite() {
            return Err(Error::Domain(format!("r = {r} is outside the profile")).into());
        }
        let (v, d) = w.eval_with_derivative(r);
        if !value.is_null() {
            // SAFETY: non-null and writable per the contract.
            unsafe { value.write(v) };
        }
        if !derivative.is_null() {
            // SAFETY: as above.
            unsafe { derivative.write(d) };
        }
        Ok(())
    })
}

/// Shooting parameter: `w'(R)` of an exterior solve.
///
/// # Safety
/// `profile` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_slope(profile: *const HbProfile, out: *mut f64) -> HbStatus {
    guard(|| write_out(out, non_null(profile, "profile")?.slope, "out"))
}

/// Release a profile. Null is ignored.
///
/// # Safety
/// `profile` must be null or come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn hb_profile_free(profile: *mut HbProfile) {
    if !profile.is_null() {
        // SAFETY: allocated by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Build a group acting on `R^n` and its invariant degrees up to `k_max`.
/// `order` is used by the dihedral kind only.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn hb_group_new(
    kind: HbGroupKind,
    order: usize,
    n: usize,
    rotations_only: i32,
    k_max: usize,
    out: *mut *mut HbGroup,
) -> HbStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let kind = match kind {
            HbGroupKind::Dihedral => GroupKind::Dihedral(order),
            HbGroupKind::Tetrahedral => GroupKind::Tetrahedral,
            HbGroupKind::Octahedral => GroupKind::Octahedral,
            HbGroupKind::Icosahedral => GroupKind::Icosahedral,
            HbGroupKind::HyperIcosahedral => GroupKind::HyperIcosahedral,
            HbGroupKind::Trivial => GroupKind::Full,
        };
        let group = if rotations_only != 0 {
            SymmetryGroup::rotations(kind, n)?
        } else {
            SymmetryGroup::new(kind, n)?
        };
        let spectrum = group_restricted_spectrum(&group, k_max)?;
        // SAFETY: checked non-null above.
        unsafe { out.write(Box::into_raw(Box::new(HbGroup { group, spectrum }))) };
        Ok(())
    })
}

/// Number of invariant degrees found up to `k_max`.
///
/// # Safety
/// `group` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_group_degree_count(group: *const HbGroup, out: *mut usize) -> HbStatus {
    guard(|| write_out(out, non_null(group, "group")?.spectrum.entries.len(), "out"))
}

/// Degree, multiplicity and sphere eigenvalue of the `index`-th invariant
/// degree. Outputs may be null.
///
/// # Safety
/// `group` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn hb_group_degree(
    group: *const HbGroup,
    index: usize,
    degree: *mut usize,
    multiplicity: *mut usize,
    mu: *mut f64,
) -> HbStatus {
    guard(|| {
        let g = non_null(group, "group")?;
        let e = g
            .spectrum
            .entries
            .get(index)
            .ok_or_else(|| Error::InvalidParams(format!("index {index} out of range")))?;
        // SAFETY: each output is null or writable per the contract.
        unsafe {
            if !degree.is_null() {
                degree.write(e.i);
            }
            if !multiplicity.is_null() {
                multiplicity.write(e.m);
            }
            if !mu.is_null() {
                mu.write(e.mu);
            }
        }
        Ok(())
    })
}

/// Writes 1 when the first invariant degree lies above the dimension
/// threshold with odd multiplicity, 0 otherwise.
///
/// # Safety
/// `group` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_group_g1(group: *const HbGroup, out: *mut i32) -> HbStatus {
    guard(|| {
        let g = non_null(group, "group")?;
        let report = check_g1(&g.spectrum)?;
        write_out(out, i32::from(report.satisfied), "out")
    })
}

/// Release a group. Null is ignored.
///
/// # Safety
/// `group` must be null or come from this library and not be used again.
#[no_mangle]
pub unsafe extern "C" fn hb_group_free(group: *mut HbGroup) {
    if !group.is_null() {
        // SAFETY: allocated by `Box::into_raw` in this library.
        drop(unsafe { Box::from_raw(group) });
    }
}

/// Ground eigenvalue `τ₀` of the linearization at `u_λ`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_ground_eigenvalue(n: usize, p: f64, lambda: f64, out: *mut f64) -> HbStatus {
    guard(|| {
        let pr = params(n, p)?;
        let cfg = NumericsConfig::default();
        let u = solve_unit_ground_state(&pr, lambda, &cfg)?.profile;
        write_out(out, ground_eigenvalue(&u, &pr, &cfg)?, "out")
    })
}

/// Dirichlet-to-Neumann eigenvalue `σ_degree(λ)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_sigma(n: usize, p: f64, degree: usize, lambda: f64, out: *mut f64) -> HbStatus {
    guard(|| {
        let pr = params(n, p)?;
        let cfg = NumericsConfig::default();
        let u = solve_unit_ground_state(&pr, lambda, &cfg)?.profile;
        write_out(out, sigma_eigenvalue(degree, &u, &pr, &cfg)?, "out")
    })
}

/// Locate `Λ*` for the first invariant degree of `group` on the default
/// grid (`points` log-spaced values up to `lambda_max`) and certify it.
/// An uncertified point still returns `HB_STATUS_OK` with `certified = 0`.
///
/// # Safety
/// `group` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hb_find_bifurcation(
    n: usize,
    p: f64,
    group: *const HbGroup,
    lambda_max: f64,
    points: usize,
    out: *mut HbBifurcation,
) -> HbStatus {
    guard(|| {
        let g = non_null(group, "group")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let pr = params(n, p)?;
        if g.group.ambient_n != n {
            return Err(Error::Incompatible(format!("group acts on R^{} but N = {n}", g.group.ambient_n)).into());
        }
        let first = g
            .spectrum
            .first()
            .ok_or_else(|| Error::Precondition("group has no invariant degrees".into()))?;
        let cache = UnitProfileCache::new(pr, NumericsConfig::default());
        let (_, point) = locate_bifurcation(first.i, &cache, &g.spectrum, lambda_max, points)?;
        let cert = certify_local_bifurcation(&point, &cache, &g.spectrum)?;
        write_out(
            out,
            HbBifurcation {
                degree: point.degree,
                lambda_star: point.lambda_star,
                radius_star: point.radius_star,
                sigma_star: point.sigma_star,
                certified: i32::from(cert.passed),
            },
            "out",
        )
    })
}
