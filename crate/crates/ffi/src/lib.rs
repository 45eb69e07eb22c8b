//! C interface to the clamped plate solver.
//!
//! Handles are opaque and owned by the caller until passed to the matching
//! `_free` function. Every fallible call returns a [`BiharmStatus`]; the
//! message of the most recent failure on the calling thread is available from
//! [`biharm_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::{Arc, OnceLock};

use biharm::driver::{simply_connected_domain, LoadSet, ManufacturedSolution, Problem};
use biharm::geometry::{make_circle, make_rounded_rectangle, Domain, Point};
use biharm::stream_eval::LayerDensity;
use biharm::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BiharmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    OnBoundary = 3,
    OutsideDomain = 4,
    Numerical = 5,
    Panic = 6,
}

/// Boundary of a rounded rectangle with optional circular obstacles. The
/// factored system is built on first use and shared with every solution.
pub struct BiharmDomain {
    domain: Domain,
    problem: OnceLock<Arc<Problem>>,
}

/// Solved layer densities, plus the free-space part for Green's functions.
pub struct BiharmSolution {
    problem: Arc<Problem>,
    density: LayerDensity,
    loads: LoadSet,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> BiharmStatus {
    match e {
        Error::Stage { source, .. } => status_of(source),
        Error::OnBoundary { .. } => BiharmStatus::OnBoundary,
        _ if e.is_config() => BiharmStatus::InvalidArgument,
        Error::Dimension { .. } => BiharmStatus::InvalidArgument,
        _ => BiharmStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), BiharmStatus>) -> BiharmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BiharmStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            BiharmStatus::Panic
        }
    }
}

fn fail(e: Error) -> BiharmStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn invalid(msg: &str) -> BiharmStatus {
    set_error(msg.into());
    BiharmStatus::InvalidArgument
}

fn null(what: &str) -> BiharmStatus {
    set_error(format!("{what} is null"));
    BiharmStatus::NullPointer
}

/// # Safety
/// `p` must be null or point to `2 * n` readable doubles.
unsafe fn points<'a>(p: *const f64, n: usize, what: &str) -> Result<&'a [f64], BiharmStatus> {
    if n == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, 2 * n))
}

fn pairs(xy: &[f64]) -> Vec<Point> {
    xy.chunks_exact(2).map(|c| [c[0], c[1]]).collect()
}

impl BiharmDomain {
    fn problem(&self) -> Result<Arc<Problem>, BiharmStatus> {
        if let Some(p) = self.problem.get() {
            return Ok(p.clone());
        }
        let p = Arc::new(Problem::new(self.domain.clone()).map_err(fail)?);
        Ok(self.problem.get_or_init(|| p).clone())
    }
}

/// Creates the rounded rectangle `[0, a] × [0, b]` with corner rounding `h`,
/// discretized with `outer_panels` panels, and `n_circles` circular holes
/// with `circle_panels` panels each. `centers` holds `x0, y0, x1, y1, ...`.
///
/// # Safety
/// `centers` and `radii` must hold `2 * n_circles` and `n_circles` doubles
/// (either may be null when `n_circles` is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn biharm_domain_new(
    a: f64,
    b: f64,
    h: f64,
    outer_panels: usize,
    centers: *const f64,
    radii: *const f64,
    n_circles: usize,
    circle_panels: usize,
    out: *mut *mut BiharmDomain,
) -> BiharmStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let centers = pairs(points(centers, n_circles, "centers")?);
        if n_circles > 0 && radii.is_null() {
            return Err(null("radii"));
        }
        let radii: &[f64] = if n_circles == 0 {
            &[]
        } else {
            std::slice::from_raw_parts(radii, n_circles)
        };
        let domain = if n_circles == 0 {
            simply_connected_domain(a, b, h, outer_panels)
        } else {
            make_rounded_rectangle(a, b, h, outer_panels).and_then(|outer| {
                let holes = centers
                    .iter()
                    .zip(radii)
                    .map(|(&c, &r)| make_circle(c, r, circle_panels))
                    .collect::<biharm::Result<Vec<_>>>()?;
                Domain::new(outer, holes)
            })
        }
        .map_err(fail)?;
        *out = Box::into_raw(Box::new(BiharmDomain {
            domain,
            problem: OnceLock::new(),
        }));
        Ok(())
    })
}

/// # Safety
/// `dom` must be null or a handle from [`biharm_domain_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn biharm_domain_free(dom: *mut BiharmDomain) {
    if !dom.is_null() {
        drop(Box::from_raw(dom));
    }
}

/// Number of unknowns in the block system (densities, constant, charges).
///
/// # Safety
/// `dom` must be a live domain handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn biharm_domain_system_size(dom: *const BiharmDomain, out: *mut usize) -> BiharmStatus {
    guard(|| {
        let dom = dom.as_ref().ok_or_else(|| null("domain"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = dom.domain.system_size();
        Ok(())
    })
}

/// Writes 1 to `inside` if `(x, y)` lies in the domain, else 0.
///
/// # Safety
/// `dom` must be a live domain handle and `inside` writable.
#[no_mangle]
pub unsafe extern "C" fn biharm_domain_contains(dom: *const BiharmDomain, x: f64, y: f64, inside: *mut i32) -> BiharmStatus {
    guard(|| {
        let dom = dom.as_ref().ok_or_else(|| null("domain"))?;
        let inside = inside.as_mut().ok_or_else(|| null("inside"))?;
        *inside = i32::from(dom.domain.contains([x, y]).map_err(fail)?);
        Ok(())
    })
}

fn solve(dom: &BiharmDomain, data: impl FnOnce(&Problem) -> biharm::assembly::DirichletData, loads: LoadSet) -> Result<*mut BiharmSolution, BiharmStatus> {
    let problem = dom.problem()?;
    let density = problem.solve(&data(&problem)).map_err(fail)?;
    Ok(Box::into_raw(Box::new(BiharmSolution { problem, density, loads })))
}

/// Solves with clamped data taken from `w = Σ q_j r_j² log r_j` for sources
/// `(x_j, y_j)` outside the domain.
///
/// # Safety
/// `sources` must hold `2 * n` doubles and `strengths` `n`; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn biharm_solve_manufactured(
    dom: *const BiharmDomain,
    sources: *const f64,
    strengths: *const f64,
    n: usize,
    out: *mut *mut BiharmSolution,
) -> BiharmStatus {
    guard(|| {
        let dom = dom.as_ref().ok_or_else(|| null("domain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(invalid("at least one source is required"));
        }
        let sources = pairs(points(sources, n, "sources")?);
        if strengths.is_null() {
            return Err(null("strengths"));
        }
        let strengths = std::slice::from_raw_parts(strengths, n).to_vec();
        for &s in &sources {
            if dom.domain.contains(s).map_err(fail)? {
                return Err(invalid("manufactured sources must lie outside the domain"));
            }
        }
        let sol = ManufacturedSolution { sources, strengths };
        *out = solve(dom, |p| sol.data(&p.ops), LoadSet { loads: vec![] })?;
        Ok(())
    })
}

/// Green's function of the clamped plate for unit point loads at `loads`.
///
/// # Safety
/// `loads` must hold `2 * n` doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn biharm_solve_greens(
    dom: *const BiharmDomain,
    loads: *const f64,
    n: usize,
    out: *mut *mut BiharmSolution,
) -> BiharmStatus {
    guard(|| {
        let dom = dom.as_ref().ok_or_else(|| null("domain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(invalid("at least one load is required"));
        }
        let loads = LoadSet { loads: pairs(points(loads, n, "loads")?) };
        for &t in &loads.loads {
            if !dom.domain.contains(t).map_err(fail)? {
                set_error(format!("load {t:?} is outside the domain"));
                return Err(BiharmStatus::OutsideDomain);
            }
        }
        let data = |p: &Problem| loads.homogeneous_data(&p.ops);
        *out = solve(dom, data, loads.clone())?;
        Ok(())
    })
}

/// Evaluates `w` at `n` interior points `xy`, writing `n` values to `w`.
///
/// # Safety
/// `xy` must hold `2 * n` doubles and `w` room for `n`.
#[no_mangle]
pub unsafe extern "C" fn biharm_solution_eval(sol: *const BiharmSolution, xy: *const f64, n: usize, w: *mut f64) -> BiharmStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        let xy = pairs(points(xy, n, "xy")?);
        if n > 0 && w.is_null() {
            return Err(null("w"));
        }
        let ev = sol.problem.evaluator(&sol.density);
        for (i, &z) in xy.iter().enumerate() {
            if !sol.problem.ops.domain.contains(z).map_err(fail)? {
                set_error(format!("target {z:?} is outside the domain"));
                return Err(BiharmStatus::OutsideDomain);
            }
            *w.add(i) = sol.loads.w(z) + ev.w(z).map_err(fail)?.0;
        }
        Ok(())
    })
}

/// Copies the charge strengths `c₀, c₁..c_N` (one more than the number of
/// holes) into `out`, which must have room for `len` values.
///
/// # Safety
/// `out` must have room for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn biharm_solution_charges(sol: *const BiharmSolution, out: *mut f64, len: usize) -> BiharmStatus {
    guard(|| {
        let sol = sol.as_ref().ok_or_else(|| null("solution"))?;
        let c = &sol.density.charges;
        if len < c.len() {
            return Err(invalid(&format!("charges need {} values", c.len())));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        std::ptr::copy_nonoverlapping(c.as_ptr(), out, c.len());
        Ok(())
    })
}

/// # Safety
/// `sol` must be null or a live solution handle.
#[no_mangle]
pub unsafe extern "C" fn biharm_solution_free(sol: *mut BiharmSolution) {
    if !sol.is_null() {
        drop(Box::from_raw(sol));
    }
}

/// Copies the last error message of this thread, NUL terminated and
/// truncated to `len` bytes, into `buf`. Returns the full message length.
///
/// # Safety
/// `buf` must be null or have room for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn biharm_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = e.len().min(len - 1);
            std::ptr::copy_nonoverlapping(e.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        e.len()
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn biharm_status_str(s: BiharmStatus) -> *const c_char {
    let m: &'static CStr = match s {
        BiharmStatus::Ok => c"ok",
        BiharmStatus::NullPointer => c"null pointer",
        BiharmStatus::InvalidArgument => c"invalid argument",
        BiharmStatus::OnBoundary => c"point on the boundary",
        BiharmStatus::OutsideDomain => c"point outside the domain",
        BiharmStatus::Numerical => c"numerical failure",
        BiharmStatus::Panic => c"internal panic",
    };
    m.as_ptr()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn errors_map_through_stages() {
        let e = Error::OnBoundary { point: [0.0; 2], distance: 0.0 }.at("evaluation");
        assert_eq!(status_of(&e), BiharmStatus::OnBoundary);
        assert_eq!(status_of(&Error::Config("x".into()).at("setup")), BiharmStatus::InvalidArgument);
        assert_eq!(status_of(&Error::Singular { row: 0, pivot: 0.0 }), BiharmStatus::Numerical);
    }

    #[test]
    fn panics_become_status_codes() {
        assert_eq!(guard(|| panic!("boom")), BiharmStatus::Panic);
        assert_eq!(unsafe { biharm_last_error(ptr_null(), 0) }, "internal panic".len());
    }

    fn ptr_null() -> *mut c_char {
        std::ptr::null_mut()
    }
}
