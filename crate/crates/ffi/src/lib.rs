//! C interface to flatline.
//!
//! Every function returns an [`FlStatus`] and writes results through out
//! pointers. Objects are opaque handles released with their `_free`
//! function. After a failure `fl_last_error` describes it; the message
//! belongs to the calling thread and lives until its next failing call.

use flatline::numbers::parse_real;
use flatline::slit::{build_slit_torus, classify, shortest_sequence, DirectionAnalysis, SequenceOptions, Verdict};
use flatline::{Error, FlatSurface, Norm, Vec2};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidSurface = 4,
    Hypothesis = 5,
    VerticalSaddleConnection = 6,
    BudgetExceeded = 7,
    OutOfRange = 8,
    PrecisionExhausted = 9,
    Usage = 10,
    Io = 11,
    Panic = 12,
    BufferTooSmall = 13,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlNorm {
    Euclid = 0,
    Sup = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlVerdict {
    Ue = 0,
    UeEvidence = 1,
    NonergodicEvidence = 2,
    Periodic = 3,
    Inconclusive = 4,
}

/// A translation surface.
pub struct FlSurface(FlatSurface);

/// Shortest slits and loops of a slit-torus direction with its verdict.
pub struct FlAnalysis {
    analysis: DirectionAnalysis,
    verdict: Verdict,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> FlStatus {
    match e {
        Error::Parse(_) => FlStatus::Parse,
        Error::GluingMismatch { .. } | Error::Disconnected | Error::BadConeAngle { .. } => FlStatus::InvalidSurface,
        Error::HypothesisFailure(_)
        | Error::NotConnected { .. }
        | Error::CoverageGap { .. }
        | Error::GenusTooSmall { .. }
        | Error::SingularityInInterior { .. }
        | Error::SingularityHit { .. } => FlStatus::Hypothesis,
        Error::VerticalSaddleConnection { .. } => FlStatus::VerticalSaddleConnection,
        Error::BudgetExceeded { .. } | Error::FlipBudgetExceeded(_) | Error::FlipCycle | Error::RayBudgetExceeded => {
            FlStatus::BudgetExceeded
        }
        Error::OutOfRange(_) => FlStatus::OutOfRange,
        Error::PrecisionExhausted { .. } => FlStatus::PrecisionExhausted,
        Error::Usage(_) | Error::ZeroDirection => FlStatus::Usage,
        Error::Io(_) => FlStatus::Io,
    }
}

/// Runs `f`, turning errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (FlStatus, String)>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FlStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            FlStatus::Panic
        }
    }
}

trait IntoFl<T> {
    fn fl(self) -> Result<T, (FlStatus, String)>;
}

impl<T> IntoFl<T> for flatline::Result<T> {
    fn fl(self) -> Result<T, (FlStatus, String)> {
        self.map_err(|e| (status_of(&e), e.to_string()))
    }
}

fn null(what: &str) -> (FlStatus, String) {
    (FlStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (FlStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (FlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), (FlStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn surface<'a>(s: *const FlSurface) -> Result<&'a FlatSurface, (FlStatus, String)> {
    s.as_ref().map(|s| &s.0).ok_or_else(|| null("surface"))
}

fn boxed(s: FlatSurface) -> *mut FlSurface {
    Box::into_raw(Box::new(FlSurface(s)))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failure on this thread; empty if none.
#[no_mangle]
pub extern "C" fn fl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a surface from its JSON description.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_from_json(json: *const c_char, out: *mut *mut FlSurface) -> FlStatus {
    guard(|| {
        let s = FlatSurface::from_json(read_str(json, "json")?).fl()?;
        write(out, boxed(s), "out")
    })
}

/// The double cover of the square torus branched over the ends of a
/// horizontal slit of length `lambda`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fl_slit_torus(lambda: f64, out: *mut *mut FlSurface) -> FlStatus {
    guard(|| write(out, boxed(build_slit_torus(lambda).fl()?.surface), "out"))
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_free(s: *mut FlSurface) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live surface and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_area(s: *const FlSurface, out: *mut f64) -> FlStatus {
    guard(|| write(out, surface(s)?.area(), "out"))
}

/// # Safety
/// `s` must be a live surface and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_genus(s: *const FlSurface, out: *mut usize) -> FlStatus {
    guard(|| write(out, surface(s)?.genus(), "out"))
}

/// New surface `diag(e^{t/2}, e^{-t/2}) · s`.
///
/// # Safety
/// `s` must be a live surface and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_apply_flow(s: *const FlSurface, t: f64, out: *mut *mut FlSurface) -> FlStatus {
    guard(|| {
        if !t.is_finite() {
            return Err((FlStatus::Usage, "flow time must be finite".into()));
        }
        write(out, boxed(surface(s)?.apply_flow(t)), "out")
    })
}

/// New surface with the direction `(dx, dy)` turned vertical.
///
/// # Safety
/// `s` must be a live surface and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_rotate_to_vertical(s: *const FlSurface, dx: f64, dy: f64, out: *mut *mut FlSurface) -> FlStatus {
    guard(|| write(out, boxed(surface(s)?.rotate_to_vertical(Vec2::new(dx, dy)).fl()?), "out"))
}

/// Length of the shortest saddle connection.
///
/// # Safety
/// `s` must be a live surface and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_surface_l1(s: *const FlSurface, norm: FlNorm, out: *mut f64) -> FlStatus {
    guard(|| {
        let n = match norm {
            FlNorm::Euclid => Norm::Euclid,
            FlNorm::Sup => Norm::Sup,
        };
        write(out, flatline::connections::l1(surface(s)?.mesh(), n).fl()?, "out")
    })
}

/// Number of singularities strictly inside circumdisks of the Delaunay
/// triangulation, with the given margin. Zero certifies it.
///
/// # Safety
/// `s` must be a live surface and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_delaunay_violations(s: *const FlSurface, margin: f64, out: *mut usize) -> FlStatus {
    guard(|| {
        let tri = flatline::delaunay::delaunay_triangulate(surface(s)?).fl()?;
        write(out, flatline::delaunay::circumdisk_violations(&tri.mesh, margin).len(), "out")
    })
}

/// Writes `t_0, ..., t_n` of `t_{k+1} = t_k + eps log t_{k+1}` to `out`,
/// which must hold `n + 1` values.
///
/// # Safety
/// `out` must be writable for `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn fl_time_sequence(eps: f64, t0: f64, n: usize, out: *mut f64, out_len: usize) -> FlStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if out_len < n.saturating_add(1) {
            return Err((FlStatus::BufferTooSmall, format!("need {} values, have {out_len}", n.saturating_add(1))));
        }
        let seq = flatline::strips::time_sequence(eps, t0, n).fl()?;
        ptr::copy_nonoverlapping(seq.times.as_ptr(), out, seq.times.len());
        Ok(())
    })
}

/// Analyzes the direction of slope `slope` on the slit torus of slit
/// `lambda`. Both are strings in the forms `p/q`, decimal, `golden`,
/// `sqrt(N)±M`, evaluated to `digits` decimals when irrational.
///
/// # Safety
/// `lambda` and `slope` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_slit_analyze(
    lambda: *const c_char,
    slope: *const c_char,
    entries: usize,
    digits: u32,
    out: *mut *mut FlAnalysis,
) -> FlStatus {
    guard(|| {
        let l = parse_real(read_str(lambda, "lambda")?, digits).fl()?;
        let s = parse_real(read_str(slope, "slope")?, digits).fl()?;
        let opts = SequenceOptions { entries, ..Default::default() };
        let analysis = shortest_sequence(&l, &s, &opts).fl()?;
        let verdict = classify(&analysis).verdict;
        write(out, Box::into_raw(Box::new(FlAnalysis { analysis, verdict })), "out")
    })
}

/// # Safety
/// `a` must be a live analysis and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_analysis_verdict(a: *const FlAnalysis, out: *mut FlVerdict) -> FlStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("analysis"))?;
        let v = match a.verdict {
            Verdict::Ue => FlVerdict::Ue,
            Verdict::UeEvidence => FlVerdict::UeEvidence,
            Verdict::NonergodicEvidence => FlVerdict::NonergodicEvidence,
            Verdict::Periodic => FlVerdict::Periodic,
            Verdict::Inconclusive => FlVerdict::Inconclusive,
        };
        write(out, v, "out")
    })
}

/// Number of minima found.
///
/// # Safety
/// `a` must be a live analysis and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_analysis_len(a: *const FlAnalysis, out: *mut usize) -> FlStatus {
    guard(|| write(out, a.as_ref().ok_or_else(|| null("analysis"))?.analysis.sequence.len(), "out"))
}

/// Time of minimum `i` and whether its realizer is a slit.
///
/// # Safety
/// `a` must be a live analysis; `t` and `is_slit` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_analysis_entry(a: *const FlAnalysis, i: usize, t: *mut f64, is_slit: *mut bool) -> FlStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("analysis"))?;
        let e = a.analysis.sequence.get(i).ok_or_else(|| (FlStatus::OutOfRange, format!("entry {i} out of range")))?;
        write(t, e.t, "t")?;
        write(is_slit, e.class.is_slit(), "is_slit")
    })
}

/// The full analysis as JSON. Release with `fl_string_free`.
///
/// # Safety
/// `a` must be a live analysis and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fl_analysis_to_json(a: *const FlAnalysis, out: *mut *mut c_char) -> FlStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(|| null("analysis"))?;
        let s = serde_json::to_string(&a.analysis).map_err(|e| (FlStatus::Panic, e.to_string()))?;
        write(out, CString::new(s).unwrap_or_default().into_raw(), "out")
    })
}

/// # Safety
/// `a` must come from `fl_slit_analyze` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_analysis_free(a: *mut FlAnalysis) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_error() -> String {
        unsafe { CStr::from_ptr(fl_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn slit_torus_round_trip() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(fl_slit_torus(0.3, &mut s), FlStatus::Ok);
            let (mut area, mut genus, mut l1) = (0.0, 0usize, 0.0);
            assert_eq!(fl_surface_area(s, &mut area), FlStatus::Ok);
            assert_eq!(fl_surface_genus(s, &mut genus), FlStatus::Ok);
            assert_eq!(fl_surface_l1(s, FlNorm::Euclid, &mut l1), FlStatus::Ok);
            assert!((area - 2.0).abs() < 1e-12);
            assert_eq!(genus, 2);
            assert!((l1 - 0.3).abs() < 1e-12);
            let mut f = ptr::null_mut();
            assert_eq!(fl_surface_apply_flow(s, 2.0, &mut f), FlStatus::Ok);
            let mut fl1 = 0.0;
            fl_surface_l1(f, FlNorm::Euclid, &mut fl1);
            // the slit is horizontal and stretches by e^{t/2}
            assert!((fl1 - (0.3f64 * 1f64.exp()).min((-1f64).exp())).abs() < 1e-12, "{fl1}");
            let mut v = usize::MAX;
            assert_eq!(fl_delaunay_violations(f, 1e-9, &mut v), FlStatus::Ok);
            assert_eq!(v, 0);
            fl_surface_free(f);
            fl_surface_free(s);
        }
    }

    #[test]
    fn errors_are_reported() {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(fl_slit_torus(1.5, &mut s), FlStatus::OutOfRange);
            assert!(s.is_null());
            assert!(last_error().contains("not in (0, 1)"), "{}", last_error());
            assert_eq!(fl_surface_area(ptr::null(), &mut 0.0), FlStatus::NullPointer);
            let bad = CString::new("{\"polygons\": 3}").unwrap();
            assert_eq!(fl_surface_from_json(bad.as_ptr(), &mut s), FlStatus::Parse);
            let mut buf = [0.0; 3];
            assert_eq!(fl_time_sequence(1.0, 10.0, 5, buf.as_mut_ptr(), 3), FlStatus::BufferTooSmall);
        }
    }

    #[test]
    fn json_surface() {
        let json = CString::new(r#"{"polygons": [[[0,0],[1,0],[1,1],[0,1]]], "gluings": [[[0,0],[0,2]], [[0,1],[0,3]]]}"#).unwrap();
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(fl_surface_from_json(json.as_ptr(), &mut s), FlStatus::Ok);
            let mut g = 0;
            fl_surface_genus(s, &mut g);
            assert_eq!(g, 1);
            fl_surface_free(s);
        }
    }

    #[test]
    fn time_sequence_fills_buffer() {
        let mut buf = [0.0; 4];
        unsafe {
            assert_eq!(fl_time_sequence(1.0, 10.0, 3, buf.as_mut_ptr(), buf.len()), FlStatus::Ok);
        }
        assert_eq!(buf[0], 10.0);
        for w in buf.windows(2) {
            assert!((w[1] - w[0] - w[1].ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn analysis_verdicts() {
        let half = CString::new("1/2").unwrap();
        let golden = CString::new("golden").unwrap();
        unsafe {
            let mut a = ptr::null_mut();
            assert_eq!(fl_slit_analyze(half.as_ptr(), golden.as_ptr(), 20, 60, &mut a), FlStatus::Ok);
            let mut v = FlVerdict::Inconclusive;
            fl_analysis_verdict(a, &mut v);
            assert_eq!(v, FlVerdict::Ue);
            let mut n = 0;
            fl_analysis_len(a, &mut n);
            assert_eq!(n, 20);
            let (mut t, mut slit) = (0.0, false);
            assert_eq!(fl_analysis_entry(a, 0, &mut t, &mut slit), FlStatus::Ok);
            assert!(t.is_finite());
            assert_eq!(fl_analysis_entry(a, n, &mut t, &mut slit), FlStatus::OutOfRange);
            let mut js = ptr::null_mut();
            assert_eq!(fl_analysis_to_json(a, &mut js), FlStatus::Ok);
            let text = CStr::from_ptr(js).to_str().unwrap().to_owned();
            assert!(text.contains("\"sequence\""));
            fl_string_free(js);
            fl_analysis_free(a);
        }
    }
}
