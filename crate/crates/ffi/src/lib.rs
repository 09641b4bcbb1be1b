//! C interface. Handles are opaque and owned by the caller, who releases
//! them with the matching `*_free` function. Every function returns an
//! `FcStatus`; on failure `fc_last_error_message` describes the cause for
//! the calling thread. Words use 1-based letters.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use flagcalc::charcalc::{bwb_report, euler_char_bs};
use flagcalc::descent::{CertifyOutcome, DescentError, Engine, EngineConfig, H1Answer};
use flagcalc::dynkin::{finite_cartan, CartanData};
use flagcalc::io::cartan_from_type;
use flagcalc::lattice::DivisorClass;
use flagcalc::weyl::{generate_roots, RootSystem};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcStatus {
    FcOk = 0,
    FcErrNullPointer = 1,
    FcErrInvalidArgument = 2,
    FcErrIndexOutOfRange = 3,
    FcErrNotReduced = 4,
    FcErrDomain = 5,
    FcErrOverflow = 6,
    FcErrBufferTooSmall = 7,
    FcErrPanic = 8,
}

/// Outcome of certifying a word.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcCertifyOutcome {
    FcCertified = 0,
    FcFailsAt = 1,
    FcBudgetExceeded = 2,
}

/// Answer of one uniqueness step.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FcH1Answer {
    FcExact0 = 0,
    FcExact1 = 1,
    FcUndetermined = 2,
}

/// A validated Cartan matrix of finite type with its root system.
pub struct FcCartan {
    cartan: CartanData,
    roots: RootSystem,
}

/// A derivation engine with its memo.
pub struct FcEngine {
    engine: Engine,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).expect("interior nuls removed"));
}

fn fail(status: FcStatus, msg: impl Into<String>) -> FcStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> FcStatus) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => {
            if s == FcStatus::FcOk {
                set_error("");
            }
            s
        }
        Err(_) => fail(FcStatus::FcErrPanic, "internal panic"),
    }
}

/// Message for the last failing call on this thread; empty after success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn slice<'a, T>(p: *const T, len: usize) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(p, len))
    }
}

fn word_from(c: &CartanData, letters: &[usize]) -> Result<Vec<usize>, FcStatus> {
    letters
        .iter()
        .map(|&l| {
            if l == 0 || l > c.rank() {
                Err(fail(FcStatus::FcErrIndexOutOfRange, format!("letter {l} out of range 1..={}", c.rank())))
            } else {
                Ok(l - 1)
            }
        })
        .collect()
}

fn boxed_cartan(cartan: CartanData, out: *mut *mut FcCartan) -> FcStatus {
    match generate_roots(&cartan) {
        Ok(roots) => {
            unsafe { *out = Box::into_raw(Box::new(FcCartan { cartan, roots })) };
            FcStatus::FcOk
        }
        Err(e) => fail(FcStatus::FcErrDomain, e.to_string()),
    }
}

/// Builtin type from a name such as "F4".
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_cartan_from_type(name: *const c_char, out: *mut *mut FcCartan) -> FcStatus {
    guard(|| {
        if name.is_null() || out.is_null() {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        }
        let Ok(s) = CStr::from_ptr(name).to_str() else {
            return fail(FcStatus::FcErrInvalidArgument, "name is not UTF-8");
        };
        match cartan_from_type(s) {
            Ok(c) => boxed_cartan(c, out),
            Err(e) => fail(FcStatus::FcErrInvalidArgument, e.to_string()),
        }
    })
}

/// Cartan matrix from `rank * rank` row-major entries; must be of finite type.
///
/// # Safety
/// `entries` must point to `rank * rank` integers and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_cartan_from_matrix(entries: *const i64, rank: usize, out: *mut *mut FcCartan) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        }
        let Some(n2) = rank.checked_mul(rank) else {
            return fail(FcStatus::FcErrInvalidArgument, "rank too large");
        };
        let Some(e) = slice(entries, n2) else {
            return fail(FcStatus::FcErrNullPointer, "null entries");
        };
        let rows: Vec<Vec<i64>> = e.chunks(rank.max(1)).map(<[i64]>::to_vec).collect();
        match finite_cartan(rows) {
            Ok((c, _)) => boxed_cartan(c, out),
            Err(e) => fail(FcStatus::FcErrInvalidArgument, e.to_string()),
        }
    })
}

/// # Safety
/// `c` must come from a constructor above, or be null.
#[no_mangle]
pub unsafe extern "C" fn fc_cartan_free(c: *mut FcCartan) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_cartan_rank(c: *const FcCartan, out: *mut usize) -> FcStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), out.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        *out = c.cartan.rank();
        FcStatus::FcOk
    })
}

/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_positive_root_count(c: *const FcCartan, out: *mut usize) -> FcStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), out.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        *out = c.roots.num_positive();
        FcStatus::FcOk
    })
}

/// Order of the Weyl group, for groups small enough to enumerate.
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_weyl_order(c: *const FcCartan, out: *mut u64) -> FcStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), out.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        match c.roots.weyl_order_capped(flagcalc::weyl::BFS_CAP) {
            Ok(n) => {
                *out = n;
                FcStatus::FcOk
            }
            Err(e) => fail(FcStatus::FcErrDomain, e.to_string()),
        }
    })
}

/// Number of reduced words of the longest element as a decimal string.
/// `needed` receives the buffer size including the terminating NUL; if
/// `len` is smaller, nothing is written and FC_ERR_BUFFER_TOO_SMALL returned.
///
/// # Safety
/// `c` must be a live handle, `buf` writable for `len` bytes (or null with
/// `len == 0`), `needed` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_longest_reduced_word_count(c: *const FcCartan, buf: *mut c_char, len: usize, needed: *mut usize) -> FcStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), needed.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        let count = match c.roots.count_reduced_words(&c.roots.longest_element()) {
            Ok(n) => n.to_string(),
            Err(e) => return fail(FcStatus::FcErrDomain, e.to_string()),
        };
        *needed = count.len() + 1;
        if len < count.len() + 1 || buf.is_null() {
            return fail(FcStatus::FcErrBufferTooSmall, format!("need {} bytes", count.len() + 1));
        }
        ptr::copy_nonoverlapping(count.as_ptr(), buf as *mut u8, count.len());
        *buf.add(count.len()) = 0;
        FcStatus::FcOk
    })
}

/// Cohomology of a line bundle on the flag manifold. At most one degree
/// is nonzero; it is written to `degree` with its dimension in `value`.
/// When all groups vanish, `value` is 0 and `degree` is 0.
///
/// # Safety
/// `degrees` must hold `rank` integers; outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn fc_cohomology(c: *const FcCartan, degrees: *const i64, degree: *mut usize, value: *mut u64) -> FcStatus {
    guard(|| {
        let Some(c) = c.as_ref() else {
            return fail(FcStatus::FcErrNullPointer, "null handle");
        };
        let (Some(d), false, false) = (slice(degrees, c.cartan.rank()), degree.is_null(), value.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        let rep = match bwb_report(&c.roots, &DivisorClass::new(d.to_vec())) {
            Ok(r) => r,
            Err(e) => return fail(FcStatus::FcErrDomain, e.to_string()),
        };
        *degree = 0;
        *value = 0;
        for (k, v) in &rep.profile.values {
            match flagcalc::charcalc::small(v) {
                Some(0) => {}
                Some(x) => {
                    *degree = *k;
                    *value = x;
                }
                None => return fail(FcStatus::FcErrOverflow, "dimension exceeds 64 bits"),
            }
        }
        FcStatus::FcOk
    })
}

/// Euler characteristic of the pulled-back bundle on the tower of a word.
///
/// # Safety
/// `word` must hold `word_len` letters, `degrees` `rank` integers, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_euler_char_bs(
    c: *const FcCartan,
    word: *const usize,
    word_len: usize,
    degrees: *const i64,
    out: *mut i64,
) -> FcStatus {
    guard(|| {
        let Some(c) = c.as_ref() else {
            return fail(FcStatus::FcErrNullPointer, "null handle");
        };
        let (Some(w), Some(d), false) = (slice(word, word_len), slice(degrees, c.cartan.rank()), out.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        let w = match word_from(&c.cartan, w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match euler_char_bs(&c.cartan, &w, &DivisorClass::new(d.to_vec())) {
            Ok(x) => {
                *out = x;
                FcStatus::FcOk
            }
            Err(e) => fail(FcStatus::FcErrOverflow, e.to_string()),
        }
    })
}

/// Engine with a node budget per query (0 selects the default).
///
/// # Safety
/// `c` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_engine_new(c: *const FcCartan, budget: usize, out: *mut *mut FcEngine) -> FcStatus {
    guard(|| {
        let (Some(c), false) = (c.as_ref(), out.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        let mut cfg = EngineConfig::default();
        if budget > 0 {
            cfg.budget = budget;
        }
        match Engine::new(&c.cartan, cfg) {
            Ok(engine) => {
                *out = Box::into_raw(Box::new(FcEngine { engine }));
                FcStatus::FcOk
            }
            Err(e) => fail(FcStatus::FcErrDomain, e.to_string()),
        }
    })
}

/// # Safety
/// `e` must come from `fc_engine_new`, or be null.
#[no_mangle]
pub unsafe extern "C" fn fc_engine_free(e: *mut FcEngine) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

fn descent_status(e: DescentError) -> FcStatus {
    let status = match e {
        DescentError::NotReduced { .. } => FcStatus::FcErrNotReduced,
        DescentError::IndexOutOfRange { .. } => FcStatus::FcErrIndexOutOfRange,
        DescentError::EmptyWord => FcStatus::FcErrInvalidArgument,
        _ => FcStatus::FcErrDomain,
    };
    fail(status, e.to_string())
}

/// Certifies a reduced word. `step` receives the 1-based failing step, or 0.
///
/// # Safety
/// `e` must be a live engine, `word` hold `word_len` letters, outputs writable.
#[no_mangle]
pub unsafe extern "C" fn fc_certify_word(
    e: *const FcEngine,
    word: *const usize,
    word_len: usize,
    outcome: *mut FcCertifyOutcome,
    step: *mut usize,
) -> FcStatus {
    guard(|| {
        let Some(e) = e.as_ref() else {
            return fail(FcStatus::FcErrNullPointer, "null handle");
        };
        let (Some(w), false, false) = (slice(word, word_len), outcome.is_null(), step.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        let w = match word_from(e.engine.cartan(), w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match e.engine.certify_word(&w) {
            Ok(rep) => {
                let (o, s) = match rep.outcome {
                    CertifyOutcome::Certified => (FcCertifyOutcome::FcCertified, 0),
                    CertifyOutcome::FailsAt { step } => (FcCertifyOutcome::FcFailsAt, step),
                    CertifyOutcome::BudgetExceeded { step } => (FcCertifyOutcome::FcBudgetExceeded, step),
                };
                *outcome = o;
                *step = s;
                FcStatus::FcOk
            }
            Err(err) => descent_status(err),
        }
    })
}

/// `h^1` of `K` of the last letter on the tower of the word without it.
///
/// # Safety
/// `e` must be a live engine, `word` hold `word_len` letters, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fc_h1_uniqueness(e: *const FcEngine, word: *const usize, word_len: usize, out: *mut FcH1Answer) -> FcStatus {
    guard(|| {
        let Some(e) = e.as_ref() else {
            return fail(FcStatus::FcErrNullPointer, "null handle");
        };
        let (Some(w), false) = (slice(word, word_len), out.is_null()) else {
            return fail(FcStatus::FcErrNullPointer, "null argument");
        };
        let w = match word_from(e.engine.cartan(), w) {
            Ok(w) => w,
            Err(s) => return s,
        };
        match e.engine.h1_uniqueness(&w) {
            Ok(a) => {
                *out = match a {
                    H1Answer::Exact0 => FcH1Answer::FcExact0,
                    H1Answer::Exact1 => FcH1Answer::FcExact1,
                    H1Answer::Undetermined { .. } => FcH1Answer::FcUndetermined,
                };
                FcStatus::FcOk
            }
            Err(err) => descent_status(err),
        }
    })
}
