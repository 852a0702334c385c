use hitrun_ffi::*;
use std::ffi::CStr;
use std::ptr;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hitrun_last_error()).to_string_lossy().into_owned() }
}

fn cube() -> *mut HitrunBody {
    let mut body = ptr::null_mut();
    assert_eq!(unsafe { hitrun_body_cube(2, 1.0, &mut body) }, HitrunStatus::Ok);
    body
}

#[test]
fn body_membership_and_dim() {
    let body = cube();
    unsafe {
        assert_eq!(hitrun_body_dim(body), 2);
        let mut inside = -1;
        assert_eq!(hitrun_body_contains(body, [0.5, -0.5].as_ptr(), 2, &mut inside), HitrunStatus::Ok);
        assert_eq!(inside, 1);
        assert_eq!(hitrun_body_contains(body, [1.5, 0.0].as_ptr(), 2, &mut inside), HitrunStatus::Ok);
        assert_eq!(inside, 0);
        assert_eq!(hitrun_body_contains(body, [0.0].as_ptr(), 1, &mut inside), HitrunStatus::Usage);
        hitrun_body_free(body);
    }
}

#[test]
fn invalid_bodies_report_errors() {
    let mut body = ptr::null_mut();
    unsafe {
        assert_eq!(hitrun_body_ball([0.0, 0.0].as_ptr(), 2, -1.0, &mut body), HitrunStatus::Usage);
        assert!(body.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(hitrun_body_ball(ptr::null(), 2, 1.0, &mut body), HitrunStatus::NullPointer);
        assert!(last_error().contains("center"));
        assert_eq!(hitrun_body_cube(2, 1.0, ptr::null_mut()), HitrunStatus::NullPointer);
    }
}

#[test]
fn hpolytope_row_major() {
    let a = [1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0];
    let b = [1.0; 4];
    let mut body = ptr::null_mut();
    unsafe {
        assert_eq!(hitrun_body_hpolytope(a.as_ptr(), b.as_ptr(), 4, 2, &mut body), HitrunStatus::Ok);
        let mut inside = 0;
        hitrun_body_contains(body, [0.9, -0.9].as_ptr(), 2, &mut inside);
        assert_eq!(inside, 1);
        hitrun_body_free(body);
    }
}

#[test]
fn transition_density_matches_closed_form() {
    // unit disc from its centre: P(0, x) = 1/(2π|x|)
    let mut body = ptr::null_mut();
    let mut target = ptr::null_mut();
    unsafe {
        assert_eq!(hitrun_body_ball([0.0, 0.0].as_ptr(), 2, 1.0, &mut body), HitrunStatus::Ok);
        assert_eq!(hitrun_target_uniform(body, &mut target), HitrunStatus::Ok);
        hitrun_body_free(body);
        let mut p = 0.0;
        let st = hitrun_transition_density(target, [0.0, 0.0].as_ptr(), [0.5, 0.0].as_ptr(), 2, &mut p);
        assert_eq!(st, HitrunStatus::Ok);
        let expected = 1.0 / (2.0 * std::f64::consts::PI * 0.5);
        assert!((p - expected).abs() < 1e-12, "{p} {expected}");
        let st = hitrun_transition_density(target, [0.1, 0.1].as_ptr(), [0.1, 0.1].as_ptr(), 2, &mut p);
        assert_eq!(st, HitrunStatus::Singular);
        hitrun_target_free(target);
    }
}

#[test]
fn chains_are_reproducible_and_stay_inside() {
    let body = cube();
    let mut target = ptr::null_mut();
    unsafe {
        assert_eq!(
            hitrun_target_truncated_gaussian(body, [0.2, 0.0].as_ptr(), 2, 3.0, &mut target),
            HitrunStatus::Ok
        );
        let run = |kind| {
            let mut chain = ptr::null_mut();
            let st = hitrun_chain_new(target, kind, 0.3, 1, [0.0, 0.0].as_ptr(), 2, 42, 0, &mut chain);
            assert_eq!(st, HitrunStatus::Ok);
            assert_eq!(hitrun_chain_step(chain, 500), HitrunStatus::Ok);
            assert_eq!(hitrun_chain_steps(chain), 500);
            let mut x = [0.0; 2];
            assert_eq!(hitrun_chain_position(chain, x.as_mut_ptr(), 2), HitrunStatus::Ok);
            hitrun_chain_free(chain);
            x
        };
        for kind in [HitrunChainKind::HitAndRun, HitrunChainKind::BallWalk] {
            let a = run(kind);
            assert_eq!(a, run(kind));
            assert!(a.iter().all(|v| v.abs() <= 1.0));
        }
        let mut chain = ptr::null_mut();
        let st = hitrun_chain_new(target, HitrunChainKind::HitAndRun, 0.0, 0, [2.0, 0.0].as_ptr(), 2, 1, 0, &mut chain);
        assert_eq!(st, HitrunStatus::Domain);
        let st = hitrun_chain_new(target, HitrunChainKind::BallWalk, -1.0, 0, [0.0, 0.0].as_ptr(), 2, 1, 0, &mut chain);
        assert_eq!(st, HitrunStatus::Usage);
        hitrun_target_free(target);
        hitrun_body_free(body);
    }
}

#[test]
fn free_accepts_null() {
    unsafe {
        hitrun_body_free(ptr::null_mut());
        hitrun_target_free(ptr::null_mut());
        hitrun_chain_free(ptr::null_mut());
        assert_eq!(hitrun_chain_step(ptr::null_mut(), 1), HitrunStatus::NullPointer);
    }
}

#[test]
fn version_is_nul_terminated() {
    let v = unsafe { CStr::from_ptr(hitrun_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/hitrun.h");
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(status.success());
}
