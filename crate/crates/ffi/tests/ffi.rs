use std::ffi::{CStr, CString};
use std::ptr;

use steady_ffi::*;

fn last_error() -> String {
    let p = steady_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn build(system: &str, size: usize) -> *mut SteadyLiouvillian {
    let name = CString::new(system).unwrap();
    let mut l = ptr::null_mut();
    let st = steady_liouvillian_build(name.as_ptr(), size, ptr::null(), ptr::null(), 0, &mut l);
    assert_eq!(st, SteadyStatus::Ok);
    l
}

#[test]
fn solve_a_model_and_read_back_rho() {
    unsafe {
        let l = build("jc", 3);
        assert_eq!(steady_liouvillian_hilbert_dim(l), 6);
        for method in [SteadyMethod::Direct, SteadyMethod::Gmres, SteadyMethod::PowerBicgstab] {
            let mut r = ptr::null_mut();
            assert_eq!(steady_solve(l, method, ptr::null(), &mut r), SteadyStatus::Ok);
            let d = steady_result_dim(r);
            assert_eq!(d, 6);
            let (mut re, mut im) = (vec![0.0; d * d], vec![0.0; d * d]);
            assert_eq!(steady_result_rho(r, re.as_mut_ptr(), im.as_mut_ptr(), d * d), SteadyStatus::Ok);
            let trace: f64 = (0..d).map(|i| re[i * d + i]).sum();
            assert!((trace - 1.0).abs() < 1e-10, "{method:?}: trace {trace}");
            for i in 0..d {
                for j in 0..d {
                    assert!((re[i * d + j] - re[j * d + i]).abs() < 1e-10);
                    assert!((im[i * d + j] + im[j * d + i]).abs() < 1e-10);
                }
            }
            let mut diag = std::mem::zeroed::<SteadyDiagnostics>();
            assert_eq!(steady_result_diagnostics(r, &mut diag), SteadyStatus::Ok);
            assert!(diag.converged && !diag.breakdown);
            assert!(diag.residual < 1e-10);
            assert!(diag.band_before.bandwidth >= diag.band_after.bandwidth);
            steady_result_free(r);
        }
        steady_liouvillian_free(l);
    }
}

#[test]
fn options_and_parameters_pass_through() {
    unsafe {
        let names = [CString::new("gamma").unwrap()];
        let ptrs: Vec<_> = names.iter().map(|n| n.as_ptr()).collect();
        let values = [0.05];
        let sys = CString::new("spin").unwrap();
        let mut l = ptr::null_mut();
        let st = steady_liouvillian_build(sys.as_ptr(), 2, ptrs.as_ptr(), values.as_ptr(), 1, &mut l);
        assert_eq!(st, SteadyStatus::Ok);

        let mut opts = steady_options_default();
        opts.ordering = SteadyOrdering::Natural;
        opts.max_iter = 1;
        opts.tol = 1e-300;
        let mut r = ptr::null_mut();
        assert_eq!(steady_solve(l, SteadyMethod::Gmres, &opts, &mut r), SteadyStatus::Ok);
        let mut diag = std::mem::zeroed::<SteadyDiagnostics>();
        steady_result_diagnostics(r, &mut diag);
        assert!(!diag.converged);
        assert_eq!(diag.iterations, 1);
        assert_eq!(diag.band_before.bandwidth, diag.band_after.bandwidth);
        steady_result_free(r);

        let bad = [CString::new("no_such_parameter").unwrap()];
        let bad_ptrs: Vec<_> = bad.iter().map(|n| n.as_ptr()).collect();
        let mut l2 = ptr::null_mut();
        let st = steady_liouvillian_build(sys.as_ptr(), 2, bad_ptrs.as_ptr(), values.as_ptr(), 1, &mut l2);
        assert_eq!(st, SteadyStatus::InvalidArgument, "{}", last_error());
        assert!(l2.is_null());
        steady_liouvillian_free(l);
    }
}

#[test]
fn null_pointers_and_bad_arguments_are_reported() {
    unsafe {
        let mut r = ptr::null_mut();
        assert_eq!(steady_solve(ptr::null(), SteadyMethod::Direct, ptr::null(), &mut r), SteadyStatus::NullPointer);
        assert!(last_error().contains("liouvillian"));
        assert!(r.is_null());

        let l = build("spin", 2);
        assert_eq!(steady_solve(l, SteadyMethod::Direct, ptr::null(), ptr::null_mut()), SteadyStatus::NullPointer);

        let sys = CString::new("nope").unwrap();
        let mut l2 = ptr::null_mut();
        let st = steady_liouvillian_build(sys.as_ptr(), 2, ptr::null(), ptr::null(), 0, &mut l2);
        assert_eq!(st, SteadyStatus::InvalidArgument);
        assert!(last_error().contains("nope"));

        assert_eq!(steady_solve(l, SteadyMethod::Direct, ptr::null(), &mut r), SteadyStatus::Ok);
        let mut buf = vec![0.0; 3];
        let mut buf2 = vec![0.0; 3];
        let st = steady_result_rho(r, buf.as_mut_ptr(), buf2.as_mut_ptr(), 3);
        assert_eq!(st, SteadyStatus::InvalidArgument);
        assert!(last_error().contains("buffer length"));
        assert_eq!(steady_result_rho(r, ptr::null_mut(), buf2.as_mut_ptr(), 3), SteadyStatus::NullPointer);

        assert_eq!(steady_result_dim(ptr::null()), 0);
        assert_eq!(steady_matrix_nnz(ptr::null()), 0);
        steady_result_free(ptr::null_mut());
        steady_result_free(r);
        steady_liouvillian_free(l);
    }
}

#[test]
fn matrices_round_trip_through_matrix_market() {
    unsafe {
        // Path graph on 4 nodes plus a duplicate that sums away to zero.
        let rows = [0usize, 1, 1, 2, 2, 3, 3, 0];
        let cols = [1usize, 0, 2, 1, 3, 2, 3, 0];
        let re = [1.0, 1.0, 2.0, 2.0, 0.5, 0.5, 1.0, 0.0];
        let im = [0.0, 0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        let mut m = ptr::null_mut();
        let st = steady_matrix_from_triplets(
            4,
            4,
            rows.as_ptr(),
            cols.as_ptr(),
            re.as_ptr(),
            im.as_ptr(),
            rows.len(),
            &mut m,
        );
        assert_eq!(st, SteadyStatus::Ok);
        assert_eq!((steady_matrix_nrows(m), steady_matrix_ncols(m), steady_matrix_nnz(m)), (4, 4, 7));

        let mut bp = std::mem::zeroed::<SteadyBandProfile>();
        assert_eq!(steady_matrix_band_profile(m, &mut bp), SteadyStatus::Ok);
        assert_eq!((bp.upper_bandwidth, bp.lower_bandwidth, bp.bandwidth), (1, 1, 3));
        assert_eq!(bp.profile, bp.upper_profile + bp.lower_profile);

        let dir = tempfile::tempdir().unwrap();
        let path = CString::new(dir.path().join("m.mtx").to_str().unwrap()).unwrap();
        assert_eq!(steady_matrix_write_mtx(m, path.as_ptr()), SteadyStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(steady_matrix_read_mtx(path.as_ptr(), &mut back), SteadyStatus::Ok);
        assert_eq!(steady_matrix_nnz(back), 7);

        // A 4x4 matrix is a superoperator on a 2-level system.
        let mut l = ptr::null_mut();
        assert_eq!(steady_liouvillian_from_matrix(back, 2, &mut l), SteadyStatus::Ok);
        steady_liouvillian_free(l);
        assert_eq!(steady_liouvillian_from_matrix(back, 3, &mut l), SteadyStatus::InvalidArgument);

        let missing = CString::new(dir.path().join("missing.mtx").to_str().unwrap()).unwrap();
        let mut none = ptr::null_mut();
        assert_eq!(steady_matrix_read_mtx(missing.as_ptr(), &mut none), SteadyStatus::Io);
        assert!(none.is_null());

        let bad_row = [9usize];
        let st =
            steady_matrix_from_triplets(4, 4, bad_row.as_ptr(), cols.as_ptr(), re.as_ptr(), im.as_ptr(), 1, &mut none);
        assert_ne!(st, SteadyStatus::Ok);

        steady_matrix_free(m);
        steady_matrix_free(back);
    }
}

#[test]
fn liouvillian_matrix_matches_band_profile_of_the_model() {
    unsafe {
        let l = build("jc", 16);
        let mut m = ptr::null_mut();
        assert_eq!(steady_liouvillian_matrix(l, &mut m), SteadyStatus::Ok);
        assert_eq!(steady_matrix_nrows(m), 1024);
        let mut bp = std::mem::zeroed::<SteadyBandProfile>();
        steady_matrix_band_profile(m, &mut bp);
        assert_eq!(bp.bandwidth, 193);
        steady_matrix_free(m);
        steady_liouvillian_free(l);
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(steady_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
