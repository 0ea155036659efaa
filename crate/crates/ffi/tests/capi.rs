use std::ffi::{c_char, CString};
use std::ptr;

use babai_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 256];
    let n = unsafe { babai_last_error_message(buf.as_mut_ptr(), buf.len()) };
    let bytes: Vec<u8> = buf[..n.min(255)].iter().map(|&c| c as u8).collect();
    String::from_utf8(bytes).unwrap()
}

fn catalog(name: &str) -> *mut BabaiLattice {
    let name = CString::new(name).unwrap();
    let mut lat = ptr::null_mut();
    assert_eq!(unsafe { babai_lattice_from_catalog(name.as_ptr(), &mut lat) }, BabaiStatus::Ok);
    lat
}

#[test]
fn lattice_roundtrip_and_cvp() {
    let json = CString::new(r#"{"n": 2, "basis": [[1, 0], ["311/1000", "101/100"]]}"#).unwrap();
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(babai_lattice_from_json(json.as_ptr(), &mut lat), BabaiStatus::Ok);
        let mut n = 0usize;
        assert_eq!(babai_lattice_dimension(lat, &mut n), BabaiStatus::Ok);
        assert_eq!(n, 2);
        let mut r = [0.0; 4];
        assert_eq!(babai_lattice_triangular(lat, r.as_mut_ptr(), 4), BabaiStatus::Ok);
        assert!((r[1] - 0.311).abs() < 1e-12 && r[2] == 0.0);

        let x = [0.311 * 3.0 + 2.0 + 0.01, 1.01 * 3.0 - 0.02];
        let mut u = [0i64; 2];
        let mut d2 = -1.0;
        assert_eq!(babai_nearest_plane(lat, x.as_ptr(), 2, u.as_mut_ptr(), ptr::null_mut(), &mut d2), BabaiStatus::Ok);
        assert_eq!(u, [2, 3]);
        assert!((0.0..1e-3).contains(&d2));
        let mut v = [0i64; 2];
        let mut p = [0.0; 2];
        assert_eq!(babai_closest_point(lat, x.as_ptr(), 2, v.as_mut_ptr(), p.as_mut_ptr(), ptr::null_mut()), BabaiStatus::Ok);
        assert_eq!(v, [2, 3]);

        assert_eq!(babai_lattice_triangular(lat, r.as_mut_ptr(), 3), BabaiStatus::InvalidArgument);
        assert!(last_error().contains("length 3"));
        babai_lattice_free(lat);
    }
}

#[test]
fn errors_are_reported() {
    let mut lat = ptr::null_mut();
    unsafe {
        assert_eq!(babai_lattice_from_catalog(ptr::null(), &mut lat), BabaiStatus::NullPointer);
        let bad = CString::new("no-such-lattice").unwrap();
        assert_eq!(babai_lattice_from_catalog(bad.as_ptr(), &mut lat), BabaiStatus::Parse);
        assert!(last_error().contains("no-such-lattice"));
        let json = CString::new("{not json").unwrap();
        assert_eq!(babai_lattice_from_json(json.as_ptr(), &mut lat), BabaiStatus::Parse);
        let mut n = 0usize;
        assert_eq!(babai_lattice_dimension(ptr::null(), &mut n), BabaiStatus::NullPointer);
        babai_lattice_free(ptr::null_mut());
        babai_protocol_free(ptr::null_mut());

        let mut p = 0.0;
        assert_eq!(babai_perr_closed_form_2d(0.3, 0.5, &mut p), BabaiStatus::Precondition);
        assert!(!last_error().is_empty());
        assert_eq!(babai_perr_closed_form_2d(-0.5, 0.75f64.sqrt(), &mut p), BabaiStatus::Ok);
        assert!((p - 1.0 / 12.0).abs() < 1e-12);
        assert_eq!(last_error(), "");
    }
}

#[test]
fn truncated_error_message() {
    let bad = CString::new("no-such-lattice").unwrap();
    let mut lat = ptr::null_mut();
    unsafe {
        babai_lattice_from_catalog(bad.as_ptr(), &mut lat);
        let full = babai_last_error_message(ptr::null_mut(), 0);
        let mut buf = [1 as c_char; 5];
        assert_eq!(babai_last_error_message(buf.as_mut_ptr(), 5), full);
        assert_eq!(buf[4], 0);
    }
}

#[test]
fn error_probabilities() {
    let bcc = catalog("BCC");
    let z3 = catalog("Z3");
    unsafe {
        let mut p = 0.0;
        assert_eq!(babai_perr_polyhedral_3d(bcc, 1, &mut p), BabaiStatus::Ok);
        assert!((p - 0.1458).abs() < 5e-4);
        let (mut mc, mut se) = (0.0, 0.0);
        assert_eq!(babai_perr_mc_uniform(bcc, 200_000, 7, 0, &mut mc, &mut se), BabaiStatus::Ok);
        assert!((mc - p).abs() < 5.0 * se.max(1e-3), "{mc} vs {p} (se {se})");
        assert_eq!(babai_perr_polyhedral_3d(z3, 0, &mut p), BabaiStatus::Ok);
        assert!(p.abs() < 1e-12);
        babai_lattice_free(bcc);
        babai_lattice_free(z3);
    }
}

#[test]
fn protocol_matches_nearest_plane() {
    let lat = catalog("BCC");
    let src = CString::new("uniform:A=5").unwrap();
    let mut proto = ptr::null_mut();
    unsafe {
        assert_eq!(babai_protocol_new(lat, src.as_ptr(), 0, &mut proto), BabaiStatus::Ok);
        let mut r = [0.0; 9];
        babai_lattice_triangular(lat, r.as_mut_ptr(), 9);
        let mut state = 0x2545_f491_4f6c_dd1du64;
        for _ in 0..2_000 {
            // triangular-frame input; the lattice is already upper triangular here
            let mut x = [0.0; 3];
            for xi in &mut x {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                *xi = (state >> 11) as f64 / (1u64 << 53) as f64 * 5.0 - 2.5;
            }
            let (mut ut, mut s) = ([0i64; 3], [0i64; 3]);
            for m in 1..=3 {
                assert_eq!(babai_protocol_encode(proto, m, x[m - 1], &mut ut[m - 1], &mut s[m - 1]), BabaiStatus::Ok);
            }
            let mut u = [0i64; 3];
            assert_eq!(babai_protocol_decode(proto, ut.as_ptr(), s.as_ptr(), 3, u.as_mut_ptr()), BabaiStatus::Ok);

            // nearest plane directly on R
            let mut want = [0i64; 3];
            for i in (0..3).rev() {
                let mut y = x[i];
                for j in i + 1..3 {
                    y -= r[i * 3 + j] * want[j] as f64;
                }
                want[i] = (y / r[i * 3 + i] + 0.5).floor() as i64;
            }
            assert_eq!(u, want, "x = {x:?}");
        }
        let (mut a, mut b) = (0, 0);
        assert_eq!(babai_protocol_encode(proto, 0, 0.0, &mut a, &mut b), BabaiStatus::InvalidArgument);
        assert_eq!(babai_protocol_encode(proto, 4, 0.0, &mut a, &mut b), BabaiStatus::InvalidArgument);
        let bad = CString::new("cauchy").unwrap();
        let mut p2 = ptr::null_mut();
        assert_eq!(babai_protocol_new(lat, bad.as_ptr(), 0, &mut p2), BabaiStatus::Parse);
        babai_protocol_free(proto);
        babai_lattice_free(lat);
    }
}

#[test]
fn irrational_ratios_rejected() {
    let lat = catalog("hrd");
    let src = CString::new("uniform:A=5").unwrap();
    let mut proto = ptr::null_mut();
    unsafe {
        assert_eq!(babai_protocol_new(lat, src.as_ptr(), 1, &mut proto), BabaiStatus::Precondition);
        assert!(proto.is_null());
        babai_lattice_free(lat);
    }
}
