use babai_core::lattice::{parse_lattice_json, LatticeBasis};
use babai_core::protocol::{Protocol, SetOptions, SetPolicy, SourceSpec};
use proptest::prelude::*;

/// Nearest-plane coefficients by back substitution on the triangular form.
fn oracle(b: &LatticeBasis, x: &[f64]) -> Vec<i64> {
    let r = b.triangular();
    let mut u = vec![0i64; x.len()];
    for i in (0..x.len()).rev() {
        let y = x[i] - (i + 1..x.len()).map(|j| r[(i, j)] * u[j] as f64).sum::<f64>();
        u[i] = (y / r[(i, i)] + 0.5).floor() as i64;
    }
    u
}

fn basis(n: usize, entries: &[(i64, i64)]) -> LatticeBasis {
    let mut k = 0;
    let cols: Vec<String> = (0..n)
        .map(|l| {
            let col: Vec<String> = (0..n)
                .map(|m| {
                    if m > l {
                        return "0".into();
                    }
                    let (p, q) = entries[k];
                    k += 1;
                    if m == l { format!("\"{}/{q}\"", p.abs() % (2 * q) + q) } else { format!("\"{p}/{q}\"") }
                })
                .collect();
            format!("[{}]", col.join(","))
        })
        .collect();
    parse_lattice_json(&format!("{{\"n\": {n}, \"basis\": [{}]}}", cols.join(","))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn decode_equals_nearest_plane(
        n in 1usize..=4,
        entries in prop::collection::vec((-12i64..=12, 1i64..=5), 10),
        xs in prop::collection::vec(prop::collection::vec(-2.5f64..2.5, 4), 50),
        full in any::<bool>(),
    ) {
        let b = basis(n, &entries);
        let policy = if full { SetPolicy::Full } else { SetPolicy::Reachable(SetOptions::default()) };
        let p = Protocol::new(&b, &SourceSpec::Uniform { a: 5.0 }, policy).unwrap();
        for x in xs {
            let x = &x[..n];
            prop_assert_eq!(p.run(x).unwrap(), oracle(&b, x));
        }
    }

    #[test]
    fn messages_respect_the_alphabet(x in prop::collection::vec(-2.5f64..2.5, 3)) {
        let b = parse_lattice_json(r#"{"n": 3, "basis": [[1,0,0], ["-1/3","2/3",0], ["-1/3","-1/3","1/2"]]}"#).unwrap();
        let p = Protocol::new(&b, &SourceSpec::Uniform { a: 5.0 }, SetPolicy::Reachable(SetOptions::default())).unwrap();
        for msg in p.encode_all(&x) {
            let set = &p.sets()[msg.m - 1];
            prop_assert!(msg.s == 0 || set.contains(msg.s));
            prop_assert!(msg.s < p.rows()[msg.m - 1].q_m);
        }
    }
}
