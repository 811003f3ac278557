use proptest::prelude::*;
use softbody_core::integrators::{euler_step, feynman_step, midpoint_step, rk4_step, StateVector};

type Mat = [[f64; 4]; 4];

fn mul(a: &Mat, v: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

/// Taylor polynomial of exp(hA) applied to `s`, truncated after `order` terms.
fn taylor(a: &Mat, s: &[f64], h: f64, order: u32) -> Vec<f64> {
    let mut out = s.to_vec();
    let mut term = s.to_vec();
    for k in 1..=order {
        term = mul(a, &term).iter().map(|v| v * h / f64::from(k)).collect();
        for (o, t) in out.iter_mut().zip(&term) {
            *o += t;
        }
    }
    out
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

proptest! {
    #[test]
    fn linear_systems_match_their_stability_polynomials(
        rows in proptest::array::uniform4(proptest::array::uniform4(-1.0f64..1.0)),
        s in proptest::array::uniform4(-1.0f64..1.0),
        h in 0.001f64..0.2,
    ) {
        let f = |x: &[f64], d: &mut [f64]| d.copy_from_slice(&mul(&rows, x));
        let state = StateVector::scalar(s.to_vec());
        for (got, order) in [
            (euler_step(&state, f, h).unwrap(), 1),
            (midpoint_step(&state, f, h).unwrap(), 2),
            (rk4_step(&state, f, h).unwrap(), 4),
        ] {
            let want = taylor(&rows, &s, h, order);
            prop_assert!(close(got.as_slice(), &want, 1e-12), "order {order}: {:?} vs {want:?}", got.as_slice());
        }
    }

    #[test]
    fn leapfrog_is_exact_for_constant_acceleration(
        x0 in -5.0f64..5.0, v0 in -5.0f64..5.0, g in -20.0f64..20.0, steps in 1usize..200,
    ) {
        let h = 1.0 / 60.0;
        let f = |s: &[f64], d: &mut [f64]| {
            d[0] = s[1];
            d[1] = g;
        };
        let mut s = StateVector::scalar(vec![x0, v0]);
        let mut mem = None;
        for _ in 0..steps {
            let (next, m) = feynman_step(&s, f, h, mem.as_ref()).unwrap();
            s = next;
            mem = Some(m);
        }
        let t = h * steps as f64;
        prop_assert!((s.as_slice()[0] - (x0 + v0 * t + 0.5 * g * t * t)).abs() <= 1e-9);
        prop_assert!((s.as_slice()[1] - (v0 + g * t)).abs() <= 1e-9);
    }
}
