use infospace::lattice::{dual_tensor, field_tensor, four_divergence, Lattice4, TensorField, Variance};

fn potential(lat: Lattice4) -> TensorField {
    TensorField::from_fn(lat, vec![Variance::Contra], |x, i| {
        let (t, a, b, c) = (x[0], x[1], x[2], x[3]);
        match i[0] {
            0 => (a * b).sin() + c * c * t,
            1 => (t + c).cos() * b,
            2 => (0.5 * t * a).exp() - c,
            _ => (a - b).sin() * t,
        }
    })
}

fn residual(n: usize) -> (f64, f64, f64) {
    let lat = Lattice4::spanning(n, -1.0, 1.0).unwrap();
    let g = field_tensor(&potential(lat)).unwrap();
    let res = four_divergence(&dual_tensor(&g).unwrap(), 0, 0.5).unwrap();
    (lat.spacing()[0], res.max_abs(), g.max_abs())
}

#[test]
fn dual_divergence_stays_at_roundoff() {
    for n in [8, 16] {
        let (h, r, g) = residual(n);
        assert!(r <= 1e-13 * g.max(1.0) / h, "n = {n}: {r:e}");
    }
}

/// Requires the residual to fall at second order under refinement. The
/// discrete curl makes the identity exact, so the residual is roundoff
/// and grows as `1/h`; this test is expected to fail.
#[test]
#[ignore = "unattainable: discrete dual divergence is exact up to roundoff"]
fn dual_divergence_second_order() {
    let levels: Vec<_> = [8, 16, 32].into_iter().map(residual).collect();
    for w in levels.windows(2) {
        let p = (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln();
        assert!(p >= 1.9, "observed order {p}");
    }
}
