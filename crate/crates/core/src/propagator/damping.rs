use crate::error::{Error, Result};
use crate::quadrature::integrate_with_breaks;
use crate::spectral::abs_pow;

/// `int_a^b |xi + r k|^beta dr` for `a <= b`.
///
/// Writing `xi + r k = (r - c) k + d` with `d ⟂ k`, the integrand is
/// `(|k|^2 (r - c)^2 + |d|^2)^{beta/2}`. Collinear pairs (always the case
/// for n = 1) use the antiderivative of `|u|^beta`; otherwise adaptive
/// quadrature split at `r = c`.
pub(crate) fn line_integral(k: &[f64], xi: &[f64], beta: f64, a: f64, b: f64, tol: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let kk: f64 = k.iter().map(|x| x * x).sum();
    let xx: f64 = xi.iter().map(|x| x * x).sum();
    if kk == 0.0 {
        return (b - a) * abs_pow(xx.sqrt(), beta);
    }
    let kx: f64 = k.iter().zip(xi).map(|(p, q)| p * q).sum();
    if beta == 2.0 {
        return xx * (b - a) + kx * (b * b - a * a) + kk * (b * b * b - a * a * a) / 3.0;
    }
    let c = -kx / kk;
    let d2 = perp_sq(k, xi, kk, kx, xx);
    if d2 <= 1e-28 * xx.max(f64::MIN_POSITIVE) {
        let prim = |u: f64| u * abs_pow(u.abs(), beta) / (beta + 1.0);
        return kk.sqrt().powf(beta) * (prim(b - c) - prim(a - c));
    }
    let h = 0.5 * beta;
    integrate_with_breaks(
        |r| (kk * (r - c) * (r - c) + d2).powf(h),
        a,
        b,
        &[c],
        tol,
    )
}

fn perp_sq(k: &[f64], xi: &[f64], kk: f64, kx: f64, xx: f64) -> f64 {
    match k.len() {
        1 => 0.0,
        2 => {
            let cross = xi[0] * k[1] - xi[1] * k[0];
            cross * cross / kk
        }
        _ => (xx - kx * kx / kk).max(0.0),
    }
}

/// `E(t, k, xi) = int_0^t |xi + s k|^beta ds`.
pub fn damping_integral(t: f64, k: &[f64], xi: &[f64], beta: f64, quad_tol: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time t={t} must be >= 0")));
    }
    check_pair(k, xi)?;
    Ok(line_integral(k, xi, beta, 0.0, t, quad_tol))
}

/// `int_0^t |xi - s k|^beta ds`, the damping seen in sheared coordinates.
pub fn sheared_damping(t: f64, k: &[f64], xi: &[f64], beta: f64, quad_tol: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time t={t} must be >= 0")));
    }
    check_pair(k, xi)?;
    Ok(line_integral(k, xi, beta, -t, 0.0, quad_tol))
}

/// `e_beta(t, k, xi) = exp(-E(t, k, xi))`.
pub fn e_beta(t: f64, k: &[f64], xi: &[f64], beta: f64, quad_tol: f64) -> Result<f64> {
    damping_integral(t, k, xi, beta, quad_tol).map(|e| (-e).exp())
}

fn check_pair(k: &[f64], xi: &[f64]) -> Result<()> {
    if k.len() != xi.len() || k.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "k and xi must share a nonzero dimension, got {} and {}",
            k.len(),
            xi.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    const TOL: f64 = 1e-12;

    #[test]
    fn heat_factor_when_k_vanishes() {
        for beta in [0.5, 1.0, 1.7, 2.0] {
            let e = damping_integral(1.0, &[0.0], &[1.0], beta, TOL).unwrap();
            assert!((e - 1.0).abs() < 1e-15);
            let f = e_beta(1.0, &[0.0], &[-1.0], beta, TOL).unwrap();
            assert!((f - (-1f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_quadrature_of_monomials() {
        let b2 = damping_integral(1.0, &[1.0], &[0.0], 2.0, TOL).unwrap();
        let q2 = integrate(|s| s * s, 0.0, 1.0, 1e-14);
        assert!((b2 - q2).abs() < 1e-14 && (b2 - 1.0 / 3.0).abs() < 1e-15);
        let b1 = damping_integral(1.0, &[1.0], &[0.0], 1.0, TOL).unwrap();
        let q1 = integrate(|s| s, 0.0, 1.0, 1e-14);
        assert!((b1 - q1).abs() < 1e-14);
    }

    #[test]
    fn antiderivative_agrees_with_quadrature_across_the_kink() {
        for beta in [0.3, 0.8, 1.0, 1.5] {
            for (k, xi, t) in [(2.0, -1.0, 1.0), (-3.0, 0.7, 0.9), (1.5, 4.0, 2.0)] {
                let e = damping_integral(t, &[k], &[xi], beta, TOL).unwrap();
                let q = integrate_with_breaks(
                    |s: f64| (xi + s * k).abs().powf(beta),
                    0.0,
                    t,
                    &[-xi / k],
                    1e-13,
                );
                assert!((e - q).abs() < 1e-11 * q, "beta={beta} k={k} xi={xi}: {e} vs {q}");
            }
        }
    }

    #[test]
    fn two_dimensional_pairs() {
        let k = [1.0, -2.0];
        let xi = [0.5, 3.0];
        for beta in [0.8, 1.3, 2.0] {
            let e = damping_integral(1.2, &k, &xi, beta, TOL).unwrap();
            let q = integrate(
                |s| ((xi[0] + s * k[0]).powi(2) + (xi[1] + s * k[1]).powi(2)).powf(beta / 2.0),
                0.0,
                1.2,
                1e-13,
            );
            assert!((e - q).abs() < 1e-10 * q, "{beta}: {e} vs {q}");
        }
        // collinear 2-d pair reduces to the 1-d antiderivative
        let e2 = damping_integral(1.0, &[1.0, 2.0], &[-0.5, -1.0], 0.7, TOL).unwrap();
        let n = 5f64.sqrt();
        let e1 = damping_integral(1.0, &[n], &[-0.5 * n], 0.7, TOL).unwrap();
        assert!((e2 - e1).abs() < 1e-13);
    }

    #[test]
    fn nondecreasing_and_rejects_negative_time() {
        let mut last = 0.0;
        for j in 0..50 {
            let e = damping_integral(0.05 * j as f64, &[2.0], &[-1.0], 0.9, TOL).unwrap();
            assert!(e >= last);
            last = e;
        }
        assert!(damping_integral(-0.1, &[1.0], &[1.0], 1.0, TOL).is_err());
    }

    #[test]
    fn sheared_damping_flips_k() {
        let a = sheared_damping(0.8, &[1.5], &[2.0], 1.2, TOL).unwrap();
        let b = damping_integral(0.8, &[-1.5], &[2.0], 1.2, TOL).unwrap();
        assert!((a - b).abs() < 1e-14);
    }
}
