use crate::error::{Error, Result};

/// Solves the cyclic tridiagonal system
/// `lo[i] x[i-1] + diag[i] x[i] + up[i] x[i+1] = rhs[i]` (indices mod m)
/// by the Sherman-Morrison correction of the Thomas algorithm.
pub fn solve_cyclic_tridiagonal(lo: &[f64], diag: &[f64], up: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    if m < 3 || lo.len() != m || up.len() != m || rhs.len() != m {
        return Err(Error::InvalidParameter(format!("cyclic system of size {m} needs m >= 3")));
    }
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[m - 1] -= up[m - 1] * lo[0] / gamma;
    let x = thomas(&lo[1..], &d, &up[..m - 1], rhs)?;
    let mut u = vec![0.0; m];
    u[0] = gamma;
    u[m - 1] = up[m - 1];
    let z = thomas(&lo[1..], &d, &up[..m - 1], &u)?;
    let fact = (x[0] + lo[0] * x[m - 1] / gamma) / (1.0 + z[0] + lo[0] * z[m - 1] / gamma);
    Ok(x.iter().zip(&z).map(|(a, b)| a - fact * b).collect())
}

/// Plain tridiagonal solve with sub-diagonal `sub` (length m-1) and
/// super-diagonal `sup` (length m-1).
fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut x = vec![0.0; m];
    let mut piv = diag[0];
    if piv == 0.0 {
        return Err(Error::LinearSolve { residual: f64::INFINITY });
    }
    c[0] = if m > 1 { sup[0] / piv } else { 0.0 };
    x[0] = rhs[0] / piv;
    for i in 1..m {
        piv = diag[i] - sub[i - 1] * c[i - 1];
        if piv == 0.0 || !piv.is_finite() {
            return Err(Error::LinearSolve { residual: f64::INFINITY });
        }
        if i < m - 1 {
            c[i] = sup[i] / piv;
        }
        x[i] = (rhs[i] - sub[i - 1] * x[i - 1]) / piv;
    }
    for i in (0..m - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Jacobi-preconditioned BiCGSTAB for `A x = b`; `x` holds the initial guess.
/// Returns the number of iterations used.
pub fn bicgstab<A: Fn(&[f64], &mut [f64])>(
    apply: A,
    diag: &[f64],
    b: &[f64],
    x: &mut [f64],
    rel_tol: f64,
    max_iter: usize,
) -> Result<usize> {
    let m = b.len();
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(a, b)| a * b).sum::<f64>();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        x.iter_mut().for_each(|z| *z = 0.0);
        return Ok(0);
    }
    let mut r = vec![0.0; m];
    apply(x, &mut r);
    for i in 0..m {
        r[i] = b[i] - r[i];
    }
    let r0 = r.clone();
    let (mut rho, mut alpha, mut omega) = (1.0, 1.0, 1.0);
    let mut v = vec![0.0; m];
    let mut p = vec![0.0; m];
    let mut y = vec![0.0; m];
    let mut s = vec![0.0; m];
    let mut z = vec![0.0; m];
    let mut t = vec![0.0; m];
    for it in 0..max_iter {
        let res = dot(&r, &r).sqrt();
        if res <= rel_tol * bnorm {
            return Ok(it);
        }
        let rho_new = dot(&r0, &r);
        if rho_new == 0.0 || omega == 0.0 {
            return Err(Error::LinearSolve { residual: res / bnorm });
        }
        let beta = rho_new / rho * alpha / omega;
        rho = rho_new;
        for i in 0..m {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
            y[i] = p[i] / diag[i];
        }
        apply(&y, &mut v);
        alpha = rho / dot(&r0, &v);
        for i in 0..m {
            s[i] = r[i] - alpha * v[i];
        }
        if dot(&s, &s).sqrt() <= rel_tol * bnorm {
            for i in 0..m {
                x[i] += alpha * y[i];
            }
            return Ok(it + 1);
        }
        for i in 0..m {
            z[i] = s[i] / diag[i];
        }
        apply(&z, &mut t);
        omega = dot(&t, &s) / dot(&t, &t);
        for i in 0..m {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
    }
    let res = dot(&r, &r).sqrt() / bnorm;
    if res <= rel_tol {
        Ok(max_iter)
    } else {
        Err(Error::LinearSolve { residual: res })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_system_residual() {
        let m = 9;
        let lo: Vec<f64> = (0..m).map(|i| -1.0 - 0.1 * i as f64).collect();
        let up: Vec<f64> = (0..m).map(|i| -0.5 + 0.05 * i as f64).collect();
        let diag: Vec<f64> = (0..m).map(|i| 4.0 + (i % 3) as f64).collect();
        let rhs: Vec<f64> = (0..m).map(|i| (i as f64).sin()).collect();
        let x = solve_cyclic_tridiagonal(&lo, &diag, &up, &rhs).unwrap();
        for i in 0..m {
            let ax = lo[i] * x[(i + m - 1) % m] + diag[i] * x[i] + up[i] * x[(i + 1) % m];
            assert!((ax - rhs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn bicgstab_solves_cyclic_system() {
        let m = 20;
        let apply = |x: &[f64], y: &mut [f64]| {
            for i in 0..m {
                y[i] = 3.0 * x[i] - x[(i + 1) % m] - 0.5 * x[(i + m - 1) % m];
            }
        };
        let b: Vec<f64> = (0..m).map(|i| (i as f64 * 0.3).cos()).collect();
        let mut x = vec![0.0; m];
        bicgstab(apply, &vec![3.0; m], &b, &mut x, 1e-13, 200).unwrap();
        let mut ax = vec![0.0; m];
        apply(&x, &mut ax);
        assert!(ax.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-11));
    }
}
