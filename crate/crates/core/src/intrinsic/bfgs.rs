//! Dense BFGS with central finite-difference gradients and Armijo
//! backtracking. Non-finite objective values count as `+∞`.

#[derive(Debug, Clone, Copy)]
pub struct BfgsOptions {
    pub max_iters: usize,
    pub fd_step: f64,
    pub grad_tol: f64,
}

#[derive(Debug, Clone)]
pub struct BfgsOutcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
}

const ARMIJO_C1: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

fn finite_or_inf(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::INFINITY
    }
}

fn gradient(f: &impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let xi = x[i];
            let step = h * xi.abs().max(1.0);
            xp[i] = xi + step;
            let fp = f(&xp);
            xp[i] = xi - step;
            let fm = f(&xp);
            xp[i] = xi;
            let g = (fp - fm) / (2.0 * step);
            if g.is_finite() {
                g
            } else {
                0.0
            }
        })
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn minimize(f: impl Fn(&[f64]) -> f64, x0: Vec<f64>, opts: BfgsOptions) -> BfgsOutcome {
    let n = x0.len();
    let mut x = x0;
    let mut fx = finite_or_inf(f(&x));
    if n == 0 || !fx.is_finite() {
        return BfgsOutcome { x, f: fx, iterations: 0 };
    }
    let mut g = gradient(&f, &x, opts.fd_step);
    // inverse Hessian, row-major
    let mut hinv = vec![0.0; n * n];
    let reset = |h: &mut Vec<f64>, scale: f64| {
        h.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n {
            h[i * n + i] = scale;
        }
    };
    reset(&mut hinv, 1.0);
    let mut iterations = 0;
    let mut first = true;

    while iterations < opts.max_iters {
        if g.iter().fold(0.0f64, |m, v| m.max(v.abs())) < opts.grad_tol {
            break;
        }
        let mut p: Vec<f64> = (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], &g)).collect();
        let mut slope = dot(&p, &g);
        if slope >= 0.0 {
            reset(&mut hinv, 1.0);
            p = g.iter().map(|v| -v).collect();
            slope = -dot(&g, &g);
        }
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let xn: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a + alpha * b).collect();
            let fnew = finite_or_inf(f(&xn));
            if fnew <= fx + ARMIJO_C1 * alpha * slope {
                accepted = Some((xn, fnew));
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        let Some((xn, fnew)) = accepted else {
            break;
        };
        let gn = gradient(&f, &xn, opts.fd_step);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let improvement = fx - fnew;
        x = xn;
        g = gn;
        fx = fnew;
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if first {
                reset(&mut hinv, sy / dot(&y, &y));
                first = false;
            }
            let rho = 1.0 / sy;
            let hy: Vec<f64> = (0..n).map(|i| dot(&hinv[i * n..(i + 1) * n], &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    hinv[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j])
                        + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
        }
        if improvement <= 1e-15 * fx.abs().max(1e-300) && s.iter().all(|v| v.abs() < 1e-14) {
            break;
        }
    }
    BfgsOutcome { x, f: fx, iterations }
}
