//! Quadrature rules shared by the overlap and normalization modules.

use gauss_quad::legendre::GaussLegendre;

/// Composite Simpson rule on uniformly spaced samples.
///
/// An odd number of cells is closed with Simpson's 3/8 rule on the last three
/// cells, so the rule stays fourth order for every cell count above two.
pub fn simpson_uniform(values: &[f64], step: f64) -> f64 {
    let cells = values.len().saturating_sub(1);
    match cells {
        0 => 0.0,
        1 => 0.5 * step * (values[0] + values[1]),
        2 => step / 3.0 * (values[0] + 4.0 * values[1] + values[2]),
        _ => {
            let even = if cells % 2 == 0 { cells } else { cells - 3 };
            let mut total = 0.0;
            if even > 0 {
                let mut acc = values[0] + values[even];
                for (i, v) in values.iter().enumerate().take(even).skip(1) {
                    acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
                }
                total = step / 3.0 * acc;
            }
            if even != cells {
                let t = &values[even..];
                total += 3.0 * step / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
            }
            total
        }
    }
}

/// Simpson weights for `n + 1` uniformly spaced nodes, matching [`simpson_uniform`].
pub fn simpson_weights(cells: usize, step: f64) -> Vec<f64> {
    let mut w = vec![0.0; cells + 1];
    match cells {
        0 => {}
        1 => {
            w[0] = 0.5 * step;
            w[1] = 0.5 * step;
        }
        _ => {
            let even = if cells % 2 == 0 { cells } else { cells - 3 };
            for (i, wi) in w.iter_mut().enumerate().take(even + 1).filter(|_| even > 0) {
                *wi = step / 3.0
                    * if i == 0 || i == even {
                        1.0
                    } else if i % 2 == 1 {
                        4.0
                    } else {
                        2.0
                    };
            }
            if even != cells {
                let c = 3.0 * step / 8.0;
                w[even] += c;
                w[even + 1] += 3.0 * c;
                w[even + 2] += 3.0 * c;
                w[even + 3] += c;
            }
        }
    }
    w
}

/// Composite Simpson rule for a function on `[a, b]` with at least `min_cells`
/// cells (rounded up to an even count).
pub fn simpson_fn<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, min_cells: usize) -> f64 {
    if a == b {
        return 0.0;
    }
    let n = (min_cells.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * h;
        acc += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    h / 3.0 * acc
}

/// Nodes and weights of a composite Gauss-Legendre rule on `[a, b]`.
pub fn gauss_legendre_panels(a: f64, b: f64, panels: usize, degree: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(degree.max(2)).expect("degree >= 2");
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * degree);
    for p in 0..panels {
        let lo = a + p as f64 * width;
        let mid = lo + 0.5 * width;
        for &(t, w) in rule.as_node_weight_pairs() {
            out.push((mid + 0.5 * width * t, 0.5 * width * w));
        }
    }
    out
}
