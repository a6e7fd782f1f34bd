//! Gauss-Legendre rules and the endpoint-graded composite integrator used by
//! every kernel integral in the crate.
//!
//! Integrands receive `(lambda, d_lo, d_hi)` where `d_lo = lambda - a` and
//! `d_hi = b - lambda` are the distances to the kernel endpoints. Inside a
//! graded zone those distances are produced directly by the node generator,
//! so factors such as `(lambda - a)^{1/2}` keep full relative precision even
//! when `lambda` is within round-off of `a`.

use std::f64::consts::PI;
use std::sync::OnceLock;

pub const MAX_ORDER: usize = 64;

/// Nodes and weights of a Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    fn compute(order: usize) -> Self {
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Integrate `f` over [x, y].
    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, x: f64, y: f64, mut f: F) -> f64 {
        let half = 0.5 * (y - x);
        let mid = 0.5 * (x + y);
        let mut s = 0.0;
        for (t, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(mid + half * t);
        }
        s * half
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Cached rule of the given order (2 ..= MAX_ORDER).
pub fn gauss_legendre(order: usize) -> &'static GaussRule {
    static RULES: OnceLock<Vec<GaussRule>> = OnceLock::new();
    let rules = RULES.get_or_init(|| (0..=MAX_ORDER).map(|n| GaussRule::compute(n.max(1))).collect());
    &rules[order.clamp(1, MAX_ORDER)]
}

/// Geometric grading toward one endpoint of a panel.
#[derive(Debug, Clone, Copy)]
pub struct Grading {
    /// Number of geometric sub-cells in the mapped variable before the innermost one.
    pub levels: usize,
    /// Ratio between consecutive sub-cell widths, in (0, 1).
    pub ratio: f64,
}

/// One panel `[x, y]` of a kernel integral over `[a, b]`.
///
/// `lower` treats `x` (which must equal `a` when used) as a square-root
/// endpoint, `upper` does the same for `y` (which must equal `b`). A graded
/// end is integrated after the substitution `lambda = end + width*u^2`, which
/// turns half-integer powers of the endpoint distance into smooth integrands;
/// the `u`-cells are then refined geometrically toward `u = 0` to resolve any
/// remaining scale near the endpoint.
#[allow(clippy::too_many_arguments)]
pub fn graded_panel<F>(
    rule: &GaussRule,
    x: f64,
    y: f64,
    a: f64,
    b: f64,
    lower: Option<Grading>,
    upper: Option<Grading>,
    f: &mut F,
) -> f64
where
    F: FnMut(f64, f64, f64) -> f64,
{
    if y <= x {
        return 0.0;
    }
    match (lower, upper) {
        (None, None) => rule.integrate(x, y, |l| f(l, l - a, b - l)),
        (Some(g), None) => graded_from_lower(rule, x, y, a, b, g, f),
        (None, Some(g)) => graded_from_upper(rule, x, y, a, b, g, f),
        (Some(gl), Some(gu)) => {
            let m = 0.5 * (x + y);
            graded_from_lower(rule, x, m, a, b, gl, f) + graded_from_upper(rule, m, y, a, b, gu, f)
        }
    }
}

/// Cells of [0, 1] refined toward 0: [q, 1], [q², q], ..., [0, q^levels].
fn mapped_cells(g: Grading) -> impl Iterator<Item = (f64, f64)> {
    let mut hi = 1.0;
    (0..=g.levels).map(move |i| {
        let lo = if i == g.levels { 0.0 } else { hi * g.ratio };
        let cell = (lo, hi);
        hi = lo;
        cell
    })
}

fn graded_from_lower<F>(rule: &GaussRule, x: f64, y: f64, a: f64, b: f64, g: Grading, f: &mut F) -> f64
where
    F: FnMut(f64, f64, f64) -> f64,
{
    let w = y - x;
    let base = x - a;
    let mut sum = 0.0;
    for (u0, u1) in mapped_cells(g) {
        sum += rule.integrate(u0, u1, |u| {
            let off = w * u * u;
            let l = x + off;
            f(l, base + off, b - l) * 2.0 * w * u
        });
    }
    sum
}

fn graded_from_upper<F>(rule: &GaussRule, x: f64, y: f64, a: f64, b: f64, g: Grading, f: &mut F) -> f64
where
    F: FnMut(f64, f64, f64) -> f64,
{
    let w = y - x;
    let base = b - y;
    let mut sum = 0.0;
    for (u0, u1) in mapped_cells(g) {
        sum += rule.integrate(u0, u1, |u| {
            let off = w * u * u;
            let l = y - off;
            f(l, l - a, base + off) * 2.0 * w * u
        });
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rules_integrate_polynomials_exactly() {
        for order in [2usize, 3, 5, 8, 16, 33] {
            let rule = gauss_legendre(order);
            let wsum: f64 = rule.weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "order {order}: weights sum {wsum}");
            let deg = 2 * order - 1;
            let got = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((got - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "order {order}");
        }
    }

    #[test]
    fn graded_panel_resolves_square_root_endpoints() {
        // ∫_0^1 sqrt(x (1 - x)) dx = π/8
        let rule = gauss_legendre(16);
        let g = Grading { levels: 0, ratio: 0.2 };
        let got = graded_panel(rule, 0.0, 1.0, 0.0, 1.0, Some(g), Some(g), &mut |_, dl, du| (dl * du).sqrt());
        assert!((got - PI / 8.0).abs() < 1e-13, "{got}");
    }

    #[test]
    fn graded_panel_keeps_precision_near_large_endpoints() {
        // ∫_a^{a+1e-3} sqrt(l - a) dl with a = 1e3: plain differences would lose digits
        let a = 1.0e3;
        let rule = gauss_legendre(6);
        let g = Grading { levels: 0, ratio: 0.25 };
        let y = a + 1e-3;
        let got = graded_panel(rule, a, y, a, a + 1.0, Some(g), None, &mut |_, dl, _| dl.sqrt());
        let exact = 2.0 / 3.0 * (y - a).powf(1.5);
        assert!((got / exact - 1.0).abs() < 1e-12, "{got} vs {exact}");
    }
}
