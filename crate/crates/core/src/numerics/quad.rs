//! Globally adaptive Gauss–Kronrod (7/15) quadrature, scalar or vector valued.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use super::bessel::{j012, zeros_below};
use crate::error::{Error, Result};

/// Tolerances for adaptive quadrature.
///
/// The absolute target is `max(abs_tol, 1e-14·∫|f|)`, so integrals that cancel to
/// roundoff still terminate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    pub oscillation_splitting: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_subdivisions: 2000,
            oscillation_splitting: true,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize, oscillation_splitting: bool) -> Result<Self> {
        let s = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
            oscillation_splitting,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-2) {
            return Err(Error::invalid("rel_tol", format!("must lie in (0, 1e-2], got {}", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::invalid("abs_tol", "must be non-negative"));
        }
        if self.max_subdivisions < 8 {
            return Err(Error::invalid("max_subdivisions", "must be at least 8"));
        }
        Ok(())
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }
}

/// Values that can be integrated: a real vector space with a max-norm.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, o: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn norm(self) -> f64;

    fn sub(self, o: Self) -> Self {
        self.add(o.scale(-1.0))
    }
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.re.abs().max(self.im.abs())
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, o: Self) -> Self {
        for (a, b) in self.iter_mut().zip(o) {
            *a += b;
        }
        self
    }
    fn scale(self, s: f64) -> Self {
        self.map(|v| v * s)
    }
    fn norm(self) -> f64 {
        self.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Integral estimate with its absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<V> {
    pub value: V,
    pub error: f64,
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

struct Segment<V> {
    a: f64,
    b: f64,
    value: V,
    error: f64,
    l1: f64,
}

fn gk15<V: QuadValue, F: FnMut(f64) -> V>(f: &mut F, a: f64, b: f64) -> Segment<V> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc.scale(WGK[7]);
    let mut gauss = fc.scale(WG[3]);
    let mut l1 = fc.norm() * WGK[7];
    let mut vals = [(V::zero(), V::zero()); 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let (f1, f2) = (f(c - dx), f(c + dx));
        vals[j] = (f1, f2);
        let s = f1.add(f2);
        kron = kron.add(s.scale(WGK[j]));
        l1 += WGK[j] * (f1.norm() + f2.norm());
        if j % 2 == 1 {
            gauss = gauss.add(s.scale(WG[j / 2]));
        }
    }
    let mean = kron.scale(0.5);
    let mut asc = WGK[7] * fc.sub(mean).norm();
    for j in 0..7 {
        asc += WGK[j] * (vals[j].0.sub(mean).norm() + vals[j].1.sub(mean).norm());
    }
    let habs = h.abs();
    let mut err = kron.sub(gauss).norm() * habs;
    let asc = asc * habs;
    let l1 = l1 * habs;
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if l1 > f64::MIN_POSITIVE / (20.0 * f64::EPSILON) {
        err = err.max(20.0 * f64::EPSILON * l1);
    }
    Segment {
        a,
        b,
        value: kron.scale(h),
        error: err,
        l1,
    }
}

struct Keyed(f64, usize);

impl PartialEq for Keyed {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Keyed {}
impl PartialOrd for Keyed {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Keyed {
    fn cmp(&self, o: &Self) -> Ordering {
        self.0.total_cmp(&o.0).then(o.1.cmp(&self.1))
    }
}

/// Adaptive integration over the partition `points` (ascending, at least two entries).
pub fn integrate_partitioned<V: QuadValue, F: FnMut(f64) -> V>(
    mut f: F,
    points: &[f64],
    spec: &QuadratureSpec,
) -> Result<Estimate<V>> {
    spec.validate()?;
    if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
        return Err(Error::Domain("quadrature needs at least two finite bounds".into()));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::Domain("quadrature breakpoints must be ascending".into()));
    }
    if points[0] >= points[points.len() - 1] {
        return Err(Error::Domain(format!(
            "empty interval [{}, {}]",
            points[0],
            points[points.len() - 1]
        )));
    }
    let mut segs: Vec<Segment<V>> = Vec::with_capacity(points.len() + 16);
    let mut heap = BinaryHeap::new();
    for w in points.windows(2) {
        if w[1] > w[0] {
            let s = gk15(&mut f, w[0], w[1]);
            heap.push(Keyed(s.error, segs.len()));
            segs.push(s);
        }
    }
    let totals = |segs: &[Segment<V>]| {
        let mut v = V::zero();
        let (mut e, mut l) = (0.0, 0.0);
        for s in segs {
            v = v.add(s.value);
            e += s.error;
            l += s.l1;
        }
        (v, e, l)
    };
    let (mut value, mut error, mut l1) = totals(&segs);
    let mut splits = 0usize;
    loop {
        let target = spec.abs_tol.max(1e-14 * l1).max(spec.rel_tol * value.norm());
        if error <= target {
            let (v, e, _) = totals(&segs);
            return Ok(Estimate { value: v, error: e });
        }
        let exhausted = splits >= spec.max_subdivisions;
        let worst = heap.pop().map(|k| k.1);
        let idx = match worst {
            Some(i) if !exhausted => i,
            _ => {
                return Err(Error::Convergence {
                    context: format!("{} subdivisions", splits),
                    best: value.norm(),
                    error,
                })
            }
        };
        let (a, b) = (segs[idx].a, segs[idx].b);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) || (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            return Err(Error::Convergence {
                context: format!("interval [{a:e}, {b:e}] cannot be bisected further"),
                best: value.norm(),
                error,
            });
        }
        let left = gk15(&mut f, a, m);
        let right = gk15(&mut f, m, b);
        let old = std::mem::replace(&mut segs[idx], left);
        value = value.sub(old.value).add(segs[idx].value).add(right.value);
        error += segs[idx].error + right.error - old.error;
        l1 += segs[idx].l1 + right.l1 - old.l1;
        heap.push(Keyed(segs[idx].error, idx));
        heap.push(Keyed(right.error, segs.len()));
        segs.push(right);
        splits += 1;
        if splits % 64 == 0 {
            let t = totals(&segs);
            value = t.0;
            error = t.1;
            l1 = t.2;
        }
    }
}

/// ∫_a^b f(x) dx on a finite interval.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Estimate<f64>> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration bounds must be finite".into()));
    }
    if !(a < b) {
        return Err(Error::Domain(format!("need a < b, got [{a}, {b}]")));
    }
    integrate_partitioned(f, &[a, b], spec)
}

/// Partition of [a, b] at `extra` breakpoints and, when splitting is requested and
/// r·b > 10, at the zeros of J_n(q r).
pub fn hankel_partition(n: u32, r: f64, a: f64, b: f64, extra: &[f64], splitting: bool) -> Vec<f64> {
    let mut pts = vec![a, b];
    pts.extend(extra.iter().copied().filter(|&x| x > a && x < b));
    if splitting && r * b > 10.0 {
        pts.extend(zeros_below(n, r, b).into_iter().filter(|&x| x > a));
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * y.abs().max(1e-300));
    pts
}

/// ∫_a^b g(q) J_n(q r) e^{−q·damping} dq with optional interior breakpoints of g.
pub fn integrate_hankel_between<F: FnMut(f64) -> f64>(
    mut g: F,
    n: u32,
    r: f64,
    damping: f64,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    if n > 2 {
        return Err(Error::Domain(format!("Bessel order {n} not supported")));
    }
    if !(r >= 0.0) || !(damping >= 0.0) || !(0.0 <= a && a < b && b.is_finite()) {
        return Err(Error::Domain(format!(
            "hankel integral needs r >= 0, damping >= 0, 0 <= a < b < inf; got r={r}, damping={damping}, [{a}, {b}]"
        )));
    }
    let pts = hankel_partition(n, r, a, b, breaks, spec.oscillation_splitting);
    let est = integrate_partitioned(
        |q| {
            let damp = if damping > 0.0 { (-q * damping).exp() } else { 1.0 };
            g(q) * j012(q * r)[n as usize] * damp
        },
        &pts,
        spec,
    )
    .map_err(|e| match e {
        Error::Convergence { context, best, error } => Error::Convergence {
            context: format!("hankel n={n} r={r:e} over {} partial intervals: {context}", pts.len() - 1),
            best,
            error,
        },
        other => other,
    })?;
    Ok(est.value)
}

/// ∫₀^{q_max} g(q) J_n(q r) e^{−q·damping} dq.
pub fn integrate_hankel_damped<F: FnMut(f64) -> f64>(
    g: F,
    n: u32,
    r: f64,
    damping: f64,
    q_max: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    integrate_hankel_between(g, n, r, damping, 0.0, q_max, &[], spec)
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre rule: each interval between consecutive breakpoints is cut into
/// equal panels no wider than `h_max`, each carrying `order` nodes.
pub fn composite_gauss_legendre(breaks: &[f64], h_max: f64, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(order);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for win in breaks.windows(2) {
        let (a, b) = (win[0], win[1]);
        if !(b > a) {
            continue;
        }
        let panels = ((b - a) / h_max).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(mid + 0.5 * h * x);
                weights.push(0.5 * h * w);
            }
        }
    }
    (nodes, weights)
}
