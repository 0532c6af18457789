//! Critical leaves of the horizontal foliation of φ.
//!
//! A leaf solves dz/dw = 1/√φ(z) with w real and increasing, so ∫√φ dz stays real
//! along it. Leaves start near a simple zero along one of its three critical
//! directions and end in a puncture, near another zero, or are abandoned.

use crate::error::{Error, Result};
use crate::quad_diff::{nearest_root, QuadraticDifferential};
use crate::scalar::{lit, to_c64, Real};
use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Pole(usize),
    Saddle(usize),
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub source_zero: usize,
    pub ray_index: usize,
    pub points: Vec<Complex<T>>,
    /// Integration parameter at each point; equals ∫√φ dz from the launch point.
    pub w_values: Vec<T>,
    pub endpoint: Endpoint,
    /// Branch of √φ at the launch point.
    pub launch_value: Complex<T>,
    /// arg(z − p) at the pole-ball crossing, or arg(1/z) for the puncture at ∞.
    pub approach_angle: Option<T>,
}

impl<T: Real> Trajectory<T> {
    pub fn terminal(&self) -> Complex<T> {
        *self.points.last().expect("trajectory has a launch point")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceConfig<T> {
    /// Launch distance as a fraction of the distance from the zero to the nearest other singular point.
    pub initial_offset: T,
    pub max_arclength_w: T,
    /// Absolute radius of the capture ball around each finite puncture.
    pub pole_radius: T,
    /// Leaves with |z| beyond this are captured by the puncture at ∞.
    pub far_radius: T,
    pub zero_radius: T,
    pub initial_step: T,
    pub max_step: T,
    pub rtol: T,
    pub atol: T,
    pub horizontal_tol: T,
    pub max_steps: usize,
}

impl<T: Real> TraceConfig<T> {
    /// Defaults scaled to the geometry of φ.
    pub fn for_differential(phi: &QuadraticDifferential<T>, zeros: &[Complex<T>]) -> Self {
        let sing = phi.singular_points(zeros);
        let mut sep = T::infinity();
        for i in 0..sing.len() {
            for j in 0..i {
                sep = sep.min((sing[i] - sing[j]).norm());
            }
        }
        let pole_sep = phi
            .finite_punctures()
            .map(|(_, p)| sing.iter().filter(|&&q| q != p).fold(T::infinity(), |m, &q| m.min((q - p).norm())))
            .fold(T::infinity(), |m, d| m.min(d));
        let extent = sing.iter().fold(T::one(), |m, z| m.max(z.norm()));
        let lam = phi.marked.levelt.iter().fold(T::zero(), |m, l| m.max(l.norm()));
        let far = extent * lit(50.0);
        let pole_radius = pole_sep * lit(0.02);
        let diameter_w = lam * (far / pole_radius).ln().max(T::one());
        TraceConfig {
            initial_offset: lit(1e-3),
            max_arclength_w: diameter_w * lit(1e3),
            pole_radius,
            far_radius: far,
            zero_radius: sep * lit(1e-4),
            initial_step: lit(1e-3),
            max_step: lam.max(T::one()),
            rtol: lit(1e-11),
            atol: lit(1e-15),
            horizontal_tol: lit(1e-6),
            max_steps: 200_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = [
            self.initial_offset,
            self.pole_radius,
            self.far_radius,
            self.zero_radius,
            self.initial_step,
            self.max_step,
            self.rtol,
            self.horizontal_tol,
        ];
        if pos.iter().any(|&x| !(x > T::zero())) || self.max_arclength_w < T::zero() || self.atol < T::zero() {
            return Err(Error::NonGenericDifferential("trace configuration must be positive".into()));
        }
        Ok(())
    }
}

/// θ_k = (2πk − arg c)/3 for φ = c(z − b)(1 + O(z − b)) dz².
pub fn critical_directions<T: Real>(phi: &QuadraticDifferential<T>, b: Complex<T>) -> Result<[T; 3]> {
    let c = phi.linear_coefficient(b);
    if c.norm() <= T::epsilon() * lit(1e3) * phi.numerator.iter().fold(T::zero(), |m, x| m.max(x.norm())) {
        return Err(Error::NonGenericDifferential("zero is not simple".into()));
    }
    Ok(directions_from_coefficient(c))
}

/// The three horizontal directions at a zero with linear coefficient c.
pub fn directions_from_coefficient<T: Real>(c: Complex<T>) -> [T; 3] {
    let three = lit::<T>(3.0);
    let arg = c.arg();
    [0.0, 1.0, 2.0].map(|k| (T::TAU() * lit(k) - arg) / three)
}

// Dormand–Prince 5(4).
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Step<T> {
    z: Complex<T>,
    s: Complex<T>,
    err: Complex<T>,
}

/// Tracing context: φ with its zeros and the configuration.
pub struct Tracer<'a, T> {
    pub phi: &'a QuadraticDifferential<T>,
    pub zeros: Vec<Complex<T>>,
    pub cfg: TraceConfig<T>,
    sing: Vec<Complex<T>>,
    poles: Vec<(usize, Complex<T>)>,
    infinity: Option<usize>,
}

impl<'a, T: Real> Tracer<'a, T> {
    pub fn new(phi: &'a QuadraticDifferential<T>, zeros: Vec<Complex<T>>, cfg: TraceConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let sing = phi.singular_points(&zeros);
        let poles = phi.finite_punctures().collect();
        let infinity = phi.marked.infinity_index();
        Ok(Tracer { phi, zeros, cfg, sing, poles, infinity })
    }

    fn nearest_singular(&self, z: Complex<T>) -> T {
        self.sing.iter().fold(T::infinity(), |m, &p| m.min((z - p).norm()))
    }

    /// One RK step from (z, s) with branch reference s. None if the branch choice is unsafe.
    fn rk_step(&self, z: Complex<T>, s: Complex<T>, h: T) -> Option<Step<T>> {
        let mut k = [Complex::<T>::zero(); 7];
        for i in 0..7 {
            let mut zi = z;
            for (j, kj) in k.iter().enumerate().take(i) {
                zi = zi + *kj * lit::<T>(A[i][j]) * h;
            }
            let (si, cos) = nearest_root(self.phi.eval(zi), s);
            if i > 0 && cos < lit(0.5) {
                return None;
            }
            k[i] = if i == 0 { s.inv() } else { si.inv() };
        }
        let mut z5 = z;
        let mut err = Complex::zero();
        for i in 0..7 {
            z5 = z5 + k[i] * lit::<T>(B5[i]) * h;
            err = err + k[i] * lit::<T>(E[i]) * h;
        }
        let (s5, cos) = nearest_root(self.phi.eval(z5), s);
        if cos < lit(0.5) {
            return None;
        }
        Some(Step { z: z5, s: s5, err })
    }

    /// Launch point and branch for ray k of zero b.
    pub fn launch(&self, b: usize, k: usize) -> Result<BranchLaunch<T>> {
        let zb = self.zeros[b];
        let theta = critical_directions(self.phi, zb)?[k];
        let others = self.sing.iter().filter(|&&p| p != zb).fold(T::infinity(), |m, &p| m.min((p - zb).norm()));
        let eps = self.cfg.initial_offset * others;
        let dir = Complex::from_polar(T::one(), theta);
        let z0 = zb + dir * eps;
        let s = self.phi.eval(z0).sqrt();
        // Velocity 1/s must point along e^{iθ}.
        let s = if (dir * s).re >= T::zero() { s } else { -s };
        Ok(BranchLaunch { z: z0, s, offset: eps })
    }

    fn capture(&self, z: Complex<T>) -> Option<Endpoint> {
        for &(i, p) in &self.poles {
            if (z - p).norm() < self.cfg.pole_radius {
                return Some(Endpoint::Pole(i));
            }
        }
        if let Some(i) = self.infinity {
            if z.norm() > self.cfg.far_radius {
                return Some(Endpoint::Pole(i));
            }
        }
        None
    }

    fn capture_gap(&self, z: Complex<T>, e: Endpoint) -> T {
        match e {
            Endpoint::Pole(i) if Some(i) == self.infinity => self.cfg.far_radius - z.norm(),
            Endpoint::Pole(i) => {
                let p = self.poles.iter().find(|q| q.0 == i).expect("finite pole").1;
                (z - p).norm() - self.cfg.pole_radius
            }
            _ => T::zero(),
        }
    }

    /// Integrates the leaf from zero `b` along critical direction `k`.
    pub fn trace_leaf(&self, b: usize, k: usize) -> Result<Trajectory<T>> {
        let start = self.launch(b, k)?;
        let cfg = &self.cfg;
        let mut z = start.z;
        let mut s = start.s;
        let mut w = T::zero();
        let mut h = cfg.initial_step.min(start.offset * lit(0.1) * s.norm());
        let mut points = vec![z];
        let mut w_values = vec![w];
        let mut escaped = false;
        let zb = self.zeros[b];
        let done = |endpoint, points, w_values, angle| Trajectory {
            source_zero: b,
            ray_index: k,
            points,
            w_values,
            endpoint,
            launch_value: start.s,
            approach_angle: angle,
        };
        if cfg.max_arclength_w <= T::zero() {
            return Ok(done(Endpoint::Unresolved, points, w_values, None));
        }
        let mut steps = 0usize;
        loop {
            steps += 1;
            if steps > cfg.max_steps {
                return Ok(done(Endpoint::Unresolved, points, w_values, None));
            }
            if h < T::epsilon() * lit(16.0) * w.abs().max(T::one()) {
                return Err(Error::StepUnderflow { w: w.to_f64().unwrap_or(f64::NAN) });
            }
            let d = self.nearest_singular(z);
            let Some(st) = self.rk_step(z, s, h) else {
                h = h * lit(0.5);
                continue;
            };
            if (st.z - z).norm() > d * lit(0.5) {
                h = h * lit(0.5);
                continue;
            }
            let scale = cfg.atol + cfg.rtol * d;
            let err = st.err.norm() / scale;
            if err > T::one() {
                h = h * (lit::<T>(0.9) * err.powf(lit(-0.2))).min(lit(0.5)).max(lit(0.1));
                continue;
            }
            // Accepted.
            let z_prev = z;
            let s_prev = s;
            let h_taken = h;
            let grow = if err > T::zero() { lit::<T>(0.9) * err.powf(lit(-0.2)) } else { lit(5.0) };
            h = (h * grow.min(lit(5.0)).max(lit(0.2))).min(cfg.max_step);
            if let Some(e) = self.capture(st.z) {
                let (ze, we) = self.locate(z_prev, s_prev, w, h_taken, e);
                points.push(ze);
                w_values.push(we);
                let angle = match e {
                    Endpoint::Pole(i) if Some(i) == self.infinity => ze.inv().arg(),
                    Endpoint::Pole(i) => (ze - self.poles.iter().find(|q| q.0 == i).expect("pole").1).arg(),
                    _ => T::zero(),
                };
                return Ok(done(e, points, w_values, Some(angle)));
            }
            z = st.z;
            s = st.s;
            w = w + h_taken;
            points.push(z);
            w_values.push(w);
            if !escaped && (z - zb).norm() > start.offset * lit(10.0) {
                escaped = true;
            }
            for (j, &zj) in self.zeros.iter().enumerate() {
                if (j != b || escaped) && (z - zj).norm() < cfg.zero_radius {
                    return Ok(done(Endpoint::Saddle(j), points, w_values, None));
                }
            }
            if w > cfg.max_arclength_w {
                return Ok(done(Endpoint::Unresolved, points, w_values, None));
            }
        }
    }

    /// Bisects the step size so the step ends on the capture sphere.
    fn locate(&self, z: Complex<T>, s: Complex<T>, w: T, h: T, e: Endpoint) -> (Complex<T>, T) {
        let mut lo = T::zero();
        let mut hi = h;
        let mut best = self.rk_step(z, s, h).map(|st| st.z).unwrap_or(z);
        for _ in 0..200 {
            let mid = (lo + hi) * lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            match self.rk_step(z, s, mid) {
                Some(st) if self.capture_gap(st.z, e) < T::zero() => {
                    hi = mid;
                    best = st.z;
                }
                Some(_) => lo = mid,
                None => hi = mid,
            }
        }
        (best, w + hi)
    }

    /// All 3·|zeros| critical leaves, ordered by (zero, ray).
    pub fn trace_all(&self) -> Result<Vec<Trajectory<T>>> {
        let jobs: Vec<(usize, usize)> = (0..self.zeros.len()).flat_map(|b| (0..3).map(move |k| (b, k))).collect();
        jobs.par_iter().map(|&(b, k)| self.trace_leaf(b, k)).collect()
    }

    /// Largest |Im ∫√φ dz| along the polyline, by Gauss–Legendre quadrature on each segment.
    pub fn horizontal_drift(&self, t: &Trajectory<T>) -> Result<T> {
        let mut acc = Complex::<T>::zero();
        let mut s = t.launch_value;
        let mut worst = T::zero();
        for pair in t.points.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let d = self.nearest_singular(a).min(self.nearest_singular(b));
            let pieces = ((b - a).norm() / (d * lit(0.1))).ceil().to_usize().unwrap_or(1).clamp(1, 1000);
            for q in 0..pieces {
                let pa = a + (b - a) * lit::<T>(q as f64 / pieces as f64);
                let pb = a + (b - a) * lit::<T>((q + 1) as f64 / pieces as f64);
                let (val, s_end) = gauss_segment(self.phi, pa, pb, s)?;
                acc = acc + val;
                s = s_end;
            }
            worst = worst.max(acc.im.abs());
        }
        Ok(worst)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BranchLaunch<T> {
    pub z: Complex<T>,
    pub s: Complex<T>,
    pub offset: T,
}

const GL_X: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_W: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_1,
];

/// ∫_a^b √φ dz on a short segment, continuing the branch from `s` at a.
fn gauss_segment<T: Real>(
    phi: &QuadraticDifferential<T>,
    a: Complex<T>,
    b: Complex<T>,
    s: Complex<T>,
) -> Result<(Complex<T>, Complex<T>)> {
    let half = (b - a) * lit::<T>(0.5);
    let mid = (a + b) * lit::<T>(0.5);
    let mut reference = s;
    let mut sum: Complex<T> = Complex::zero();
    for i in 0..5 {
        let z = mid + half * lit::<T>(GL_X[i]);
        let (v, cos) = nearest_root(phi.eval(z), reference);
        if cos < lit(0.3) {
            let c = to_c64(z);
            return Err(Error::BranchAmbiguity { re: c.re, im: c.im });
        }
        reference = v;
        sum = sum + v * lit::<T>(GL_W[i]);
    }
    let (end, _) = nearest_root(phi.eval(b), reference);
    Ok((sum * half, end))
}

#[derive(Clone, Debug)]
pub enum Classification<T> {
    SaddleFree(Vec<Trajectory<T>>),
    HasSaddle { from: usize, to: usize, trajectories: Vec<Trajectory<T>> },
    Inconclusive(Vec<Trajectory<T>>),
}

impl<T> Classification<T> {
    pub fn is_saddle_free(&self) -> bool {
        matches!(self, Classification::SaddleFree(_))
    }
}

/// Traces every critical leaf and classifies φ.
pub fn is_saddle_free<T: Real>(phi: &QuadraticDifferential<T>, zeros: &[Complex<T>], cfg: &TraceConfig<T>) -> Result<Classification<T>> {
    let tracer = Tracer::new(phi, zeros.to_vec(), cfg.clone())?;
    let leaves = tracer.trace_all()?;
    if let Some(t) = leaves.iter().find(|t| matches!(t.endpoint, Endpoint::Saddle(_))) {
        let Endpoint::Saddle(to) = t.endpoint else { unreachable!() };
        return Ok(Classification::HasSaddle { from: t.source_zero, to, trajectories: leaves });
    }
    if leaves.iter().any(|t| t.endpoint == Endpoint::Unresolved) {
        return Ok(Classification::Inconclusive(leaves));
    }
    Ok(Classification::SaddleFree(leaves))
}

/// Default integration path between the two zeros: the straight segment, or a
/// two-segment detour through an offset midpoint when the segment passes close
/// to a finite puncture.
pub fn saddle_path<T: Real>(phi: &QuadraticDifferential<T>, zeros: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    if zeros.len() != 2 {
        return Err(Error::NonGenericDifferential("saddle integral needs exactly two zeros".into()));
    }
    let (a, b) = (zeros[0], zeros[1]);
    let poles: Vec<_> = phi.finite_punctures().map(|(_, p)| p).collect();
    let clearance = (b - a).norm() * lit(0.05);
    if crate::quad_diff::segment_distance(a, b, &poles) > clearance {
        return Ok(vec![a, b]);
    }
    let mid = (a + b) * lit::<T>(0.5);
    let perp = (b - a) * Complex::new(T::zero(), T::one());
    for f in [0.5, -0.5, 1.0, -1.0, 2.0, -2.0] {
        let m = mid + perp * lit::<T>(f);
        if crate::quad_diff::segment_distance(a, m, &poles) > clearance
            && crate::quad_diff::segment_distance(m, b, &poles) > clearance
        {
            return Ok(vec![a, m, b]);
        }
    }
    Err(Error::PathThroughSingularity)
}

/// ∫ √φ dz between the two zeros along `path`, with a continuously tracked branch.
///
/// Each segment is mapped by z = a + (b − a)(1 − cos πτ)/2, which absorbs the
/// square-root behaviour at the endpoint zeros.
pub fn saddle_integral_along<T: Real>(phi: &QuadraticDifferential<T>, path: &[Complex<T>]) -> Result<Complex<T>> {
    let poles: Vec<_> = phi.finite_punctures().map(|(_, p)| p).collect();
    let span = path.windows(2).fold(T::zero(), |m, w| m.max((w[1] - w[0]).norm()));
    for w in path.windows(2) {
        if crate::quad_diff::segment_distance(w[0], w[1], &poles) < span * lit(1e-3) {
            return Err(Error::PathThroughSingularity);
        }
    }
    let panels = 64usize;
    let mut total = Complex::zero();
    let mut reference: Option<Complex<T>> = None;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        for q in 0..panels {
            let t0 = q as f64 / panels as f64;
            let t1 = (q + 1) as f64 / panels as f64;
            for i in 0..5 {
                let tau = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * GL_X[i];
                let wgt = 0.5 * (t1 - t0) * GL_W[i];
                let sfrac = 0.5 * (1.0 - (std::f64::consts::PI * tau).cos());
                let dsdtau = 0.5 * std::f64::consts::PI * (std::f64::consts::PI * tau).sin();
                let z = a + (b - a) * lit::<T>(sfrac);
                let root = phi.eval(z).sqrt();
                let v = match reference {
                    None => root,
                    Some(r) => nearest_root(phi.eval(z), r).0,
                };
                reference = Some(v);
                total = total + v * (b - a) * lit::<T>(wgt * dsdtau);
            }
        }
    }
    Ok(total)
}

/// ∫ √φ dz between the two zeros of a (0,3) differential along [`saddle_path`].
pub fn saddle_integral<T: Real>(phi: &QuadraticDifferential<T>, zeros: &[Complex<T>]) -> Result<Complex<T>> {
    let path = saddle_path(phi, zeros)?;
    saddle_integral_along(phi, &path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn directions_for_unit_coefficient() {
        let th = directions_from_coefficient(C::new(1.0, 0.0));
        let third = std::f64::consts::TAU / 3.0;
        for (k, t) in th.iter().enumerate() {
            assert!((t - third * k as f64).abs() < 1e-15);
        }
        let psi = 0.7;
        let rot = directions_from_coefficient(C::from_polar(1.0, psi));
        for k in 0..3 {
            assert!((rot[k] - th[k] + psi / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn directions_are_spaced_by_a_third_turn() {
        let phi = QuadraticDifferential::three_point(C::new(0.3, 0.4), C::new(0.7, -0.2), C::new(1.1, 0.3)).unwrap();
        let zs = phi.zeros(1e-8).unwrap();
        let th = critical_directions(&phi, zs[0]).unwrap();
        let third = std::f64::consts::TAU / 3.0;
        assert!((th[1] - th[0] - third).abs() < 1e-14 && (th[2] - th[1] - third).abs() < 1e-14);
    }
}
