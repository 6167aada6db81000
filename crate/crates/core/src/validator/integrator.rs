//! Adaptive DOP853 (Dormand–Prince 8(5,3)) along complex polylines.
//!
//! Each segment `a → b` is parametrized by arc length `u`, `x = a + u·(b−a)/|b−a|`,
//! so step sizes stay real while the state is complex.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

// inherent on f64 whenever std is part of the build
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::normal_form::NormalSystem;
use crate::C64;

/// Polyline and tolerances for one integration.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    pub waypoints: Vec<C64>,
    pub max_step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// State norm treated as blow-up.
    pub blowup: f64,
    /// Fixed arc-length step, disabling error control.
    pub fixed_step: Option<f64>,
    pub max_steps: usize,
}

impl PathSpec {
    pub fn new(waypoints: Vec<C64>) -> Self {
        Self {
            waypoints,
            max_step: f64::INFINITY,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            blowup: 1e12,
            fixed_step: None,
            max_steps: 1_000_000,
        }
    }

    pub fn segment(a: C64, b: C64) -> Self {
        Self::new(vec![a, b])
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_step(mut self, h: f64) -> Self {
        self.max_step = h;
        self
    }

    pub fn with_blowup(mut self, b: f64) -> Self {
        self.blowup = b;
        self
    }

    pub fn with_fixed_step(mut self, h: f64) -> Self {
        self.fixed_step = Some(h);
        self
    }

    pub fn length(&self) -> f64 {
        self.waypoints.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    fn check(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::InvalidInput("a path needs at least two waypoints"));
        }
        if self.waypoints.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput("consecutive waypoints coincide"));
        }
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be positive"));
        }
        Ok(())
    }
}

/// Accepted step end point together with `dy/dx` there.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub x: C64,
    pub y: Vec<C64>,
    pub dy: Vec<C64>,
    pub segment: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IntegratorStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

/// Samples at every accepted step. Dense output is cubic Hermite between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub dense: bool,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory holds the initial sample")
    }

    pub fn end_state(&self) -> &[C64] {
        &self.last().y
    }

    /// Hermite interpolation at `x` on the segment between samples `i` and `i+1`.
    pub fn interpolate(&self, i: usize, x: C64) -> Vec<C64> {
        let a = &self.samples[i];
        let b = &self.samples[i + 1];
        let h = b.x - a.x;
        let s = ((x - a.x) / h).re;
        let h00 = 2.0 * s * s * s - 3.0 * s * s + 1.0;
        let h10 = s * s * s - 2.0 * s * s + s;
        let h01 = -2.0 * s * s * s + 3.0 * s * s;
        let h11 = s * s * s - s * s;
        (0..a.y.len())
            .map(|j| a.y[j] * h00 + a.dy[j] * h * h10 + b.y[j] * h01 + b.dy[j] * h * h11)
            .collect()
    }
}

const C2: f64 = 0.526001519587677318785587544488E-01;
const C3: f64 = 0.789002279381515978178381316732E-01;
const C4: f64 = 0.118350341907227396726757197510E+00;
const C5: f64 = 0.281649658092772603273242802490E+00;
const C6: f64 = 0.333333333333333333333333333333E+00;
const C7: f64 = 0.25E+00;
const C8: f64 = 0.307692307692307692307692307692E+00;
const C9: f64 = 0.651282051282051282051282051282E+00;
const C10: f64 = 0.6E+00;
const C11: f64 = 0.857142857142857142857142857142E+00;

const A21: f64 = 5.26001519587677318785587544488E-2;
const A31: f64 = 1.97250569845378994544595329183E-2;
const A32: f64 = 5.91751709536136983633785987549E-2;
const A41: f64 = 2.95875854768068491816892993775E-2;
const A43: f64 = 8.87627564304205475450678981324E-2;
const A51: f64 = 2.41365134159266685502369798665E-1;
const A53: f64 = -8.84549479328286085344864962717E-1;
const A54: f64 = 9.24834003261792003115737966543E-1;
const A61: f64 = 3.7037037037037037037037037037E-2;
const A64: f64 = 1.70828608729473871279604482173E-1;
const A65: f64 = 1.25467687566822425016691814123E-1;
const A71: f64 = 3.7109375E-2;
const A74: f64 = 1.70252211019544039314978060272E-1;
const A75: f64 = 6.02165389804559606850219397283E-2;
const A76: f64 = -1.7578125E-2;
const A81: f64 = 3.70920001185047927108779319836E-2;
const A84: f64 = 1.70383925712239993810214054705E-1;
const A85: f64 = 1.07262030446373284651809199168E-1;
const A86: f64 = -1.53194377486244017527936158236E-2;
const A87: f64 = 8.27378916381402288758473766002E-3;
const A91: f64 = 6.24110958716075717114429577812E-1;
const A94: f64 = -3.36089262944694129406857109825E0;
const A95: f64 = -8.68219346841726006818189891453E-1;
const A96: f64 = 2.75920996994467083049415600797E1;
const A97: f64 = 2.01540675504778934086186788979E1;
const A98: f64 = -4.34898841810699588477366255144E1;
const A101: f64 = 4.77662536438264365890433908527E-1;
const A104: f64 = -2.48811461997166764192642586468E0;
const A105: f64 = -5.90290826836842996371446475743E-1;
const A106: f64 = 2.12300514481811942347288949897E1;
const A107: f64 = 1.52792336328824235832596922938E1;
const A108: f64 = -3.32882109689848629194453265587E1;
const A109: f64 = -2.03312017085086261358222928593E-2;
const A111: f64 = -9.3714243008598732571704021658E-1;
const A114: f64 = 5.18637242884406370830023853209E0;
const A115: f64 = 1.09143734899672957818500254654E0;
const A116: f64 = -8.14978701074692612513997267357E0;
const A117: f64 = -1.85200656599969598641566180701E1;
const A118: f64 = 2.27394870993505042818970056734E1;
const A119: f64 = 2.49360555267965238987089396762E0;
const A1110: f64 = -3.0467644718982195003823669022E0;
const A121: f64 = 2.27331014751653820792359768449E0;
const A124: f64 = -1.05344954667372501984066689879E1;
const A125: f64 = -2.00087205822486249909675718444E0;
const A126: f64 = -1.79589318631187989172765950534E1;
const A127: f64 = 2.79488845294199600508499808837E1;
const A128: f64 = -2.85899827713502369474065508674E0;
const A129: f64 = -8.87285693353062954433549289258E0;
const A1210: f64 = 1.23605671757943030647266201528E1;
const A1211: f64 = 6.43392746015763530355970484046E-1;

const B1: f64 = 5.42937341165687622380535766363E-2;
const B6: f64 = 4.45031289275240888144113950566E0;
const B7: f64 = 1.89151789931450038304281599044E0;
const B8: f64 = -5.8012039600105847814672114227E0;
const B9: f64 = 3.1116436695781989440891606237E-1;
const B10: f64 = -1.52160949662516078556178806805E-1;
const B11: f64 = 2.01365400804030348374776537501E-1;
const B12: f64 = 4.47106157277725905176885569043E-2;

const BHH1: f64 = 0.244094488188976377952755905512E+00;
const BHH2: f64 = 0.733846688281611857341361741547E+00;
const BHH3: f64 = 0.220588235294117647058823529412E-01;

const ER1: f64 = 0.1312004499419488073250102996E-01;
const ER6: f64 = -0.1225156446376204440720569753E+01;
const ER7: f64 = -0.4957589496572501915214079952E+00;
const ER8: f64 = 0.1664377182454986536961530415E+01;
const ER9: f64 = -0.3503288487499736816886487290E+00;
const ER10: f64 = 0.3341791187130174790297318841E+00;
const ER11: f64 = 0.8192320648511571246570742613E-01;
const ER12: f64 = -0.2235530786388629525884427845E-01;

const SAFE: f64 = 0.9;

struct Stepper<F> {
    f: F,
    n: usize,
    dir: C64,
    k: [Vec<C64>; 12],
    tmp: Vec<C64>,
    evals: usize,
}

impl<F: FnMut(C64, &[C64], &mut [C64])> Stepper<F> {
    fn eval(&mut self, x: C64, y: &[C64], slot: usize) {
        let mut out = core::mem::take(&mut self.k[slot]);
        (self.f)(x, y, &mut out);
        for v in out.iter_mut() {
            *v *= self.dir;
        }
        self.k[slot] = out;
        self.evals += 1;
    }

    fn stage(&mut self, y: &[C64], h: f64, coeffs: &[(usize, f64)]) {
        for i in 0..self.n {
            let mut acc = C64::zero();
            for &(s, a) in coeffs {
                acc += self.k[s][i] * a;
            }
            self.tmp[i] = y[i] + acc * h;
        }
    }

    /// One step from `(x, y)` with `k[0] = dy/du` already set. Returns the new
    /// state and the scaled error (≤ 1 means acceptable).
    fn step(&mut self, x: C64, y: &[C64], h: f64, rtol: f64, atol: f64) -> (Vec<C64>, f64) {
        let d = self.dir;
        let tab: [(f64, &[(usize, f64)]); 11] = [
            (C2, &[(0, A21)]),
            (C3, &[(0, A31), (1, A32)]),
            (C4, &[(0, A41), (2, A43)]),
            (C5, &[(0, A51), (2, A53), (3, A54)]),
            (C6, &[(0, A61), (3, A64), (4, A65)]),
            (C7, &[(0, A71), (3, A74), (4, A75), (5, A76)]),
            (C8, &[(0, A81), (3, A84), (4, A85), (5, A86), (6, A87)]),
            (C9, &[(0, A91), (3, A94), (4, A95), (5, A96), (6, A97), (7, A98)]),
            (C10, &[(0, A101), (3, A104), (4, A105), (5, A106), (6, A107), (7, A108), (8, A109)]),
            (
                C11,
                &[(0, A111), (3, A114), (4, A115), (5, A116), (6, A117), (7, A118), (8, A119), (9, A1110)],
            ),
            (
                1.0,
                &[
                    (0, A121),
                    (3, A124),
                    (4, A125),
                    (5, A126),
                    (6, A127),
                    (7, A128),
                    (8, A129),
                    (9, A1210),
                    (10, A1211),
                ],
            ),
        ];
        for (s, (c, coeffs)) in tab.iter().enumerate() {
            self.stage(y, h, coeffs);
            let tmp = core::mem::take(&mut self.tmp);
            self.eval(x + d * (c * h), &tmp, s + 1);
            self.tmp = tmp;
        }
        let mut y_new = vec![C64::zero(); self.n];
        let mut err = 0.0;
        let mut err2 = 0.0;
        for i in 0..self.n {
            let k = &self.k;
            let incr = k[0][i] * B1
                + k[5][i] * B6
                + k[6][i] * B7
                + k[7][i] * B8
                + k[8][i] * B9
                + k[9][i] * B10
                + k[10][i] * B11
                + k[11][i] * B12;
            y_new[i] = y[i] + incr * h;
            let sk = atol + rtol * y[i].norm().max(y_new[i].norm());
            let e2 = (incr - k[0][i] * BHH1 - k[8][i] * BHH2 - k[11][i] * BHH3).norm() / sk;
            let e = (k[0][i] * ER1
                + k[5][i] * ER6
                + k[6][i] * ER7
                + k[7][i] * ER8
                + k[8][i] * ER9
                + k[9][i] * ER10
                + k[10][i] * ER11
                + k[11][i] * ER12)
                .norm()
                / sk;
            err += e * e;
            err2 += e2 * e2;
        }
        let mut deno = err + 0.01 * err2;
        if deno <= 0.0 {
            deno = 1.0;
        }
        let scaled = h * err * (1.0 / (self.n as f64 * deno)).sqrt();
        (y_new, scaled)
    }
}

fn norm_inf(y: &[C64]) -> f64 {
    y.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

fn finite(y: &[C64]) -> bool {
    y.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Integrates `dy/dx = f(x, y)` along the polyline of `path`.
pub fn integrate_polyline<F>(f: F, y0: &[C64], path: &PathSpec) -> Result<Trajectory>
where
    F: FnMut(C64, &[C64], &mut [C64]),
{
    path.check()?;
    if !finite(y0) {
        return Err(Error::InvalidInput("initial state is not finite"));
    }
    let n = y0.len();
    let mut st = Stepper {
        f,
        n,
        dir: C64::new(1.0, 0.0),
        k: core::array::from_fn(|_| vec![C64::zero(); n]),
        tmp: vec![C64::zero(); n],
        evals: 0,
    };
    let mut traj = Trajectory { samples: Vec::new(), dense: true, stats: IntegratorStats::default() };
    let mut y = y0.to_vec();
    let mut x = path.waypoints[0];
    let mut dy = vec![C64::zero(); n];
    (st.f)(x, &y, &mut dy);
    st.evals += 1;
    traj.samples.push(Sample { x, y: y.clone(), dy: dy.clone(), segment: 0 });
    let mut h_prev: Option<f64> = None;
    let mut total_steps = 0usize;

    for (seg, w) in path.waypoints.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        let len = (b - a).norm();
        st.dir = (b - a) / len;
        let mut u = 0.0;
        x = a;
        let mut h = match (path.fixed_step, h_prev) {
            (Some(hf), _) => len / (len / hf).ceil(),
            (None, Some(hp)) => hp,
            (None, None) => {
                st.eval(x, &y, 0);
                initial_step(&mut st, x, &y, path, len)
            }
        };
        while u < len {
            if total_steps >= path.max_steps {
                return Err(underflow(x, traj, st.evals));
            }
            let last = u + h >= len * (1.0 - 1e-14);
            let h_try = if last { len - u } else { h.min(path.max_step) };
            let d = st.dir;
            for (k0, v) in st.k[0].iter_mut().zip(&traj.last().dy) {
                *k0 = v * d;
            }
            let (y_new, err) = st.step(x, &y, h_try, path.rel_tol, path.abs_tol);
            total_steps += 1;
            let ok_values = finite(&y_new);
            if path.fixed_step.is_some() {
                if !ok_values || norm_inf(&y_new) > path.blowup {
                    return Err(underflow(x, traj, st.evals));
                }
                u += h_try;
                x = if last { b } else { a + st.dir * u };
                y = y_new;
                push_sample(&mut st, &mut traj, x, &y, seg);
                traj.stats.accepted += 1;
                continue;
            }
            if ok_values && err <= 1.0 {
                u += h_try;
                x = if last { b } else { a + st.dir * u };
                y = y_new;
                push_sample(&mut st, &mut traj, x, &y, seg);
                traj.stats.accepted += 1;
                if norm_inf(&y) > path.blowup {
                    return Err(underflow(x, traj, st.evals));
                }
                let fac = (err.max(1e-300).powf(0.125) / SAFE).clamp(1.0 / 6.0, 3.0);
                let h_new = (h_try / fac).min(path.max_step);
                if !last {
                    h = h_new;
                }
                h_prev = Some(h_new);
            } else {
                traj.stats.rejected += 1;
                let fac = if ok_values { (err.powf(0.125) / SAFE).min(3.0) } else { 10.0 };
                h = h_try / fac.max(1.1);
                if h < 1e-13 * (1.0 + x.norm()) {
                    return Err(underflow(x, traj, st.evals));
                }
            }
        }
    }
    traj.stats.rhs_evals = st.evals;
    Ok(traj)
}

fn push_sample<F: FnMut(C64, &[C64], &mut [C64])>(
    st: &mut Stepper<F>,
    traj: &mut Trajectory,
    x: C64,
    y: &[C64],
    seg: usize,
) {
    let mut dy = vec![C64::zero(); y.len()];
    (st.f)(x, y, &mut dy);
    st.evals += 1;
    traj.samples.push(Sample { x, y: y.to_vec(), dy, segment: seg });
}

fn underflow(x: C64, mut traj: Trajectory, evals: usize) -> Error {
    traj.stats.rhs_evals = evals;
    Error::StepUnderflow { x, partial: Box::new(traj) }
}

fn initial_step<F: FnMut(C64, &[C64], &mut [C64])>(
    st: &mut Stepper<F>,
    x: C64,
    y: &[C64],
    path: &PathSpec,
    len: f64,
) -> f64 {
    let n = y.len();
    let sk: Vec<f64> = y.iter().map(|v| path.abs_tol + path.rel_tol * v.norm()).collect();
    let rms = |v: &[C64]| -> f64 {
        (v.iter().zip(&sk).map(|(a, s)| (a.norm() / s).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(&st.k[0]);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(len).min(path.max_step);
    let f0 = st.k[0].clone();
    let y1: Vec<C64> = y.iter().zip(&f0).map(|(a, b)| a + b * h0).collect();
    st.eval(x + st.dir * h0, &y1, 1);
    let diff: Vec<C64> = st.k[1].iter().zip(&f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let m = d1.max(d2);
    let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / m).powf(0.125) };
    (100.0 * h0).min(h1).min(len).min(path.max_step)
}

/// Integrates a normal-form system along `path`.
pub fn integrate_path(s: &NormalSystem, y_init: &[C64], path: &PathSpec) -> Result<Trajectory> {
    if y_init.len() != s.n() {
        return Err(Error::DimensionMismatch { expected: s.n(), got: y_init.len() });
    }
    integrate_polyline(|x, y, out| s.rhs(x, y, out), y_init, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay(x1: C64, path: PathSpec) -> f64 {
        let t = integrate_polyline(|_, y, out| out[0] = -y[0], &[C64::new(1.0, 0.0)], &path).unwrap();
        (t.end_state()[0] - (-x1).exp()).norm() / (-x1).exp().norm()
    }

    #[test]
    fn linear_oracle() {
        let x1 = C64::new(5.0, 5.0);
        let err = decay(x1, PathSpec::segment(C64::zero(), x1));
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn fixed_step_order_eight() {
        let x1 = C64::new(5.0, 5.0);
        let e1 = decay(x1, PathSpec::segment(C64::zero(), x1).with_fixed_step(0.5));
        let e2 = decay(x1, PathSpec::segment(C64::zero(), x1).with_fixed_step(0.25));
        let ratio = e1 / e2;
        assert!(ratio > 128.0 && ratio < 512.0, "{ratio}");
    }

    #[test]
    fn blowup_reports_underflow() {
        // y' = y², y(0) = 1 blows up at x = 1
        let path = PathSpec::segment(C64::zero(), C64::new(2.0, 0.0));
        let r = integrate_polyline(|_, y, out| out[0] = y[0] * y[0], &[C64::new(1.0, 0.0)], &path);
        match r {
            Err(Error::StepUnderflow { x, .. }) => assert!((x - C64::new(1.0, 0.0)).norm() < 1e-3),
            other => panic!("{other:?}"),
        }
    }
}
