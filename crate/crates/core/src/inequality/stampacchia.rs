use serde::Serialize;

use crate::error::{Error, Result};

/// Relative size of the numerical zero, as a fraction of `f` at the left end.
pub const ZERO_TOLERANCE: f64 = 1e-12;

/// Default number of sample points per axis.
pub const DEFAULT_SAMPLES: usize = 64;

/// Relative slack allowed when checking a recurrence on samples.
const RECURRENCE_SLACK: f64 = 1e-12;

/// `a` followed by `count - 1` points clustering geometrically towards `a`
/// and ending at `b`.
pub fn geometric_grid(a: f64, b: f64, count: usize) -> Vec<f64> {
    let count = count.max(2);
    let mut pts = vec![a];
    for i in 0..count - 1 {
        let e = -10.0 * (1.0 - i as f64 / (count - 2).max(1) as f64);
        pts.push(a + (b - a) * 2f64.powf(e));
    }
    pts.dedup();
    pts
}

/// A nonnegative nonincreasing function together with the points where it
/// was sampled.
pub struct DecreasingSampler<'a> {
    f: Box<dyn Fn(f64) -> f64 + 'a>,
    points: Vec<f64>,
    values: Vec<f64>,
}

impl<'a> DecreasingSampler<'a> {
    /// Samples `f` at `points` (sorted increasingly) and rejects negative,
    /// non-finite or increasing values.
    pub fn new(f: impl Fn(f64) -> f64 + 'a, mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        points.dedup();
        if points.len() < 2 {
            return Err(Error::InsufficientData("need at least two sample points".into()));
        }
        let values: Vec<f64> = points.iter().map(|&x| f(x)).collect();
        if let Some(i) = values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Domain(format!(
                "f({}) = {} is not a nonnegative number",
                points[i], values[i]
            )));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::Domain(format!(
                "f increases between {} and {}",
                points[i],
                points[i + 1]
            )));
        }
        Ok(Self {
            f: Box::new(f),
            points,
            values,
        })
    }

    /// Samples on [`geometric_grid`]`(a, b, count)`.
    pub fn on_grid(f: impl Fn(f64) -> f64 + 'a, a: f64, b: f64, count: usize) -> Result<Self> {
        Self::new(f, geometric_grid(a, b, count))
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn samples_from(&self, x0: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.values.iter().copied())
            .filter(move |(x, _)| *x >= x0)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HypothesisCheck {
    pub name: String,
    pub passed: bool,
    /// Largest `lhs / rhs` observed (at most 1 when the check passes).
    pub worst_ratio: f64,
    pub samples: usize,
}

impl HypothesisCheck {
    fn condition(name: &str, passed: bool) -> Self {
        Self {
            name: name.into(),
            passed,
            worst_ratio: if passed { 0.0 } else { f64::INFINITY },
            samples: 1,
        }
    }
}

/// Conclusion predicted by a lemma once its hypotheses are verified.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Prediction {
    /// `f = 0` on `[point, ...)`.
    Vanishing { point: f64 },
    /// `f(y) <= e^{1 - zeta (y - x0)} f(x0)`.
    Exponential { zeta: f64 },
    /// `f(y) <= constant y^{-mu}`.
    Power { mu: f64, constant: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub lemma: &'static str,
    pub hypotheses: Vec<HypothesisCheck>,
    pub prediction: Option<Prediction>,
    /// Whether the sampled function satisfies the prediction; `None` without one.
    pub conclusion_holds: Option<bool>,
    /// Largest sampled violation of the prediction (zero when it holds).
    pub worst_violation: f64,
    /// Relative shortfall of the smallness condition, when it fails.
    pub deficit: Option<f64>,
    pub zero_tolerance: f64,
    pub observed: Vec<(f64, f64)>,
}

impl LemmaReport {
    fn new(lemma: &'static str, f: &DecreasingSampler, zero_tolerance: f64) -> Self {
        Self {
            lemma,
            hypotheses: Vec::new(),
            prediction: None,
            conclusion_holds: None,
            worst_violation: 0.0,
            deficit: None,
            zero_tolerance,
            observed: f.points.iter().copied().zip(f.values.iter().copied()).collect(),
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|h| h.passed)
    }

    /// Records the prediction and checks it, but only if every hypothesis passed.
    fn conclude(&mut self, prediction: Prediction, violation: impl FnOnce() -> f64) {
        if !self.hypotheses_hold() {
            return;
        }
        let v = violation();
        self.worst_violation = v;
        self.conclusion_holds = Some(v <= 0.0);
        self.prediction = Some(prediction);
    }
}

/// Tracks the worst `lhs / rhs` of an inequality `lhs <= rhs` over samples.
struct RatioCheck {
    worst: f64,
    samples: usize,
}

impl RatioCheck {
    fn new() -> Self {
        Self {
            worst: 0.0,
            samples: 0,
        }
    }

    fn add(&mut self, lhs: f64, rhs: f64) {
        self.samples += 1;
        let r = if lhs <= 0.0 {
            0.0
        } else if rhs > 0.0 {
            lhs / rhs
        } else {
            f64::INFINITY
        };
        self.worst = self.worst.max(r);
    }

    fn finish(self, name: &str) -> HypothesisCheck {
        HypothesisCheck {
            name: name.into(),
            passed: self.worst <= 1.0 + RECURRENCE_SLACK,
            worst_ratio: self.worst,
            samples: self.samples,
        }
    }
}

/// Largest value of `f` at sampled points and extra probes in `[start, ...)`,
/// beyond the numerical zero.
fn vanishing_violation(f: &DecreasingSampler, start: f64, zero: f64) -> f64 {
    let probes = (0..=16).map(|j| start * (1.0 + j as f64 / 16.0) + j as f64 * 1e-3);
    f.samples_from(start)
        .map(|(_, v)| v)
        .chain(probes.map(|x| f.eval(x)))
        .fold(0.0f64, |a, v| a.max(v - zero))
}

/// Classical iteration lemma for `f(y) <= C (y - x)^{-alpha} f(x)^beta`,
/// `y > x >= x0`.
pub fn stampacchia_classic(
    f: &DecreasingSampler,
    x0: f64,
    c: f64,
    alpha: f64,
    beta: f64,
) -> LemmaReport {
    let f0 = f.eval(x0);
    let zero = ZERO_TOLERANCE * f0;
    let mut report = LemmaReport::new("classical-stampacchia", f, zero);
    report.hypotheses.push(HypothesisCheck::condition(
        "positive constants",
        c > 0.0 && alpha > 0.0 && beta > 0.0,
    ));
    let pts: Vec<(f64, f64)> = f.samples_from(x0).collect();
    let mut rec = RatioCheck::new();
    for (i, &(x, fx)) in pts.iter().enumerate() {
        for &(y, fy) in &pts[i + 1..] {
            rec.add(fy * (y - x).powf(alpha), c * fx.powf(beta));
        }
    }
    report.hypotheses.push(rec.finish("recurrence"));
    if beta > 1.0 {
        let d = (c * f0.powf(beta - 1.0) * 2f64.powf(alpha * beta / (beta - 1.0))).powf(1.0 / alpha);
        let point = x0 + d;
        report.conclude(Prediction::Vanishing { point }, || {
            vanishing_violation(f, point, zero)
        });
    } else if beta == 1.0 {
        let zeta = (std::f64::consts::E * c).powf(-1.0 / alpha);
        report.conclude(Prediction::Exponential { zeta }, || {
            f.samples_from(x0).fold(0.0f64, |a, (y, fy)| {
                let envelope = (1.0 - zeta * (y - x0)).exp() * f0;
                a.max(fy - envelope * (1.0 + RECURRENCE_SLACK))
            })
        });
    } else {
        report
            .hypotheses
            .push(HypothesisCheck::condition("x0 > 0", x0 > 0.0));
        let mu = alpha / (1.0 - beta);
        let constant =
            2f64.powf(mu / (1.0 - beta)) * (c.powf(1.0 / (1.0 - beta)) + (2.0 * x0).powf(mu) * f0);
        report.conclude(Prediction::Power { mu, constant }, || {
            f.samples_from(x0).fold(0.0f64, |a, (y, fy)| {
                a.max(fy - constant * y.powf(-mu) * (1.0 + RECURRENCE_SLACK))
            })
        });
    }
    report
}

/// Geometric iteration lemma: `f(s + delta) <= eps f(s)^nu` with
/// `eps f(0)^{nu-1} < 1` gives `f = 0` beyond `f(0) / (1 - eps f(0)^{nu-1})`.
///
/// The recurrence is checked along the increments `delta_k = f(0) A^k`,
/// `A = eps f(0)^{nu-1}`, starting from `s = 0`.
pub fn stampacchia_geometric(f: &DecreasingSampler, eps: f64, nu: f64) -> LemmaReport {
    let f0 = f.eval(0.0);
    let zero = ZERO_TOLERANCE * f0;
    let mut report = LemmaReport::new("geometric-stampacchia", f, zero);
    report
        .hypotheses
        .push(HypothesisCheck::condition("nu > 1", nu > 1.0));
    let a = eps * f0.powf(nu - 1.0);
    let upper = if f0 > 0.0 { f0.powf(1.0 - nu) } else { f64::INFINITY };
    report.hypotheses.push(HypothesisCheck::condition(
        "0 < eps < f(0)^(1-nu)",
        eps > 0.0 && eps < upper,
    ));
    if report.hypotheses_hold() {
        let mut rec = RatioCheck::new();
        let (mut s, mut fs, mut step) = (0.0, f0, f0);
        for _ in 0..400 {
            let next = f.eval(s + step);
            rec.add(next, eps * fs.powf(nu));
            if next <= zero || step <= f64::EPSILON * s.max(1.0) {
                break;
            }
            s += step;
            fs = next;
            step *= a;
        }
        report.hypotheses.push(rec.finish("recurrence along the iteration"));
    }
    let point = if f0 > 0.0 { f0 / (1.0 - a) } else { 0.0 };
    report.conclude(Prediction::Vanishing { point }, || {
        vanishing_violation(f, point, zero)
    });
    report
}

/// Inhomogeneous iteration lemma on `[0, R]`:
/// `f(xi) <= c0 (xi - eta)^{-alpha} (f(eta) + S (R - eta)^{alpha/(beta-1)})^beta`.
pub fn stampacchia_inhomogeneous(
    f: &DecreasingSampler,
    r: f64,
    c0: f64,
    alpha: f64,
    beta: f64,
    source: f64,
) -> LemmaReport {
    let f0 = f.eval(0.0);
    let zero = ZERO_TOLERANCE * f0;
    let mut report = LemmaReport::new("inhomogeneous-stampacchia", f, zero);
    report.hypotheses.push(HypothesisCheck::condition(
        "beta > 1, positive constants, S >= 0",
        beta > 1.0 && c0 > 0.0 && alpha > 0.0 && source >= 0.0 && r > 0.0,
    ));
    if !report.hypotheses_hold() {
        return report;
    }
    let q = alpha / (beta - 1.0);
    let pts: Vec<(f64, f64)> = f.samples_from(0.0).filter(|(x, _)| *x <= r).collect();
    let mut rec = RatioCheck::new();
    for (i, &(eta, fe)) in pts.iter().enumerate() {
        let base = fe + source * (r - eta).powf(q);
        for &(xi, fx) in &pts[i + 1..] {
            rec.add(fx * (xi - eta).powf(alpha), c0 * base.powf(beta));
        }
    }
    report.hypotheses.push(rec.finish("recurrence"));
    let lhs = r.powf(q);
    let rhs = inhomogeneous_factor(c0, alpha, beta) * (f0 + source * lhs);
    let smallness = lhs >= rhs;
    if !smallness {
        report.deficit = Some(rhs / lhs - 1.0);
    }
    report
        .hypotheses
        .push(HypothesisCheck::condition("smallness", smallness));
    report.conclude(Prediction::Vanishing { point: r }, || (f.eval(r) - zero).max(0.0));
    report
}

/// `(2^{beta(alpha+beta-1)/(beta-1)} c0)^{1/(beta-1)}`.
pub fn inhomogeneous_factor(c0: f64, alpha: f64, beta: f64) -> f64 {
    (2f64.powf(beta * (alpha + beta - 1.0) / (beta - 1.0)) * c0).powf(1.0 / (beta - 1.0))
}

/// Smallest `R` accepted by the smallness condition of the inhomogeneous lemma
/// when `S = 0`.
pub fn inhomogeneous_radius(f0: f64, c0: f64, alpha: f64, beta: f64) -> f64 {
    (inhomogeneous_factor(c0, alpha, beta) * f0).powf((beta - 1.0) / alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(1 - x)_+^p` satisfies the classical recurrence with `beta = 1 + alpha/p`
    /// and the sharp constant below.
    fn family(p: f64, alpha: f64) -> (impl Fn(f64) -> f64, f64, f64) {
        let c = p.powf(p) * alpha.powf(alpha) / (p + alpha).powf(p + alpha);
        (move |x: f64| (1.0 - x).max(0.0).powf(p), c, 1.0 + alpha / p)
    }

    #[test]
    fn grid_is_sorted_and_spans_the_interval() {
        let g = geometric_grid(0.5, 2.0, 64);
        assert_eq!(g.len(), 64);
        assert_eq!(g[0], 0.5);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sampler_rejects_increasing_functions() {
        assert!(DecreasingSampler::on_grid(|x| x, 0.0, 1.0, 16).is_err());
        assert!(DecreasingSampler::on_grid(|x| -x, 0.0, 1.0, 16).is_err());
        assert!(DecreasingSampler::on_grid(|x| 1.0 - 0.5 * x, 0.0, 1.0, 16).is_ok());
    }

    #[test]
    fn classic_vanishing_point_bounds_the_support() {
        for (p, alpha) in [(2.0, 1.0), (3.0, 0.5), (1.5, 2.0)] {
            let (f, c, beta) = family(p, alpha);
            let s = DecreasingSampler::on_grid(&f, 0.0, 4.0, DEFAULT_SAMPLES).unwrap();
            let r = stampacchia_classic(&s, 0.0, c, alpha, beta);
            assert!(r.hypotheses_hold(), "{r:?}");
            let Some(Prediction::Vanishing { point }) = r.prediction else {
                panic!("{r:?}")
            };
            assert!(point >= 1.0, "{point}");
            assert_eq!(r.conclusion_holds, Some(true));
        }
    }

    #[test]
    fn classic_prediction_grows_with_constants() {
        let (f, c, beta) = family(2.0, 1.0);
        let s = DecreasingSampler::on_grid(&f, 0.0, 4.0, 32).unwrap();
        let point = |c: f64| match stampacchia_classic(&s, 0.0, c, 1.0, beta).prediction {
            Some(Prediction::Vanishing { point }) => point,
            other => panic!("{other:?}"),
        };
        assert!(point(2.0 * c) > point(c));
        let g = |x: f64| 2.0 * f(x);
        let s2 = DecreasingSampler::on_grid(g, 0.0, 4.0, 32).unwrap();
        // the doubled function satisfies the recurrence with any C >= c 2^{1-beta}
        let c2 = c * 2f64.powf(beta - 1.0);
        let p2 = match stampacchia_classic(&s2, 0.0, c2, 1.0, beta).prediction {
            Some(Prediction::Vanishing { point }) => point,
            other => panic!("{other:?}"),
        };
        assert!(p2 > point(c2));
    }

    #[test]
    fn failed_hypothesis_gives_no_prediction() {
        let (f, c, beta) = family(2.0, 1.0);
        let s = DecreasingSampler::on_grid(&f, 0.0, 4.0, 32).unwrap();
        let r = stampacchia_classic(&s, 0.0, 0.5 * c, 1.0, beta);
        assert!(!r.hypotheses_hold());
        assert!(r.prediction.is_none() && r.conclusion_holds.is_none());
    }

    #[test]
    fn classic_exponential_case() {
        // f = e^{-x} satisfies f(y) <= C (y-x)^{-1} f(x) with C = 1/e
        let s = DecreasingSampler::on_grid(|x: f64| (-x).exp(), 0.0, 20.0, 64).unwrap();
        let r = stampacchia_classic(&s, 0.0, (-1.0f64).exp(), 1.0, 1.0);
        assert!(r.hypotheses_hold(), "{r:?}");
        assert!(matches!(r.prediction, Some(Prediction::Exponential { .. })));
        assert_eq!(r.conclusion_holds, Some(true));
    }

    #[test]
    fn classic_power_case_needs_positive_start() {
        // f = x^{-2} satisfies the recurrence with alpha = 1, beta = 1/2, C = 1/4
        let s = DecreasingSampler::on_grid(|x: f64| x.powi(-2), 1.0, 50.0, 64).unwrap();
        let r = stampacchia_classic(&s, 1.0, 0.25, 1.0, 0.5);
        assert!(r.hypotheses_hold(), "{r:?}");
        assert_eq!(r.conclusion_holds, Some(true));
        let s0 = DecreasingSampler::on_grid(|_| 1.0, 0.0, 1.0, 8).unwrap();
        let r0 = stampacchia_classic(&s0, 0.0, 1.0, 1.0, 0.5);
        assert!(!r0.hypotheses_hold() && r0.prediction.is_none());
    }

    #[test]
    fn zero_function_vanishes_immediately() {
        let s = DecreasingSampler::on_grid(|_| 0.0, 0.0, 1.0, 16).unwrap();
        let r = stampacchia_classic(&s, 0.0, 1.0, 1.0, 2.0);
        assert!(matches!(r.prediction, Some(Prediction::Vanishing { point }) if point == 0.0));
        assert_eq!(r.conclusion_holds, Some(true));
        let g = stampacchia_geometric(&s, 0.5, 2.0);
        assert!(matches!(g.prediction, Some(Prediction::Vanishing { point }) if point == 0.0));
        assert_eq!(g.conclusion_holds, Some(true));
    }

    fn example(f0: f64, d: f64) -> impl Fn(f64) -> f64 {
        move |s: f64| {
            if s >= d {
                0.0
            } else {
                f0 * (-s / (d * (d - s))).exp()
            }
        }
    }

    #[test]
    fn geometric_example_vanishes_beyond_its_support() {
        for (f0, d, eps, nu) in [(1.0, 1.0, 0.5, 2.0), (0.5, 1.0, 1.5, 2.0), (0.8, 0.6, 0.9, 1.5)] {
            let f = example(f0, d);
            let s = DecreasingSampler::on_grid(&f, 0.0, 3.0, DEFAULT_SAMPLES).unwrap();
            let r = stampacchia_geometric(&s, eps, nu);
            assert!(r.hypotheses_hold(), "{r:?}");
            assert_eq!(r.conclusion_holds, Some(true));
            for &x in s.points() {
                if x >= d {
                    assert!(f(x) <= ZERO_TOLERANCE * f0);
                } else {
                    assert!(f(x) <= f0 / d * (d - x) * (1.0 + 1e-15) || d > 1.0);
                }
            }
        }
    }

    #[test]
    fn geometric_rejects_large_eps() {
        let s = DecreasingSampler::on_grid(example(1.0, 1.0), 0.0, 2.0, 16).unwrap();
        let r = stampacchia_geometric(&s, 1.0, 2.0);
        assert!(!r.hypotheses_hold() && r.prediction.is_none());
    }

    #[test]
    fn inhomogeneous_degenerates_to_classic() {
        let (p, alpha) = (2.0, 1.0);
        let (f, c, beta) = family(p, alpha);
        let classic = {
            let s = DecreasingSampler::on_grid(&f, 0.0, 4.0, 32).unwrap();
            match stampacchia_classic(&s, 0.0, c, alpha, beta).prediction {
                Some(Prediction::Vanishing { point }) => point,
                other => panic!("{other:?}"),
            }
        };
        let radius = inhomogeneous_radius(1.0, c, alpha, beta);
        let ratio = radius / classic;
        assert!((ratio - 2f64.powf(beta / alpha)).abs() < 1e-12 * ratio);
        let s = DecreasingSampler::on_grid(&f, 0.0, radius, 32).unwrap();
        let r = stampacchia_inhomogeneous(&s, radius * (1.0 + 1e-12), c, alpha, beta, 0.0);
        assert!(r.hypotheses_hold(), "{r:?}");
        assert_eq!(r.conclusion_holds, Some(true));
    }

    #[test]
    fn inhomogeneous_margin_and_deficit() {
        let (p, alpha) = (2.0, 1.0);
        let (f, c, beta) = family(p, alpha);
        let source = 1e-3;
        let q = alpha / (beta - 1.0);
        let k = inhomogeneous_factor(c, alpha, beta);
        // R^q = m k (f(0) + S R^q): the smallness condition with margin m
        let radius = |m: f64| (m * k / (1.0 - m * k * source)).powf(1.0 / q);
        let s = DecreasingSampler::on_grid(&f, 0.0, radius(2.0), 48).unwrap();
        let r = stampacchia_inhomogeneous(&s, radius(2.0), c, alpha, beta, source);
        assert!(r.hypotheses_hold(), "{r:?}");
        assert_eq!(r.conclusion_holds, Some(true));
        assert!(r.deficit.is_none());

        let r = stampacchia_inhomogeneous(&s, radius(0.9), c, alpha, beta, source);
        assert!(r.prediction.is_none() && r.conclusion_holds.is_none());
        let deficit = r.deficit.unwrap();
        assert!((deficit - 1.0 / 9.0).abs() < 1e-9, "{deficit}");
    }
}
