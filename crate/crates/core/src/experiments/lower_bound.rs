use crate::error::{Error, Result};
use crate::mechanisms::threshold_mechanism;
use crate::scalar::Scalar;
use crate::spaces::{Point, Space};
use crate::welfare::{optimal_location, social_welfare, LocationProfile, WelfareModel};

/// Outcome of running the threshold mechanism `T_{k0}^{0,1}` on its hard profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport<S> {
    pub n: usize,
    pub c: S,
    pub epsilon: S,
    /// `⌈2n/(2 + c)⌉`, the threshold the construction is built for.
    pub k0: usize,
    pub chosen: Point<S>,
    /// `OPT / F` evaluated from welfare on `k0` agents at 0 and `n - k0` at `1/2 + ε`.
    pub ratio: S,
    /// `(k0 + (n - k0)(1/2 - ε)) / ((n - k0)(1/2 + ε))`.
    pub closed_form: S,
    /// `1 + 4/c`.
    pub limit: S,
    /// `(n + k0)/(n - k0)`, the value of `closed_form` as `ε → 0`.
    pub epsilon_limit: S,
    /// Evaluated ratio of the companion profile with `k0 + 1` agents at 1/2, when `k0 < n`.
    pub c1_ratio: Option<S>,
}

fn ratio_on<S: Scalar>(profile: &LocationProfile<S>, chosen: &Point<S>) -> Result<S> {
    let space = Space::Segment;
    let welfare = social_welfare(&space, profile, WelfareModel::Obnoxious, chosen)?;
    let (_, opt) = optimal_location(&space, profile, WelfareModel::Obnoxious)?;
    if !(welfare > S::zero()) {
        return Err(Error::Infeasible("the threshold mechanism's welfare is zero".into()));
    }
    Ok(opt / welfare)
}

/// Ratio of `T_k^{0,1}` on `k + 1` agents at 1/2 and `n - k - 1` at 1; equals `2n/(k + 1) - 1`.
pub fn c1_ratio<S: Scalar>(n: usize, k: usize) -> Result<S> {
    if k + 1 > n {
        return Err(Error::domain("k", k, "k + 1 <= n"));
    }
    let mut points = vec![Point::Segment(S::half()); k + 1];
    points.extend(vec![Point::Segment(S::one()); n - k - 1]);
    let profile = LocationProfile::new(points);
    let chosen = threshold_mechanism(k, S::zero(), S::one(), &profile)?;
    ratio_on(&profile, &chosen)
}

/// Evaluates the threshold mechanism on its hard profile for slack `c`.
pub fn lb_verify<S: Scalar>(n: usize, c: S, epsilon: S) -> Result<LowerBoundReport<S>> {
    let (zero, one, two) = (S::zero(), S::one(), S::count(2));
    if !(c > zero && c <= two) {
        return Err(Error::domain("c", c, "(0, 2]"));
    }
    if !(epsilon > zero && epsilon < S::half()) {
        return Err(Error::domain("epsilon", epsilon, "(0, 1/2)"));
    }
    let exact = two * S::count(n) / (two + c);
    let ceiling = -((S::tie_tolerance() - exact).floor());
    let k0 = ceiling
        .to_usize()
        .ok_or_else(|| Error::domain("n", n, "k0 representable"))?;
    if k0 >= n {
        return Err(Error::domain("n", n, "k0 = ceil(2n/(2 + c)) < n"));
    }
    let (k, m) = (S::count(k0), S::count(n - k0));
    let mut points = vec![Point::Segment(zero); k0];
    points.extend(vec![Point::Segment(S::half() + epsilon); n - k0]);
    let profile = LocationProfile::new(points);
    let chosen = threshold_mechanism(k0, zero, one, &profile)?;
    let ratio = ratio_on(&profile, &chosen)?;
    let four = two + two;
    Ok(LowerBoundReport {
        n,
        c,
        epsilon,
        k0,
        chosen,
        ratio,
        closed_form: (k + m * (S::half() - epsilon)) / (m * (S::half() + epsilon)),
        limit: one + four / c,
        epsilon_limit: (S::count(n) + k) / m,
        c1_ratio: c1_ratio(n, k0).ok(),
    })
}
