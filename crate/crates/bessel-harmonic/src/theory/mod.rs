//! Power-weight boundedness regions on `L^p((0, ∞), x^δ dx)` and the
//! quantitative sharpness experiments behind their boundaries.

mod exact;
mod sharpness;

pub use exact::{Rat, Real};
pub use sharpness::*;

use crate::error::{invalid, Error, Result};
use crate::operators::WeightedSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MappedOperator {
    /// Heat maximal operator `W_*`.
    WMax,
    /// Poisson maximal operator `P_*`.
    PMax,
    Riesz,
    RieszAdjoint,
    /// Heat square function.
    G,
    /// `H_0^η`.
    H0,
    /// `H_∞^η`.
    HInf,
}

impl MappedOperator {
    pub const ALL: [MappedOperator; 7] = [
        MappedOperator::WMax,
        MappedOperator::PMax,
        MappedOperator::Riesz,
        MappedOperator::RieszAdjoint,
        MappedOperator::G,
        MappedOperator::H0,
        MappedOperator::HInf,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            MappedOperator::WMax => "wmax",
            MappedOperator::PMax => "pmax",
            MappedOperator::Riesz => "riesz",
            MappedOperator::RieszAdjoint => "riesz-adjoint",
            MappedOperator::G => "g",
            MappedOperator::H0 => "h0",
            MappedOperator::HInf => "hinf",
        }
    }

    pub fn parse(s: &str) -> Option<MappedOperator> {
        MappedOperator::ALL.into_iter().find(|o| o.as_str() == s)
    }

    pub fn is_hardy(&self) -> bool {
        matches!(self, MappedOperator::H0 | MappedOperator::HInf)
    }
}

/// Which boundedness question is asked. `param` is `λ` for the Bessel
/// operators and `η` for the Hardy operators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MappingQuery {
    pub operator: MappedOperator,
    pub param: f64,
    pub space: WeightedSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct MappingClassSet {
    pub strong: bool,
    pub weak: bool,
    pub restricted_weak: bool,
}

impl MappingClassSet {
    pub const EMPTY: MappingClassSet = MappingClassSet { strong: false, weak: false, restricted_weak: false };

    fn closed(strong: bool, weak: bool, restricted_weak: bool) -> Self {
        let weak = weak || strong;
        MappingClassSet { strong, weak, restricted_weak: restricted_weak || weak }
    }

    pub fn is_monotone(&self) -> bool {
        (!self.strong || self.weak) && (!self.weak || self.restricted_weak)
    }
}

/// How much the answer of the classifier can be trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Confidence {
    /// An if-and-only-if statement.
    Characterization,
    /// Sufficient conditions only; a negative flag means "not established".
    Sufficient,
    /// Obtained by the interval substitution for the conjugated operator.
    Remark,
    /// As `Remark`, at `λ = 0` where the conjugated setting is singular.
    RemarkSingular,
}

impl Confidence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Confidence::Characterization => "characterization",
            Confidence::Sufficient => "sufficient",
            Confidence::Remark => "remark",
            Confidence::RemarkSingular => "remark-singular",
        }
    }
}

/// Exponent `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Exponent {
    Finite(Real),
    Infinite,
}

impl Exponent {
    pub fn from_f64(p: f64) -> Exponent {
        if p.is_infinite() {
            Exponent::Infinite
        } else {
            Exponent::Finite(Real::from_f64(p))
        }
    }
}

fn r(n: i64) -> Real {
    Real::int(n)
}

fn half() -> Real {
    Real::Exact(Rat::new(1, 2).expect("nonzero denominator"))
}

fn open(lo: Real, x: Real, hi: Real) -> bool {
    lo < x && x < hi
}

fn closed(lo: Real, x: Real, hi: Real) -> bool {
    lo <= x && x <= hi
}

fn out_of_domain<T>(op: MappedOperator, what: &str) -> Result<T> {
    invalid(format!("{} is not classified {what}", op.as_str()))
}

fn validate_param(op: MappedOperator, param: Real) -> Result<()> {
    if op.is_hardy() {
        if !(param > r(-1)) {
            return invalid(format!("Hardy operators need eta > -1, got {}", param.to_f64()));
        }
    } else if !(param > -half()) {
        return invalid(format!("Bessel operators need lambda > -1/2, got {}", param.to_f64()));
    }
    Ok(())
}

/// Exact classifier on rational (or float) inputs.
pub fn classify_exact(op: MappedOperator, param: Real, p: Exponent, delta: Real) -> Result<MappingClassSet> {
    validate_param(op, param)?;
    let p = match p {
        Exponent::Infinite => {
            return match op {
                MappedOperator::WMax | MappedOperator::PMax | MappedOperator::H0 => Ok(MappingClassSet::closed(true, true, true)),
                MappedOperator::HInf => Ok(MappingClassSet::closed(param > r(0), false, false)),
                _ => out_of_domain(op, "at p = infinity"),
            };
        }
        Exponent::Finite(p) => p,
    };
    if !(p >= r(1)) {
        return invalid(format!("classification needs p >= 1, got {}", p.to_f64()));
    }
    let (l, d) = (param, delta);
    let p_gt_1 = p > r(1);
    let set = match op {
        MappedOperator::WMax | MappedOperator::PMax | MappedOperator::G => {
            let right = (r(2) * l + r(1)) * p - r(1);
            let inside = open(r(-1), d, right);
            MappingClassSet::closed(p_gt_1 && inside, inside || d == r(2) * l, r(-1) < d && d <= right)
        }
        MappedOperator::Riesz => {
            let left = r(-1) - p;
            let right = (r(2) * l + r(1)) * p - r(1);
            let inside = open(left, d, right);
            MappingClassSet::closed(p_gt_1 && inside, inside || d == r(-2) || d == r(2) * l, closed(left, d, right))
        }
        MappedOperator::RieszAdjoint => {
            let right = r(2) * (l + r(1)) * p - r(1);
            let inside = open(r(-1), d, right);
            MappingClassSet::closed(p_gt_1 && inside, inside || d == r(2) * l + r(1), r(-1) < d && d <= right)
        }
        MappedOperator::H0 => {
            let edge = p * (l + r(1)) - r(1);
            if p_gt_1 {
                MappingClassSet::closed(d < edge, false, d == edge)
            } else {
                MappingClassSet::closed(false, d <= l, false)
            }
        }
        MappedOperator::HInf => {
            if p_gt_1 {
                let edge = -(l * p) - r(1);
                MappingClassSet::closed(edge < d, false, l != r(0) && d == edge)
            } else {
                let edge = -l - r(1);
                let weak = if l == r(0) { edge < d } else { edge <= d };
                MappingClassSet::closed(false, weak, false)
            }
        }
    };
    Ok(set)
}

/// Classifies a query with the exact value of each float input.
pub fn classify(q: &MappingQuery) -> Result<MappingClassSet> {
    if !q.param.is_finite() {
        return invalid("operator parameter must be finite");
    }
    classify_exact(q.operator, Real::from_f64(q.param), Exponent::from_f64(q.space.p), Real::from_f64(q.space.delta))
}

pub fn confidence(op: MappedOperator) -> Confidence {
    if op.is_hardy() {
        Confidence::Sufficient
    } else {
        Confidence::Characterization
    }
}

/// Conjugated operators `(xy)^λ K(x, y)` on Lebesgue measure: the intervals
/// move by `-λp`, so the query is answered at `δ + λp` in the original setting.
pub fn classify_tilde_exact(op: MappedOperator, lambda: Real, p: Exponent, delta: Real) -> Result<(MappingClassSet, Confidence)> {
    if !matches!(op, MappedOperator::WMax | MappedOperator::Riesz | MappedOperator::G) {
        return out_of_domain(op, "in the conjugated setting");
    }
    validate_param(op, lambda)?;
    let Exponent::Finite(pf) = p else {
        return out_of_domain(op, "at p = infinity in the conjugated setting");
    };
    let set = classify_exact(op, lambda, p, delta + lambda * pf)?;
    let conf = if lambda == r(0) { Confidence::RemarkSingular } else { Confidence::Remark };
    Ok((set, conf))
}

pub fn classify_tilde(q: &MappingQuery) -> Result<(MappingClassSet, Confidence)> {
    if !q.param.is_finite() {
        return invalid("operator parameter must be finite");
    }
    classify_tilde_exact(q.operator, Real::from_f64(q.param), Exponent::from_f64(q.space.p), Real::from_f64(q.space.delta))
}

/// `start:stop:step` (inclusive, exact in decimal) or a comma list.
pub fn parse_grid(s: &str) -> Result<Vec<Real>> {
    let msg = || Error::InvalidInput(format!("cannot parse grid '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => s.split(',').map(|v| Real::parse(v).ok_or_else(msg)).collect(),
        3 => {
            let (Some(a), Some(b), Some(h)) = (Real::parse(parts[0]), Real::parse(parts[1]), Real::parse(parts[2])) else {
                return Err(msg());
            };
            if !(h > r(0)) || b < a {
                return invalid(format!("grid '{s}' needs a positive step and start <= stop"));
            }
            let count = ((b - a).to_f64() / h.to_f64()).floor() as i64;
            if count > 1_000_000 {
                return invalid(format!("grid '{s}' has too many nodes"));
            }
            let mut out = Vec::new();
            for i in 0..=count + 1 {
                let v = a + r(i) * h;
                if v > b {
                    break;
                }
                out.push(v);
            }
            Ok(out)
        }
        _ => Err(msg()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionNode {
    pub p: Real,
    pub delta: Real,
    pub classes: MappingClassSet,
}

/// Class sets on a `p × δ` grid, `p`-major. Nodes with `p < 1` carry no class.
pub fn region_map(op: MappedOperator, param: Real, ps: &[Real], deltas: &[Real], tilde: bool) -> Result<Vec<RegionNode>> {
    validate_param(op, param)?;
    let mut out = Vec::with_capacity(ps.len() * deltas.len());
    for &p in ps {
        for &delta in deltas {
            let classes = if p < r(1) {
                MappingClassSet::EMPTY
            } else if tilde {
                classify_tilde_exact(op, param, Exponent::Finite(p), delta)?.0
            } else {
                classify_exact(op, param, Exponent::Finite(p), delta)?
            };
            out.push(RegionNode { p, delta, classes });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(op: MappedOperator, param: f64, p: f64, delta: f64) -> MappingQuery {
        MappingQuery { operator: op, param, space: WeightedSpace::new(p, delta).unwrap() }
    }

    fn flags(s: MappingClassSet) -> (bool, bool, bool) {
        (s.strong, s.weak, s.restricted_weak)
    }

    #[test]
    fn maximal_examples() {
        use MappedOperator::*;
        assert_eq!(flags(classify(&q(WMax, 1.0, 2.0, 3.0)).unwrap()), (true, true, true));
        assert_eq!(flags(classify(&q(WMax, 1.0, 1.0, 2.0)).unwrap()), (false, true, true));
        assert_eq!(flags(classify(&q(WMax, 1.0, 2.0, 5.0)).unwrap()), (false, false, true));
        assert_eq!(flags(classify(&q(WMax, 1.0, 2.0, 5.5)).unwrap()), (false, false, false));
        assert_eq!(flags(classify(&q(WMax, 1.0, 2.0, -1.0)).unwrap()), (false, false, false));
        assert_eq!(flags(classify(&q(PMax, 1.0, f64::INFINITY, 100.0)).unwrap()), (true, true, true));
        assert!(classify(&q(G, 1.0, f64::INFINITY, 0.0)).is_err());
    }

    #[test]
    fn riesz_examples() {
        use MappedOperator::*;
        assert_eq!(flags(classify(&q(Riesz, 1.0, 1.0, -2.0)).unwrap()), (false, true, true));
        assert_eq!(flags(classify(&q(Riesz, 1.0, 1.0, 0.0)).unwrap()), (false, true, true));
        assert_eq!(flags(classify(&q(Riesz, 1.0, 2.0, -3.0)).unwrap()), (false, false, true));
        assert_eq!(flags(classify(&q(Riesz, 1.0, 2.0, -2.9)).unwrap()), (true, true, true));
        assert_eq!(flags(classify(&q(RieszAdjoint, 1.0, 1.0, 3.0)).unwrap()), (false, true, true));
        assert_eq!(flags(classify(&q(RieszAdjoint, 1.0, 2.0, 7.0)).unwrap()), (false, false, true));
        assert_eq!(flags(classify(&q(RieszAdjoint, 1.0, 2.0, -1.0)).unwrap()), (false, false, false));
    }

    #[test]
    fn hardy_examples() {
        use MappedOperator::*;
        assert_eq!(flags(classify(&q(H0, 0.0, 2.0, 0.5)).unwrap()), (true, true, true));
        assert_eq!(flags(classify(&q(H0, 0.0, 2.0, 1.0)).unwrap()), (false, false, true));
        assert_eq!(flags(classify(&q(H0, 1.0, 1.0, 1.0)).unwrap()), (false, true, true));
        assert_eq!(flags(classify(&q(HInf, 0.0, 1.0, -1.0)).unwrap()), (false, false, false));
        assert_eq!(flags(classify(&q(HInf, 0.5, 1.0, -1.5)).unwrap()), (false, true, true));
        assert_eq!(flags(classify(&q(HInf, 0.0, f64::INFINITY, 0.0)).unwrap()), (false, false, false));
        assert_eq!(flags(classify(&q(HInf, 0.5, 2.0, -2.0)).unwrap()), (false, false, true));
        assert!(classify(&q(H0, -1.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn tilde_examples() {
        use MappedOperator::*;
        let (s, c) = classify_tilde(&q(WMax, 1.0, 2.0, 0.0)).unwrap();
        assert!(s.strong && c == Confidence::Remark);
        let (s, _) = classify_tilde(&q(Riesz, 1.0, 2.0, -4.5)).unwrap();
        assert!(s.strong);
        let (s, _) = classify_tilde(&q(Riesz, 1.0, 2.0, -5.0)).unwrap();
        assert_eq!(flags(s), (false, false, true));
        for &d in &[-1.5, -1.0, 0.0, 1.0, 2.0] {
            let (s, c) = classify_tilde(&q(WMax, 0.0, 2.0, d)).unwrap();
            assert_eq!(s, classify(&q(WMax, 0.0, 2.0, d)).unwrap());
            assert_eq!(c, Confidence::RemarkSingular);
        }
        assert!(classify_tilde(&q(PMax, 1.0, 2.0, 0.0)).is_err());
    }

    #[test]
    fn invalid_lambda() {
        assert!(classify(&q(MappedOperator::WMax, -0.5, 2.0, 0.0)).is_err());
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("0.9:4:0.05").unwrap();
        assert_eq!(g.len(), 63);
        assert!(g[2] == Real::parse("1").unwrap());
        assert!(*g.last().unwrap() == Real::parse("4").unwrap());
        assert_eq!(parse_grid("1,2.5,inf").ok(), None);
        assert_eq!(parse_grid("1,2.5").unwrap().len(), 2);
        assert!(parse_grid("3:1:0.5").is_err());
    }

    #[test]
    fn region_map_strip() {
        let l = Real::int(1);
        let ps = parse_grid("0.9:4:0.05").unwrap();
        let ds = parse_grid("-3:7:0.1").unwrap();
        let map = region_map(MappedOperator::WMax, l, &ps, &ds, false).unwrap();
        assert_eq!(map.len(), ps.len() * ds.len());
        for n in &map {
            let (p, d) = (n.p.to_f64(), n.delta.to_f64());
            assert!(n.classes.is_monotone());
            if p < 1.0 {
                assert_eq!(n.classes, MappingClassSet::EMPTY);
            }
            if p > 1.0 && d > -1.0 + 1e-9 && d < 3.0 * p - 1.0 - 1e-9 {
                assert!(n.classes.strong);
            }
        }
        // exact boundary node p = 2, δ = 5
        let b = map.iter().find(|n| n.p == Real::int(2) && n.delta == Real::int(5)).unwrap();
        assert_eq!(flags(b.classes), (false, false, true));
    }
}
