//! Exponent regions for the bilinear, trilinear and m-linear maximal bounds.
//!
//! Every predicate is evaluated in exact rational arithmetic: an `f64` is a
//! dyadic rational, so converting inputs with [`BigRational::from_float`]
//! loses nothing and boundary cases such as `x + y = 3/2` are decided exactly.
//! Reciprocal exponents are stored as coordinates in `[0, 1]`, with `0`
//! standing for `p = ∞`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Exponent vector `a = (a_1, …, a_m)` of the surface `Σ |y^j|^{a_j} = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Anisotropy(Vec<f64>);

impl Anisotropy {
    pub fn new(a: impl Into<Vec<f64>>) -> Result<Self> {
        let a = a.into();
        if a.len() < 2 {
            return Err(Error::precondition(format!(
                "anisotropy needs at least two exponents, got {}",
                a.len()
            )));
        }
        if let Some(bad) = a.iter().find(|v| !(v.is_finite() && **v >= 1.0)) {
            return Err(Error::Domain(format!("exponent {bad} is not in [1, ∞)")));
        }
        Ok(Anisotropy(a))
    }

    pub fn pair(a1: f64, a2: f64) -> Result<Self> {
        Self::new(vec![a1, a2])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.0[i]
    }

    pub fn swapped(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        Anisotropy(v)
    }

    fn expect_len(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::Arity { expected: m, got: self.0.len() });
        }
        Ok(())
    }
}

/// A point `(1/p_1, …, 1/p_m)` of reciprocal Lebesgue exponents.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentPoint(Vec<f64>);

impl ExponentPoint {
    pub fn new(coords: impl Into<Vec<f64>>) -> Result<Self> {
        let coords = coords.into();
        if let Some(bad) = coords.iter().find(|c| !(**c >= 0.0 && **c <= 1.0)) {
            return Err(Error::Domain(format!("coordinate {bad} is outside [0, 1]")));
        }
        Ok(ExponentPoint(coords))
    }

    pub fn xy(x: f64, y: f64) -> Result<Self> {
        Self::new(vec![x, y])
    }

    /// Build from Lebesgue exponents; `f64::INFINITY` maps to 0.
    pub fn from_exponents(ps: &[f64]) -> Result<Self> {
        let coords: Vec<f64> = ps
            .iter()
            .map(|&p| if p.is_infinite() { 0.0 } else { 1.0 / p })
            .collect();
        Self::new(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn expect_len(&self, m: usize) -> Result<()> {
        if self.0.len() != m {
            return Err(Error::Arity { expected: m, got: self.0.len() });
        }
        Ok(())
    }

    fn exact(&self) -> Vec<BigRational> {
        self.0.iter().map(|&c| rat(c)).collect()
    }
}

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn pos(x: BigRational) -> BigRational {
    if x.is_positive() {
        x
    } else {
        BigRational::zero()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Dimension(n));
    }
    Ok(())
}

/// `(2n-1)/n` for the bilinear sum constraint, `(mn-1)/n` in general.
fn sum_bound(m: usize, n: usize) -> BigRational {
    BigRational::new(BigInt::from(m * n - 1), BigInt::from(n))
}

/// Upper bound `1 - (1/n - s)_+` on a coordinate, where `s` is a sum of reciprocal exponents.
fn coordinate_bound(n: usize, recip_sum: BigRational) -> BigRational {
    let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
    BigRational::one() - pos(inv_n - recip_sum)
}

fn recip(a: f64) -> BigRational {
    rat(a).recip()
}

/// Membership in `{(x, y) ∈ [0,1)² : x + y < (2n-1)/n}`.
pub fn in_p(pt: &ExponentPoint, n: usize) -> Result<bool> {
    pt.expect_len(2)?;
    check_dim(n)?;
    let c = pt.exact();
    let one = BigRational::one();
    Ok(c[0] < one && c[1] < one && (&c[0] + &c[1]) < sum_bound(2, n))
}

/// Membership in the anisotropic region; reduces to [`in_p`] when both exponents are at most `n`.
pub fn in_pa(pt: &ExponentPoint, n: usize, a: &Anisotropy) -> Result<bool> {
    a.expect_len(2)?;
    if !in_p(pt, n)? {
        return Ok(false);
    }
    let c = pt.exact();
    let (bx, by) = bilinear_bounds(n, a);
    Ok(c[0] < bx && c[1] < by)
}

/// The two coordinate bounds `(1 - (1/n - 1/a_2)_+, 1 - (1/n - 1/a_1)_+)`.
fn bilinear_bounds(n: usize, a: &Anisotropy) -> (BigRational, BigRational) {
    (
        coordinate_bound(n, recip(a.get(1))),
        coordinate_bound(n, recip(a.get(0))),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BilinearCase {
    /// `max(a_1, a_2) ≤ n`
    A,
    /// `min(a_1, a_2) ≤ n < max(a_1, a_2)`
    B,
    /// `n < min(a_1, a_2)`
    C,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CaseLabel {
    pub case: BilinearCase,
    /// For case C: whether `1/a_1 + 1/a_2 > 1/n`. For case B: whether the
    /// roles are mirrored (`a_2 ≤ n < a_1`). False in case A.
    pub subcase: bool,
}

pub fn classify_case(n: usize, a: &Anisotropy) -> Result<CaseLabel> {
    a.expect_len(2)?;
    check_dim(n)?;
    let nf = n as f64;
    let (a1, a2) = (a.get(0), a.get(1));
    let label = if a1.max(a2) <= nf {
        CaseLabel { case: BilinearCase::A, subcase: false }
    } else if a1.min(a2) <= nf {
        CaseLabel { case: BilinearCase::B, subcase: a1 > nf }
    } else {
        let lhs = recip(a1) + recip(a2);
        let rhs = BigRational::new(BigInt::one(), BigInt::from(n));
        CaseLabel { case: BilinearCase::C, subcase: lhs > rhs }
    };
    Ok(label)
}

/// A labelled corner of an exponent region, kept in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub label: &'static str,
    pub x: BigRational,
    pub y: BigRational,
}

impl Vertex {
    fn new(label: &'static str, x: BigRational, y: BigRational) -> Self {
        Vertex { label, x, y }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

pub(crate) fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

#[derive(Debug, Clone)]
pub struct RegionReport {
    pub n: usize,
    pub a: Anisotropy,
    pub case: CaseLabel,
    pub vertices: Vec<Vertex>,
}

impl RegionReport {
    pub fn vertex(&self, label: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.label == label)
    }
}

/// Labelled vertices of the region for the case `(n, a)` falls in.
pub fn vertices(n: usize, a: &Anisotropy) -> Result<RegionReport> {
    let case = classify_case(n, a)?;
    let zero = BigRational::zero;
    let one = BigRational::one;
    let ninv = BigRational::new(BigInt::one(), BigInt::from(n));
    let lower = one() - &ninv; // (n-1)/n
    let (bx, by) = bilinear_bounds(n, a);
    let verts = match case.case {
        BilinearCase::A => vec![
            Vertex::new("O", zero(), zero()),
            Vertex::new("G", one(), zero()),
            Vertex::new("Q", one(), lower.clone()),
            Vertex::new("P", lower.clone(), one()),
            Vertex::new("H", zero(), one()),
        ],
        BilinearCase::B if !case.subcase => {
            // a_1 ≤ n < a_2: H, P, Y, B (plus the origin).
            let yx = bx.clone();
            let yy = one() - recip(a.get(1));
            vec![
                Vertex::new("O", zero(), zero()),
                Vertex::new("B", bx.clone(), zero()),
                Vertex::new("Y", yx, yy),
                Vertex::new("P", lower.clone(), one()),
                Vertex::new("H", zero(), one()),
            ]
        }
        BilinearCase::B => {
            // a_2 ≤ n < a_1: the mirror image, G, Q, X, A.
            let xx = one() - recip(a.get(0));
            vec![
                Vertex::new("O", zero(), zero()),
                Vertex::new("G", one(), zero()),
                Vertex::new("Q", one(), lower.clone()),
                Vertex::new("X", xx, by.clone()),
                Vertex::new("A", zero(), by.clone()),
            ]
        }
        BilinearCase::C if case.subcase => vec![
            Vertex::new("O", zero(), zero()),
            Vertex::new("B", bx.clone(), zero()),
            Vertex::new("Y", bx.clone(), one() - recip(a.get(1))),
            Vertex::new("X", one() - recip(a.get(0)), by.clone()),
            Vertex::new("A", zero(), by.clone()),
        ],
        BilinearCase::C => vec![
            // The diagonal constraint is inactive and the region is a rectangle;
            // its upper-right corner is reported under the label Y.
            Vertex::new("O", zero(), zero()),
            Vertex::new("B", bx.clone(), zero()),
            Vertex::new("Y", bx.clone(), by.clone()),
            Vertex::new("A", zero(), by.clone()),
        ],
    };
    Ok(RegionReport { n, a: a.clone(), case, vertices: verts })
}

/// Necessary conditions for the bilinear bound (closed inequalities).
pub fn necessary_ok(pt: &ExponentPoint, n: usize, a: &Anisotropy) -> Result<bool> {
    pt.expect_len(2)?;
    a.expect_len(2)?;
    check_dim(n)?;
    let c = pt.exact();
    let nf = n as f64;
    if &c[0] + &c[1] > sum_bound(2, n) {
        return Ok(false);
    }
    let (bx, by) = bilinear_bounds(n, a);
    if a.get(1) > nf && c[0] > bx {
        return Ok(false);
    }
    if a.get(0) > nf && c[1] > by {
        return Ok(false);
    }
    Ok(true)
}

/// `1/p_i^3 = n/a_{j2} + (1 - n/a_{j2}) (1 - (1/n - 1/a_{j1})_+)` with `a_{j1} ≤ a_{j2}`
/// the two exponents other than `a_i`. Returned unclamped.
pub fn trilinear_one_over_p3(i: usize, n: usize, a: &Anisotropy) -> Result<f64> {
    Ok(to_f64(&trilinear_one_over_p3_exact(i, n, a)?))
}

pub fn trilinear_one_over_p3_exact(i: usize, n: usize, a: &Anisotropy) -> Result<BigRational> {
    a.expect_len(3)?;
    check_dim(n)?;
    if !(1..=3).contains(&i) {
        return Err(Error::precondition(format!("index {i} is not in 1..=3")));
    }
    let mut others: Vec<f64> = (0..3).filter(|&j| j != i - 1).map(|j| a.get(j)).collect();
    others.sort_by(f64::total_cmp);
    let (aj1, aj2) = (others[0], others[1]);
    let theta = int(n as i64) * recip(aj2);
    let inner = coordinate_bound(n, recip(aj1));
    Ok(theta.clone() + (BigRational::one() - theta) * inner)
}

/// Membership in the trilinear sufficiency region.
pub fn in_p3tilde(pt: &ExponentPoint, n: usize, a: &Anisotropy) -> Result<bool> {
    pt.expect_len(3)?;
    a.expect_len(3)?;
    check_dim(n)?;
    let c = pt.exact();
    let one = BigRational::one();
    if c.iter().any(|v| *v >= one) {
        return Ok(false);
    }
    let sum: BigRational = c.iter().cloned().sum();
    if sum >= sum_bound(3, n) {
        return Ok(false);
    }
    for i in 1..=3 {
        if c[i - 1] >= trilinear_one_over_p3_exact(i, n, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Necessary conditions for the m-linear bound: `Σ x_i ≤ (mn-1)/n` and
/// `x_i < 1 - (1/n - Σ_{j≠i} 1/a_j)_+`.
pub fn multilinear_necessary(pt: &ExponentPoint, n: usize, a: &Anisotropy) -> Result<bool> {
    let m = a.len();
    pt.expect_len(m)?;
    check_dim(n)?;
    let c = pt.exact();
    let sum: BigRational = c.iter().cloned().sum();
    if sum > sum_bound(m, n) {
        return Ok(false);
    }
    let recips: Vec<BigRational> = a.as_slice().iter().map(|&v| recip(v)).collect();
    let total: BigRational = recips.iter().cloned().sum();
    for i in 0..m {
        let bound = coordinate_bound(n, &total - &recips[i]);
        if c[i] >= bound {
            return Ok(false);
        }
    }
    Ok(true)
}

// --- polygons ---------------------------------------------------------------

/// Closed half-plane `nx·x + ny·y ≤ d`.
#[derive(Debug, Clone)]
pub struct HalfPlane {
    pub nx: BigRational,
    pub ny: BigRational,
    pub d: BigRational,
}

impl HalfPlane {
    pub fn new(nx: BigRational, ny: BigRational, d: BigRational) -> Self {
        HalfPlane { nx, ny, d }
    }

    fn value(&self, p: &(BigRational, BigRational)) -> BigRational {
        &self.nx * &p.0 + &self.ny * &p.1 - &self.d
    }

    pub fn contains(&self, x: &BigRational, y: &BigRational) -> bool {
        !self.value(&(x.clone(), y.clone())).is_positive()
    }

    pub fn is_tight(&self, x: &BigRational, y: &BigRational) -> bool {
        self.value(&(x.clone(), y.clone())).is_zero()
    }
}

fn unit_square() -> Vec<HalfPlane> {
    let (z, o) = (BigRational::zero, BigRational::one);
    vec![
        HalfPlane::new(-o(), z(), z()),
        HalfPlane::new(z(), -o(), z()),
        HalfPlane::new(o(), z(), o()),
        HalfPlane::new(z(), o(), o()),
    ]
}

/// Intersection of the unit square with the given half-planes, by exact
/// Sutherland–Hodgman clipping. Vertices come out counter-clockwise.
pub fn clip_unit_square(planes: &[HalfPlane]) -> Vec<(BigRational, BigRational)> {
    let (z, o) = (BigRational::zero, BigRational::one);
    let mut poly = vec![(z(), z()), (o(), z()), (o(), o()), (z(), o())];
    for hp in planes {
        if poly.is_empty() {
            break;
        }
        let mut out = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let cur = &poly[i];
            let nxt = &poly[(i + 1) % poly.len()];
            let vc = hp.value(cur);
            let vn = hp.value(nxt);
            let cin = !vc.is_positive();
            let nin = !vn.is_positive();
            if cin {
                out.push(cur.clone());
            }
            if cin != nin && !(vc.is_zero() || vn.is_zero()) {
                let t = &vc / (&vc - &vn);
                let x = &cur.0 + &t * (&nxt.0 - &cur.0);
                let y = &cur.1 + &t * (&nxt.1 - &cur.1);
                out.push((x, y));
            }
        }
        out.dedup();
        if out.len() > 1 && out.first() == out.last() {
            out.pop();
        }
        poly = out;
    }
    poly
}

/// Closure of the bilinear sufficiency region as half-planes (square sides included).
pub fn bilinear_half_planes(n: usize, a: &Anisotropy) -> Result<Vec<HalfPlane>> {
    a.expect_len(2)?;
    check_dim(n)?;
    let (z, o) = (BigRational::zero, BigRational::one);
    let (bx, by) = bilinear_bounds(n, a);
    let mut planes = unit_square();
    planes.push(HalfPlane::new(o(), o(), sum_bound(2, n)));
    planes.push(HalfPlane::new(o(), z(), bx));
    planes.push(HalfPlane::new(z(), o(), by));
    Ok(planes)
}

pub fn bilinear_polygon(n: usize, a: &Anisotropy) -> Result<Vec<(f64, f64)>> {
    let poly = clip_unit_square(&bilinear_half_planes(n, a)?);
    Ok(poly.iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect())
}

/// Which of the three curve theorems' regions to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveCase {
    /// `γ(s_0) = 0`: `1/p, 1/q < 1`, `1/p + 1/q < 1`.
    I,
    /// `γ(s_0) ≠ 0`, `s_0 = 0`: additionally `1/q < 1/m`.
    Ii,
    /// `γ(s_0) ≠ 0`, `s_0 ≠ 0`: `1/p + m/q < 1`.
    Iii,
}

pub fn curve_half_planes(case: CurveCase, m: u32) -> Vec<HalfPlane> {
    let (z, o) = (BigRational::zero, BigRational::one);
    let mm = int(m as i64);
    let mut planes = unit_square();
    match case {
        CurveCase::I => planes.push(HalfPlane::new(o(), o(), o())),
        CurveCase::Ii => {
            planes.push(HalfPlane::new(o(), o(), o()));
            planes.push(HalfPlane::new(z(), o(), mm.recip()));
        }
        CurveCase::Iii => planes.push(HalfPlane::new(o(), mm, o())),
    }
    planes
}

pub fn curve_polygon(case: CurveCase, m: u32) -> Vec<(f64, f64)> {
    clip_unit_square(&curve_half_planes(case, m))
        .iter()
        .map(|(x, y)| (to_f64(x), to_f64(y)))
        .collect()
}

/// Slice `x_3 = fixed` of the trilinear sufficiency region, in the `(x_1, x_2)` plane.
pub fn trilinear_slice_half_planes(n: usize, a: &Anisotropy, x3: f64) -> Result<Vec<HalfPlane>> {
    a.expect_len(3)?;
    let (z, o) = (BigRational::zero, BigRational::one);
    let mut planes = unit_square();
    planes.push(HalfPlane::new(o(), o(), sum_bound(3, n) - rat(x3)));
    planes.push(HalfPlane::new(o(), z(), trilinear_one_over_p3_exact(1, n, a)?));
    planes.push(HalfPlane::new(z(), o(), trilinear_one_over_p3_exact(2, n, a)?));
    Ok(planes)
}

pub fn trilinear_slice_polygon(n: usize, a: &Anisotropy, x3: f64) -> Result<Vec<(f64, f64)>> {
    let bound3 = trilinear_one_over_p3_exact(3, n, a)?;
    if rat(x3) >= bound3 {
        return Ok(Vec::new());
    }
    let poly = clip_unit_square(&trilinear_slice_half_planes(n, a, x3)?);
    Ok(poly.iter().map(|(x, y)| (to_f64(x), to_f64(y))).collect())
}

/// Exact rational `num/den`, convenient in tests and reports.
pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: f64, y: f64) -> ExponentPoint {
        ExponentPoint::xy(x, y).unwrap()
    }

    fn a2(a1: f64, a2: f64) -> Anisotropy {
        Anisotropy::pair(a1, a2).unwrap()
    }

    #[test]
    fn in_p_examples() {
        assert!(in_p(&pt(0.7, 0.7), 2).unwrap());
        assert!(!in_p(&pt(0.8, 0.8), 2).unwrap());
        assert!(!in_p(&pt(1.0, 0.0), 2).unwrap());
        assert!(!in_p(&pt(0.75, 0.75), 2).unwrap(), "boundary excluded");
    }

    #[test]
    fn arity_errors() {
        let p3 = ExponentPoint::new(vec![0.1, 0.1, 0.1]).unwrap();
        assert!(matches!(in_p(&p3, 2), Err(Error::Arity { expected: 2, got: 3 })));
        assert!(matches!(
            in_pa(&pt(0.1, 0.1), 2, &Anisotropy::new(vec![2.0, 2.0, 2.0]).unwrap()),
            Err(Error::Arity { .. })
        ));
    }

    #[test]
    fn in_pa_examples() {
        assert!(!in_pa(&pt(0.9, 0.3), 2, &a2(2.0, 3.0)).unwrap());
        assert!(in_pa(&pt(0.7, 0.7), 2, &a2(2.0, 2.0)).unwrap());
        assert!(in_pa(&pt(0.5, 0.5), 2, &a2(100.0, 100.0)).unwrap());
        assert!(!in_pa(&pt(0.52, 0.5), 2, &a2(100.0, 100.0)).unwrap());
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_case(2, &a2(2.0, 2.0)).unwrap().case, BilinearCase::A);
        let b = classify_case(2, &a2(2.0, 3.0)).unwrap();
        assert_eq!((b.case, b.subcase), (BilinearCase::B, false));
        let c = classify_case(2, &a2(3.0, 3.0)).unwrap();
        assert_eq!((c.case, c.subcase), (BilinearCase::C, true));
        let c2 = classify_case(2, &a2(4.0, 4.0)).unwrap();
        assert_eq!((c2.case, c2.subcase), (BilinearCase::C, false));
    }

    #[test]
    fn case_b_vertices_are_exact() {
        let r = vertices(2, &a2(2.0, 3.0)).unwrap();
        let v = |l| r.vertex(l).unwrap().clone();
        assert_eq!((v("H").x, v("H").y), (ratio(0, 1), ratio(1, 1)));
        assert_eq!((v("P").x, v("P").y), (ratio(1, 2), ratio(1, 1)));
        assert_eq!((v("Y").x, v("Y").y), (ratio(5, 6), ratio(2, 3)));
        assert_eq!((v("B").x, v("B").y), (ratio(5, 6), ratio(0, 1)));
    }

    #[test]
    fn case_c_vertices() {
        let r = vertices(2, &a2(3.0, 3.0)).unwrap();
        let a = r.vertex("A").unwrap();
        let x = r.vertex("X").unwrap();
        assert_eq!((a.x.clone(), a.y.clone()), (ratio(0, 1), ratio(5, 6)));
        assert_eq!((x.x.clone(), x.y.clone()), (ratio(2, 3), ratio(5, 6)));
    }

    #[test]
    fn polygon_matches_labelled_vertices() {
        for (a1, a2v) in [(2.0, 2.0), (2.0, 3.0), (3.0, 2.0), (3.0, 3.0), (5.0, 6.0), (1.0, 7.0)] {
            let a = a2(a1, a2v);
            let report = vertices(2, &a).unwrap();
            let poly = clip_unit_square(&bilinear_half_planes(2, &a).unwrap());
            assert_eq!(poly.len(), report.vertices.len(), "a = {a:?}");
            for v in &report.vertices {
                assert!(
                    poly.iter().any(|(x, y)| *x == v.x && *y == v.y),
                    "vertex {} of {a:?} not on polygon",
                    v.label
                );
            }
        }
    }

    #[test]
    fn vertices_sit_on_the_closure_boundary() {
        for (a1, a2v) in [(2.0, 2.0), (2.0, 3.0), (3.0, 2.0), (3.0, 3.0), (4.0, 4.0)] {
            let a = a2(a1, a2v);
            let planes = bilinear_half_planes(2, &a).unwrap();
            for v in vertices(2, &a).unwrap().vertices {
                assert!(planes.iter().all(|h| h.contains(&v.x, &v.y)));
                assert!(planes.iter().any(|h| h.is_tight(&v.x, &v.y)));
            }
        }
    }

    #[test]
    fn necessary_examples() {
        assert!(necessary_ok(&pt(0.75, 0.75), 2, &a2(2.0, 2.0)).unwrap());
        assert!(!necessary_ok(&pt(0.9, 0.0), 2, &a2(2.0, 3.0)).unwrap());
        assert!(necessary_ok(&pt(0.0, 0.0), 2, &a2(7.0, 9.0)).unwrap());
    }

    #[test]
    fn p3_formula_examples() {
        let v = trilinear_one_over_p3(1, 2, &Anisotropy::new(vec![2.0, 2.0, 6.0]).unwrap()).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = trilinear_one_over_p3(3, 2, &Anisotropy::new(vec![4.0, 6.0, 6.0]).unwrap()).unwrap();
        assert!((v - 5.0 / 6.0).abs() < 1e-15);
        for i in 1..=3 {
            let v = trilinear_one_over_p3(i, 2, &Anisotropy::new(vec![1.0, 1.0, 1.0]).unwrap()).unwrap();
            assert!((v - 1.0).abs() < 1e-15);
        }
        assert_eq!(
            trilinear_one_over_p3_exact(3, 2, &Anisotropy::new(vec![4.0, 6.0, 6.0]).unwrap()).unwrap(),
            ratio(5, 6)
        );
    }

    #[test]
    fn p3tilde_examples() {
        let a = Anisotropy::new(vec![2.0, 2.0, 2.0]).unwrap();
        let p = |c: [f64; 3]| ExponentPoint::new(c.to_vec()).unwrap();
        assert!(in_p3tilde(&p([0.5, 0.5, 0.5]), 2, &a).unwrap());
        assert!(!in_p3tilde(&p([0.9, 0.9, 0.9]), 2, &a).unwrap());
        // 1/p_1^3 for a = (4,6,6) uses a_{j1} = a_{j2} = 6: 1/3 + (2/3)(1 - (1/2 - 1/6)) = 7/9.
        let b = Anisotropy::new(vec![4.0, 6.0, 6.0]).unwrap();
        let bound = trilinear_one_over_p3(1, 2, &b).unwrap();
        assert!((bound - 7.0 / 9.0).abs() < 1e-15);
        assert!(!in_p3tilde(&p([0.9, 0.3, 0.3]), 2, &b).unwrap());
        assert!(in_p3tilde(&p([0.7, 0.3, 0.3]), 2, &b).unwrap());
    }

    #[test]
    fn multilinear_necessary_examples() {
        let p = |c: &[f64]| ExponentPoint::new(c.to_vec()).unwrap();
        assert!(multilinear_necessary(&p(&[0.9, 0.9, 0.6]), 2, &Anisotropy::new(vec![2.0; 3]).unwrap()).unwrap());
        assert!(!multilinear_necessary(&p(&[0.8, 0.1, 0.1]), 2, &Anisotropy::new(vec![8.0; 3]).unwrap()).unwrap());
    }

    #[test]
    fn curve_regions_have_expected_corners() {
        assert_eq!(curve_polygon(CurveCase::Iii, 2).len(), 3);
        assert!(curve_polygon(CurveCase::Iii, 2).contains(&(0.0, 0.5)));
        let ii = curve_polygon(CurveCase::Ii, 3);
        assert!(ii.contains(&(2.0 / 3.0, 1.0 / 3.0)));
        assert_eq!(curve_polygon(CurveCase::I, 2).len(), 3);
    }
}
