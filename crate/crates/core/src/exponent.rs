//! Decay-rate computations: the sharp trilinear exponent from the relative
//! multiplicity, the bilinear rate from the diagonal of the mixed-derivative
//! polyhedron, per-face rates, and the assembled analysis report.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::AlgebraError;
use crate::polygon::NewtonPolygon;
use crate::puiseux::PuiseuxPoly;
use crate::rat::{rat_i64, rat_string};

/// A face of the polygon of P with its decay factor and local rate.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceRate {
    pub face: String,
    pub d: BigRational,
    /// `1 / (2 (3 + d))`
    pub rate: BigRational,
}

/// Everything the analysis pipeline knows about one phase.
#[derive(Debug, Clone)]
pub struct ExponentReport {
    pub phase: String,
    /// `P = d_x d_y (d_x - d_y) S`, rendered.
    pub p_rendered: String,
    /// mult(P); None encodes minus infinity (P identically zero).
    pub mult_p: Option<BigRational>,
    /// mult(P) + 3; None when degenerate.
    pub mult_pi: Option<BigRational>,
    /// `1 / (2 mult_pi)`; None means no decay.
    pub trilinear_exponent: Option<BigRational>,
    /// Phong-Stein delta from the mixed derivative; None when degenerate.
    pub delta_s: Option<BigRational>,
    /// `1 / (2 delta_S)`.
    pub bilinear_exponent: Option<BigRational>,
    pub faces: Vec<FaceRate>,
    pub star_vertex: Option<String>,
    pub degenerate_trilinear: bool,
    pub degenerate_bilinear: bool,
    /// Normalization record (A, B) when a general projection triple was
    /// reduced to the standard one.
    pub projection: Option<(BigRational, BigRational)>,
}

fn rate_from_d(d: &BigRational) -> BigRational {
    BigRational::one() / (rat_i64(2) * (rat_i64(3) + d))
}

/// Per-face rates `1/(2(3+d))` of the polygon of P; the maximum over faces
/// equals the trilinear exponent through `mult(P) = p* + q*`.
pub fn face_rates(p: &PuiseuxPoly) -> Result<Vec<FaceRate>, AlgebraError> {
    let polygon = NewtonPolygon::build(p)?;
    Ok(polygon
        .decay_factors()
        .into_iter()
        .map(|f| FaceRate {
            face: polygon.render_face(f.face),
            d: f.d.clone(),
            rate: rate_from_d(&f.d),
        })
        .collect())
}

/// The Phong-Stein exponent: `delta_S = 1 + inf{t : (t,t) in N(d_x d_y S)}`,
/// computed exactly from the supporting half-planes of the polyhedron.
/// None when the mixed derivative vanishes identically.
pub fn phong_stein_delta(s: &PuiseuxPoly) -> Result<Option<BigRational>, AlgebraError> {
    let mixed = s.mixed_derivative()?;
    if mixed.is_zero() {
        return Ok(None);
    }
    let polygon = NewtonPolygon::build(&mixed)?;
    // (t,t) is in the polyhedron iff t >= p_leftmost, t >= q_rightmost and
    // (1 + m_E) t >= e_E for every compact edge.
    let mut t = polygon.p_of(polygon.leftmost());
    let q_right = rat_i64(polygon.rightmost().y as i64);
    if q_right > t {
        t = q_right;
    }
    for e in polygon.edges() {
        let cand = &e.e / (BigRational::one() + &e.m);
        if cand > t {
            t = cand;
        }
    }
    Ok(Some(BigRational::one() + t))
}

/// Reduces a general projection triple (three pairwise independent linear
/// forms) to the standard one, returning the normalized phase `S_{A,B}` and
/// the record (A, B).
pub fn reduce_general_projections(
    s: &PuiseuxPoly,
    pi: [(BigRational, BigRational); 3],
) -> Result<(PuiseuxPoly, (BigRational, BigRational)), AlgebraError> {
    for (i, j) in [(0usize, 1usize), (0, 2), (1, 2)] {
        let det = &pi[i].0 * &pi[j].1 - &pi[i].1 * &pi[j].0;
        if det.is_zero() {
            return Err(AlgebraError::DegenerateProjection {
                which: format!("pi_{} and pi_{} are proportional", i + 1, j + 1),
            });
        }
    }
    // Coordinates (u, v) = (pi_1, pi_2); then pi_3 = A u + B v.
    let det = &pi[0].0 * &pi[1].1 - &pi[0].1 * &pi[1].0;
    // Inverse of [[a1, b1], [a2, b2]].
    let inv = [
        [&pi[1].1 / &det, -&pi[0].1 / &det],
        [-&pi[1].0 / &det, &pi[0].0 / &det],
    ];
    let a = &pi[2].0 * &inv[0][0] + &pi[2].1 * &inv[1][0];
    let b = &pi[2].0 * &inv[0][1] + &pi[2].1 * &inv[1][1];
    // x = inv[0][0] u + inv[0][1] v, y = inv[1][0] u + inv[1][1] v.
    let s_uv = s.linear_substitute(&inv[0][0], &inv[0][1], &inv[1][0], &inv[1][1])?;
    // S_{A,B}(u, v) = S_uv(u / A, v / B).
    let s_ab = s_uv.axis_scale(&(BigRational::one() / &a), &(BigRational::one() / &b));
    Ok((s_ab, (a, b)))
}

/// Runs the full exponent pipeline on a phase with integer exponents.
pub fn analyze(s: &PuiseuxPoly, phase_text: &str) -> Result<ExponentReport, AlgebraError> {
    analyze_with_projection(s, phase_text, None)
}

pub fn analyze_with_projection(
    s: &PuiseuxPoly,
    phase_text: &str,
    projection: Option<[(BigRational, BigRational); 3]>,
) -> Result<ExponentReport, AlgebraError> {
    let (s_norm, projection_record) = match projection {
        None => (s.clone(), None),
        Some(pi) => {
            let (s_ab, ab) = reduce_general_projections(s, pi)?;
            (s_ab, Some(ab))
        }
    };
    let p = s_norm.trilinear_derivative()?;
    let mult_p = p.mult();
    let degenerate_trilinear = p.is_zero();
    let mult_pi = mult_p.as_ref().map(|m| m + rat_i64(3));
    let trilinear_exponent = mult_pi
        .as_ref()
        .map(|m| BigRational::one() / (rat_i64(2) * m));
    let delta_s = phong_stein_delta(&s_norm)?;
    let degenerate_bilinear = delta_s.is_none();
    let bilinear_exponent = delta_s
        .as_ref()
        .map(|d| BigRational::one() / (rat_i64(2) * d));
    let (faces, star_vertex) = if p.is_zero() {
        (Vec::new(), None)
    } else {
        let polygon = NewtonPolygon::build(&p)?;
        let star = polygon.star_vertex();
        (face_rates(&p)?, Some(polygon.render_vertex(star)))
    };
    Ok(ExponentReport {
        phase: phase_text.to_string(),
        p_rendered: p.render(),
        mult_p,
        mult_pi,
        trilinear_exponent,
        delta_s,
        bilinear_exponent,
        faces,
        star_vertex,
        degenerate_trilinear,
        degenerate_bilinear,
        projection: projection_record,
    })
}

fn opt_rat_json(v: &Option<BigRational>) -> Value {
    match v {
        Some(r) => json!(rat_string(r)),
        None => Value::Null,
    }
}

impl ExponentReport {
    /// JSON per the documented schema; exact fields are fraction strings.
    pub fn to_json(&self) -> Value {
        json!({
            "phase": self.phase,
            "P": self.p_rendered,
            "multP": match &self.mult_p {
                Some(r) => json!(rat_string(r)),
                None => json!("-inf"),
            },
            "multPi": match &self.mult_pi {
                Some(r) => json!(rat_string(r)),
                None => json!("-inf"),
            },
            "trilinear_exponent": opt_rat_json(&self.trilinear_exponent),
            "delta_S": opt_rat_json(&self.delta_s),
            "bilinear_exponent": opt_rat_json(&self.bilinear_exponent),
            "faces": self.faces.iter().map(|f| json!({
                "face": f.face,
                "d": rat_string(&f.d),
                "rate": rat_string(&f.rate),
            })).collect::<Vec<_>>(),
            "star_vertex": self.star_vertex,
            "degenerate_trilinear": self.degenerate_trilinear,
            "degenerate_bilinear": self.degenerate_bilinear,
            "projection": self.projection.as_ref().map(|(a, b)| json!({
                "A": rat_string(a),
                "B": rat_string(b),
            })),
        })
    }

    /// The rate of the face with the largest decay factor (attained at the
    /// star vertex, where d = mult(P)). Rates decrease in d, so this is the
    /// order-minimum over faces and matches the trilinear exponent exactly.
    pub fn sharp_face_rate(&self) -> Option<BigRational> {
        self.faces.iter().map(|f| f.rate.clone()).min()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;
    use crate::rat::rat;

    fn report(text: &str) -> ExponentReport {
        analyze(&parse_poly(text).unwrap(), text).unwrap()
    }

    #[test]
    fn simply_nondegenerate_phase() {
        let r = report("x^2*y");
        assert_eq!(r.mult_pi, Some(rat_i64(3)));
        assert_eq!(r.trilinear_exponent, Some(rat(1, 6)));
        assert!(!r.degenerate_trilinear);
    }

    #[test]
    fn degenerate_phase_no_decay() {
        let r = report("x^2 + y^2 + (x+y)^2");
        assert!(r.degenerate_trilinear);
        assert_eq!(r.trilinear_exponent, None);
        assert_eq!(r.mult_p, None);
    }

    #[test]
    fn cubic_cubic_phase() {
        let r = report("x^3*y^3");
        assert_eq!(r.mult_p, Some(rat_i64(3)));
        assert_eq!(r.mult_pi, Some(rat_i64(6)));
        assert_eq!(r.trilinear_exponent, Some(rat(1, 12)));
        // delta_S: d_x d_y (x^3 y^3) = 9 x^2 y^2, diagonal hits (2,2).
        assert_eq!(r.delta_s, Some(rat_i64(3)));
        assert_eq!(r.bilinear_exponent, Some(rat(1, 6)));
    }

    #[test]
    fn phong_stein_examples() {
        let d = phong_stein_delta(&parse_poly("x^2*y^2").unwrap()).unwrap();
        assert_eq!(d, Some(rat_i64(2)));
        let d = phong_stein_delta(&parse_poly("x + y").unwrap()).unwrap();
        assert_eq!(d, None);
        let d = phong_stein_delta(&parse_poly("x^3*y^2").unwrap()).unwrap();
        assert_eq!(d, Some(rat_i64(3)));
    }

    #[test]
    fn face_rate_examples() {
        // P = x^5 y - x^3 y^2 + x^2 y^4: vertex (3,2) carries the largest
        // decay factor d = mult(P) = 5, hence the sharp rate 1/16 (rates
        // decrease in d, so this is the minimum over faces).
        let p = parse_poly("x^5*y - x^3*y^2 + x^2*y^4").unwrap();
        let rates = face_rates(&p).unwrap();
        let sharp = rates.iter().map(|f| f.rate.clone()).min().unwrap();
        assert_eq!(sharp, rat(1, 16));
        let v32 = rates.iter().find(|f| f.face == "V(3,2)").unwrap();
        assert_eq!(v32.rate, rat(1, 16));
        assert_eq!(v32.d, rat_i64(5));
        // Edge (2,4)-(3,2): d = 4, rate 1/14.
        let e = rates.iter().find(|f| f.face == "E(2,4)-(3,2)").unwrap();
        assert_eq!(e.d, rat_i64(4));
        assert_eq!(e.rate, rat(1, 14));
        // Monomial: single face, d = a + b.
        let rates = face_rates(&parse_poly("x^3*y^2").unwrap()).unwrap();
        assert_eq!(rates.len(), 1);
        assert_eq!(rates[0].d, rat_i64(5));
        assert_eq!(rates[0].rate, rat(1, 16));
    }

    #[test]
    fn sharp_face_rate_equals_trilinear_exponent() {
        for text in ["x^3*y^3", "x^2*y^5 + x^4*y", "x^2*y + x*y^4"] {
            let r = report(text);
            assert_eq!(
                r.sharp_face_rate(),
                r.trilinear_exponent,
                "mismatch for {text}"
            );
        }
    }

    #[test]
    fn projection_reduction_examples() {
        let one = BigRational::one();
        // A = B = 1: S unchanged.
        let s = parse_poly("x*y").unwrap();
        let (s_ab, (a, b)) = reduce_general_projections(
            &s,
            [
                (one.clone(), BigRational::zero()),
                (BigRational::zero(), one.clone()),
                (one.clone(), one.clone()),
            ],
        )
        .unwrap();
        assert_eq!(s_ab, s);
        assert_eq!(a, rat_i64(1));
        assert_eq!(b, rat_i64(1));

        // A = 2, B = 1, S = xy -> uv/2.
        let (s_ab, (a, _)) = reduce_general_projections(
            &s,
            [
                (one.clone(), BigRational::zero()),
                (BigRational::zero(), one.clone()),
                (rat_i64(2), one.clone()),
            ],
        )
        .unwrap();
        assert_eq!(a, rat_i64(2));
        assert_eq!(s_ab, parse_poly("1/2*x*y").unwrap());

        // pi_3 = x - y is independent: accepted, S(u, -v).
        let s2 = parse_poly("x*y^3 + x^2").unwrap();
        let (s_ab, (a, b)) = reduce_general_projections(
            &s2,
            [
                (one.clone(), BigRational::zero()),
                (BigRational::zero(), one.clone()),
                (one.clone(), -one.clone()),
            ],
        )
        .unwrap();
        assert_eq!(a, rat_i64(1));
        assert_eq!(b, rat_i64(-1));
        assert_eq!(s_ab, parse_poly("-x*y^3 + x^2").unwrap());

        // Proportional pair rejected.
        let err = reduce_general_projections(
            &s,
            [
                (one.clone(), BigRational::zero()),
                (rat_i64(3), BigRational::zero()),
                (one.clone(), one.clone()),
            ],
        );
        assert!(matches!(err, Err(AlgebraError::DegenerateProjection { .. })));
    }

    #[test]
    fn swap_symmetry() {
        for text in ["x^2*y + y^3*x^2", "x^3*y^3 + x^5", "x^2*y"] {
            let s = parse_poly(text).unwrap();
            let swapped = s.swap_xy().unwrap();
            let a = analyze(&s, text).unwrap();
            let b = analyze(&swapped, text).unwrap();
            assert_eq!(a.trilinear_exponent, b.trilinear_exponent, "{text}");
        }
    }

    #[test]
    fn report_json_shape() {
        let r = report("x^2*y");
        let v = r.to_json();
        assert_eq!(v["trilinear_exponent"], json!("1/6"));
        assert_eq!(v["multPi"], json!("3"));
        assert_eq!(v["degenerate_trilinear"], json!(false));
        let r = report("x^2 + y^2 + (x+y)^2");
        assert_eq!(r.to_json()["multP"], json!("-inf"));
    }
}
