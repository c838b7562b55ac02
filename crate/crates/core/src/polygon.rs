//! Newton polygon of a Puiseux polynomial: faces, heights, orders, decay
//! factors and the distinguished vertex where the adjacent slope parameters
//! straddle 1.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::AlgebraError;
use crate::puiseux::PuiseuxPoly;
use crate::rat::{rat_i64, rat_string};
use crate::unipoly::{RootSign, UniPoly};

/// A vertex of the polygon: x-exponent in units of `1/scale`, integer y.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Vertex {
    pub xunits: u64,
    pub y: u64,
}

/// A compact edge between consecutive vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    /// Index of the left vertex in `vertices`.
    pub left: usize,
    /// Index of the right vertex.
    pub right: usize,
    /// Slope parameter `m_E` (the edge has slope `-1/m_E`).
    pub m: BigRational,
    /// Intercept invariant `e_E = p_l + m_E q_l`.
    pub e: BigRational,
}

/// Slope parameter bound at a vertex; extremes use 0 / infinity sentinels.
#[derive(Debug, Clone, PartialEq)]
pub enum SlopeBound {
    Zero,
    Finite(BigRational),
    Infinite,
}

impl SlopeBound {
    pub fn le_one(&self) -> bool {
        match self {
            SlopeBound::Zero => true,
            SlopeBound::Finite(m) => *m <= BigRational::one(),
            SlopeBound::Infinite => false,
        }
    }

    pub fn gt_one(&self) -> bool {
        match self {
            SlopeBound::Zero => false,
            SlopeBound::Finite(m) => *m > BigRational::one(),
            SlopeBound::Infinite => true,
        }
    }

    pub fn render(&self) -> String {
        match self {
            SlopeBound::Zero => "0".into(),
            SlopeBound::Finite(m) => rat_string(m),
            SlopeBound::Infinite => "inf".into(),
        }
    }
}

/// Lower-left convex hull of the support under the quadrant-sum closure.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonPolygon {
    scale: u64,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
}

/// A face of the polygon together with its decay factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceData {
    pub face: Face,
    /// For edges: min of the two axis intercepts. For vertices: the best
    /// supporting-line value over admissible slope parameters.
    pub d: BigRational,
    /// x- and y-intercepts, present for edges.
    pub d_x: Option<BigRational>,
    pub d_y: Option<BigRational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Vertex(usize),
    Edge(usize),
}

/// Heights and root orders of a polygon, per Definition-level bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightsReport {
    /// y-coordinate of the leftmost vertex.
    pub hght_star: u64,
    /// Drop in y across the compact part.
    pub hght: u64,
    /// Total multiplicity of counted nonzero real roots, per edge.
    pub ord_per_edge: Vec<u64>,
    pub ord_total: u64,
}

impl NewtonPolygon {
    /// Builds the polygon of a nonzero polynomial.
    pub fn build(poly: &PuiseuxPoly) -> Result<Self, AlgebraError> {
        if poly.is_zero() {
            return Err(AlgebraError::ZeroPolynomial);
        }
        let scale = poly.scale();
        // Pareto-minimal support points: sorted by (x asc, y asc); keep a
        // point when its y is below everything seen at smaller x.
        let mut minimal: Vec<Vertex> = Vec::new();
        let mut best_y: Option<u64> = None;
        for (&(xu, ye), _) in poly.terms() {
            // terms() iterates keys in (x, y) lexicographic order
            match best_y {
                Some(b) if ye >= b => continue,
                _ => {
                    // A later point at the same x cannot appear: y would be
                    // larger in lexicographic order, so each x occurs once.
                    minimal.push(Vertex { xunits: xu, y: ye });
                    best_y = Some(ye);
                }
            }
        }
        // Lower convex hull of the antichain (x strictly increasing, y
        // strictly decreasing); slopes -1/m with m increasing left to right.
        let mut hull: Vec<Vertex> = Vec::new();
        for v in minimal {
            while hull.len() >= 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if !turns_left(a, b, v) {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(v);
        }
        let mut edges = Vec::new();
        for i in 0..hull.len().saturating_sub(1) {
            let l = hull[i];
            let r = hull[i + 1];
            let m = BigRational::new(
                BigInt::from(r.xunits - l.xunits),
                BigInt::from((l.y - r.y) * scale),
            );
            let p_l = BigRational::new(BigInt::from(l.xunits), BigInt::from(scale));
            let e = &p_l + &m * rat_i64(l.y as i64);
            edges.push(Edge {
                left: i,
                right: i + 1,
                m,
                e,
            });
        }
        Ok(NewtonPolygon {
            scale,
            vertices: hull,
            edges,
        })
    }

    pub fn scale(&self) -> u64 {
        self.scale
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Exact x-coordinate `p` of a vertex.
    pub fn p_of(&self, v: &Vertex) -> BigRational {
        BigRational::new(BigInt::from(v.xunits), BigInt::from(self.scale))
    }

    /// Vertex list as exact (p, q) pairs.
    pub fn vertex_coords(&self) -> Vec<(BigRational, u64)> {
        self.vertices.iter().map(|v| (self.p_of(v), v.y)).collect()
    }

    pub fn leftmost(&self) -> &Vertex {
        self.vertices.first().expect("nonempty polygon")
    }

    pub fn rightmost(&self) -> &Vertex {
        self.vertices.last().expect("nonempty polygon")
    }

    /// Slope bounds (m_l, m_r) around vertex `i`.
    pub fn slope_bounds(&self, i: usize) -> (SlopeBound, SlopeBound) {
        let left = if i == 0 {
            SlopeBound::Zero
        } else {
            SlopeBound::Finite(self.edges[i - 1].m.clone())
        };
        let right = if i == self.vertices.len() - 1 {
            SlopeBound::Infinite
        } else {
            SlopeBound::Finite(self.edges[i].m.clone())
        };
        (left, right)
    }

    /// Sum of exactly the terms of `poly` supported on edge `edge_index`.
    pub fn edge_restriction(
        &self,
        poly: &PuiseuxPoly,
        edge_index: usize,
    ) -> Result<PuiseuxPoly, AlgebraError> {
        let edge = self.edge(edge_index)?;
        let mut out = PuiseuxPoly::zero();
        for (&(xu, ye), c) in poly.terms() {
            let p = BigRational::new(BigInt::from(xu), BigInt::from(poly.scale()));
            let lhs = &p + &edge.m * rat_i64(ye as i64);
            if lhs == edge.e {
                out = out.add(&PuiseuxPoly::monomial(xu, poly.scale(), ye, c.clone()));
            }
        }
        Ok(out)
    }

    fn edge(&self, index: usize) -> Result<&Edge, AlgebraError> {
        self.edges.get(index).ok_or(AlgebraError::NoSuchEdge {
            index,
            count: self.edges.len(),
        })
    }

    /// Edge polynomial `P_E(r) = sum_{(p,q) in E} c_{p,q} r^q`, satisfying
    /// `P_E(x, r x^{m_E}) = x^{e_E} P_E(r)`.
    pub fn edge_polynomial(
        &self,
        poly: &PuiseuxPoly,
        edge_index: usize,
    ) -> Result<UniPoly, AlgebraError> {
        let edge = self.edge(edge_index)?;
        let q_max = self.vertices[edge.left].y;
        let mut coeffs = vec![BigRational::zero(); q_max as usize + 1];
        for (&(xu, ye), c) in poly.terms() {
            let p = BigRational::new(BigInt::from(xu), BigInt::from(poly.scale()));
            let lhs = &p + &edge.m * rat_i64(ye as i64);
            if lhs == edge.e {
                coeffs[ye as usize] = c.clone();
            }
        }
        Ok(UniPoly::from_coeffs(coeffs))
    }

    /// Heights plus per-edge root orders in the requested sector sign.
    pub fn heights_and_orders(
        &self,
        poly: &PuiseuxPoly,
        sign: RootSign,
    ) -> Result<HeightsReport, AlgebraError> {
        let hght_star = self.leftmost().y;
        let hght = self.leftmost().y - self.rightmost().y;
        let mut ord_per_edge = Vec::with_capacity(self.edges.len());
        let mut ord_total = 0u64;
        for i in 0..self.edges.len() {
            let ep = self.edge_polynomial(poly, i)?;
            let ord: u64 = ep.real_roots(sign).iter().map(|r| r.multiplicity).sum();
            ord_per_edge.push(ord);
            ord_total += ord;
        }
        Ok(HeightsReport {
            hght_star,
            hght,
            ord_per_edge,
            ord_total,
        })
    }

    /// Decay factor for every face: edges use the axis-intercept minimum,
    /// vertices the best supporting line over slope parameters in
    /// `[m_l, m_r]`.
    pub fn decay_factors(&self) -> Vec<FaceData> {
        let mut out = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let p = self.p_of(v);
            let q = rat_i64(v.y as i64);
            let (m_l, m_r) = self.slope_bounds(i);
            let d = if m_l.le_one() && !m_r.le_one() {
                // A supporting line of slope parameter 1 exists: d = p + q.
                &p + &q
            } else if let SlopeBound::Finite(mr) = &m_r {
                // Whole admissible range below 1: intercepts maximized at m_r.
                if *mr <= BigRational::one() {
                    &p + mr * &q
                } else {
                    match &m_l {
                        SlopeBound::Finite(ml) => &q + &p / ml,
                        _ => unreachable!("m_l > 1 must be finite"),
                    }
                }
            } else {
                // m_r infinite and m_l > 1.
                match &m_l {
                    SlopeBound::Finite(ml) => &q + &p / ml,
                    _ => unreachable!("m_l > 1 must be finite"),
                }
            };
            out.push(FaceData {
                face: Face::Vertex(i),
                d,
                d_x: None,
                d_y: None,
            });
        }
        for (i, e) in self.edges.iter().enumerate() {
            let d_x = e.e.clone();
            let d_y = &e.e / &e.m;
            let d = if d_x <= d_y { d_x.clone() } else { d_y.clone() };
            out.push(FaceData {
                face: Face::Edge(i),
                d,
                d_x: Some(d_x),
                d_y: Some(d_y),
            });
        }
        out
    }

    /// The unique vertex whose adjacent slope parameters satisfy
    /// `m_l <= 1 < m_r`; its coordinates sum to `mult(P)`.
    pub fn star_vertex(&self) -> usize {
        for i in 0..self.vertices.len() {
            let (m_l, m_r) = self.slope_bounds(i);
            if m_l.le_one() && m_r.gt_one() {
                return i;
            }
        }
        unreachable!("slope parameters are strictly increasing, a straddle exists")
    }

    /// Render a vertex like `(3,2)` or `(7/2,1)`.
    pub fn render_vertex(&self, i: usize) -> String {
        let v = &self.vertices[i];
        format!("({},{})", rat_string(&self.p_of(v)), v.y)
    }

    pub fn render_face(&self, face: Face) -> String {
        match face {
            Face::Vertex(i) => format!("V{}", self.render_vertex(i)),
            Face::Edge(i) => {
                let e = &self.edges[i];
                format!(
                    "E{}-{}",
                    self.render_vertex(e.left),
                    self.render_vertex(e.right)
                )
            }
        }
    }
}

/// Counterclockwise turn test for the lower hull, exact in integers.
fn turns_left(a: Vertex, b: Vertex, c: Vertex) -> bool {
    // All inputs share the same scale so units cancel.
    let abx = BigInt::from(b.xunits) - BigInt::from(a.xunits);
    let aby = BigInt::from(b.y) - BigInt::from(a.y);
    let acx = BigInt::from(c.xunits) - BigInt::from(a.xunits);
    let acy = BigInt::from(c.y) - BigInt::from(a.y);
    let cross = &abx * &acy - &aby * &acx;
    cross > BigInt::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{example_polynomial, parse_poly};
    use crate::rat::rat;

    fn coords(polygon: &NewtonPolygon) -> Vec<(BigRational, u64)> {
        polygon.vertex_coords()
    }

    #[test]
    fn figure_a_vertices() {
        let p = example_polynomial(8);
        let ng = NewtonPolygon::build(&p).unwrap();
        let got = coords(&ng);
        let want: Vec<(BigRational, u64)> = vec![
            (rat_i64(1), 6),
            (rat_i64(2), 4),
            (rat_i64(4), 2),
            (rat_i64(6), 1),
        ];
        assert_eq!(got, want);
        assert_eq!(ng.edges().len(), 3);
    }

    #[test]
    fn case2_polynomial_vertices() {
        let p = parse_poly("x^5*y - x^3*y^2 + x^2*y^4").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        assert_eq!(
            coords(&ng),
            vec![(rat_i64(2), 4), (rat_i64(3), 2), (rat_i64(5), 1)]
        );
    }

    #[test]
    fn monomial_polygon() {
        let p = parse_poly("x^3*y^2").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        assert_eq!(coords(&ng), vec![(rat_i64(3), 2)]);
        assert!(ng.edges().is_empty());
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(
            NewtonPolygon::build(&PuiseuxPoly::zero()),
            Err(AlgebraError::ZeroPolynomial)
        ));
    }

    #[test]
    fn euler_relation_and_monotone_slopes() {
        let p = example_polynomial(8);
        let ng = NewtonPolygon::build(&p).unwrap();
        assert_eq!(ng.vertices().len() - ng.edges().len(), 1);
        for w in ng.edges().windows(2) {
            assert!(w[0].m < w[1].m);
        }
    }

    #[test]
    fn figure_a_edge_restrictions() {
        let p = example_polynomial(8);
        let ng = NewtonPolygon::build(&p).unwrap();
        // E2 joins (2,4) and (4,2)
        let e2 = ng.edge_restriction(&p, 1).unwrap();
        assert_eq!(e2, parse_poly("-x^2*y^2*(y-x)^2").unwrap());
        // E3 joins (4,2) and (6,1)
        let e3 = ng.edge_restriction(&p, 2).unwrap();
        assert_eq!(e3, parse_poly("-x^4*y*(y-x^2)").unwrap());
    }

    #[test]
    fn monomial_edge_restriction_rejected() {
        let p = parse_poly("x^3*y^2").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        assert!(matches!(
            ng.edge_restriction(&p, 0),
            Err(AlgebraError::NoSuchEdge { index: 0, count: 0 })
        ));
    }

    #[test]
    fn figure_a_edge_polynomials() {
        let p = example_polynomial(8);
        let ng = NewtonPolygon::build(&p).unwrap();
        // E2: coefficients of -r^2(r-1)^2 = -r^4 + 2r^3 - r^2
        let e2 = ng.edge_polynomial(&p, 1).unwrap();
        assert_eq!(e2, UniPoly::from_i64(&[0, 0, -1, 2, -1]));
        // E3: -(r-1) r = -r^2 + r
        let e3 = ng.edge_polynomial(&p, 2).unwrap();
        assert_eq!(e3, UniPoly::from_i64(&[0, 1, -1]));
    }

    #[test]
    fn figure_a_heights_and_orders() {
        let p = example_polynomial(8);
        let ng = NewtonPolygon::build(&p).unwrap();
        let h = ng.heights_and_orders(&p, RootSign::Positive).unwrap();
        assert_eq!(h.hght_star, 6);
        assert_eq!(h.hght, 5);
        assert_eq!(h.ord_per_edge, vec![1, 2, 1]);
        assert_eq!(h.ord_total, 4);
    }

    #[test]
    fn monomial_heights() {
        let p = parse_poly("x^3*y^2").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        let h = ng.heights_and_orders(&p, RootSign::Both).unwrap();
        assert_eq!(h.hght_star, 2);
        assert_eq!(h.hght, 0);
        assert_eq!(h.ord_total, 0);
    }

    #[test]
    fn decay_factor_examples() {
        // Vertex (3,2) of the case-2 polynomial: m_l = 1/2, m_r = 2, d = 5.
        let p = parse_poly("x^5*y - x^3*y^2 + x^2*y^4").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        let faces = ng.decay_factors();
        let v_mid = faces
            .iter()
            .find(|f| f.face == Face::Vertex(1))
            .unwrap();
        assert_eq!(v_mid.d, rat_i64(5));
        assert_eq!(p.mult(), Some(rat_i64(5)));

        // Edge from (2,4) to (3,2): m = 1/2, d_x = 4, d_y = 8, d = 4.
        let e0 = faces.iter().find(|f| f.face == Face::Edge(0)).unwrap();
        assert_eq!(e0.d_x.clone().unwrap(), rat_i64(4));
        assert_eq!(e0.d_y.clone().unwrap(), rat_i64(8));
        assert_eq!(e0.d, rat_i64(4));

        // Single vertex (p,q): d = p + q.
        let m = parse_poly("x^3*y^2").unwrap();
        let nm = NewtonPolygon::build(&m).unwrap();
        assert_eq!(nm.decay_factors()[0].d, rat_i64(5));
    }

    #[test]
    fn star_vertex_examples() {
        let p = parse_poly("x^5*y - x^3*y^2 + x^2*y^4").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        assert_eq!(ng.star_vertex(), 1); // (3,2)

        let m = parse_poly("x^3*y^2").unwrap();
        let nm = NewtonPolygon::build(&m).unwrap();
        assert_eq!(nm.star_vertex(), 0);

        // y^2 + x^2 has a single edge with m = 1; the straddle convention
        // (strict on the right) picks the right endpoint (2,0).
        let e = parse_poly("y^2 + x^2").unwrap();
        let ne = NewtonPolygon::build(&e).unwrap();
        let star = ne.star_vertex();
        assert_eq!(ne.vertex_coords()[star], (rat_i64(2), 0));
        assert_eq!(e.mult(), Some(rat_i64(2)));
    }

    #[test]
    fn star_vertex_sum_equals_mult() {
        for text in [
            "x^5*y - x^3*y^2 + x^2*y^4",
            "y^3 + x*y + x^4",
            "x^2 + y^5",
            "x^(1/2)*y^3 + x^2*y + x^4",
        ] {
            let p = parse_poly(text).unwrap();
            let ng = NewtonPolygon::build(&p).unwrap();
            let star = ng.star_vertex();
            let (ps, qs) = ng.vertex_coords()[star].clone();
            assert_eq!(&ps + rat_i64(qs as i64), p.mult().unwrap(), "{text}");
        }
    }

    #[test]
    fn support_lies_on_or_above_edges() {
        let p = example_polynomial(6);
        let ng = NewtonPolygon::build(&p).unwrap();
        for e in ng.edges() {
            for (pp, q) in p.support() {
                let lhs = &pp + &e.m * rat_i64(q as i64);
                assert!(lhs >= e.e);
            }
        }
    }

    #[test]
    fn fractional_scale_polygon() {
        // x^(1/2) y^2 + x^2: vertices (1/2, 2), (2, 0), edge m = 3/4.
        let p = parse_poly("x^(1/2)*y^2 + x^2").unwrap();
        let ng = NewtonPolygon::build(&p).unwrap();
        assert_eq!(coords(&ng), vec![(rat(1, 2), 2), (rat_i64(2), 0)]);
        assert_eq!(ng.edges()[0].m, rat(3, 4));
    }
}
