//! The iterative good/bad partition: single-step partition driven by the
//! Newton polygon, branch recursion through `y_k = (r_k + y_{k+1}) x^{m_k}`,
//! stabilization detection with an exact square-free certificate, the refined
//! factor-out step for stable branches, and the assembled region tree with
//! per-leaf monomial data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::bipoly::YPoly;
use crate::error::{AlgebraError, ResolveError};
use crate::polygon::{NewtonPolygon, SlopeBound};
use crate::puiseux::{BranchStep, PuiseuxPoly};
use crate::rat::{lcm_u64, rat_i64, rat_pow, rat_string, rat_to_f64};
use crate::unipoly::{IsolatedRoot, RootEnc, RootSign};

/// Coefficient handling when an irrational edge root appears.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Keep every substitution exact; halt branches at irrational roots.
    Exact,
    /// Substitute a refined rational midpoint and continue, tagging the
    /// branch with the enclosure width.
    Numeric,
}

#[derive(Debug, Clone)]
pub struct ResolveConfig {
    pub mode: Mode,
    /// Budget for branch-series truncation, in x-degrees.
    pub truncation_order: u64,
    pub max_depth: u64,
    /// Half-height of the root standard region (the paper leaves it
    /// symbolic; numeric checks need a concrete value).
    pub epsilon_domain: BigRational,
    /// Decimal digits for numeric-mode root refinement.
    pub precision_digits: u32,
    /// Relative tolerance for boundary-proximity refusal in membership.
    pub boundary_tolerance: f64,
}

impl Default for ResolveConfig {
    fn default() -> Self {
        ResolveConfig {
            mode: Mode::Exact,
            truncation_order: 24,
            max_depth: 64,
            epsilon_domain: BigRational::new(BigInt::one(), BigInt::from(100)),
            precision_digits: 30,
            boundary_tolerance: 1e-9,
        }
    }
}

/// Which quadrant driver a tree belongs to. The engine always works with
/// x > 0; the x < 0 drivers reflect the input polynomial first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorLabel {
    pub x_positive: bool,
    /// Sign of stage-0 roots counted by this driver (y-sign of the sector).
    pub y_sign: RootSign,
}

impl SectorLabel {
    pub fn quadrant_1() -> Self {
        SectorLabel {
            x_positive: true,
            y_sign: RootSign::Positive,
        }
    }

    pub fn render(&self) -> String {
        format!(
            "x{}y{}",
            if self.x_positive { "+" } else { "-" },
            if self.y_sign == RootSign::Positive {
                "+"
            } else {
                "-"
            }
        )
    }
}

/// One step of the coordinate chain back to the original variables.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformStep {
    /// `y_k = (r + y_{k+1}) x^m`
    Branch(BranchStep),
    /// `y_k = f(x) + y_{k+1} x^m` (the stable-regime finishing step)
    Refined {
        f: PuiseuxPoly,
        m: BigRational,
        s: u64,
        truncated: bool,
    },
}

impl TransformStep {
    pub fn m(&self) -> &BigRational {
        match self {
            TransformStep::Branch(b) => &b.m,
            TransformStep::Refined { m, .. } => m,
        }
    }
}

/// A standard pair `[U_n, P_n]`: the unit of iteration.
#[derive(Debug, Clone)]
pub struct StandardPair {
    pub stage: u64,
    pub poly: PuiseuxPoly,
    /// Half-height of the standard region in the local y coordinate.
    pub eps: BigRational,
    /// Transform chain from the root pair down to this one.
    pub chain: Vec<TransformStep>,
    /// Path code: (edge index, root index) per expansion.
    pub path: Vec<(usize, usize)>,
    pub exact: bool,
}

impl StandardPair {
    pub fn path_string(&self) -> String {
        if self.path.is_empty() {
            return "root".to_string();
        }
        self.path
            .iter()
            .map(|(e, r)| format!("E{e}R{r}"))
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// Interval endpoints of a good-edge component, per enlargement tier.
#[derive(Debug, Clone, PartialEq)]
pub struct TieredInterval {
    pub plain: (BigRational, BigRational),
    pub star: (BigRational, BigRational),
    pub dstar: (BigRational, BigRational),
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeKind {
    GoodVertex {
        /// (p, q) of the defining vertex.
        vertex: (BigRational, u64),
        m_l: SlopeBound,
        m_r: SlopeBound,
        /// Upper boundary curve `c_{E_l} x^{m_l}`; None means the region
        /// extends to the domain height eps.
        upper: Option<(BigRational, BigRational)>,
        /// Lower boundary curve `C_{E_r} x^{m_r}`; None means down to the
        /// x-axis (seam excluded).
        lower: Option<(BigRational, BigRational)>,
    },
    GoodEdge {
        edge: usize,
        m: BigRational,
        interval: TieredInterval,
    },
    Bad {
        edge: usize,
        m: BigRational,
        root: IsolatedRoot,
        /// Center used for the tube (the exact root, or the refined
        /// midpoint in numeric mode).
        center: BigRational,
        s: u64,
        eps: BigRational,
        /// Set when an exact-mode run could not expand an irrational root.
        irrational_halt: bool,
    },
    StableLeaf {
        f: PuiseuxPoly,
        m: BigRational,
        s: u64,
        truncated: bool,
    },
}

#[derive(Debug, Clone)]
pub struct RegionNode {
    pub id: usize,
    pub pair: usize,
    pub kind: NodeKind,
    /// Monomial data (p_n, q_n): the dominating exponent pair on the region.
    pub monomial: (BigRational, u64),
    /// For bad nodes: the pair index they expand into, when expanded.
    pub child_pair: Option<usize>,
    /// For stable leaves and expanded pairs: the bad node they came from.
    pub parent_node: Option<usize>,
}

impl RegionNode {
    pub fn is_leaf(&self) -> bool {
        match &self.kind {
            NodeKind::GoodVertex { .. } | NodeKind::GoodEdge { .. } | NodeKind::StableLeaf { .. } => {
                true
            }
            NodeKind::Bad {
                irrational_halt, ..
            } => *irrational_halt,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match &self.kind {
            NodeKind::GoodVertex { .. } => "goodVertex",
            NodeKind::GoodEdge { .. } => "goodEdge",
            NodeKind::Bad {
                irrational_halt: true,
                ..
            } => "badHalted",
            NodeKind::Bad { .. } => "bad",
            NodeKind::StableLeaf { .. } => "stableLeaf",
        }
    }
}

/// The full region tree produced by [`resolve`].
#[derive(Debug, Clone)]
pub struct RegionTree {
    pub sector: SectorLabel,
    pub config: ResolveConfig,
    pub pairs: Vec<StandardPair>,
    pub polygons: Vec<Option<NewtonPolygon>>,
    pub nodes: Vec<RegionNode>,
    /// Node ids attached to each pair, in construction order.
    pub pair_nodes: Vec<Vec<usize>>,
    /// Strict-ordering threshold: for 0 < x < x_disjoint every boundary
    /// curve comparison in the tree is strict, so the partition is exact.
    pub x_disjoint: f64,
    /// lcm of all exponent denominators; exact membership samples x = t^D.
    pub exponent_lcm: u64,
    pub truncated: bool,
    pub exact: bool,
}

/// Result of a single partition step.
pub struct Partition {
    pub good: Vec<(NodeKind, (BigRational, u64))>,
    pub bad: Vec<(NodeKind, (BigRational, u64))>,
    /// Per-edge analysis retained for constants.
    pub edges: Vec<EdgeAnalysis>,
}

/// Constants attached to one compact edge during a partition step.
#[derive(Debug, Clone)]
pub struct EdgeAnalysis {
    pub m: BigRational,
    pub e: BigRational,
    /// I(E) = [c, C] (and its mirror), from all nonzero real roots.
    pub c: BigRational,
    pub cc: BigRational,
    /// Tube half-width; zero when the edge has no roots at all.
    pub eps: BigRational,
    /// Counted roots (sector-filtered at stage 0), ascending, refined.
    pub counted: Vec<(IsolatedRoot, BigRational)>,
}

fn two_pow(k: i64) -> BigRational {
    if k >= 0 {
        rat_i64(1i64 << k)
    } else {
        BigRational::new(BigInt::one(), BigInt::from(1i64 << (-k)))
    }
}

/// Lower bound for |r| over an enclosure.
fn abs_lower(enc: &RootEnc) -> BigRational {
    match enc {
        RootEnc::Exact(r) => r.abs(),
        RootEnc::Interval { lo, hi } => {
            if lo.is_positive() {
                lo.clone()
            } else {
                hi.abs()
            }
        }
    }
}

fn abs_upper(enc: &RootEnc) -> BigRational {
    match enc {
        RootEnc::Exact(r) => r.abs(),
        RootEnc::Interval { lo, hi } => {
            let a = lo.abs();
            let b = hi.abs();
            if a > b {
                a
            } else {
                b
            }
        }
    }
}

fn enc_bounds(enc: &RootEnc) -> (BigRational, BigRational) {
    match enc {
        RootEnc::Exact(r) => (r.clone(), r.clone()),
        RootEnc::Interval { lo, hi } => (lo.clone(), hi.clone()),
    }
}

/// Analyzes one edge: roots, interval constants and tube width.
///
/// Constants follow the concrete choice `c_E = 2^-11 min|r|`,
/// `C_E = 2^11 max|r|`, `eps = min(2^-10 min|r|, min gap / 16)`; with no
/// roots, `c_E = 1/2`, `C_E = 2`.
pub fn analyze_edge(
    polygon: &NewtonPolygon,
    poly: &PuiseuxPoly,
    edge_index: usize,
    counted_sign: RootSign,
) -> Result<EdgeAnalysis, AlgebraError> {
    let edge = &polygon.edges()[edge_index];
    let ep = polygon.edge_polynomial(poly, edge_index)?;
    let mut all = ep.real_roots(RootSign::Both);
    if all.is_empty() {
        return Ok(EdgeAnalysis {
            m: edge.m.clone(),
            e: edge.e.clone(),
            c: BigRational::new(BigInt::one(), BigInt::from(2)),
            cc: rat_i64(2),
            eps: BigRational::zero(),
            counted: Vec::new(),
        });
    }
    // Refine enclosures until they are narrow relative to the smallest root
    // magnitude and pairwise separated.
    let mut width = BigRational::new(BigInt::one(), BigInt::from(1u64 << 20));
    loop {
        for r in all.iter_mut() {
            r.refine_below(&width);
        }
        let min_abs = all.iter().map(|r| abs_lower(&r.enc)).min().unwrap();
        let narrow = all
            .iter()
            .all(|r| r.enclosure_width() * rat_i64(1 << 12) < min_abs);
        let mut sorted: Vec<(BigRational, BigRational)> =
            all.iter().map(|r| enc_bounds(&r.enc)).collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let separated = sorted.windows(2).all(|w| w[0].1 < w[1].0);
        if narrow && separated {
            break;
        }
        width /= rat_i64(1 << 10);
    }
    all.sort_by(|a, b| enc_bounds(&a.enc).0.cmp(&enc_bounds(&b.enc).0));
    let min_abs = all.iter().map(|r| abs_lower(&r.enc)).min().unwrap();
    let max_abs = all.iter().map(|r| abs_upper(&r.enc)).max().unwrap();
    let mut eps = &min_abs * two_pow(-10);
    for w in all.windows(2) {
        let (_, hi_a) = enc_bounds(&w[0].enc);
        let (lo_b, _) = enc_bounds(&w[1].enc);
        let gap = (lo_b - hi_a) / rat_i64(16);
        if gap < eps {
            eps = gap;
        }
    }
    // Tube centers must sit within eps/2^10 of the true root.
    let center_width = &eps * two_pow(-10);
    let mut counted = Vec::new();
    for r in all.iter_mut() {
        let keep = match counted_sign {
            RootSign::Both => true,
            RootSign::Positive => r.sign_positive(),
            RootSign::Negative => !r.sign_positive(),
        };
        if keep {
            r.refine_below(&center_width);
            let center = r.midpoint();
            counted.push((r.clone(), center));
        }
    }
    Ok(EdgeAnalysis {
        m: edge.m.clone(),
        e: edge.e.clone(),
        c: &min_abs * two_pow(-11),
        cc: &max_abs * two_pow(11),
        eps,
        counted,
    })
}

/// Endpoint of a belt component, remembering how tiers rescale it.
enum BeltEnd {
    /// c-side constant: tiers divide by 2 and 4 (moving toward zero slope).
    Inner(BigRational),
    /// C-side constant: tiers multiply by 2 and 4.
    Outer(BigRational),
    /// Tube edge `center + side * eps`: tiers halve and quarter eps.
    Tube { center: BigRational, side: i64 },
}

impl BeltEnd {
    fn at(&self, eps: &BigRational, tier: u32) -> BigRational {
        let scale = two_pow(tier as i64); // 1, 2, 4
        match self {
            BeltEnd::Inner(v) => v / &scale,
            BeltEnd::Outer(v) => v * &scale,
            BeltEnd::Tube { center, side } => center + rat_i64(*side) * eps / scale,
        }
    }
}

fn component(lo: BeltEnd, hi: BeltEnd, eps: &BigRational) -> TieredInterval {
    TieredInterval {
        plain: (lo.at(eps, 0), hi.at(eps, 0)),
        star: (lo.at(eps, 1), hi.at(eps, 1)),
        dstar: (lo.at(eps, 2), hi.at(eps, 2)),
    }
}

/// A single step of partition on one standard pair: one good node per
/// vertex, good nodes for every connected component of the root-free part
/// of each edge interval, and one bad node per counted root.
pub fn partition_step(
    pair: &StandardPair,
    polygon: &NewtonPolygon,
    sector: SectorLabel,
) -> Result<Partition, AlgebraError> {
    // Stage 0 counts roots with the sector's sign; deeper stages span the
    // full local y range, so both signs count.
    let counted_sign = if pair.stage == 0 {
        sector.y_sign
    } else {
        RootSign::Both
    };
    let mut edges = Vec::new();
    for i in 0..polygon.edges().len() {
        edges.push(analyze_edge(polygon, &pair.poly, i, counted_sign)?);
    }

    let mut good = Vec::new();
    let mut bad = Vec::new();

    for (i, v) in polygon.vertices().iter().enumerate() {
        let (m_l, m_r) = polygon.slope_bounds(i);
        let upper = if i == 0 {
            None
        } else {
            let ea = &edges[i - 1];
            Some((ea.c.clone(), ea.m.clone()))
        };
        let lower = if i == polygon.vertices().len() - 1 {
            None
        } else {
            let ea = &edges[i];
            Some((ea.cc.clone(), ea.m.clone()))
        };
        let coords = (polygon.p_of(v), v.y);
        good.push((
            NodeKind::GoodVertex {
                vertex: coords.clone(),
                m_l,
                m_r,
                upper,
                lower,
            },
            coords,
        ));
    }

    for (i, ea) in edges.iter().enumerate() {
        let left = &polygon.vertices()[polygon.edges()[i].left];
        let monomial = (polygon.p_of(left), left.y);
        let positive: Vec<&(IsolatedRoot, BigRational)> = ea
            .counted
            .iter()
            .filter(|(_, c)| c.is_positive())
            .collect();
        let negative: Vec<&(IsolatedRoot, BigRational)> = ea
            .counted
            .iter()
            .filter(|(_, c)| c.is_negative())
            .collect();

        let belts: Vec<(bool, &[&(IsolatedRoot, BigRational)])> = match counted_sign {
            RootSign::Positive => vec![(true, positive.as_slice())],
            RootSign::Negative => vec![(false, negative.as_slice())],
            RootSign::Both => vec![(true, positive.as_slice()), (false, negative.as_slice())],
        };
        for (is_positive, roots) in belts {
            let (belt_lo, belt_hi) = if is_positive {
                (BeltEnd::Inner(ea.c.clone()), BeltEnd::Outer(ea.cc.clone()))
            } else {
                (BeltEnd::Outer(-&ea.cc), BeltEnd::Inner(-&ea.c))
            };
            if roots.is_empty() {
                good.push((
                    NodeKind::GoodEdge {
                        edge: i,
                        m: ea.m.clone(),
                        interval: component(belt_lo, belt_hi, &ea.eps),
                    },
                    monomial.clone(),
                ));
                continue;
            }
            let mut prev = belt_lo;
            for (root, center) in roots.iter() {
                good.push((
                    NodeKind::GoodEdge {
                        edge: i,
                        m: ea.m.clone(),
                        interval: component(
                            prev,
                            BeltEnd::Tube {
                                center: center.clone(),
                                side: -1,
                            },
                            &ea.eps,
                        ),
                    },
                    monomial.clone(),
                ));
                bad.push((
                    NodeKind::Bad {
                        edge: i,
                        m: ea.m.clone(),
                        root: root.clone(),
                        center: center.clone(),
                        s: root.multiplicity,
                        eps: ea.eps.clone(),
                        irrational_halt: false,
                    },
                    monomial.clone(),
                ));
                prev = BeltEnd::Tube {
                    center: center.clone(),
                    side: 1,
                };
            }
            good.push((
                NodeKind::GoodEdge {
                    edge: i,
                    m: ea.m.clone(),
                    interval: component(prev, belt_hi, &ea.eps),
                },
                monomial.clone(),
            ));
        }
    }

    Ok(Partition { good, bad, edges })
}

/// Expands a bad region into the next standard pair by the change of
/// variables `y_n = (r + y_{n+1}) x^{m}`; verifies the bookkeeping identity
/// that the child polygon's leftmost vertex is `(p_l + m q_l, s)`.
pub fn expand_bad(
    pair: &StandardPair,
    node_kind: &NodeKind,
    config: &ResolveConfig,
) -> Result<StandardPair, ResolveError> {
    let NodeKind::Bad {
        edge: _,
        m,
        root,
        center: _,
        s,
        eps,
        ..
    } = node_kind
    else {
        panic!("expand_bad on a non-bad node");
    };
    let mut root = root.clone();
    let (r_value, exact_step, width) = if root.is_exact() {
        (root.midpoint(), true, BigRational::zero())
    } else if config.mode == Mode::Exact {
        let RootEnc::Interval { lo, hi } = &root.enc else {
            unreachable!()
        };
        return Err(ResolveError::IrrationalBranch {
            path: pair.path_string(),
            lo: rat_string(lo),
            hi: rat_string(hi),
        });
    } else {
        let target = BigRational::new(
            BigInt::one(),
            BigInt::from(10u32).pow(config.precision_digits),
        );
        root.refine_below(&target);
        if root.is_exact() {
            (root.midpoint(), true, BigRational::zero())
        } else {
            (root.midpoint(), false, root.enclosure_width())
        }
    };
    let mut child_poly = pair.poly.substitute_branch(&r_value, m)?;
    // Intercept invariant e = p_l + m q_l in child-scale units.
    let e = pair_edge_intercept(&pair.poly, m, &r_value);
    if !exact_step {
        // The substituted midpoint misses the exact cancellations; zero the
        // terms that vanish identically for the true root.
        child_poly = zero_structural_terms(child_poly, &e, *s);
    }
    let mut chain = pair.chain.clone();
    chain.push(TransformStep::Branch(BranchStep {
        r: r_value,
        m: m.clone(),
        s: *s,
        exact: exact_step,
        enclosure_width: width,
    }));
    let child = StandardPair {
        stage: pair.stage + 1,
        poly: child_poly,
        eps: eps.clone(),
        chain,
        path: pair.path.clone(),
        exact: pair.exact && exact_step,
    };
    verify_track_identity(&child, &e, *s)?;
    Ok(child)
}

/// e_E for the edge the root came from: recomputed from the polygon of the
/// parent so callers do not need to thread edge indices.
fn pair_edge_intercept(poly: &PuiseuxPoly, m: &BigRational, _r: &BigRational) -> BigRational {
    // The edge with slope parameter m is unique in the polygon.
    let polygon = NewtonPolygon::build(poly).expect("nonzero parent");
    for e in polygon.edges() {
        if &e.m == m {
            return e.e.clone();
        }
    }
    unreachable!("bad node always references an existing edge")
}

fn zero_structural_terms(poly: PuiseuxPoly, e: &BigRational, s: u64) -> PuiseuxPoly {
    let scale = poly.scale();
    let e_units = (e * rat_i64(scale as i64))
        .to_integer()
        .to_u64()
        .expect("intercept in range");
    let mut out = PuiseuxPoly::zero();
    for (&(xu, ye), c) in poly.terms() {
        if xu == e_units && ye < s {
            continue;
        }
        out = out.add(&PuiseuxPoly::monomial(xu, scale, ye, c.clone()));
    }
    out
}

fn verify_track_identity(child: &StandardPair, e: &BigRational, s: u64) -> Result<(), ResolveError> {
    let polygon = NewtonPolygon::build(&child.poly).map_err(|_| ResolveError::StabilizationFailed {
        path: child.path_string(),
        msg: "child polynomial vanished under substitution".into(),
    })?;
    let left = polygon.leftmost();
    let p = polygon.p_of(left);
    if p != *e || left.y != s {
        return Err(ResolveError::StabilizationFailed {
            path: child.path_string(),
            msg: format!(
                "tracking identity violated: leftmost vertex ({},{}) expected ({},{})",
                rat_string(&p),
                left.y,
                rat_string(e),
                s
            ),
        });
    }
    Ok(())
}

/// Stabilization certificate: the branch series and its multiplicity.
#[derive(Debug, Clone)]
pub struct StableCertificate {
    pub s: u64,
    /// Exact branch series f with `P = A (y - f)^s`, when available.
    pub f: Option<PuiseuxPoly>,
    pub m: BigRational,
}

/// Checks the stable-regime pattern on the current pair: a single compact
/// edge dropping to the x-axis whose edge polynomial is a perfect s-th power
/// with s equal to both heights, then confirms persistence by square-free
/// decomposition in y over rationals in x^(1/M). Returns the certificate
/// with `f = None` when the shape matches but the repeated factor is not a
/// polynomial branch (certificate falls back to truncated iteration).
pub fn detect_stable(
    pair: &StandardPair,
    polygon: &NewtonPolygon,
    partition: &Partition,
) -> Option<StableCertificate> {
    if polygon.edges().len() != 1 || polygon.rightmost().y != 0 {
        return None;
    }
    let hght_star = polygon.leftmost().y;
    let ea = &partition.edges[0];
    if ea.counted.len() != 1 {
        return None;
    }
    let (root, _) = &ea.counted[0];
    let s = root.multiplicity;
    if s != hght_star || s == 0 {
        return None;
    }
    // Perfect s-th power test: the single root carries the full height.
    // (Ord(E) <= Hght(E) with equality only for c (r - r0)^s.)
    let degree_drop = hght_star; // q_l - q_r with q_r = 0
    if s != degree_drop {
        return None;
    }
    // Exact persistence test via square-free decomposition in y.
    let ypoly = YPoly::from_puiseux(&pair.poly);
    let factors = ypoly.square_free_y();
    let mut branch: Option<PuiseuxPoly> = None;
    for (f, e) in &factors {
        if *e != s || f.y_degree() != Some(1) {
            continue;
        }
        let Some(g) = f.linear_branch() else {
            continue;
        };
        // Branch through the origin only.
        if g.coeffs().first().map(|c| !c.is_zero()).unwrap_or(false) {
            continue;
        }
        let mut fp = PuiseuxPoly::zero();
        for (i, c) in g.coeffs().iter().enumerate() {
            fp = fp.add(&PuiseuxPoly::monomial(
                i as u64,
                pair.poly.scale(),
                0,
                c.clone(),
            ));
        }
        if fp.is_zero() {
            continue;
        }
        // The branch must start with the counted root's term r x^m.
        if !branch_matches_root(&fp, &ea.m, &root.enc) {
            continue;
        }
        branch = Some(fp);
        break;
    }
    Some(StableCertificate {
        s,
        f: branch,
        m: ea.m.clone(),
    })
}

/// Lowest term of the branch series must be `r x^m` with r inside the root
/// enclosure (equal, when the root is exact).
fn branch_matches_root(f: &PuiseuxPoly, m: &BigRational, enc: &RootEnc) -> bool {
    let Some((&(xu, _), coeff)) = f.terms().next() else {
        return false;
    };
    let exp = BigRational::new(BigInt::from(xu), BigInt::from(f.scale()));
    if exp != *m {
        return false;
    }
    match enc {
        RootEnc::Exact(r) => coeff == r,
        RootEnc::Interval { lo, hi } => coeff > lo && coeff < hi,
    }
}

/// Executes the refined finishing step on a certified stable pair: either
/// factors out the exact branch, or truncates the iteration at the budget.
/// Returns the new leaf pair together with the transform appended to its
/// chain, and whether truncation happened.
pub fn refined_step(
    pair: &StandardPair,
    cert: &StableCertificate,
    partition: &Partition,
    config: &ResolveConfig,
) -> Result<StandardPair, ResolveError> {
    let s = cert.s;
    let m = &cert.m;
    if let Some(f) = &cert.f {
        let child_poly = pair.poly.refined_substitute(f, m)?;
        let mut chain = pair.chain.clone();
        chain.push(TransformStep::Refined {
            f: f.clone(),
            m: m.clone(),
            s,
            truncated: false,
        });
        let ea = &partition.edges[0];
        let child = StandardPair {
            stage: pair.stage + 1,
            poly: child_poly,
            eps: ea.eps.clone(),
            chain,
            path: pair.path.clone(),
            exact: pair.exact,
        };
        verify_single_vertex(&child, polygon_left_p(pair)? + rat_i64(s as i64) * m, s)?;
        Ok(child)
    } else {
        // Truncation fallback: one more basic step (a one-term partial sum
        // of the branch series), then cut the child above its leftmost
        // x-degree. All kept terms are exact; the dropped tail carries the
        // continuing chain, so the leaf is flagged as truncated.
        let bad = partition
            .bad
            .first()
            .expect("stable pair has exactly one bad node");
        let mut child = expand_bad(pair, &bad.0, config)?;
        let p_child = polygon_left_p(&child)?;
        child.poly.truncate_x_degree(&p_child);
        if let Some(TransformStep::Branch(b)) = child.chain.pop() {
            let f = PuiseuxPoly::monomial(
                (b.m.numer()).to_u64().expect("m numerator"),
                (b.m.denom()).to_u64().expect("m denominator"),
                0,
                b.r.clone(),
            );
            child.chain.push(TransformStep::Refined {
                f,
                m: b.m,
                s,
                truncated: true,
            });
        }
        verify_single_vertex(&child, p_child, s)?;
        Ok(child)
    }
}

fn polygon_left_p(pair: &StandardPair) -> Result<BigRational, ResolveError> {
    let polygon = NewtonPolygon::build(&pair.poly)?;
    Ok(polygon.p_of(polygon.leftmost()))
}

fn verify_single_vertex(pair: &StandardPair, p: BigRational, s: u64) -> Result<(), ResolveError> {
    let polygon = NewtonPolygon::build(&pair.poly)?;
    let ok = polygon.vertices().len() == 1
        && polygon.p_of(polygon.leftmost()) == p
        && polygon.leftmost().y == s;
    if !ok {
        return Err(ResolveError::StabilizationFailed {
            path: pair.path_string(),
            msg: format!(
                "refined step did not produce the single vertex ({},{})",
                rat_string(&p),
                s
            ),
        });
    }
    Ok(())
}

/// Runs the full iterative partition and assembles the region tree.
pub fn resolve(
    poly: &PuiseuxPoly,
    sector: SectorLabel,
    config: &ResolveConfig,
) -> Result<RegionTree, ResolveError> {
    if poly.is_zero() {
        return Err(ResolveError::IdenticallyZero);
    }
    let base = if sector.x_positive {
        poly.clone()
    } else {
        poly.reflect_x()?
    };
    let mut tree = RegionTree {
        sector,
        config: config.clone(),
        pairs: Vec::new(),
        polygons: Vec::new(),
        nodes: Vec::new(),
        pair_nodes: Vec::new(),
        x_disjoint: rat_to_f64(&config.epsilon_domain),
        exponent_lcm: 1,
        truncated: false,
        exact: true,
    };
    push_pair(
        &mut tree,
        StandardPair {
            stage: 0,
            poly: base,
            eps: config.epsilon_domain.clone(),
            chain: Vec::new(),
            path: Vec::new(),
            exact: true,
        },
    );
    let mut work = vec![(0usize, None::<usize>)];
    while let Some((pair_idx, parent_node)) = work.pop() {
        let pair = tree.pairs[pair_idx].clone();
        if pair.stage > config.max_depth {
            return Err(ResolveError::DepthExceeded {
                depth: config.max_depth,
                path: pair.path_string(),
            });
        }
        let polygon = NewtonPolygon::build(&pair.poly)?;
        let partition = partition_step(&pair, &polygon, sector)?;
        let stable = detect_stable(&pair, &polygon, &partition);
        let p_left = polygon.p_of(polygon.leftmost());
        let over_budget = stable
            .as_ref()
            .map(|cert| {
                &p_left + rat_i64(cert.s as i64) * &cert.m
                    > rat_i64(config.truncation_order as i64)
            })
            .unwrap_or(false);
        tree.polygons[pair_idx] = Some(polygon);

        for (kind, monomial) in &partition.good {
            push_node(&mut tree, pair_idx, kind.clone(), monomial.clone(), parent_node);
        }
        let mut root_ordinal_by_edge: Vec<usize> = Vec::new();
        for (kind, monomial) in partition.bad.iter() {
            let id = push_node(&mut tree, pair_idx, kind.clone(), monomial.clone(), parent_node);
            let NodeKind::Bad { edge, .. } = kind else {
                unreachable!()
            };
            root_ordinal_by_edge.resize(root_ordinal_by_edge.len().max(edge + 1), 0);
            let root_idx = root_ordinal_by_edge[*edge];
            root_ordinal_by_edge[*edge] += 1;

            if let Some(cert) = &stable {
                // A stable pair has exactly one bad node. Finish it with the
                // refined step when the exact branch is known, or when the
                // budget rules out further basic iterations.
                if cert.f.is_none()
                    && over_budget
                    && p_left > rat_i64(config.truncation_order as i64)
                {
                    // Every monomial of the would-be leaf lies beyond the
                    // budget: no usable truncated data remains.
                    return Err(ResolveError::TruncationExhausted {
                        path: pair.path_string(),
                        budget: config.truncation_order,
                    });
                }
                if cert.f.is_some() || over_budget {
                    let mut leaf_pair = refined_step(&pair, cert, &partition, config)?;
                    leaf_pair.path.push((*edge, root_idx));
                    attach_stable_leaf(&mut tree, id, leaf_pair)?;
                    continue;
                }
            }
            match expand_bad(&pair, kind, config) {
                Ok(mut child) => {
                    child.path.push((*edge, root_idx));
                    tree.exact &= child.exact;
                    let child_idx = push_pair(&mut tree, child);
                    tree.nodes[id].child_pair = Some(child_idx);
                    work.push((child_idx, Some(id)));
                }
                Err(ResolveError::IrrationalBranch { .. }) if config.mode == Mode::Exact => {
                    if let NodeKind::Bad {
                        irrational_halt, ..
                    } = &mut tree.nodes[id].kind
                    {
                        *irrational_halt = true;
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
    finalize_geometry(&mut tree);
    Ok(tree)
}

fn push_pair(tree: &mut RegionTree, pair: StandardPair) -> usize {
    let idx = tree.pairs.len();
    tree.pairs.push(pair);
    tree.polygons.push(None);
    tree.pair_nodes.push(Vec::new());
    idx
}

fn push_node(
    tree: &mut RegionTree,
    pair_idx: usize,
    kind: NodeKind,
    monomial: (BigRational, u64),
    parent_node: Option<usize>,
) -> usize {
    let id = tree.nodes.len();
    tree.nodes.push(RegionNode {
        id,
        pair: pair_idx,
        kind,
        monomial,
        child_pair: None,
        parent_node,
    });
    tree.pair_nodes[pair_idx].push(id);
    id
}

fn attach_stable_leaf(
    tree: &mut RegionTree,
    bad_node: usize,
    leaf_pair: StandardPair,
) -> Result<(), ResolveError> {
    let truncated = matches!(
        leaf_pair.chain.last(),
        Some(TransformStep::Refined {
            truncated: true,
            ..
        })
    );
    tree.truncated |= truncated;
    tree.exact &= leaf_pair.exact;
    let leaf_polygon = NewtonPolygon::build(&leaf_pair.poly)?;
    let leaf_monomial = (
        leaf_polygon.p_of(leaf_polygon.leftmost()),
        leaf_polygon.leftmost().y,
    );
    let (f, m, s) = match leaf_pair.chain.last() {
        Some(TransformStep::Refined { f, m, s, .. }) => (f.clone(), m.clone(), *s),
        _ => unreachable!("refined step appends a refined transform"),
    };
    let leaf_pair_idx = push_pair(tree, leaf_pair);
    tree.polygons[leaf_pair_idx] = Some(leaf_polygon);
    let leaf_id = push_node(
        tree,
        leaf_pair_idx,
        NodeKind::StableLeaf {
            f,
            m,
            s,
            truncated,
        },
        leaf_monomial,
        Some(bad_node),
    );
    tree.nodes[leaf_id].parent_node = Some(bad_node);
    tree.nodes[bad_node].child_pair = Some(leaf_pair_idx);
    Ok(())
}

/// Computes the strict-ordering threshold and the exponent lcm.
fn finalize_geometry(tree: &mut RegionTree) {
    let mut lcm = 1u64;
    for pair in &tree.pairs {
        lcm = lcm_u64(lcm, pair.poly.scale());
        for step in &pair.chain {
            lcm = lcm_u64(lcm, step.m().denom().to_u64().unwrap_or(1));
        }
    }
    tree.exponent_lcm = lcm;

    let mut x_bound = rat_to_f64(&tree.config.epsilon_domain);
    for (pair_idx, pair) in tree.pairs.iter().enumerate() {
        let Some(polygon) = tree.polygons[pair_idx].as_ref() else {
            continue;
        };
        // Recover each edge's belt constants [c, C] from the extreme
        // endpoints of its good-edge components.
        let mut belts: Vec<(BigRational, BigRational, BigRational)> = Vec::new(); // (m, c, C)
        for i in 0..polygon.edges().len() {
            let mut c: Option<BigRational> = None;
            let mut cc: Option<BigRational> = None;
            for &nid in &tree.pair_nodes[pair_idx] {
                if let NodeKind::GoodEdge { edge, interval, .. } = &tree.nodes[nid].kind {
                    if *edge != i {
                        continue;
                    }
                    for v in [&interval.plain.0, &interval.plain.1] {
                        let a = v.abs();
                        c = Some(match c {
                            None => a.clone(),
                            Some(prev) => prev.min(a.clone()),
                        });
                        cc = Some(match cc {
                            None => a.clone(),
                            Some(prev) => prev.max(a),
                        });
                    }
                }
            }
            if let (Some(c), Some(cc)) = (c, cc) {
                belts.push((polygon.edges()[i].m.clone(), c, cc));
            }
        }
        belts.sort_by(|a, b| a.0.cmp(&b.0));
        let eps_f = rat_to_f64(&pair.eps);
        if let Some((m0, _, cc0)) = belts.first() {
            // C_0 x^{m_0} < eps
            let b = (eps_f / rat_to_f64(cc0)).powf(1.0 / rat_to_f64(m0));
            x_bound = x_bound.min(b);
        }
        for w in belts.windows(2) {
            let (m_a, c_a, _) = &w[0];
            let (m_b, _, cc_b) = &w[1];
            // C_b x^{m_b} < c_a x^{m_a}
            let dm = rat_to_f64(m_b) - rat_to_f64(m_a);
            let ratio = rat_to_f64(c_a) / rat_to_f64(cc_b);
            let b = ratio.powf(1.0 / dm);
            x_bound = x_bound.min(b);
        }
    }
    tree.x_disjoint = x_bound * 0.9;
}

/// Outcome of locating a point in the tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Located {
    /// Leaf node id plus the point's local coordinates (x_n, y_n).
    Leaf { node: usize, local: (f64, f64) },
    Boundary,
    Outside,
}

impl RegionTree {
    pub fn leaves(&self) -> Vec<usize> {
        self.nodes
            .iter()
            .filter(|n| n.is_leaf())
            .map(|n| n.id)
            .collect()
    }

    /// Monomial data for a leaf: exponent pair, transform chain, tiers.
    pub fn monomial_data(&self, node: usize) -> (&(BigRational, u64), &[TransformStep]) {
        let n = &self.nodes[node];
        (&n.monomial, &self.pairs[n.pair].chain)
    }

    /// Locates a point of the open sector in the disjoint (plain-tier)
    /// partition. Points within `boundary_tolerance` (relative) of any
    /// region boundary are refused.
    pub fn locate(&self, x: f64, y: f64) -> Located {
        let eps_dom = rat_to_f64(&self.config.epsilon_domain);
        if !(x > 0.0) || x >= eps_dom {
            return Located::Outside;
        }
        match self.sector.y_sign {
            RootSign::Positive if y <= 0.0 => return Located::Outside,
            RootSign::Negative if y >= 0.0 => return Located::Outside,
            _ => {}
        }
        self.locate_in_pair(0, x, y)
    }

    fn locate_in_pair(&self, pair_idx: usize, x: f64, y: f64) -> Located {
        let pair = &self.pairs[pair_idx];
        let tol = self.config.boundary_tolerance;
        let eps_pair = rat_to_f64(&pair.eps);
        if y.abs() >= eps_pair {
            return Located::Outside;
        }
        // Bad tubes first: they take precedence and recurse.
        for &nid in &self.pair_nodes[pair_idx] {
            let node = &self.nodes[nid];
            if let NodeKind::Bad {
                m, center, eps, ..
            } = &node.kind
            {
                let xm = x.powf(rat_to_f64(m));
                let lo = (rat_to_f64(center) - rat_to_f64(eps)) * xm;
                let hi = (rat_to_f64(center) + rat_to_f64(eps)) * xm;
                if y > lo && y < hi {
                    let width = hi - lo;
                    if (y - lo) < tol * width || (hi - y) < tol * width {
                        return Located::Boundary;
                    }
                    return match node.child_pair {
                        None => Located::Leaf {
                            node: nid,
                            local: (x, y),
                        },
                        Some(child_idx) => {
                            match &self.pairs[child_idx].chain.last() {
                                Some(TransformStep::Refined { f, m, .. }) => {
                                    let yn = (y - f.eval_f64(x, 0.0)) / x.powf(rat_to_f64(m));
                                    Located::Leaf {
                                        node: self.pair_nodes[child_idx][0],
                                        local: (x, yn),
                                    }
                                }
                                _ => {
                                    let yn = y / xm - rat_to_f64(center);
                                    self.locate_in_pair(child_idx, x, yn)
                                }
                            }
                        }
                    };
                }
            }
        }
        for &nid in &self.pair_nodes[pair_idx] {
            let node = &self.nodes[nid];
            match &node.kind {
                NodeKind::GoodEdge { m, interval, .. } => {
                    let xm = x.powf(rat_to_f64(m));
                    let lo = rat_to_f64(&interval.plain.0) * xm;
                    let hi = rat_to_f64(&interval.plain.1) * xm;
                    if y >= lo && y <= hi {
                        let width = hi - lo;
                        if (y - lo) < tol * width || (hi - y) < tol * width {
                            return Located::Boundary;
                        }
                        return Located::Leaf {
                            node: nid,
                            local: (x, y),
                        };
                    }
                }
                NodeKind::GoodVertex { upper, lower, .. } => {
                    let ay = y.abs();
                    let up = match upper {
                        None => eps_pair,
                        Some((c, m)) => rat_to_f64(c) * x.powf(rat_to_f64(m)),
                    };
                    match lower {
                        Some((c, m)) => {
                            let dn = rat_to_f64(c) * x.powf(rat_to_f64(m));
                            if ay > dn && ay < up {
                                let rel = up - dn;
                                if (ay - dn) < tol * rel || (up - ay) < tol * rel {
                                    return Located::Boundary;
                                }
                                return Located::Leaf {
                                    node: nid,
                                    local: (x, y),
                                };
                            }
                        }
                        None => {
                            // The rightmost wedge reaches down to the local
                            // x-axis; at stage 0 the axis is a sector seam.
                            let seam = pair.stage == 0 && ay == 0.0;
                            if !seam && ay < up {
                                if (up - ay) < tol * up {
                                    return Located::Boundary;
                                }
                                return Located::Leaf {
                                    node: nid,
                                    local: (x, y),
                                };
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        Located::Boundary
    }

    /// Exact membership for points `x = t^D`, `y` rational, where `D` is
    /// [`RegionTree::exponent_lcm`]. Closed good-edge belts, open tubes and
    /// open vertex wedges tile the sector exactly, so every interior point
    /// matches exactly one leaf.
    pub fn locate_exact(&self, t: &BigRational, y: &BigRational) -> Option<usize> {
        self.locate_exact_in(0, t, y)
    }

    fn locate_exact_in(&self, pair_idx: usize, t: &BigRational, y: &BigRational) -> Option<usize> {
        let pair = &self.pairs[pair_idx];
        if y.abs() >= pair.eps {
            return None;
        }
        let d = self.exponent_lcm;
        let xm = |m: &BigRational| -> BigRational {
            let units = m * rat_i64(d as i64);
            rat_pow(t, units.to_integer().to_u64().expect("integer exponent"))
        };
        for &nid in &self.pair_nodes[pair_idx] {
            let node = &self.nodes[nid];
            if let NodeKind::Bad {
                m, center, eps, ..
            } = &node.kind
            {
                let pw = xm(m);
                let lo = (center - eps) * &pw;
                let hi = (center + eps) * &pw;
                if *y > lo && *y < hi {
                    return match node.child_pair {
                        None => Some(nid),
                        Some(child_idx) => match &self.pairs[child_idx].chain.last() {
                            Some(TransformStep::Refined { .. }) => {
                                Some(self.pair_nodes[child_idx][0])
                            }
                            _ => {
                                let yn = y / &pw - center;
                                self.locate_exact_in(child_idx, t, &yn)
                            }
                        },
                    };
                }
            }
        }
        for &nid in &self.pair_nodes[pair_idx] {
            let node = &self.nodes[nid];
            match &node.kind {
                NodeKind::GoodEdge { m, interval, .. } => {
                    let pw = xm(m);
                    let lo = &interval.plain.0 * &pw;
                    let hi = &interval.plain.1 * &pw;
                    if *y >= lo && *y <= hi {
                        return Some(nid);
                    }
                }
                NodeKind::GoodVertex { upper, lower, .. } => {
                    let ay = y.abs();
                    let up_ok = match upper {
                        None => ay < pair.eps,
                        Some((c, m)) => ay < c * xm(m),
                    };
                    let dn_ok = match lower {
                        None => pair.stage > 0 || !ay.is_zero(),
                        Some((c, m)) => ay > c * xm(m),
                    };
                    if up_ok && dn_ok {
                        return Some(nid);
                    }
                }
                _ => {}
            }
        }
        None
    }

    /// JSON rendering of the whole tree.
    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self.nodes.iter().map(|n| self.node_json(n)).collect();
        let pairs: Vec<Value> = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                json!({
                    "stage": p.stage,
                    "path": p.path_string(),
                    "poly": p.poly.render(),
                    "exact": p.exact,
                    "vertices": self.polygons[i].as_ref().map(|pg| {
                        pg.vertex_coords()
                            .iter()
                            .map(|(p, q)| json!([rat_string(p), q]))
                            .collect::<Vec<_>>()
                    }),
                })
            })
            .collect();
        json!({
            "sector": self.sector.render(),
            "exact": self.exact,
            "truncated": self.truncated,
            "x_disjoint": self.x_disjoint,
            "pairs": pairs,
            "nodes": nodes,
        })
    }

    fn node_json(&self, n: &RegionNode) -> Value {
        let mut v = json!({
            "id": n.id,
            "pair": n.pair,
            "kind": n.kind_name(),
            "monomial": [rat_string(&n.monomial.0), n.monomial.1],
        });
        let obj = v.as_object_mut().unwrap();
        match &n.kind {
            NodeKind::GoodVertex { vertex, m_l, m_r, .. } => {
                obj.insert(
                    "vertex".into(),
                    json!([rat_string(&vertex.0), vertex.1]),
                );
                obj.insert("m_l".into(), json!(m_l.render()));
                obj.insert("m_r".into(), json!(m_r.render()));
            }
            NodeKind::GoodEdge { m, interval, .. } => {
                obj.insert("m".into(), json!(rat_string(m)));
                obj.insert(
                    "interval".into(),
                    json!([
                        rat_string(&interval.plain.0),
                        rat_string(&interval.plain.1)
                    ]),
                );
                obj.insert(
                    "interval_star".into(),
                    json!([rat_string(&interval.star.0), rat_string(&interval.star.1)]),
                );
                obj.insert(
                    "interval_dstar".into(),
                    json!([
                        rat_string(&interval.dstar.0),
                        rat_string(&interval.dstar.1)
                    ]),
                );
            }
            NodeKind::Bad {
                m,
                root,
                center,
                s,
                eps,
                irrational_halt,
                ..
            } => {
                obj.insert("m".into(), json!(rat_string(m)));
                obj.insert("s".into(), json!(s));
                obj.insert("eps".into(), json!(rat_string(eps)));
                obj.insert("center".into(), json!(rat_string(center)));
                let root_json = match &root.enc {
                    RootEnc::Exact(r) => json!({ "exact": rat_string(r) }),
                    RootEnc::Interval { lo, hi } => {
                        json!({ "interval": [rat_string(lo), rat_string(hi)] })
                    }
                };
                obj.insert("root".into(), root_json);
                obj.insert("irrational_halt".into(), json!(irrational_halt));
                obj.insert("child_pair".into(), json!(n.child_pair));
            }
            NodeKind::StableLeaf { f, m, s, truncated } => {
                obj.insert("f".into(), json!(f.render()));
                obj.insert("m".into(), json!(rat_string(m)));
                obj.insert("s".into(), json!(s));
                obj.insert("truncated".into(), json!(truncated));
            }
        }
        let chain: Vec<Value> = self.pairs[n.pair]
            .chain
            .iter()
            .map(|step| match step {
                TransformStep::Branch(b) => json!({
                    "kind": "branch",
                    "r": rat_string(&b.r),
                    "m": rat_string(&b.m),
                    "s": b.s,
                    "exact": b.exact,
                }),
                TransformStep::Refined { f, m, s, truncated } => json!({
                    "kind": "refined",
                    "f": f.render(),
                    "m": rat_string(m),
                    "s": s,
                    "truncated": truncated,
                }),
            })
            .collect();
        obj.insert("chain".into(), json!(chain));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{example_polynomial, parse_poly};
    use crate::rat::rat;

    fn q1() -> SectorLabel {
        SectorLabel::quadrant_1()
    }

    fn pair0(poly: PuiseuxPoly) -> StandardPair {
        StandardPair {
            stage: 0,
            poly,
            eps: ResolveConfig::default().epsilon_domain,
            chain: Vec::new(),
            path: Vec::new(),
            exact: true,
        }
    }

    #[test]
    fn figure_a_partition_counts() {
        let p = example_polynomial(8);
        let pair = pair0(p.clone());
        let polygon = NewtonPolygon::build(&p).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        // 3 bad nodes: roots on E1, E2, E3 in the first quadrant.
        assert_eq!(part.bad.len(), 3);
        // 4 vertex wedges + (2 + 2 + 2) edge components.
        assert_eq!(part.good.len(), 10);
        let h = polygon
            .heights_and_orders(&p, RootSign::Positive)
            .unwrap();
        assert!(part.bad.len() as u64 <= h.ord_total);
    }

    #[test]
    fn monomial_partition_is_single_wedge() {
        let p = parse_poly("x^3*y^2").unwrap();
        let pair = pair0(p.clone());
        let polygon = NewtonPolygon::build(&p).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        assert_eq!(part.bad.len(), 0);
        assert_eq!(part.good.len(), 1);
    }

    #[test]
    fn irrational_root_isolated_in_partition() {
        // y^2 - 2x: bad node at r = sqrt(2), m = 1, flagged irrational when
        // expanded in exact mode.
        let p = parse_poly("y^2 - 2*x").unwrap();
        let pair = pair0(p.clone());
        let polygon = NewtonPolygon::build(&p).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        assert_eq!(part.bad.len(), 1);
        let (kind, _) = &part.bad[0];
        let NodeKind::Bad { root, m, s, .. } = kind else {
            panic!()
        };
        assert!(!root.is_exact());
        assert_eq!(*m, rat(1, 2));
        assert_eq!(*s, 1);
        let err = expand_bad(&pair, kind, &ResolveConfig::default());
        assert!(matches!(err, Err(ResolveError::IrrationalBranch { .. })));
    }

    fn expand_edge_root(p: &PuiseuxPoly, edge: usize) -> StandardPair {
        let pair = pair0(p.clone());
        let polygon = NewtonPolygon::build(p).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        let kind = part
            .bad
            .iter()
            .map(|(k, _)| k)
            .find(|k| matches!(k, NodeKind::Bad { edge: e, .. } if *e == edge))
            .expect("edge has a counted root");
        expand_bad(&pair, kind, &ResolveConfig::default()).unwrap()
    }

    #[test]
    fn figure_b_child_vertex_corrected() {
        // E1 root (r=1, m=1/2): child polygon is the single vertex (4, 1).
        let p = example_polynomial(8);
        let child = expand_edge_root(&p, 0);
        let pg = NewtonPolygon::build(&child.poly).unwrap();
        assert_eq!(pg.vertex_coords(), vec![(rat_i64(4), 1)]);
    }

    #[test]
    fn figure_c_child_vertices() {
        // E2 root (r=1, m=1, s=2): child polygon (6,2)-(8,0).
        let p = example_polynomial(8);
        let child = expand_edge_root(&p, 1);
        let pg = NewtonPolygon::build(&child.poly).unwrap();
        assert_eq!(
            pg.vertex_coords(),
            vec![(rat_i64(6), 2), (rat_i64(8), 0)]
        );
        let h = pg.heights_and_orders(&child.poly, RootSign::Both).unwrap();
        assert_eq!(h.hght_star, 2);
        assert_eq!(h.hght, 2);
        assert_eq!(h.ord_total, 2);
    }

    #[test]
    fn figure_d_child_vertex() {
        // E3 root (r=1, m=2): child polygon single vertex (8,1).
        let p = example_polynomial(8);
        let child = expand_edge_root(&p, 2);
        let pg = NewtonPolygon::build(&child.poly).unwrap();
        assert_eq!(pg.vertex_coords(), vec![(rat_i64(8), 1)]);
    }

    #[test]
    fn stable_translation_along_e2_branch() {
        // N(P_k) = N(P_{k-1}) + (2,0) for the basic iteration, stages 2..=6.
        let p = example_polynomial(8);
        let mut pair = expand_edge_root(&p, 1);
        let mut prev = NewtonPolygon::build(&pair.poly).unwrap().vertex_coords();
        for _k in 2..=6 {
            let polygon = NewtonPolygon::build(&pair.poly).unwrap();
            let part = partition_step(&pair, &polygon, q1()).unwrap();
            assert_eq!(part.bad.len(), 1);
            pair = expand_bad(&pair, &part.bad[0].0, &ResolveConfig::default()).unwrap();
            let cur = NewtonPolygon::build(&pair.poly).unwrap().vertex_coords();
            let shifted: Vec<(BigRational, u64)> = prev
                .iter()
                .map(|(p, q)| (p + rat_i64(2), *q))
                .collect();
            assert_eq!(cur, shifted);
            prev = cur;
        }
    }

    #[test]
    fn detect_stable_on_figure_c_pair() {
        let p = example_polynomial(8);
        let pair = expand_edge_root(&p, 1);
        let polygon = NewtonPolygon::build(&pair.poly).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        let cert = detect_stable(&pair, &polygon, &part).expect("stable");
        assert_eq!(cert.s, 2);
        assert_eq!(cert.m, rat_i64(1));
        // Exact branch: y_1 = x + x^2 + ... + x^7 (the input series shifts
        // down one order under the E2 substitution).
        let f = cert.f.expect("exact certificate");
        assert_eq!(f, parse_poly("series(x, 7)").unwrap());
    }

    #[test]
    fn no_stable_on_root_pair() {
        let p = example_polynomial(8);
        let pair = pair0(p.clone());
        let polygon = NewtonPolygon::build(&p).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        assert!(detect_stable(&pair, &polygon, &part).is_none());
    }

    #[test]
    fn no_stable_for_two_simple_roots() {
        let p = parse_poly("(y-x)*(y-2*x)").unwrap();
        let pair = pair0(p.clone());
        let polygon = NewtonPolygon::build(&p).unwrap();
        let part = partition_step(&pair, &polygon, q1()).unwrap();
        assert!(detect_stable(&pair, &polygon, &part).is_none());
    }

    #[test]
    fn refined_step_exact_factor() {
        // (y - x - x^2)^2 (1 + x): stable at stage 0, exact extraction,
        // leaf vertex (2, 2).
        let p = parse_poly("(y - x - x^2)^2*(1+x)").unwrap();
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        let stable: Vec<&RegionNode> = tree
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::StableLeaf { .. }))
            .collect();
        assert_eq!(stable.len(), 1);
        let leaf = stable[0];
        assert_eq!(leaf.monomial, (rat_i64(2), 2));
        let NodeKind::StableLeaf { ref f, truncated, .. } = leaf.kind else {
            panic!()
        };
        assert_eq!(*f, parse_poly("x + x^2").unwrap());
        assert!(!truncated);
    }

    #[test]
    fn truncated_stable_branch() {
        // y^2 - x^2 (x+1): real branch y = x sqrt(1+x), infinite series;
        // the certificate cannot be exact, so the branch truncates at the
        // budget and flags the leaf.
        let p = parse_poly("y^2 - x^3 - x^2").unwrap();
        let cfg = ResolveConfig {
            truncation_order: 12,
            ..ResolveConfig::default()
        };
        let tree = resolve(&p, q1(), &cfg).unwrap();
        assert!(tree.truncated);
        let stable: Vec<&RegionNode> = tree
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::StableLeaf { .. }))
            .collect();
        assert_eq!(stable.len(), 1);
        let NodeKind::StableLeaf { s, truncated, .. } = stable[0].kind else {
            panic!()
        };
        assert_eq!(s, 1);
        assert!(truncated);
        // Budget rule: iteration stops once p + s m exceeds the order.
        let (p_leaf, q_leaf) = &stable[0].monomial;
        assert_eq!(*q_leaf, 1);
        assert!(*p_leaf > rat_i64(12));
    }

    #[test]
    fn resolve_figure_a_tree_shape() {
        let p = example_polynomial(8);
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        // Three first-stage bad branches.
        let stage0_bad: Vec<&RegionNode> = tree
            .nodes
            .iter()
            .filter(|n| n.pair == 0 && matches!(n.kind, NodeKind::Bad { .. }))
            .collect();
        assert_eq!(stage0_bad.len(), 3);
        // E1 and E3 terminate at single-vertex children; E2 stabilizes.
        let stable_count = tree
            .nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::StableLeaf { .. }))
            .count();
        assert_eq!(stable_count, 1);
        assert!(!tree.truncated);
        assert!(tree.exact);
        // Per-stage bad counts bounded by Ord(P) = 4.
        let mut by_stage = std::collections::BTreeMap::new();
        for n in &tree.nodes {
            if matches!(n.kind, NodeKind::Bad { .. }) {
                *by_stage.entry(tree.pairs[n.pair].stage).or_insert(0u64) += 1;
            }
        }
        for (_, count) in by_stage {
            assert!(count <= 4);
        }
    }

    #[test]
    fn resolve_monomial_depth_zero() {
        let p = parse_poly("x^3*y^2").unwrap();
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        assert_eq!(tree.pairs.len(), 1);
        assert_eq!(tree.leaves().len(), 1);
    }

    #[test]
    fn resolve_zero_polynomial() {
        assert!(matches!(
            resolve(&PuiseuxPoly::zero(), q1(), &ResolveConfig::default()),
            Err(ResolveError::IdenticallyZero)
        ));
    }

    #[test]
    fn resolve_deep_chain_terminates() {
        // (y - x)^2 + x^7: bad at (1,1,2); child (2,2)-(7,0); resolves in a
        // few stages.
        let p = parse_poly("(y-x)^2 + x^7").unwrap();
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        // Stage 1 has the polygon (2,2)-(7,0) whose edge polynomial r^2 + 1
        // has no real roots, so the tree closes there.
        let max_stage = tree.pairs.iter().map(|p| p.stage).max().unwrap();
        assert!(max_stage >= 1);
        assert!(max_stage <= 4);
        assert!(tree.pairs.len() >= 2);
        for n in &tree.nodes {
            if let NodeKind::Bad {
                irrational_halt, ..
            } = n.kind
            {
                assert!(!irrational_halt || !tree.exact);
            }
        }
    }

    #[test]
    fn numeric_mode_expands_irrational_branch() {
        let p = parse_poly("y^2 - 2*x").unwrap();
        let cfg = ResolveConfig {
            mode: Mode::Numeric,
            ..ResolveConfig::default()
        };
        let tree = resolve(&p, q1(), &cfg).unwrap();
        assert!(!tree.exact);
        // The branch expanded: more than one pair exists.
        assert!(tree.pairs.len() > 1);
        // Tracking identity held via structural zeroing.
        let child = &tree.pairs[1];
        let pg = NewtonPolygon::build(&child.poly).unwrap();
        assert_eq!(pg.leftmost().y, 1);
    }

    #[test]
    fn membership_figure_a() {
        let p = example_polynomial(8);
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        // A point exactly on y = x, inside the E2 bad-branch footprint,
        // lands on a leaf under the E2 branch (the local-axis wedge of the
        // stage-1 polygon).
        let x = 1e-9;
        match tree.locate(x, x) {
            Located::Leaf { node, .. } => {
                let n = &tree.nodes[node];
                assert_eq!(tree.pairs[n.pair].stage, 1);
                assert_eq!(tree.pairs[n.pair].path, vec![(1, 0)]);
            }
            other => panic!("expected leaf, got {other:?}"),
        }
        // A point on the deeper branch curve y = x (1 + x + ...) resolves
        // to the stable leaf.
        match tree.locate(x, x * (1.0 + x)) {
            Located::Leaf { node, .. } => {
                let n = &tree.nodes[node];
                assert!(matches!(n.kind, NodeKind::StableLeaf { .. }));
            }
            other => panic!("expected leaf, got {other:?}"),
        }
        // Slopes above C_E1 = 2^11 land in the wedge of the leftmost vertex
        // (1,6); slopes between the root tube and C_E1 stay in the upper
        // good component of the E1 belt. Both sit above every branch curve.
        let xw = 1e-12;
        match tree.locate(xw, 5000.0 * xw.sqrt()) {
            Located::Leaf { node, .. } => {
                let n = &tree.nodes[node];
                let NodeKind::GoodVertex { ref vertex, .. } = n.kind else {
                    panic!("expected vertex wedge, got {:?}", n.kind_name());
                };
                assert_eq!(*vertex, (rat_i64(1), 6));
            }
            other => panic!("expected leaf, got {other:?}"),
        }
        match tree.locate(xw, 10.0 * xw.sqrt()) {
            Located::Leaf { node, .. } => {
                let n = &tree.nodes[node];
                assert_eq!(n.kind_name(), "goodEdge");
            }
            other => panic!("expected leaf, got {other:?}"),
        }
        // Point exactly on y = x: boundary-free interior of the tube, but
        // the exact seam y = x is fine (it is inside the tube, not on its
        // boundary); a point on the tube boundary is refused.
        let eps = match &tree.nodes.iter().find_map(|n| match &n.kind {
            NodeKind::Bad { eps, m, center, .. }
                if *m == rat_i64(1) && *center == rat_i64(1) =>
            {
                Some(eps.clone())
            }
            _ => None,
        }) {
            Some(e) => rat_to_f64(e),
            None => panic!("no E2 tube"),
        };
        let on_boundary = x * (1.0 + eps);
        assert_eq!(tree.locate(x, on_boundary), Located::Boundary);
    }

    #[test]
    fn exact_membership_unique() {
        let p = example_polynomial(8);
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        assert_eq!(tree.exponent_lcm, 2);
        // x = t^2 with t = 1/1000; y = x + x^2 is on the branch partial sum,
        // dead center of the stage-1 tube, resolving to the stable leaf.
        let t = rat(1, 1000);
        let x = rat(1, 1_000_000);
        let y = &x + &x * &x;
        let leaf = tree.locate_exact(&t, &y).expect("interior point");
        assert!(matches!(
            tree.nodes[leaf].kind,
            NodeKind::StableLeaf { .. }
        ));
    }

    #[test]
    fn tree_json_is_deterministic() {
        let p = example_polynomial(6);
        let tree = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        let a = serde_json::to_string(&tree.to_json()).unwrap();
        let tree2 = resolve(&p, q1(), &ResolveConfig::default()).unwrap();
        let b = serde_json::to_string(&tree2.to_json()).unwrap();
        assert_eq!(a, b);
    }
}
