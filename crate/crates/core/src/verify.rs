//! Desk-scale numerical verification: oscillatory-form quadrature, the
//! sharpness-witness decay family, log-log slope fits, monomial-domination
//! sampling over the region tree, exact partition-coverage counting, and the
//! Schur-bound spot check.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::VerifyError;
use crate::puiseux::PuiseuxPoly;
use crate::rat::{rat_to_f64, rat_i64};
use crate::resolve::{NodeKind, RegionTree, TransformStep};
use crate::unipoly::RootSign;

/// Cutoff / test-function descriptor on one axis.
#[derive(Debug, Clone)]
pub enum FnDesc {
    /// Indicator of [lo, hi].
    Box { lo: f64, hi: f64 },
    /// Smooth bump exp(1 - 1/(1 - (x-c)^2/r^2)) on (c-r, c+r).
    Bump { center: f64, radius: f64 },
    /// Piecewise-constant values on equal cells over [lo, hi].
    Cells { lo: f64, hi: f64, values: Vec<f64> },
}

impl FnDesc {
    pub fn support(&self) -> (f64, f64) {
        match self {
            FnDesc::Box { lo, hi } => (*lo, *hi),
            FnDesc::Bump { center, radius } => (center - radius, center + radius),
            FnDesc::Cells { lo, hi, .. } => (*lo, *hi),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            FnDesc::Box { lo, hi } => {
                if x >= *lo && x <= *hi {
                    1.0
                } else {
                    0.0
                }
            }
            FnDesc::Bump { center, radius } => {
                let t = (x - center) / radius;
                if t.abs() < 1.0 {
                    (1.0 - 1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
            FnDesc::Cells { lo, hi, values } => {
                if x < *lo || x >= *hi {
                    return 0.0;
                }
                let idx = ((x - lo) / (hi - lo) * values.len() as f64) as usize;
                values[idx.min(values.len() - 1)]
            }
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            FnDesc::Box { lo, hi } => (hi - lo).sqrt(),
            FnDesc::Bump { .. } => {
                // 1-D quadrature of the square.
                let (lo, hi) = self.support();
                let mut sum = 0.0;
                let n = 4096;
                let w = (hi - lo) / n as f64;
                for i in 0..n {
                    let x = lo + (i as f64 + 0.5) * w;
                    sum += self.eval(x).powi(2) * w;
                }
                sum.sqrt()
            }
            FnDesc::Cells { lo, hi, values } => {
                let w = (hi - lo) / values.len() as f64;
                values.iter().map(|v| v * v * w).sum::<f64>().sqrt()
            }
        }
    }
}

/// Specification of one trilinear-form quadrature.
#[derive(Debug, Clone)]
pub struct QuadratureSpec {
    pub phase: PuiseuxPoly,
    /// Cutoff a(x,y) as a product box or bump in each variable; the unit
    /// cutoff is `Box` over the integration region.
    pub cutoff_x: FnDesc,
    pub cutoff_y: FnDesc,
    pub f1: FnDesc,
    pub f2: FnDesc,
    pub f3: FnDesc,
    /// Gauss-Legendre order per panel.
    pub gl_order: usize,
    /// Initial panel count per axis; doubled until the estimate converges.
    pub panels: usize,
    /// Relative error target for the a-posteriori estimate.
    pub rel_tol: f64,
}

impl QuadratureSpec {
    pub fn witness(phase: PuiseuxPoly, h: f64) -> Self {
        QuadratureSpec {
            phase,
            cutoff_x: FnDesc::Box { lo: -h, hi: h },
            cutoff_y: FnDesc::Box { lo: -h, hi: h },
            f1: FnDesc::Box { lo: -h, hi: h },
            f2: FnDesc::Box { lo: -h, hi: h },
            f3: FnDesc::Box {
                lo: -2.0 * h,
                hi: 2.0 * h,
            },
            gl_order: 8,
            panels: 4,
            rel_tol: 1e-6,
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev-based initial guess.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..64 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn integrate_panels(
    spec: &QuadratureSpec,
    lambda: f64,
    panels: usize,
    nodes: &[f64],
    weights: &[f64],
) -> Complex64 {
    let (x_lo_1, x_hi_1) = spec.f1.support();
    let (x_lo_2, x_hi_2) = spec.cutoff_x.support();
    let xlo = x_lo_1.max(x_lo_2);
    let xhi = x_hi_1.min(x_hi_2);
    let (y_lo_1, y_hi_1) = spec.f2.support();
    let (y_lo_2, y_hi_2) = spec.cutoff_y.support();
    let ylo = y_lo_1.max(y_lo_2);
    let yhi = y_hi_1.min(y_hi_2);
    if xlo >= xhi || ylo >= yhi {
        return Complex64::new(0.0, 0.0);
    }
    let pw_x = (xhi - xlo) / panels as f64;
    let pw_y = (yhi - ylo) / panels as f64;
    let mut sum = Complex64::new(0.0, 0.0);
    for px in 0..panels {
        for py in 0..panels {
            let cx = xlo + (px as f64 + 0.5) * pw_x;
            let cy = ylo + (py as f64 + 0.5) * pw_y;
            for (xi, wx) in nodes.iter().zip(weights) {
                let x = cx + 0.5 * pw_x * xi;
                let f1 = spec.f1.eval(x) * spec.cutoff_x.eval(x);
                if f1 == 0.0 {
                    continue;
                }
                for (yi, wy) in nodes.iter().zip(weights) {
                    let y = cy + 0.5 * pw_y * yi;
                    let f2 = spec.f2.eval(y) * spec.cutoff_y.eval(y);
                    if f2 == 0.0 {
                        continue;
                    }
                    let f3 = spec.f3.eval(x + y);
                    if f3 == 0.0 {
                        continue;
                    }
                    let s = spec.phase.eval_f64(x, y);
                    let w = wx * wy * 0.25 * pw_x * pw_y;
                    let amp = f1 * f2 * f3 * w;
                    sum += Complex64::from_polar(amp, lambda * s);
                }
            }
        }
    }
    sum
}

/// Tensor-product Gauss-Legendre value with an a-posteriori error estimate
/// from panel refinement.
pub fn trilinear_quadrature(
    spec: &QuadratureSpec,
    lambda: f64,
) -> Result<(Complex64, f64), VerifyError> {
    let (nodes, weights) = gauss_legendre(spec.gl_order);
    let mut panels = spec.panels.max(1);
    let mut prev = integrate_panels(spec, lambda, panels, &nodes, &weights);
    for _ in 0..6 {
        panels *= 2;
        let cur = integrate_panels(spec, lambda, panels, &nodes, &weights);
        let err = (cur - prev).norm();
        let scale = cur.norm().max(1e-300);
        if err <= spec.rel_tol * scale {
            return Ok((cur, err));
        }
        prev = cur;
    }
    let final_err = (integrate_panels(spec, lambda, panels * 2, &nodes, &weights) - prev).norm();
    Err(VerifyError::NoConvergence { estimate: final_err })
}

/// One witness evaluation: the form value, the norm product and the ratio.
#[derive(Debug, Clone)]
pub struct WitnessPoint {
    pub lambda: f64,
    pub value: Complex64,
    pub quadrature_error: f64,
    pub norm_product: f64,
    pub ratio: f64,
}

/// Drops the homogeneous parts annihilated by the trilinear derivative;
/// the modulation e^{i lambda (sum of degenerate parts)} is absorbed into
/// the test functions without changing their norms.
pub fn effective_phase(s: &PuiseuxPoly) -> Result<PuiseuxPoly, crate::error::AlgebraError> {
    let mut by_degree: std::collections::BTreeMap<u64, PuiseuxPoly> = Default::default();
    for (&(xu, ye), c) in s.terms() {
        let d = xu + ye;
        let entry = by_degree.entry(d).or_insert_with(PuiseuxPoly::zero);
        *entry = entry.add(&PuiseuxPoly::monomial(xu, 1, ye, c.clone()));
    }
    let mut out = PuiseuxPoly::zero();
    for (_, part) in by_degree {
        if !part.trilinear_derivative()?.is_zero() {
            out = out.add(&part);
        }
    }
    Ok(out)
}

/// Smallest power-of-two box scale A with a rigorous phase bound
/// `|lambda S| <= 2^-10` on the witness box for every lambda >= 1.
pub fn witness_scale(s_eff: &PuiseuxPoly, _n0: u64) -> Result<f64, VerifyError> {
    let bound_target = 2f64.powi(-10);
    let mut a: f64 = 2.0;
    for _ in 0..60 {
        // sum |c| A^{-(p+q)}; every degree is >= n0 so lambda^{1 - d/n0} <= 1.
        let mut bound = 0.0;
        for (&(xu, ye), c) in s_eff.terms() {
            let d = (xu + ye) as i32;
            bound += rat_to_f64(&c.abs()) * a.powi(-d);
        }
        if bound <= bound_target {
            return Ok(a);
        }
        a *= 2.0;
    }
    Err(VerifyError::PhaseBound {
        max_phase: f64::INFINITY,
        bound: bound_target,
    })
}

/// The sharpness-witness family at one lambda: indicator test functions on
/// the shrinking box `I_A = [-lambda^(-1/n0)/A, +lambda^(-1/n0)/A]`.
pub fn witness_family(
    s: &PuiseuxPoly,
    lambda: f64,
    a_scale: f64,
) -> Result<WitnessPoint, VerifyError> {
    let s_eff = effective_phase(s).map_err(|_| VerifyError::DegeneratePhase)?;
    if s_eff.is_zero() {
        return Err(VerifyError::DegeneratePhase);
    }
    let n0 = rat_to_f64(&s_eff.mult().expect("nonzero"));
    let h = lambda.powf(-1.0 / n0) / a_scale;
    // Confirm the phase bound by dense sampling, the typed precondition.
    let bound = 2f64.powi(-10);
    let mut max_phase: f64 = 0.0;
    let grid = 17;
    for i in 0..=grid {
        for j in 0..=grid {
            let x = -h + 2.0 * h * i as f64 / grid as f64;
            let y = -h + 2.0 * h * j as f64 / grid as f64;
            max_phase = max_phase.max((lambda * s_eff.eval_f64(x, y)).abs());
        }
    }
    if max_phase > bound {
        return Err(VerifyError::PhaseBound { max_phase, bound });
    }
    let spec = QuadratureSpec::witness(s_eff, h);
    let (value, quadrature_error) = trilinear_quadrature(&spec, lambda)?;
    let norm_product = (2.0 * h).sqrt() * (2.0 * h).sqrt() * (4.0 * h).sqrt();
    Ok(WitnessPoint {
        lambda,
        value,
        quadrature_error,
        norm_product,
        ratio: value.norm() / norm_product,
    })
}

/// Least-squares line on (log lambda, log ratio).
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_decay_slope(points: &[(f64, f64)]) -> Result<SlopeFit, VerifyError> {
    if points.len() < 3 {
        return Err(VerifyError::BadFitInput {
            min: 3,
            got: points.len(),
        });
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(l, r)| (l.ln(), r.ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx = logs.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    if sxx == 0.0 {
        return Err(VerifyError::BadFitInput {
            min: 3,
            got: 0,
        });
    }
    let sxy = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = logs
        .iter()
        .map(|p| (p.1 - (intercept + slope * p.0)).powi(2))
        .sum::<f64>();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
        points: points.len(),
    })
}

/// Geometric lambda grid with `per_decade` points per decade of [lo, hi].
pub fn lambda_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let decades = (hi / lo).log10();
    let count = (decades * per_decade as f64).round() as usize;
    for i in 0..=count {
        out.push(lo * 10f64.powf(i as f64 / per_decade as f64));
    }
    out
}

/// Full witness run across a lambda grid, in parallel with a deterministic
/// (grid-ordered) reduction.
#[derive(Debug, Clone)]
pub struct WitnessSummary {
    pub points: Vec<WitnessPoint>,
    pub fit: SlopeFit,
    pub predicted_slope: f64,
    pub a_scale: f64,
}

pub fn run_witness(
    s: &PuiseuxPoly,
    lambdas: &[f64],
) -> Result<WitnessSummary, VerifyError> {
    let s_eff = effective_phase(s).map_err(|_| VerifyError::DegeneratePhase)?;
    if s_eff.is_zero() {
        return Err(VerifyError::DegeneratePhase);
    }
    let n0 = rat_to_f64(&s_eff.mult().expect("nonzero"));
    let a_scale = witness_scale(&s_eff, n0 as u64)?;
    let points: Result<Vec<WitnessPoint>, VerifyError> = lambdas
        .par_iter()
        .map(|&l| witness_family(s, l, a_scale))
        .collect();
    let points = points?;
    let fit = fit_decay_slope(
        &points
            .iter()
            .map(|p| (p.lambda, p.ratio))
            .collect::<Vec<_>>(),
    )?;
    Ok(WitnessSummary {
        points,
        fit,
        predicted_slope: -1.0 / (2.0 * n0),
        a_scale,
    })
}

/// Band statistics of |P_n| / |x^p y^q| on one good leaf.
#[derive(Debug, Clone)]
pub struct DominationReport {
    pub node: usize,
    /// Per decade: (x, min ratio, max ratio).
    pub decades: Vec<(f64, f64, f64)>,
    pub widths: Vec<f64>,
    pub non_increasing: bool,
}

/// Samples the monomial-domination ratio across x-decades on one leaf.
/// Band widths (max/min per decade) should not grow as x decreases.
pub fn check_monomial_domination(
    tree: &RegionTree,
    node_id: usize,
    xs: &[f64],
    samples: usize,
) -> Option<DominationReport> {
    let node = &tree.nodes[node_id];
    let pair = &tree.pairs[node.pair];
    let poly = &pair.poly;
    let (p, q) = (&node.monomial.0, node.monomial.1);
    let p_f = rat_to_f64(p);
    let eps_pair = rat_to_f64(&pair.eps);
    let mut decades = Vec::new();
    for &x in xs {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let ys: Vec<f64> = match &node.kind {
            NodeKind::GoodEdge { m, interval, .. } => {
                let mf = rat_to_f64(m);
                let a = rat_to_f64(&interval.plain.0);
                let b = rat_to_f64(&interval.plain.1);
                (0..samples)
                    .map(|i| {
                        let t = (i as f64 + 0.5) / samples as f64;
                        let r = a + (b - a) * (0.05 + 0.9 * t);
                        r * x.powf(mf)
                    })
                    .collect()
            }
            NodeKind::GoodVertex { upper, lower, .. } => {
                let up = match upper {
                    None => eps_pair,
                    Some((c, m)) => rat_to_f64(c) * x.powf(rat_to_f64(m)),
                };
                let dn = match lower {
                    None => up * 1e-4,
                    Some((c, m)) => rat_to_f64(c) * x.powf(rat_to_f64(m)),
                };
                if !(dn < up) {
                    return None;
                }
                (0..samples)
                    .map(|i| {
                        let t = (i as f64 + 0.5) / samples as f64;
                        // log-uniform between the wedge curves, kept inside
                        dn * (up / dn).powf(0.05 + 0.9 * t)
                    })
                    .collect()
            }
            NodeKind::StableLeaf { .. } => (0..samples)
                .map(|i| {
                    let t = (i as f64 + 0.5) / samples as f64;
                    let mag = eps_pair * (0.25 + 0.25 * t);
                    if i % 2 == 0 {
                        mag
                    } else {
                        -mag
                    }
                })
                .collect(),
            NodeKind::Bad { .. } => return None,
        };
        for y in ys {
            let v = poly.eval_f64(x, y).abs();
            let mono = x.powf(p_f) * y.abs().powi(q as i32);
            if mono == 0.0 {
                continue;
            }
            let ratio = v / mono;
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        decades.push((x, lo, hi));
    }
    let widths: Vec<f64> = decades.iter().map(|(_, lo, hi)| hi / lo).collect();
    let non_increasing = widths
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-9));
    Some(DominationReport {
        node: node_id,
        decades,
        widths,
        non_increasing,
    })
}

/// Exact partition-coverage report over random sector points.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub total: usize,
    pub single: usize,
    pub duplicates: Vec<(String, Vec<usize>)>,
    pub misses: Vec<String>,
}

impl CoverageReport {
    pub fn fraction_single(&self) -> f64 {
        self.single as f64 / self.total.max(1) as f64
    }
}

/// Evaluates every leaf predicate exactly on `count` pseudo-random points of
/// the sector (x below the tree's strict-ordering threshold) and counts the
/// points claimed by exactly one leaf.
pub fn check_partition_coverage(tree: &RegionTree, count: usize, seed: u64) -> CoverageReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = tree.exponent_lcm;
    let t_max = tree.x_disjoint.powf(1.0 / d as f64) * 0.99;
    let t_min = t_max * 1e-4;
    let eps_dom = rat_to_f64(&tree.config.epsilon_domain);
    let leaves = tree.leaves();
    let mut single = 0usize;
    let mut duplicates = Vec::new();
    let mut misses = Vec::new();
    // Collect branch curves so a fixed share of samples lands near tubes.
    let tube_nodes: Vec<usize> = tree
        .nodes
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::Bad { .. }))
        .map(|n| n.id)
        .collect();
    for i in 0..count {
        let t_f = t_min * (t_max / t_min).powf(rng.gen::<f64>());
        let t = to_dyadic(t_f);
        let x = crate::rat::rat_pow(&t, d);
        let x_f = rat_to_f64(&x);
        let y = if !tube_nodes.is_empty() && i % 5 == 0 {
            // Near-branch sample: pick a tube and offset within 4 eps.
            let nid = tube_nodes[rng.gen_range(0..tube_nodes.len())];
            let y_f = sample_near_tube(tree, nid, x_f, &mut rng);
            match y_f {
                Some(v) if v.abs() < eps_dom && v != 0.0 => to_dyadic(v),
                _ => to_dyadic(sample_plain(x_f, eps_dom, &mut rng, tree)),
            }
        } else {
            to_dyadic(sample_plain(x_f, eps_dom, &mut rng, tree))
        };
        if y.is_zero() || y.abs() >= tree.pairs[0].eps {
            misses.push(format!("({}, {})", t_f, rat_to_f64(&y)));
            continue;
        }
        let mut hits = Vec::new();
        for &leaf in &leaves {
            if leaf_contains_exact(tree, leaf, &t, &y) {
                hits.push(leaf);
            }
        }
        match hits.len() {
            1 => single += 1,
            0 => misses.push(format!("({}, {})", t_f, rat_to_f64(&y))),
            _ => duplicates.push((format!("({}, {})", t_f, rat_to_f64(&y)), hits)),
        }
    }
    CoverageReport {
        total: count,
        single,
        duplicates,
        misses,
    }
}

fn sample_plain(x: f64, eps_dom: f64, rng: &mut ChaCha8Rng, tree: &RegionTree) -> f64 {
    // log-uniform magnitude from below the deepest curve up to the domain top
    let y_hi = eps_dom * 0.98;
    let y_lo = (x.powf(6.0)).max(1e-280).min(y_hi * 1e-12);
    let mag = y_lo * (y_hi / y_lo).powf(rng.gen::<f64>());
    match tree.sector.y_sign {
        RootSign::Negative => -mag,
        _ => mag,
    }
}

fn sample_near_tube(
    tree: &RegionTree,
    node_id: usize,
    x: f64,
    rng: &mut ChaCha8Rng,
) -> Option<f64> {
    // Reconstruct the tube's curve in original coordinates by composing the
    // ancestor chain, then offset by u * 8 eps around the center.
    let node = &tree.nodes[node_id];
    let NodeKind::Bad {
        m, center, eps, ..
    } = &node.kind
    else {
        return None;
    };
    let pair = &tree.pairs[node.pair];
    let mut y = (rat_to_f64(center)
        + rat_to_f64(eps) * 8.0 * (rng.gen::<f64>() - 0.5))
        * x.powf(rat_to_f64(m));
    for step in pair.chain.iter().rev() {
        match step {
            TransformStep::Branch(b) => {
                y = (rat_to_f64(&b.r) + y) * x.powf(rat_to_f64(&b.m));
            }
            TransformStep::Refined { f, m, .. } => {
                y = f.eval_f64(x, 0.0) + y * x.powf(rat_to_f64(m));
            }
        }
    }
    Some(y)
}

/// Dyadic rational with a 24-bit mantissa near v; keeps the exact-predicate
/// arithmetic small while never rounding a positive magnitude to zero.
fn to_dyadic(v: f64) -> BigRational {
    if v == 0.0 || !v.is_finite() {
        return BigRational::zero();
    }
    let e = v.abs().log2().floor() as i64;
    let k = 23 - e;
    let n = (v * 2f64.powi(k as i32)).round() as i64;
    let num = num_bigint::BigInt::from(n);
    if k >= 0 {
        BigRational::new(num, num_bigint::BigInt::from(1u8) << (k as usize))
    } else {
        BigRational::from_integer(num << ((-k) as usize))
    }
}

/// Exact leaf predicate in original coordinates: the point must lie in every
/// ancestor tube and in the leaf's own local region.
pub fn leaf_contains_exact(
    tree: &RegionTree,
    node_id: usize,
    t: &BigRational,
    y: &BigRational,
) -> bool {
    // Collect the ancestor bad nodes from the leaf's pair up to the root.
    let node = &tree.nodes[node_id];
    let mut tubes = Vec::new();
    let mut cursor = match &node.kind {
        // A halted bad node is itself the innermost tube.
        NodeKind::Bad { .. } => Some(node_id),
        _ => node.parent_node,
    };
    let is_bad_leaf = matches!(node.kind, NodeKind::Bad { .. });
    while let Some(nid) = cursor {
        tubes.push(nid);
        cursor = tree.nodes[nid].parent_node;
    }
    tubes.reverse();
    let d = tree.exponent_lcm;
    let xm = |m: &BigRational| -> BigRational {
        let units = m * rat_i64(d as i64);
        crate::rat::rat_pow(t, units.to_integer().to_u64().expect("integer exponent"))
    };
    let mut y_local = y.clone();
    // Domain bound of the root pair.
    if y_local.abs() >= tree.pairs[0].eps {
        return false;
    }
    for &tube_id in &tubes {
        let NodeKind::Bad {
            m, center, eps, ..
        } = &tree.nodes[tube_id].kind
        else {
            unreachable!("ancestors are bad nodes");
        };
        let pw = xm(m);
        let lo = (center - eps) * &pw;
        let hi = (center + eps) * &pw;
        if !(y_local > lo && y_local < hi) {
            return false;
        }
        let is_last = tube_id == *tubes.last().unwrap();
        if is_last && (is_bad_leaf || matches!(node.kind, NodeKind::StableLeaf { .. })) {
            // The leaf region is the tube itself.
            return true;
        }
        y_local = &y_local / &pw - center;
    }
    match &node.kind {
        NodeKind::GoodEdge { m, interval, .. } => {
            let pw = xm(m);
            let lo = &interval.plain.0 * &pw;
            let hi = &interval.plain.1 * &pw;
            y_local >= lo && y_local <= hi
        }
        NodeKind::GoodVertex { upper, lower, .. } => {
            let pair = &tree.pairs[node.pair];
            let ay = y_local.abs();
            let up_ok = match upper {
                None => ay < pair.eps,
                Some((c, m)) => ay < c * xm(m),
            };
            let dn_ok = match lower {
                None => pair.stage > 0 || !ay.is_zero(),
                Some((c, m)) => ay > c * xm(m),
            };
            up_ok && dn_ok
        }
        NodeKind::StableLeaf { .. } | NodeKind::Bad { .. } => {
            unreachable!("tube leaves return early")
        }
    }
}

/// Schur-bound spot check at one (delta_1, delta_2).
#[derive(Debug, Clone)]
pub struct SchurReport {
    pub delta_1: f64,
    pub delta_2: f64,
    /// Ratio of the aligned-indicator extremal triple (closed form).
    pub aligned: f64,
    pub max_random: f64,
    /// max(aligned, max_random): the tracked statistic.
    pub statistic: f64,
}

/// Computes |integral of f1(x) f2(y) f3(x+y) a| / (min(d1,d2)^(1/2)) over
/// unit-norm piecewise-constant triples: the aligned extremal case plus
/// `trials` seeded random triples on 64-cell grids.
pub fn schur_check(
    delta_1: f64,
    delta_2: f64,
    trials: usize,
    seed: u64,
    a_value: f64,
) -> SchurReport {
    let min_half = delta_1.min(delta_2).sqrt();
    // Aligned indicators: integral = d1 d2 / sqrt(d1 d2 (d1+d2)).
    let aligned =
        a_value * (delta_1 * delta_2 / (delta_1 + delta_2)).sqrt() / min_half;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = 64usize;
    let mut max_random: f64 = 0.0;
    for _ in 0..trials {
        let f1 = random_cells(&mut rng, 0.0, delta_1, cells);
        let f2 = random_cells(&mut rng, 0.0, delta_2, cells);
        let f3 = random_cells(&mut rng, 0.0, delta_1 + delta_2, cells);
        let integral = cellwise_trilinear_integral(&f1, &f2, &f3) * a_value;
        let ratio = integral.abs() / min_half;
        max_random = max_random.max(ratio);
    }
    SchurReport {
        delta_1,
        delta_2,
        aligned,
        max_random,
        statistic: aligned.max(max_random),
    }
}

fn random_cells(rng: &mut ChaCha8Rng, lo: f64, hi: f64, cells: usize) -> FnDesc {
    let mut values: Vec<f64> = (0..cells).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
    let w = (hi - lo) / cells as f64;
    let norm = values.iter().map(|v| v * v * w).sum::<f64>().sqrt();
    for v in &mut values {
        *v /= norm;
    }
    FnDesc::Cells { lo, hi, values }
}

/// Exact integral of f1(x) f2(y) f3(x+y) over the support box for
/// piecewise-constant f's: per cell pair, the diagonal strip areas have a
/// closed form.
pub fn cellwise_trilinear_integral(f1: &FnDesc, f2: &FnDesc, f3: &FnDesc) -> f64 {
    let FnDesc::Cells {
        lo: lo1,
        hi: hi1,
        values: v1,
    } = f1
    else {
        panic!("cells expected")
    };
    let FnDesc::Cells {
        lo: lo2,
        hi: hi2,
        values: v2,
    } = f2
    else {
        panic!("cells expected")
    };
    let FnDesc::Cells {
        lo: lo3,
        hi: hi3,
        values: v3,
    } = f3
    else {
        panic!("cells expected")
    };
    let w1 = (hi1 - lo1) / v1.len() as f64;
    let w2 = (hi2 - lo2) / v2.len() as f64;
    let w3 = (hi3 - lo3) / v3.len() as f64;
    let mut total = 0.0;
    for (i, a) in v1.iter().enumerate() {
        if *a == 0.0 {
            continue;
        }
        let x0 = lo1 + i as f64 * w1;
        for (j, b) in v2.iter().enumerate() {
            if *b == 0.0 {
                continue;
            }
            let y0 = lo2 + j as f64 * w2;
            let s_lo = x0 + y0;
            let s_hi = s_lo + w1 + w2;
            // f3 cells intersecting [s_lo, s_hi)
            let k_lo = (((s_lo - lo3) / w3).floor().max(0.0)) as usize;
            let k_hi = ((((s_hi - lo3) / w3).ceil()) as usize).min(v3.len());
            let mut cell_sum = 0.0;
            for (k, c) in v3.iter().enumerate().take(k_hi).skip(k_lo) {
                if *c == 0.0 {
                    continue;
                }
                let u_lo = (lo3 + k as f64 * w3).max(s_lo);
                let u_hi = (lo3 + (k + 1) as f64 * w3).min(s_hi);
                if u_lo >= u_hi {
                    continue;
                }
                let area = strip_area(w1, w2, u_lo - s_lo, u_hi - s_lo);
                cell_sum += c * area;
            }
            total += a * b * cell_sum;
        }
    }
    total
}

/// Area of {(x, y) in [0,w1]x[0,w2] : a <= x + y <= b}.
fn strip_area(w1: f64, w2: f64, a: f64, b: f64) -> f64 {
    area_below(w1, w2, b) - area_below(w1, w2, a)
}

/// Area of {(x, y) in [0,w1]x[0,w2] : x + y <= c}.
fn area_below(w1: f64, w2: f64, c: f64) -> f64 {
    let c = c.clamp(0.0, w1 + w2);
    let lo = w1.min(w2);
    let hi = w1.max(w2);
    if c <= lo {
        0.5 * c * c
    } else if c <= hi {
        0.5 * lo * lo + lo * (c - lo)
    } else {
        w1 * w2 - 0.5 * (w1 + w2 - c).powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    #[test]
    fn quadrature_of_indicator_product_is_area() {
        // S = 0, f1 = f2 = 1 on [0,1], f3 = 1 on [0,2]: exactly 1.
        let spec = QuadratureSpec {
            phase: PuiseuxPoly::zero(),
            cutoff_x: FnDesc::Box { lo: 0.0, hi: 1.0 },
            cutoff_y: FnDesc::Box { lo: 0.0, hi: 1.0 },
            f1: FnDesc::Box { lo: 0.0, hi: 1.0 },
            f2: FnDesc::Box { lo: 0.0, hi: 1.0 },
            f3: FnDesc::Box { lo: 0.0, hi: 2.0 },
            gl_order: 6,
            panels: 2,
            rel_tol: 1e-9,
        };
        let (v, _) = trilinear_quadrature(&spec, 1.0).unwrap();
        assert!((v.re - 1.0).abs() < 1e-12);
        assert!(v.im.abs() < 1e-12);
    }

    #[test]
    fn quadrature_conjugation_symmetry() {
        let spec = QuadratureSpec::witness(parse_poly("x^2*y").unwrap(), 0.05);
        let (plus, _) = trilinear_quadrature(&spec, 1000.0).unwrap();
        let (minus, _) = trilinear_quadrature(&spec, -1000.0).unwrap();
        assert!((plus.re - minus.re).abs() < 1e-12 * plus.norm());
        assert!((plus.im + minus.im).abs() < 1e-12 * plus.norm());
    }

    #[test]
    fn witness_box_value_matches_flat_phase_estimate() {
        // |Lambda| within 2% of |I_A|^2 when the phase is pinned small.
        let s = parse_poly("x^2*y").unwrap();
        let lambda = 1e3;
        let a = 16.0;
        let w = witness_family(&s, lambda, a).unwrap();
        let h = lambda.powf(-1.0 / 3.0) / a;
        let box_area = (2.0 * h) * (2.0 * h);
        assert!((w.value.norm() - box_area).abs() < 0.02 * box_area);
    }

    #[test]
    fn witness_rejects_degenerate_phase() {
        let s = parse_poly("x^2 + y^2 + (x+y)^2").unwrap();
        assert!(matches!(
            witness_family(&s, 1e3, 8.0),
            Err(VerifyError::DegeneratePhase)
        ));
    }

    #[test]
    fn witness_phase_bound_check_fires() {
        // A = 1 leaves |lambda S| ~ 1 on the box for S = x^2 y.
        let s = parse_poly("x^2*y").unwrap();
        assert!(matches!(
            witness_family(&s, 1e3, 1.0),
            Err(VerifyError::PhaseBound { .. })
        ));
    }

    #[test]
    fn slope_fit_exact_power_law() {
        let pts: Vec<(f64, f64)> = (0..10)
            .map(|i| {
                let l = 10f64.powf(2.0 + i as f64 / 3.0);
                (l, l.powf(-1.0 / 6.0))
            })
            .collect();
        let fit = fit_decay_slope(&pts).unwrap();
        assert!((fit.slope + 1.0 / 6.0).abs() < 1e-12);
        assert!(fit.residual < 1e-12);
    }

    #[test]
    fn slope_fit_with_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let pts: Vec<(f64, f64)> = (0..40)
            .map(|i| {
                let l = 10f64.powf(2.0 + i as f64 / 10.0);
                let noise = 1.0 + 0.01 * (rng.gen::<f64>() * 2.0 - 1.0);
                (l, l.powf(-1.0 / 12.0) * noise)
            })
            .collect();
        let fit = fit_decay_slope(&pts).unwrap();
        assert!((fit.slope + 1.0 / 12.0).abs() < 0.01);
    }

    #[test]
    fn slope_fit_rejects_degenerate_input() {
        assert!(fit_decay_slope(&[(1.0, 1.0), (2.0, 0.5)]).is_err());
        assert!(fit_decay_slope(&[(1.0, 1.0), (1.0, 0.5), (1.0, 0.2)]).is_err());
    }

    #[test]
    fn witness_slope_for_x2y() {
        let s = parse_poly("x^2*y").unwrap();
        let grid = lambda_grid(1e2, 1e6, 5);
        let summary = run_witness(&s, &grid).unwrap();
        assert!((summary.fit.slope - summary.predicted_slope).abs() < 0.02);
        assert!((summary.predicted_slope + 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn effective_phase_drops_degenerate_parts() {
        let s = parse_poly("x*y + x^3*y^3").unwrap();
        let eff = effective_phase(&s).unwrap();
        assert_eq!(eff, parse_poly("x^3*y^3").unwrap());
    }

    #[test]
    fn schur_aligned_ratio_is_scale_free() {
        let symmetric: Vec<f64> = [1.0, 0.1, 0.01]
            .iter()
            .map(|&d| schur_check(d, d, 0, 1, 1.0).aligned)
            .collect();
        for v in &symmetric {
            assert!((v - 0.5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn schur_zero_cutoff() {
        let r = schur_check(1.0, 1.0, 10, 1, 0.0);
        assert_eq!(r.statistic, 0.0);
    }

    #[test]
    fn schur_random_trials_bounded_by_aligned() {
        // delta_2-aligned indicator dominates random triples (up to 10%).
        let r = schur_check(1.0, 1e-4, 100, 42, 1.0);
        assert!(r.max_random <= r.aligned * 1.1);
    }

    #[test]
    fn cell_integral_matches_quadrature() {
        // Cross-check the closed-form cell integral against quadrature.
        let f1 = FnDesc::Cells {
            lo: 0.0,
            hi: 1.0,
            values: vec![1.0, -0.5, 0.25, 2.0],
        };
        let f2 = FnDesc::Cells {
            lo: 0.0,
            hi: 1.0,
            values: vec![0.5, 1.5, -1.0, 1.0],
        };
        let f3 = FnDesc::Cells {
            lo: 0.0,
            hi: 2.0,
            values: vec![1.0, 0.0, -1.0, 0.5, 2.0, 1.0, -0.5, 0.25],
        };
        let exact = cellwise_trilinear_integral(&f1, &f2, &f3);
        // Riemann check on a fine grid.
        let n = 2000;
        let mut approx = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) / n as f64;
            for j in 0..n {
                let y = (j as f64 + 0.5) / n as f64;
                approx += f1.eval(x) * f2.eval(y) * f3.eval(x + y) / (n * n) as f64;
            }
        }
        assert!((exact - approx).abs() < 1e-3);
    }

    #[test]
    fn domination_on_monomial_leaf() {
        use crate::resolve::{resolve, ResolveConfig, SectorLabel};
        let p = parse_poly("3*x^3*y^2").unwrap();
        let tree = resolve(&p, SectorLabel::quadrant_1(), &ResolveConfig::default()).unwrap();
        let leaf = tree.leaves()[0];
        let rep =
            check_monomial_domination(&tree, leaf, &[1e-3, 1e-4, 1e-5, 1e-6], 16).unwrap();
        for (_, lo, hi) in &rep.decades {
            assert!((lo - 3.0).abs() < 1e-9);
            assert!((hi - 3.0).abs() < 1e-9);
        }
        assert!(rep.non_increasing);
    }

    #[test]
    fn coverage_on_monomial_tree_is_total() {
        use crate::resolve::{resolve, ResolveConfig, SectorLabel};
        let p = parse_poly("x^3*y^2").unwrap();
        let tree = resolve(&p, SectorLabel::quadrant_1(), &ResolveConfig::default()).unwrap();
        let rep = check_partition_coverage(&tree, 500, 11);
        assert_eq!(rep.single, 500);
        assert!(rep.duplicates.is_empty());
        assert!(rep.misses.is_empty());
    }
}
