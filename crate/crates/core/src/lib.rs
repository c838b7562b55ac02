//! Exact Newton-polygon monomialization of bivariate polynomials, with sharp
//! decay exponents for the associated bilinear and trilinear oscillatory
//! integral forms and a desk-scale numerical verification harness.

pub mod bipoly;
pub mod error;
pub mod exponent;
pub mod parse;
pub mod polygon;
pub mod puiseux;
pub mod resolve;
pub mod rat;
pub mod svg;
pub mod unipoly;
pub mod verify;

pub use exponent::{analyze, face_rates, phong_stein_delta, reduce_general_projections, ExponentReport, FaceRate};
pub use error::{AlgebraError, ParseError, ResolveError, VerifyError};
pub use polygon::{Face, FaceData, HeightsReport, NewtonPolygon, SlopeBound};
pub use parse::{parse_poly, parse_poly_with, ParseOptions};
pub use resolve::{resolve, Mode, NodeKind, RegionNode, RegionTree, ResolveConfig, SectorLabel, StandardPair, TransformStep};
pub use puiseux::{BranchStep, PuiseuxPoly};
pub use verify::{check_monomial_domination, check_partition_coverage, fit_decay_slope, lambda_grid, run_witness, schur_check, trilinear_quadrature, witness_family, CoverageReport, DominationReport, FnDesc, QuadratureSpec, SchurReport, SlopeFit, WitnessPoint, WitnessSummary};
pub use unipoly::{IsolatedRoot, RootEnc, RootSign, UniPoly};
