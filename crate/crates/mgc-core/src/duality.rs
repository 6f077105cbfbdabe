//! Max-flow/min-cut duality for the Cheeger problem and 1-Laplacian
//! eigenpair verification, both reduced to exact LPs.
//!
//! The dual flow problem minimizes the sup norm of a Kirchhoff field with
//! slope exactly 1 on the region and free slope elsewhere; strong duality
//! makes its optimum the reciprocal of the Cheeger constant, so the gap
//! against the enumeration solver is a literal equality test.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::cheeger::{cheeger_cut, cheeger_within, ratio, CheegerError, CheegerOptions};
use crate::field::VectorFieldZ;
use crate::function::{EdgePiecewise, PiecewiseFunction};
use crate::graph::{EdgeEnd, MetricGraph};
use crate::lp::{Cmp, LinearProgram, LpError, LpOutcome};
use crate::measures::total_variation;
use crate::rational::Rat;
use crate::subset::GraphSubset;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualityError {
    NotNormalized,
    NotACheegerCut,
    /// The dual LP reported infeasible; cannot occur for ell(Omega) < ell(Gamma).
    InfeasibleDual,
    NotPiecewiseConstant,
    /// The LP witnesses failed the independent recheck.
    Internal(&'static str),
    Lp(LpError),
    Cheeger(CheegerError),
}

impl fmt::Display for DualityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualityError::NotNormalized => write!(f, "function is not L1-normalized"),
            DualityError::NotACheegerCut => write!(f, "set is not a Cheeger cut"),
            DualityError::InfeasibleDual => write!(f, "dual flow problem infeasible"),
            DualityError::NotPiecewiseConstant => write!(f, "function is not piecewise constant"),
            DualityError::Internal(what) => write!(f, "internal inconsistency: {what}"),
            DualityError::Lp(e) => write!(f, "lp: {e}"),
            DualityError::Cheeger(e) => write!(f, "cheeger: {e}"),
        }
    }
}

impl core::error::Error for DualityError {}

impl From<LpError> for DualityError {
    fn from(e: LpError) -> Self {
        DualityError::Lp(e)
    }
}

impl From<CheegerError> for DualityError {
    fn from(e: CheegerError) -> Self {
        DualityError::Cheeger(e)
    }
}

/// Primal/dual optimality certificate for a Cheeger problem.
#[derive(Debug, Clone)]
pub struct CheegerCertificate {
    pub primal_value: Rat,
    pub witness: GraphSubset,
    pub dual_field: VectorFieldZ,
    /// 1 / ||z||_inf of the dual field.
    pub dual_value: Rat,
    /// primal - dual, nonnegative by weak duality; zero by strong duality.
    pub gap: Rat,
}

/// Node grid of an edge: 0, the region's arc endpoints, the edge length.
fn edge_grid(graph: &MetricGraph, region: &GraphSubset, edge: &str) -> Vec<Rat> {
    let mut grid = alloc::vec![Rat::zero()];
    for a in region.arcs_on(edge) {
        grid.push(a.start.clone());
        grid.push(a.end.clone());
    }
    grid.push(graph.edge(edge).unwrap().length.clone());
    grid.sort();
    grid.dedup();
    grid
}

fn is_region_piece(region: &GraphSubset, edge: &str, x0: &Rat, x1: &Rat) -> bool {
    region
        .arcs_on(edge)
        .iter()
        .any(|a| &a.start <= x0 && x1 <= &a.end)
}

struct NodeRef {
    var: usize,
    offset: Rat,
}

/// Chain elimination: consecutive nodes joined by a slope-1 region piece
/// share one variable with a growing offset; free pieces start new
/// variables. Adds Kirchhoff rows for every vertex.
fn build_dual_chains(
    graph: &MetricGraph,
    omega: &GraphSubset,
    lp: &mut LinearProgram,
) -> BTreeMap<String, Vec<(Rat, NodeRef)>> {
    let mut node_refs: BTreeMap<String, Vec<(Rat, NodeRef)>> = BTreeMap::new();
    for e in graph.edges() {
        let grid = edge_grid(graph, omega, &e.id);
        let mut refs: Vec<(Rat, NodeRef)> = Vec::new();
        for (i, x) in grid.iter().enumerate() {
            if i > 0 && is_region_piece(omega, &e.id, &grid[i - 1], x) {
                let piece_len = x.clone() - grid[i - 1].clone();
                let prev = &refs[i - 1].1;
                let r = NodeRef {
                    var: prev.var,
                    offset: prev.offset.clone() + piece_len,
                };
                refs.push((x.clone(), r));
            } else {
                let var = lp.add_var(&alloc::format!("z[{}@{}]", e.id, x), None, None);
                refs.push((
                    x.clone(),
                    NodeRef {
                        var,
                        offset: Rat::zero(),
                    },
                ));
            }
        }
        node_refs.insert(e.id.clone(), refs);
    }
    for v in graph.vertices() {
        let mut coeffs: Vec<(usize, Rat)> = Vec::new();
        let mut rhs = Rat::zero();
        for (eid, end) in graph.incident(v).unwrap() {
            let refs = &node_refs[eid];
            let (sign, r) = match end {
                EdgeEnd::Tail => (-Rat::one(), &refs.first().unwrap().1),
                EdgeEnd::Head => (Rat::one(), &refs.last().unwrap().1),
            };
            coeffs.push((r.var, sign.clone()));
            rhs -= sign * r.offset.clone();
        }
        lp.add_constraint(coeffs, Cmp::Eq, rhs);
    }
    node_refs
}

fn field_from_refs(
    graph: &MetricGraph,
    node_refs: &BTreeMap<String, Vec<(Rat, NodeRef)>>,
    assignment: &[Rat],
) -> Result<VectorFieldZ, DualityError> {
    let mut nodes = BTreeMap::new();
    for (eid, refs) in node_refs {
        let edge_nodes: Vec<(Rat, Rat)> = refs
            .iter()
            .map(|(x, r)| (x.clone(), assignment[r.var].clone() + r.offset.clone()))
            .collect();
        nodes.insert(eid.clone(), edge_nodes);
    }
    VectorFieldZ::from_nodes(graph, nodes).map_err(|_| DualityError::Internal("field"))
}

/// Solves the dual flow problem: minimize ||z||_inf over piecewise-affine
/// Kirchhoff fields with slope exactly 1 on the region. Returns the full
/// certificate against the enumeration primal.
pub fn dual_flow(
    graph: &MetricGraph,
    omega: &GraphSubset,
    opts: &CheegerOptions,
) -> Result<CheegerCertificate, DualityError> {
    let primal = cheeger_within(graph, omega, opts)?;

    let mut lp = LinearProgram::new();
    let t = lp.add_var("t", Some(Rat::zero()), None);
    let node_refs = build_dual_chains(graph, omega, &mut lp);

    // |z(node)| <= t at every node.
    for refs in node_refs.values() {
        for (_, r) in refs {
            lp.add_constraint(
                alloc::vec![(r.var, Rat::one()), (t, -Rat::one())],
                Cmp::Le,
                -r.offset.clone(),
            );
            lp.add_constraint(
                alloc::vec![(r.var, -Rat::one()), (t, -Rat::one())],
                Cmp::Le,
                r.offset.clone(),
            );
        }
    }

    lp.set_objective(alloc::vec![(t, Rat::one())]);
    let (t_star, assignment) = match lp.solve()? {
        LpOutcome::Optimal { value, assignment } => (value, assignment),
        LpOutcome::Infeasible => return Err(DualityError::InfeasibleDual),
        LpOutcome::Unbounded => return Err(DualityError::Internal("dual flow unbounded")),
    };
    if !t_star.is_positive() {
        return Err(DualityError::Internal("dual norm not positive"));
    }

    let dual_field = field_from_refs(graph, &node_refs, &assignment)?;
    debug_assert!(dual_field.is_kirchhoff(graph));
    debug_assert_eq!(dual_field.sup_norm(), t_star);

    let dual_value = Rat::one() / t_star;
    let gap = primal.value.clone() - dual_value.clone();
    debug_assert!(!gap.is_negative());
    Ok(CheegerCertificate {
        primal_value: primal.value,
        witness: primal.witness,
        dual_field,
        dual_value,
        gap,
    })
}

/// An extreme point of the dual feasible set {slope 1 on the region,
/// Kirchhoff, |z(node)| <= bound}, minimizing a caller-chosen objective over
/// the chain variables. Returns None when the bound is too tight. Convex
/// combinations of such fields are again feasible, which is how the sampling
/// commands produce random feasible duals.
pub fn dual_extreme_field(
    graph: &MetricGraph,
    omega: &GraphSubset,
    bound: &Rat,
    objective: &mut dyn FnMut(usize) -> Rat,
) -> Result<Option<VectorFieldZ>, DualityError> {
    let mut lp = LinearProgram::new();
    let node_refs = build_dual_chains(graph, omega, &mut lp);
    for refs in node_refs.values() {
        for (_, r) in refs {
            lp.add_constraint(
                alloc::vec![(r.var, Rat::one())],
                Cmp::Le,
                bound.clone() - r.offset.clone(),
            );
            lp.add_constraint(
                alloc::vec![(r.var, -Rat::one())],
                Cmp::Le,
                bound.clone() + r.offset.clone(),
            );
        }
    }
    let n = lp.num_vars();
    lp.set_objective((0..n).map(|i| (i, objective(i))).collect());
    match lp.solve()? {
        LpOutcome::Optimal { assignment, .. } => {
            let field = field_from_refs(graph, &node_refs, &assignment)?;
            debug_assert!(field.is_kirchhoff(graph));
            Ok(Some(field))
        }
        LpOutcome::Infeasible => Ok(None),
        LpOutcome::Unbounded => Err(DualityError::Internal("bounded set unbounded")),
    }
}

/// Feasibility form of the max-flow problem: does a Kirchhoff field with
/// ||z||_inf <= 1 and slope >= h on the region exist? True iff h is at most
/// the region's Cheeger constant.
pub fn dual_feasible(
    graph: &MetricGraph,
    omega: &GraphSubset,
    h: &Rat,
) -> Result<bool, DualityError> {
    let mut lp = LinearProgram::new();
    let mut node_vars: BTreeMap<String, Vec<(Rat, usize)>> = BTreeMap::new();
    for e in graph.edges() {
        let grid = edge_grid(graph, omega, &e.id);
        let vars: Vec<(Rat, usize)> = grid
            .iter()
            .map(|x| {
                (
                    x.clone(),
                    lp.add_var(
                        &alloc::format!("z[{}@{}]", e.id, x),
                        Some(-Rat::one()),
                        Some(Rat::one()),
                    ),
                )
            })
            .collect();
        for w in vars.windows(2) {
            let (x0, v0) = &w[0];
            let (x1, v1) = &w[1];
            if is_region_piece(omega, &e.id, x0, x1) {
                let dx = x1.clone() - x0.clone();
                lp.add_constraint(
                    alloc::vec![(*v1, Rat::one()), (*v0, -Rat::one())],
                    Cmp::Ge,
                    h.clone() * dx,
                );
            }
        }
        node_vars.insert(e.id.clone(), vars);
    }
    for v in graph.vertices() {
        let mut coeffs: Vec<(usize, Rat)> = Vec::new();
        for (eid, end) in graph.incident(v).unwrap() {
            let vars = &node_vars[eid];
            match end {
                EdgeEnd::Tail => coeffs.push((vars.first().unwrap().1, -Rat::one())),
                EdgeEnd::Head => coeffs.push((vars.last().unwrap().1, Rat::one())),
            }
        }
        lp.add_constraint(coeffs, Cmp::Eq, Rat::zero());
    }
    lp.set_objective(alloc::vec![]);
    Ok(matches!(lp.solve()?, LpOutcome::Optimal { .. }))
}

#[derive(Debug, Clone, PartialEq)]
pub enum DualNormOutcome {
    /// Minimal sup norm and a field attaining it.
    Value(Rat, VectorFieldZ),
    /// No Kirchhoff field has z' = -f; forced whenever int f != 0.
    Infeasible,
}

/// The dual norm of a piecewise-constant source: min ||z||_inf over
/// Kirchhoff fields with z' = -f on every segment.
pub fn dual_norm(
    graph: &MetricGraph,
    f: &PiecewiseFunction,
) -> Result<DualNormOutcome, DualityError> {
    for (_, p) in f.edges() {
        if p.segments.iter().any(|(a, b)| a != b) {
            return Err(DualityError::NotPiecewiseConstant);
        }
    }

    let mut lp = LinearProgram::new();
    let t = lp.add_var("t", Some(Rat::zero()), None);
    // One chain variable per edge; every piece is an equality with offset
    // accumulating -f * dx.
    struct NodeRef {
        var: usize,
        offset: Rat,
    }
    let mut node_refs: BTreeMap<String, Vec<(Rat, NodeRef)>> = BTreeMap::new();
    for e in graph.edges() {
        let p = f.on_edge(&e.id);
        let var = lp.add_var(&alloc::format!("z[{}]", e.id), None, None);
        let mut refs = alloc::vec![(
            Rat::zero(),
            NodeRef {
                var,
                offset: Rat::zero(),
            }
        )];
        for (i, (fv, _)) in p.segments.iter().enumerate() {
            let x1 = p.breakpoints[i + 1].clone();
            let dx = x1.clone() - p.breakpoints[i].clone();
            let prev = &refs.last().unwrap().1;
            let offset = prev.offset.clone() - fv.clone() * dx;
            refs.push((x1, NodeRef { var, offset }));
        }
        node_refs.insert(e.id.clone(), refs);
    }
    for refs in node_refs.values() {
        for (_, r) in refs {
            lp.add_constraint(
                alloc::vec![(r.var, Rat::one()), (t, -Rat::one())],
                Cmp::Le,
                -r.offset.clone(),
            );
            lp.add_constraint(
                alloc::vec![(r.var, -Rat::one()), (t, -Rat::one())],
                Cmp::Le,
                r.offset.clone(),
            );
        }
    }
    for v in graph.vertices() {
        let mut coeffs: Vec<(usize, Rat)> = Vec::new();
        let mut rhs = Rat::zero();
        for (eid, end) in graph.incident(v).unwrap() {
            let refs = &node_refs[eid];
            let (sign, r) = match end {
                EdgeEnd::Tail => (-Rat::one(), &refs.first().unwrap().1),
                EdgeEnd::Head => (Rat::one(), &refs.last().unwrap().1),
            };
            coeffs.push((r.var, sign.clone()));
            rhs -= sign * r.offset.clone();
        }
        lp.add_constraint(coeffs, Cmp::Eq, rhs);
    }
    lp.set_objective(alloc::vec![(t, Rat::one())]);
    match lp.solve()? {
        LpOutcome::Optimal { value, assignment } => {
            let mut nodes = BTreeMap::new();
            for (eid, refs) in &node_refs {
                nodes.insert(
                    eid.clone(),
                    refs.iter()
                        .map(|(x, r)| (x.clone(), assignment[r.var].clone() + r.offset.clone()))
                        .collect(),
                );
            }
            let z = VectorFieldZ::from_nodes(graph, nodes)
                .map_err(|_| DualityError::Internal("field"))?;
            debug_assert!(z.is_kirchhoff(graph));
            Ok(DualNormOutcome::Value(value, z))
        }
        LpOutcome::Infeasible => Ok(DualNormOutcome::Infeasible),
        LpOutcome::Unbounded => Err(DualityError::Internal("dual norm unbounded")),
    }
}

/// A verified 1-Laplacian eigenpair with its witnesses.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda: Rat,
    pub u: PiecewiseFunction,
    /// Sign selection, constant on each refined segment of u.
    pub xi: PiecewiseFunction,
    /// Kirchhoff field with ||z||_inf <= 1 and z' = -lambda xi.
    pub z: VectorFieldZ,
    pub xi_integral: Rat,
    pub zero_median: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EigenRejection {
    /// TV(u) differs from lambda.
    TvMismatch { tv: Rat },
    /// lambda != 0 but 0 is not a median of u.
    Median,
    /// lambda = 0 but u is not the normalized constant.
    NotConstant,
    /// No sign selection and Kirchhoff field satisfy the slope equations.
    NoSelection,
}

impl fmt::Display for EigenRejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenRejection::TvMismatch { tv } => {
                write!(f, "TV(u) = {} differs from lambda", crate::rational::format_rat(tv))
            }
            EigenRejection::Median => write!(f, "median: 0 not in med(u)"),
            EigenRejection::NotConstant => write!(f, "lambda = 0 requires constant u"),
            EigenRejection::NoSelection => write!(f, "no feasible sign selection and field"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum VerifyOutcome {
    Accepted(Eigenpair),
    Rejected(EigenRejection),
}

/// Sign of a refined segment: +1, -1, or 0 (identically zero).
fn segment_sign(vl: &Rat, vr: &Rat) -> i8 {
    if vl.is_positive() || vr.is_positive() {
        1
    } else if vl.is_negative() || vr.is_negative() {
        -1
    } else {
        0
    }
}

/// Checks whether (lambda, u) is an eigenpair of the minus 1-Laplacian by
/// exact feasibility: TV(u) = lambda, the median condition, and an LP for a
/// sign selection xi and Kirchhoff field z with ||z||_inf <= 1 and
/// z' = -lambda xi. All returned witnesses are re-checked independently.
pub fn verify_eigenpair(
    graph: &MetricGraph,
    lambda: &Rat,
    u: &PiecewiseFunction,
) -> Result<VerifyOutcome, DualityError> {
    if u.l1_norm() != Rat::one() {
        return Err(DualityError::NotNormalized);
    }
    let tv = total_variation(graph, u);
    if &tv != lambda {
        return Ok(VerifyOutcome::Rejected(EigenRejection::TvMismatch { tv }));
    }
    let median = u.median(graph);
    if lambda.is_zero() {
        if !u.is_constant() {
            return Ok(VerifyOutcome::Rejected(EigenRejection::NotConstant));
        }
        // u = +-1/ell(Gamma); xi is the constant sign, z = 0.
        let sign = if u.integral().is_positive() {
            Rat::one()
        } else {
            -Rat::one()
        };
        let xi = PiecewiseFunction::constant(graph, &sign);
        let pair = Eigenpair {
            lambda: lambda.clone(),
            u: u.clone(),
            xi_integral: xi.integral(),
            xi,
            z: VectorFieldZ::zero(graph),
            zero_median: median.contains_zero(),
        };
        check_eigenpair(graph, &pair).map_err(DualityError::Internal)?;
        return Ok(VerifyOutcome::Accepted(pair));
    }
    if !median.contains_zero() {
        return Ok(VerifyOutcome::Rejected(EigenRejection::Median));
    }

    let refined = u.refined_at_zeros();
    let mut lp = LinearProgram::new();
    struct SegVar {
        xi: usize,
    }
    let mut xi_vars: BTreeMap<String, Vec<SegVar>> = BTreeMap::new();
    let mut z_vars: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (eid, p) in refined.edges() {
        let mut segs = Vec::new();
        let zs: Vec<usize> = p
            .breakpoints
            .iter()
            .map(|x| {
                lp.add_var(
                    &alloc::format!("z[{eid}@{x}]"),
                    Some(-Rat::one()),
                    Some(Rat::one()),
                )
            })
            .collect();
        for (i, (vl, vr)) in p.segments.iter().enumerate() {
            let (lo, hi) = match segment_sign(vl, vr) {
                1 => (Rat::one(), Rat::one()),
                -1 => (-Rat::one(), -Rat::one()),
                _ => (-Rat::one(), Rat::one()),
            };
            let xi = lp.add_var(&alloc::format!("xi[{eid}#{i}]"), Some(lo), Some(hi));
            segs.push(SegVar { xi });
            // z(x1) - z(x0) + lambda * dx * xi = 0.
            let dx = p.breakpoints[i + 1].clone() - p.breakpoints[i].clone();
            lp.add_constraint(
                alloc::vec![
                    (zs[i + 1], Rat::one()),
                    (zs[i], -Rat::one()),
                    (xi, lambda.clone() * dx),
                ],
                Cmp::Eq,
                Rat::zero(),
            );
        }
        xi_vars.insert(eid.clone(), segs);
        z_vars.insert(eid.clone(), zs);
    }
    for v in graph.vertices() {
        let mut coeffs: Vec<(usize, Rat)> = Vec::new();
        for (eid, end) in graph.incident(v).unwrap() {
            let zs = &z_vars[eid];
            match end {
                EdgeEnd::Tail => coeffs.push((*zs.first().unwrap(), -Rat::one())),
                EdgeEnd::Head => coeffs.push((*zs.last().unwrap(), Rat::one())),
            }
        }
        lp.add_constraint(coeffs, Cmp::Eq, Rat::zero());
    }
    lp.set_objective(alloc::vec![]);
    let assignment = match lp.solve()? {
        LpOutcome::Optimal { assignment, .. } => assignment,
        LpOutcome::Infeasible => return Ok(VerifyOutcome::Rejected(EigenRejection::NoSelection)),
        LpOutcome::Unbounded => return Err(DualityError::Internal("feasibility unbounded")),
    };

    let mut xi_edges = BTreeMap::new();
    let mut z_edges = BTreeMap::new();
    for (eid, p) in refined.edges() {
        let segs = &xi_vars[eid];
        let zs = &z_vars[eid];
        xi_edges.insert(
            eid.clone(),
            EdgePiecewise {
                breakpoints: p.breakpoints.clone(),
                segments: segs
                    .iter()
                    .map(|s| (assignment[s.xi].clone(), assignment[s.xi].clone()))
                    .collect(),
            },
        );
        z_edges.insert(
            eid.clone(),
            p.breakpoints
                .iter()
                .zip(zs)
                .map(|(x, zv)| (x.clone(), assignment[*zv].clone()))
                .collect::<Vec<_>>(),
        );
    }
    let xi = PiecewiseFunction::from_edges(graph, xi_edges)
        .map_err(|_| DualityError::Internal("xi"))?;
    let z =
        VectorFieldZ::from_nodes(graph, z_edges).map_err(|_| DualityError::Internal("z"))?;
    let pair = Eigenpair {
        lambda: lambda.clone(),
        u: u.clone(),
        xi_integral: xi.integral(),
        xi,
        z,
        zero_median: median.contains_zero(),
    };
    check_eigenpair(graph, &pair).map_err(DualityError::Internal)?;
    Ok(VerifyOutcome::Accepted(pair))
}

/// Independent recheck of every eigenpair clause, without trusting the LP:
/// normalization, TV = lambda, the sign selection, the Kirchhoff and norm
/// bounds on z, the slope equations, and the divergence identity.
pub fn check_eigenpair(graph: &MetricGraph, pair: &Eigenpair) -> Result<(), &'static str> {
    if pair.u.l1_norm() != Rat::one() {
        return Err("u not normalized");
    }
    if total_variation(graph, &pair.u) != pair.lambda {
        return Err("TV(u) != lambda");
    }
    if !pair.z.is_kirchhoff(graph) {
        return Err("z not Kirchhoff");
    }
    if pair.z.sup_norm() > Rat::one() {
        return Err("||z||_inf > 1");
    }
    // xi in sign(u) segmentwise and the slope equations z' = -lambda xi.
    let refined = pair.u.refined_at_zeros();
    for (eid, p) in refined.edges() {
        for (i, (vl, vr)) in p.segments.iter().enumerate() {
            let (x0, x1) = (&p.breakpoints[i], &p.breakpoints[i + 1]);
            let mid = (x0.clone() + x1.clone()) / Rat::from_integer(2.into());
            let xi_here = eval_segmentwise(&pair.xi, eid, &mid);
            match segment_sign(vl, vr) {
                1 if xi_here != Rat::one() => return Err("xi != 1 on {u > 0}"),
                -1 if xi_here != -Rat::one() => return Err("xi != -1 on {u < 0}"),
                0 if xi_here.clone().abs() > Rat::one() => return Err("|xi| > 1"),
                _ => {}
            }
            // Slope of z across (x0, x1): z is affine on pieces of its own
            // grid; the slope equation must hold on every sub-piece.
            let mut xs: Vec<Rat> = pair
                .z
                .nodes_on(eid)
                .iter()
                .map(|(x, _)| x.clone())
                .filter(|x| x > x0 && x < x1)
                .collect();
            xs.insert(0, x0.clone());
            xs.push(x1.clone());
            for w in xs.windows(2) {
                let z0 = pair.z.value_at(eid, &w[0]);
                let z1 = pair.z.value_at(eid, &w[1]);
                let slope = (z1 - z0) / (w[1].clone() - w[0].clone());
                if slope != -pair.lambda.clone() * xi_here.clone() {
                    return Err("z' != -lambda xi");
                }
            }
        }
    }
    if !pair.lambda.is_zero() {
        if !pair.zero_median {
            return Err("lambda != 0 without zero median");
        }
        if !pair.xi_integral.is_zero() {
            return Err("int xi != 0");
        }
    }
    Ok(())
}

fn eval_segmentwise(f: &PiecewiseFunction, edge: &str, x: &Rat) -> Rat {
    let p = f.on_edge(edge);
    for (i, (vl, _)) in p.segments.iter().enumerate() {
        if x >= &p.breakpoints[i] && x <= &p.breakpoints[i + 1] {
            return vl.clone();
        }
    }
    panic!("coordinate out of range");
}

/// Builds the eigenpair carried by a global Cheeger cut: u is the normalized
/// indicator and the witnesses come from the verification LP.
pub fn construct_eigenpair_from_cut(
    graph: &MetricGraph,
    cut: &GraphSubset,
    opts: &CheegerOptions,
) -> Result<Eigenpair, DualityError> {
    let h = cheeger_cut(graph, opts)?.value;
    let r = ratio(graph, cut)?;
    let half = graph.total_length().clone() / Rat::from_integer(2.into());
    if r != h || cut.length() > half {
        return Err(DualityError::NotACheegerCut);
    }
    let u = PiecewiseFunction::scaled_indicator(
        graph,
        cut,
        &(Rat::one() / cut.length()),
        &Rat::zero(),
    );
    match verify_eigenpair(graph, &h, &u)? {
        VerifyOutcome::Accepted(pair) => Ok(pair),
        VerifyOutcome::Rejected(_) => Err(DualityError::Internal(
            "cut indicator failed eigenpair verification",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};
    use crate::testutil::{
        ball_five_eighths, equilateral_tripod, four_vertex_tripod, interval, one_edge,
        tripod_cut_field,
    };
    use alloc::string::ToString;

    fn opts() -> CheegerOptions {
        CheegerOptions::default()
    }

    #[test]
    fn dual_flow_interior_interval() {
        // Omega = [1, 3] inside a single edge: t* = 1, h_d = 2/(b-a) = 1.
        let g = one_edge(5);
        let omega = interval(&g, rat_int(1), rat_int(3));
        let cert = dual_flow(&g, &omega, &opts()).unwrap();
        assert_eq!(cert.dual_field.sup_norm(), rat_int(1));
        assert_eq!(cert.dual_value, rat_int(1));
        assert_eq!(cert.primal_value, rat_int(1));
        assert_eq!(cert.gap, rat_int(0));
    }

    #[test]
    fn dual_flow_matches_the_ball_example() {
        let g = four_vertex_tripod();
        let cert = dual_flow(&g, &ball_five_eighths(&g), &opts()).unwrap();
        assert_eq!(cert.primal_value, rat(16, 9));
        assert_eq!(cert.dual_value, rat(16, 9));
        assert_eq!(cert.gap, rat_int(0));
        assert!(cert.dual_field.is_kirchhoff(&g));
        // Slope 1 on every region arc.
        for (eid, a) in ball_five_eighths(&g).iter_arcs() {
            let z0 = cert.dual_field.value_at(eid, &a.start);
            let z1 = cert.dual_field.value_at(eid, &a.end);
            assert_eq!(z1 - z0, a.length());
        }
    }

    #[test]
    fn dual_feasibility_flips_just_above_h1() {
        let g = four_vertex_tripod();
        let omega = ball_five_eighths(&g);
        let h1 = rat(16, 9);
        assert!(dual_feasible(&g, &omega, &h1).unwrap());
        assert!(!dual_feasible(&g, &omega, &(h1 + rat(1, 100))).unwrap());
    }

    #[test]
    fn dual_norm_zero_and_unbalanced_sources() {
        let g = equilateral_tripod(1);
        let zero = PiecewiseFunction::constant(&g, &rat_int(0));
        match dual_norm(&g, &zero).unwrap() {
            DualNormOutcome::Value(v, _) => assert_eq!(v, rat_int(0)),
            other => panic!("expected value, got {other:?}"),
        }
        // f = chi_Omega has positive integral: infeasible by divergence.
        let omega = GraphSubset::new(&g, [("e1".to_string(), rat_int(0), rat_int(1))]).unwrap();
        let f = PiecewiseFunction::indicator(&g, &omega);
        assert_eq!(dual_norm(&g, &f).unwrap(), DualNormOutcome::Infeasible);
    }

    #[test]
    fn dual_norm_of_balanced_cut_source() {
        // f = h (chi_D - c chi_rest) with int f = 0 for the tripod cut:
        // the eigen-field witnesses ||f||_m* <= 1.
        let g = equilateral_tripod(1);
        let d = GraphSubset::new(&g, [("e1".to_string(), rat_int(0), rat_int(1))]).unwrap();
        // h = 1, ell(D) = 1, rest = 2: c = 1/2 balances.
        let f = PiecewiseFunction::scaled_indicator(&g, &d, &rat_int(1), &rat(-1, 2));
        match dual_norm(&g, &f).unwrap() {
            DualNormOutcome::Value(v, z) => {
                assert!(v <= rat_int(1));
                assert!(z.is_kirchhoff(&g));
            }
            other => panic!("expected value, got {other:?}"),
        }
    }

    #[test]
    fn constant_eigenpair_accepted() {
        let g = equilateral_tripod(1);
        let u = PiecewiseFunction::constant(&g, &rat(1, 3));
        match verify_eigenpair(&g, &rat_int(0), &u).unwrap() {
            VerifyOutcome::Accepted(pair) => {
                assert_eq!(pair.xi_integral, rat_int(3));
                assert!(pair.zero_median == false);
            }
            other => panic!("expected accepted, got {other:?}"),
        }
    }

    #[test]
    fn tripod_cut_eigenpair_accepted_and_papers_field_corrected() {
        let g = equilateral_tripod(1);
        let e1 = GraphSubset::new(&g, [("e1".to_string(), rat_int(0), rat_int(1))]).unwrap();
        let u = PiecewiseFunction::indicator(&g, &e1);
        match verify_eigenpair(&g, &rat_int(1), &u).unwrap() {
            VerifyOutcome::Accepted(pair) => {
                assert_eq!(pair.xi_integral, rat_int(0));
                assert!(pair.zero_median);
            }
            other => panic!("expected accepted, got {other:?}"),
        }
        // The corrected explicit field satisfies every clause by hand.
        let z = tripod_cut_field(&g, 1);
        let xi = PiecewiseFunction::from_edges(
            &g,
            [
                (
                    "e1".to_string(),
                    EdgePiecewise {
                        breakpoints: alloc::vec![rat_int(0), rat_int(1)],
                        segments: alloc::vec![(rat_int(1), rat_int(1))],
                    },
                ),
                (
                    "e2".to_string(),
                    EdgePiecewise {
                        breakpoints: alloc::vec![rat_int(0), rat_int(1)],
                        segments: alloc::vec![(rat(-1, 2), rat(-1, 2))],
                    },
                ),
                (
                    "e3".to_string(),
                    EdgePiecewise {
                        breakpoints: alloc::vec![rat_int(0), rat_int(1)],
                        segments: alloc::vec![(rat(-1, 2), rat(-1, 2))],
                    },
                ),
            ]
            .into(),
        )
        .unwrap();
        let pair = Eigenpair {
            lambda: rat_int(1),
            u,
            xi_integral: xi.integral(),
            xi,
            z,
            zero_median: true,
        };
        assert_eq!(pair.xi_integral, rat_int(0));
        check_eigenpair(&g, &pair).unwrap();
    }

    #[test]
    fn interior_interval_indicator_rejected_by_median() {
        // Omega = [1, 5] on the length-6 edge: lambda = Per/ell = 2/4 = 1/2
        // matches TV, but ell{u > 0} = 4 > 3 puts 0 outside the median set.
        let g = one_edge(6);
        let omega = interval(&g, rat_int(1), rat_int(5));
        let u = PiecewiseFunction::scaled_indicator(&g, &omega, &rat(1, 4), &rat_int(0));
        match verify_eigenpair(&g, &rat(1, 2), &u).unwrap() {
            VerifyOutcome::Rejected(EigenRejection::Median) => {}
            other => panic!("expected median rejection, got {other:?}"),
        }
    }

    #[test]
    fn tv_mismatch_rejected_and_denormalized_errors() {
        let g = one_edge(6);
        let omega = interval(&g, rat_int(1), rat_int(5));
        let u = PiecewiseFunction::scaled_indicator(&g, &omega, &rat(1, 4), &rat_int(0));
        match verify_eigenpair(&g, &rat(1, 3), &u).unwrap() {
            VerifyOutcome::Rejected(EigenRejection::TvMismatch { tv }) => {
                assert_eq!(tv, rat(1, 2));
            }
            other => panic!("expected tv mismatch, got {other:?}"),
        }
        let not_normalized = PiecewiseFunction::indicator(&g, &omega);
        assert!(matches!(
            verify_eigenpair(&g, &rat_int(1), &not_normalized),
            Err(DualityError::NotNormalized)
        ));
    }

    #[test]
    fn construct_from_equilateral_cut() {
        let g = equilateral_tripod(1);
        let e3 = GraphSubset::new(&g, [("e3".to_string(), rat_int(0), rat_int(1))]).unwrap();
        let pair = construct_eigenpair_from_cut(&g, &e3, &opts()).unwrap();
        assert_eq!(pair.lambda, rat_int(1));
        check_eigenpair(&g, &pair).unwrap();
    }

    #[test]
    fn construct_from_long_tripod_cut() {
        let g = crate::graph::build_graph(
            &["v1", "v2", "v3", "v4"],
            &[
                ("e1", "v1", "v2", rat_int(3)),
                ("e2", "v2", "v3", rat_int(1)),
                ("e3", "v2", "v4", rat_int(1)),
            ],
        )
        .unwrap();
        let d = GraphSubset::new(&g, [("e1".to_string(), rat_int(0), rat(5, 2))]).unwrap();
        let pair = construct_eigenpair_from_cut(&g, &d, &opts()).unwrap();
        assert_eq!(pair.lambda, rat(2, 5));
    }

    #[test]
    fn construct_from_half_edge() {
        let g = one_edge(2);
        let d = interval(&g, rat_int(0), rat_int(1));
        let pair = construct_eigenpair_from_cut(&g, &d, &opts()).unwrap();
        assert_eq!(pair.lambda, rat_int(1));
    }

    #[test]
    fn construct_rejects_non_cuts() {
        let g = one_edge(2);
        let d = interval(&g, rat(1, 2), rat_int(1));
        assert!(matches!(
            construct_eigenpair_from_cut(&g, &d, &opts()),
            Err(DualityError::NotACheegerCut)
        ));
    }

    #[test]
    fn accepted_nonzero_eigenvalues_dominate_h() {
        let g = equilateral_tripod(1);
        let h = cheeger_cut(&g, &opts()).unwrap().value;
        let e2 = GraphSubset::new(&g, [("e2".to_string(), rat_int(0), rat_int(1))]).unwrap();
        let u = PiecewiseFunction::indicator(&g, &e2);
        if let VerifyOutcome::Accepted(pair) = verify_eigenpair(&g, &rat_int(1), &u).unwrap() {
            assert!(pair.lambda >= h);
        } else {
            panic!("expected accepted");
        }
    }
}
