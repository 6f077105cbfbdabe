//! mgc: exact Cheeger cuts, jump-aware BV calculus, 1-Laplacian eigenpairs
//! and spectral gaps on compact metric graphs.
//!
//! Exit codes: 0 success, 2 input/validation error, 3 computation error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use mgc_cli::docs::{self, DocError};
use mgc_cli::output::{self, print_json, sig12};
use mgc_cli::rng::XorShift;
use mgc_cli::sampling;
use mgc_cli::suite;
use mgc_core::cheeger::{
    cheeger_cut, cheeger_within, is_calibrable, path_convexity_probe, ratio, CheegerOptions,
};
use mgc_core::duality::{construct_eigenpair_from_cut, dual_flow, verify_eigenpair, VerifyOutcome};
use mgc_core::graph::MetricGraph;
use mgc_core::measures::{coarea_residual, green_residual, perimeter, total_variation};
use mgc_core::rational::{format_rat, parse_rat, Rat};
use mgc_core::spectral::{
    cheeger_inequality_check, default_scan_step, fem_gap, gap_auto, secular_gap,
};
use mgc_core::subset::GraphSubset;
use num_traits::{One, Zero};

#[derive(Parser)]
#[command(
    name = "mgc",
    about = "Cheeger cuts, jump-aware total variation and spectral gaps on compact metric graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a graph document and report its structure.
    Validate { graph: PathBuf },
    /// Perimeter of a subset.
    Perimeter { graph: PathBuf, subset: PathBuf },
    /// Jump-aware total variation of a piecewise function.
    Tv { graph: PathBuf, function: PathBuf },
    /// Exact coarea identity residual (must print 0).
    CoareaCheck { graph: PathBuf, function: PathBuf },
    /// Exact Green identity residual for a Kirchhoff field (must print 0).
    GreenCheck {
        graph: PathBuf,
        field: PathBuf,
        function: PathBuf,
    },
    /// Cheeger constant: global cut, or within a region via --within.
    Cheeger {
        graph: PathBuf,
        #[arg(long)]
        within: Option<PathBuf>,
        /// Attach the dual max-flow certificate and require gap = 0.
        #[arg(long)]
        certify: bool,
        /// Write a Graphviz rendering with the witness highlighted.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Is the region a Cheeger set of itself?
    Calibrable { graph: PathBuf, subset: PathBuf },
    /// One-sided search for a path-convexity counterexample.
    PathConvexProbe { graph: PathBuf, subset: PathBuf },
    /// Max-flow dual certificate for a region.
    Dual {
        graph: PathBuf,
        subset: PathBuf,
        /// Check weak duality on this many random feasible (field, set) pairs.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Verify an eigenpair (--lambda with a function file) or construct one
    /// from a Cheeger cut (--from-cut).
    Eigen {
        graph: PathBuf,
        #[arg(long)]
        lambda: Option<String>,
        function: Option<PathBuf>,
        #[arg(long)]
        from_cut: Option<PathBuf>,
    },
    /// Spectral gap of the standard Kirchhoff Laplacian.
    Gap {
        graph: PathBuf,
        #[arg(long, default_value = "both")]
        method: String,
        #[arg(long, default_value_t = 256)]
        cells: usize,
        #[arg(long)]
        k_max: Option<f64>,
        #[arg(long)]
        scan_step: Option<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Check h^2/4 <= gap, optionally on extra random graphs.
    CheegerInequality {
        graph: PathBuf,
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Reproduce every worked number from the source material.
    PaperSuite {
        /// Clobber the given row's expected value (proves the suite is live).
        #[arg(long)]
        tamper: Option<usize>,
    },
}

/// Input/validation failures exit 2, computation failures exit 3.
enum CmdError {
    Input(String),
    Compute(String),
}

impl From<DocError> for CmdError {
    fn from(e: DocError) -> Self {
        CmdError::Input(e.to_string())
    }
}

macro_rules! compute_error {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CmdError {
            fn from(e: $ty) -> Self {
                CmdError::Compute(e.to_string())
            }
        }
    )*};
}
compute_error!(
    mgc_core::cheeger::CheegerError,
    mgc_core::duality::DualityError,
    mgc_core::spectral::SpectralError,
    mgc_core::measures::MeasureError
);

fn read(path: &Path) -> Result<String, CmdError> {
    fs::read_to_string(path)
        .map_err(|e| CmdError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<MetricGraph, CmdError> {
    Ok(docs::parse_graph(&read(path)?)?)
}

fn load_subset(g: &MetricGraph, path: &Path) -> Result<GraphSubset, CmdError> {
    Ok(docs::parse_subset(g, &read(path)?)?)
}

fn options() -> CheegerOptions {
    let mut opts = CheegerOptions::default();
    if let Ok(v) = std::env::var("MGC_PATTERN_BUDGET") {
        match v.parse::<u64>() {
            Ok(budget) if budget > 0 => opts.pattern_budget = budget,
            _ => eprintln!("ignoring invalid MGC_PATTERN_BUDGET={v:?}"),
        }
    }
    opts
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(CmdError::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CmdError::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cmd: Command) -> Result<u8, CmdError> {
    match cmd {
        Command::Validate { graph } => {
            let g = load_graph(&graph)?;
            #[derive(Serialize)]
            struct Report {
                vertices: usize,
                edges: usize,
                total_length: docs::RatDoc,
                boundary_vertices: Vec<String>,
                interior_vertices: Vec<String>,
                connected: bool,
            }
            print_json(&Report {
                vertices: g.vertices().len(),
                edges: g.edges().len(),
                total_length: docs::RatDoc(g.total_length().clone()),
                boundary_vertices: g.boundary_vertices().cloned().collect(),
                interior_vertices: g.interior_vertices().cloned().collect(),
                connected: true,
            });
            Ok(0)
        }
        Command::Perimeter { graph, subset } => {
            let g = load_graph(&graph)?;
            let s = load_subset(&g, &subset)?;
            println!("{}", format_rat(&perimeter(&g, &s)));
            Ok(0)
        }
        Command::Tv { graph, function } => {
            let g = load_graph(&graph)?;
            let u = docs::parse_function(&g, &read(&function)?)?;
            println!("{}", format_rat(&total_variation(&g, &u)));
            Ok(0)
        }
        Command::CoareaCheck { graph, function } => {
            let g = load_graph(&graph)?;
            let u = docs::parse_function(&g, &read(&function)?)?;
            let residual = coarea_residual(&g, &u);
            println!("{}", format_rat(&residual));
            if residual.is_zero() {
                Ok(0)
            } else {
                Err(CmdError::Compute("coarea residual is nonzero".into()))
            }
        }
        Command::GreenCheck {
            graph,
            field,
            function,
        } => {
            let g = load_graph(&graph)?;
            let z = docs::parse_field(&g, &read(&field)?)?;
            let u = docs::parse_function(&g, &read(&function)?)?;
            let residual = green_residual(&g, &z, &u)?;
            println!("{}", format_rat(&residual));
            if residual.is_zero() {
                Ok(0)
            } else {
                Err(CmdError::Compute("green residual is nonzero".into()))
            }
        }
        Command::Cheeger {
            graph,
            within,
            certify,
            dot,
        } => {
            let g = load_graph(&graph)?;
            let opts = options();
            let (problem, result) = match &within {
                Some(path) => {
                    let omega = load_subset(&g, path)?;
                    ("cheeger-within", cheeger_within(&g, &omega, &opts)?)
                }
                None => ("cheeger-cut", cheeger_cut(&g, &opts)?),
            };
            let lower = result.lower_bound_ok.map(|ok| output::LowerBoundOut {
                bound: docs::RatDoc(
                    Rat::from_integer(2.into()) / g.total_length().clone(),
                ),
                ok,
            });
            let certificate = if certify {
                let region = match &within {
                    Some(path) => load_subset(&g, path)?,
                    None => result.witness.clone(),
                };
                let cert = dual_flow(&g, &region, &opts)?;
                if !cert.gap.is_zero() || cert.dual_value != result.value {
                    return Err(CmdError::Compute(format!(
                        "duality gap is nonzero: primal {} dual {}",
                        format_rat(&result.value),
                        format_rat(&cert.dual_value)
                    )));
                }
                Some(output::certificate_out(&cert))
            } else {
                None
            };
            if let Some(path) = dot {
                fs::write(&path, mgc_cli::dot::to_dot(&g, Some(&result.witness)))
                    .map_err(|e| CmdError::Input(format!("cannot write dot: {e}")))?;
            }
            print_json(&output::cheeger_out(problem, &result, lower, certificate));
            Ok(0)
        }
        Command::Calibrable { graph, subset } => {
            let g = load_graph(&graph)?;
            let omega = load_subset(&g, &subset)?;
            let report = is_calibrable(&g, &omega, &options())?;
            #[derive(Serialize)]
            struct Out {
                calibrable: bool,
                lambda: docs::RatDoc,
                h1: docs::RatDoc,
                cheeger_set: Vec<docs::ArcDoc>,
            }
            print_json(&Out {
                calibrable: report.calibrable,
                lambda: docs::RatDoc(report.lambda),
                h1: docs::RatDoc(report.h1.value),
                cheeger_set: docs::subset_to_doc(&report.h1.witness),
            });
            Ok(0)
        }
        Command::PathConvexProbe { graph, subset } => {
            let g = load_graph(&graph)?;
            let omega = load_subset(&g, &subset)?;
            let found = path_convexity_probe(&g, &omega, &options())?;
            #[derive(Serialize)]
            struct Out {
                counterexample: Option<CounterOut>,
                note: &'static str,
            }
            #[derive(Serialize)]
            struct CounterOut {
                set: Vec<docs::ArcDoc>,
                perimeter_intersection: docs::RatDoc,
                perimeter_set: docs::RatDoc,
            }
            print_json(&Out {
                counterexample: found.map(|c| CounterOut {
                    set: docs::subset_to_doc(&c.set),
                    perimeter_intersection: docs::RatDoc(c.perimeter_intersection),
                    perimeter_set: docs::RatDoc(c.perimeter_set),
                }),
                note: "a counterexample disproves path-convexity; none-found is not a proof",
            });
            Ok(0)
        }
        Command::Dual {
            graph,
            subset,
            sample,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let omega = load_subset(&g, &subset)?;
            let cert = dual_flow(&g, &omega, &options())?;
            let samples = match sample {
                Some(n) => {
                    let mut rng = XorShift::new(seed);
                    let bound = cert.dual_field.sup_norm() * Rat::from_integer(2.into());
                    let mut fields =
                        sampling::random_feasible_duals(&g, &omega, &bound, 3, &mut rng)?;
                    fields.push(cert.dual_field.clone());
                    let mut ok = 0usize;
                    for _ in 0..n {
                        let z = sampling::convex_combination(&g, &fields, &mut rng);
                        let e = sampling::random_subregion(&g, &omega, &mut rng);
                        if Rat::one() / z.sup_norm() <= ratio(&g, &e)? {
                            ok += 1;
                        }
                    }
                    if ok != n {
                        return Err(CmdError::Compute(format!(
                            "weak duality violated on {} of {n} samples",
                            n - ok
                        )));
                    }
                    Some(n)
                }
                None => None,
            };
            #[derive(Serialize)]
            struct Out {
                certificate: output::CertificateOut,
                witness: Vec<docs::ArcDoc>,
                #[serde(skip_serializing_if = "Option::is_none")]
                weak_duality_samples: Option<usize>,
            }
            print_json(&Out {
                witness: docs::subset_to_doc(&cert.witness),
                certificate: output::certificate_out(&cert),
                weak_duality_samples: samples,
            });
            Ok(0)
        }
        Command::Eigen {
            graph,
            lambda,
            function,
            from_cut,
        } => {
            let g = load_graph(&graph)?;
            let out = match (lambda, function, from_cut) {
                (Some(l), Some(f), None) => {
                    let lambda =
                        parse_rat(&l).map_err(CmdError::Input)?;
                    let u = docs::parse_function(&g, &read(&f)?)?;
                    match verify_eigenpair(&g, &lambda, &u)? {
                        VerifyOutcome::Accepted(pair) => output::eigen_accepted_out(&pair),
                        VerifyOutcome::Rejected(r) => output::eigen_rejected_out(r.to_string()),
                    }
                }
                (None, None, Some(cut_path)) => {
                    let cut = load_subset(&g, &cut_path)?;
                    let pair = construct_eigenpair_from_cut(&g, &cut, &options())?;
                    output::eigen_accepted_out(&pair)
                }
                _ => {
                    return Err(CmdError::Input(
                        "use either --lambda with a function file, or --from-cut".into(),
                    ))
                }
            };
            print_json(&out);
            Ok(0)
        }
        Command::Gap {
            graph,
            method,
            cells,
            k_max,
            scan_step,
            tol,
        } => {
            let g = load_graph(&graph)?;
            let secular = |g: &MetricGraph| -> Result<_, CmdError> {
                match k_max {
                    Some(km) => Ok(secular_gap(
                        g,
                        km,
                        scan_step.unwrap_or_else(|| default_scan_step(g)),
                        tol,
                    )?),
                    None => Ok(gap_auto(g, tol)?),
                }
            };
            match method.as_str() {
                "secular" => {
                    print_json(&output::gap_out(&secular(&g)?));
                }
                "fem" => {
                    print_json(&output::gap_out(&fem_gap(&g, cells)?));
                }
                "both" => {
                    let s = secular(&g)?;
                    let f = fem_gap(&g, cells)?;
                    #[derive(Serialize)]
                    struct Out {
                        secular: output::GapOut,
                        fem: output::GapOut,
                        relative_difference: f64,
                    }
                    print_json(&Out {
                        relative_difference: sig12(
                            (s.eigenvalue - f.eigenvalue).abs() / s.eigenvalue,
                        ),
                        secular: output::gap_out(&s),
                        fem: output::gap_out(&f),
                    });
                }
                other => {
                    return Err(CmdError::Input(format!(
                        "unknown method {other:?}; use secular, fem or both"
                    )))
                }
            }
            Ok(0)
        }
        Command::CheegerInequality {
            graph,
            random,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let opts = options();
            let report = cheeger_inequality_check(&g, &opts, 1e-9)?;
            let mut random_ok = None;
            if let Some(n) = random {
                let mut rng = XorShift::new(seed);
                let mut all_ok = true;
                for _ in 0..n {
                    let rg = sampling::random_graph(&mut rng, 5);
                    let r = cheeger_inequality_check(&rg, &opts, 1e-9)?;
                    all_ok &= r.ok;
                }
                random_ok = Some(all_ok);
                if !all_ok {
                    return Err(CmdError::Compute(
                        "cheeger inequality failed on a random instance".into(),
                    ));
                }
            }
            #[derive(Serialize)]
            struct Out {
                instance: output::InequalityOut,
                #[serde(skip_serializing_if = "Option::is_none")]
                random_instances_ok: Option<bool>,
            }
            let ok = report.ok;
            print_json(&Out {
                instance: output::inequality_out(&report),
                random_instances_ok: random_ok,
            });
            if ok {
                Ok(0)
            } else {
                Err(CmdError::Compute("cheeger inequality violated".into()))
            }
        }
        Command::PaperSuite { tamper } => Ok(suite::run_and_print(tamper) as u8),
    }
}
