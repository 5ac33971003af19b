//! Command dispatch.

use std::fmt;

use loopcoh::complex::{
    blockwise_cohomology, build_base_complex, build_loop_complex, cartan_suite, theorem_symplectic_check,
    CohomologyReport, Window,
};
use loopcoh::exact::{SparsePoly, Var};
use loopcoh::jet::build_jet_ring;
use loopcoh::lambda::{arakawa_winning_reading, induced_poisson_at_lambda_zero, pva_axiom_suite, PVAStructure};
use loopcoh::lc::{intertwine_check, select_convention, LcConvention};
use loopcoh::poisson::{
    algebroid_axiom_check, cotangent_algebroid, schouten_jacobi_check, tangent_algebroid, AxiomReport,
    JacobiReport, LieAlgebroidData, PoissonStructure,
};

use crate::parse::{parse_polynomial, AlgebroidKind, ProblemSpec};
use crate::report::Report;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    CheckPoisson,
    JetInfo,
    LambdaBracket(String, String),
    PvaCheck,
    LoopCohomology,
    Derham,
    LcCrosscheck,
    CompareTheorem,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::CheckPoisson => f.write_str("check-poisson"),
            Command::JetInfo => f.write_str("jet-info"),
            Command::LambdaBracket(a, b) => write!(f, "lambda-bracket {a} {b}"),
            Command::PvaCheck => f.write_str("pva-check"),
            Command::LoopCohomology => f.write_str("loop-cohomology"),
            Command::Derham => f.write_str("derham"),
            Command::LcCrosscheck => f.write_str("lc-crosscheck"),
            Command::CompareTheorem => f.write_str("compare-theorem"),
        }
    }
}

/// Flags that override or extend the document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    pub algebroid: Option<AlgebroidKind>,
    pub reduce: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            algebroid: None,
            reduce: true,
        }
    }
}

fn domain<E: Into<loopcoh::Error>>(e: E) -> CliError {
    CliError::Domain(e.into())
}

fn poisson(spec: &ProblemSpec) -> Result<PoissonStructure, CliError> {
    PoissonStructure::new(spec.base.clone(), &spec.brackets).map_err(domain)
}

fn window(spec: &ProblemSpec) -> Window {
    Window::new(spec.weight(), spec.bounds(), spec.total)
}

fn algebroid(spec: &ProblemSpec, opts: &Options) -> Result<(AlgebroidKind, LieAlgebroidData), CliError> {
    let kind = opts.algebroid.or(spec.algebroid).unwrap_or(AlgebroidKind::Cotangent);
    let l = match kind {
        AlgebroidKind::Tangent => tangent_algebroid(&spec.base),
        AlgebroidKind::Cotangent => cotangent_algebroid(&poisson(spec)?).map_err(domain)?,
    };
    Ok((kind, l))
}

fn add_blocks(r: &mut Report, c: &CohomologyReport) {
    for b in &c.blocks {
        r.block(b.label.clone(), b.dim, b.h);
    }
}

fn totals(c: &CohomologyReport, weight: Option<i64>) -> String {
    let t = c.totals(|l| weight.is_none_or(|w| l.weight == w));
    let parts: Vec<String> = t.iter().map(|(n, h)| format!("H^{n}={h}")).collect();
    parts.join(" ")
}

pub fn run_command(spec: &ProblemSpec, cmd: &Command, opts: &Options) -> Result<Report, CliError> {
    let mut r = Report::new(format!("loopcoh {cmd} {}", spec.variety));
    match cmd {
        Command::CheckPoisson => {
            let pi = poisson(spec)?;
            match schouten_jacobi_check(&pi) {
                JacobiReport::Pass => r.check("jacobi", true, None),
                JacobiReport::Counterexample { triple: (a, b, c), value } => {
                    let n = |i: usize| spec.base.name(i).to_string();
                    r.check(
                        "jacobi",
                        false,
                        Some(format!("{},{},{}:{}", n(a), n(b), n(c), spec.base.display(&value))),
                    );
                }
            }
            if r.checks_pass() {
                let l = cotangent_algebroid(&pi).map_err(domain)?;
                match algebroid_axiom_check(&l) {
                    AxiomReport::Pass => r.check("cotangent-algebroid", true, None),
                    AxiomReport::Counterexample { axiom, generators, .. } => {
                        let g: Vec<String> = generators.iter().map(|&a| l.frame_names[a].clone()).collect();
                        r.check("cotangent-algebroid", false, Some(format!("{axiom}:{}", g.join(","))));
                    }
                }
            }
            r.conclude();
        }
        Command::JetInfo => {
            let ring = build_jet_ring(spec.base.clone(), spec.weight());
            r.info("cutoff", ring.cutoff().to_string());
            for i in 0..=ring.cutoff() {
                let names: Vec<String> = (0..ring.m()).map(|a| ring.var_name(ring.var(a, i))).collect();
                r.info(format!("weight {i}"), names.join(" "));
            }
            let vars: Vec<Var> = ring.variables().collect();
            let mut bad = None;
            'pairs: for &u in &vars {
                for &v in &vars {
                    let (pu, pv) = (SparsePoly::var(u), SparsePoly::var(v));
                    let lhs = ring.delta(&ring.mul(&pu, &pv));
                    let rhs = &ring.mul(&ring.delta(&pu), &pv) + &ring.mul(&pu, &ring.delta(&pv));
                    if lhs != ring.truncate(&rhs) {
                        bad = Some(format!("{}*{}", ring.var_name(u), ring.var_name(v)));
                        break 'pairs;
                    }
                }
            }
            r.check("delta-leibniz", bad.is_none(), bad);
            r.conclude();
        }
        Command::LambdaBracket(f, g) => {
            let pi = poisson(spec)?;
            let ring = build_jet_ring(spec.base.clone(), spec.weight());
            let resolve = |n: &str| {
                let v = ring.parse_var(n).or_else(|| spec.base.index_of(n).map(|a| ring.var(a, 0)))?;
                Some((v, ring.is_invertible(v)))
            };
            let pf = parse_polynomial(f, &resolve).map_err(|m| CliError::Input(format!("{f}: {m}")))?;
            let pg = parse_polynomial(g, &resolve).map_err(|m| CliError::Input(format!("{g}: {m}")))?;
            let p = PVAStructure::new(ring.clone(), pi).map_err(domain)?;
            let value = p.lambda_bracket(&pf, &pg).display(&ring, &["lambda"]);
            r.info("bracket", format!("{{{f} lambda {g}}} = {value}"));
            r.check("lambda-bracket", true, Some(value));
        }
        Command::PvaCheck => {
            let pi = poisson(spec)?;
            let w = spec.weight();
            // one level of headroom so that δ of a window element is exact
            let p = PVAStructure::new(build_jet_ring(spec.base.clone(), w + 1), pi.clone()).map_err(domain)?;
            for o in pva_axiom_suite(&p, w).outcomes {
                let name = o.axiom.to_string().to_lowercase().replace(' ', "-");
                r.check(&name, o.passed(), o.failure.map(|t| t.join(",")));
            }
            match arakawa_winning_reading(&p, w) {
                Ok(Some(reading)) => r.check("arakawa", true, Some(reading.to_string())),
                Ok(None) => r.check("arakawa", false, Some("no single reading".into())),
                Err(e) => r.check("arakawa", false, Some(loopcoh::Error::from(e).to_string())),
            }
            let back = induced_poisson_at_lambda_zero(&p);
            r.check("lambda-zero", back.as_ref().is_ok_and(|q| *q == pi), back.err().map(|e| e.to_string()));
            r.conclude();
        }
        Command::LoopCohomology => {
            let (kind, l) = algebroid(spec, opts)?;
            let c = build_loop_complex(&l, spec.weight()).map_err(domain)?;
            let w = window(spec);
            r.info("algebroid", kind.to_string());
            r.info("reduce", if opts.reduce { "on" } else { "off" });
            r.check("d-squared", c.check_d_squared().is_none(), c.check_d_squared());
            r.check("d-delta", c.check_d_delta().is_none(), c.check_d_delta());
            let rep = blockwise_cohomology(&c, opts.reduce, &w).map_err(domain)?;
            r.info("weight 0", totals(&rep, Some(0)));
            r.info("all weights", totals(&rep, None));
            add_blocks(&mut r, &rep);
            if kind == AlgebroidKind::Tangent && !opts.reduce {
                let cs = cartan_suite(&c, &w).map_err(domain)?;
                r.check("cartan-homotopy", cs.homotopy.is_none() && cs.block_homotopy.is_none(), cs.homotopy.or(cs.block_homotopy));
                r.check("euler-delta", cs.euler_delta.is_none(), cs.euler_delta);
                let bad = cs.unreduced.blocks.iter().find(|b| b.label.weight > 0 && b.h > 0);
                r.check("positive-weight-acyclic", bad.is_none(), bad.map(|b| b.label.to_string()));
            }
            r.conclude();
        }
        Command::Derham => {
            let c = build_base_complex(&tangent_algebroid(&spec.base)).map_err(domain)?;
            let rep = blockwise_cohomology(&c, false, &window(spec).with_weight(0)).map_err(domain)?;
            r.info("de Rham", totals(&rep, None));
            add_blocks(&mut r, &rep);
            r.conclude();
        }
        Command::LcCrosscheck => {
            if opts.algebroid.or(spec.algebroid) == Some(AlgebroidKind::Tangent) {
                return Err(CliError::Input("lc-crosscheck needs the cotangent algebroid".into()));
            }
            let pi = poisson(spec)?;
            let cutoff = spec.weight();
            let lp = build_loop_complex(&cotangent_algebroid(&pi).map_err(domain)?, cutoff).map_err(domain)?;
            let p = PVAStructure::new(build_jet_ring(spec.base.clone(), cutoff), pi).map_err(domain)?;
            let w = window(spec);
            let scores = select_convention(&p, &lp, &w).map_err(domain)?;
            let admissible: Vec<LcConvention> = scores.iter().filter(|s| s.admissible()).map(|s| s.convention).collect();
            for s in &scores {
                r.info(format!("convention {}", s.convention), if s.admissible() { "admissible" } else { "rejected" });
            }
            let Some(&conv) = admissible.first() else {
                r.check("convention", false, Some("none admissible".into()));
                r.conclude();
                return Ok(r);
            };
            r.check("convention", true, Some(conv.to_string()));
            let top = spec.lc_degree();
            let rep = intertwine_check(&p, &lp, conv, &w, top).map_err(domain)?;
            for (n, f) in &rep.failures {
                r.check(&format!("intertwine-{n}-{}", n + 1), f.is_none(), f.clone());
            }
            if top > 0 {
                r.check("d-squared", rep.square.is_none(), rep.square.clone());
            }
            let bad = rep.bijection.iter().find(|b| !b.bijective());
            r.check(
                "iota-bijection",
                bad.is_none(),
                bad.map(|b| format!("{} forms={} image={} cochains={}", b.label, b.forms, b.image, b.cochains)),
            );
            for b in &rep.bijection {
                r.block(b.label.clone(), b.cochains, b.image);
            }
            r.conclude();
        }
        Command::CompareTheorem => {
            let pi = poisson(spec)?;
            let rep = theorem_symplectic_check(&pi, spec.weight(), &window(spec)).map_err(domain)?;
            r.info("loop weight 0", totals(&rep.comparison.reduced, Some(0)));
            r.info("de Rham", totals(&rep.derham, None));
            add_blocks(&mut r, &rep.comparison.reduced);
            r.check("weight-zero-complex", rep.comparison.mismatch.is_none(), rep.comparison.mismatch.clone());
            r.check("de-rham-agreement", rep.derham_mismatch.is_none(), rep.derham_mismatch.clone());
            let bad: Vec<String> = rep
                .comparison
                .positive_failures
                .iter()
                .map(|b| format!("{}:h={}", b.label, b.h))
                .collect();
            r.check("positive-weight-acyclic", bad.is_empty(), (!bad.is_empty()).then(|| bad.join(";")));
            let t = &rep.transport;
            r.check("transport-chain-map", t.chain_map.is_none(), t.chain_map.clone());
            r.check("transport-diagonal", t.diagonal.is_none(), t.diagonal.clone());
            r.check("transport-frame", t.frame_change, None);
            r.conclude();
        }
    }
    Ok(r)
}
