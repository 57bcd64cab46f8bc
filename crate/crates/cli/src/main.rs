//! `orbicat`: validate atlases, build translation groupoids and run the law,
//! Morita, reconstruction and bijection checks from the command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use orbicat::atlas::{validate_atlas, Atlas};
use orbicat::functor::{build_translation_groupoid, check_action_oracle, check_functor_laws, check_isotropy};
use orbicat::groupoid::{check_groupoid_axioms, structural_predicates, validate_groupoid_morphism};
use orbicat::io::{
    atlas_to_json, cone_pair, gallery, groupoid_to_json, parse_atlas, to_canonical_json, witness_from_json, GalleryParams,
};
use orbicat::morita::{
    atlases_equivalent, bijection_demo, check_morita, pushforward_atlas, reconstruct_atlas,
    reconstruction_morita_morphism, reconstruction_witness, subatlas_inclusion_morphism, Verdict,
};
use orbicat::numerics::parse_rational;
use orbicat::preorb::{check_2cat_laws, random_gauge_diagram, StandardOps};
use orbicat::report::Report;
use orbicat::sample::Sampler;

#[derive(Parser, Debug)]
#[command(name = "orbicat", version, about = "Exact orbifold atlases, translation groupoids and Morita checks")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Sampled points per check.
    #[arg(long, global = true, env = "ORBICAT_SAMPLES", default_value_t = 500)]
    samples: usize,
    /// Seed for every sampled point set.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the machine-readable result here.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Treat warnings as failures.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every chart, embedding and oracle invariant of an atlas.
    Validate { atlas: PathBuf },
    /// Build the translation groupoid and run the axiom suite.
    Groupoid {
        atlas: PathBuf,
        /// Also write the groupoid presentation to this file.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// 2-category and 2-functor laws on random gauge diagrams of an atlas.
    Laws {
        atlas: PathBuf,
        #[arg(long, default_value_t = 3)]
        diagrams: usize,
    },
    /// Morita conditions for the inclusion of a sub-atlas.
    Morita { sub: PathBuf, full: PathBuf },
    /// Rebuild an atlas from the translation groupoid and compare.
    Reconstruct {
        atlas: PathBuf,
        /// Random charts on top of the probes and component centers.
        #[arg(long, default_value_t = 4)]
        charts: usize,
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Decide equivalence of two atlases on both sides and compare the verdicts.
    Bijection {
        left: PathBuf,
        right: PathBuf,
        /// Witness file; a relabeling in it is applied to the right atlas first.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Print a gallery atlas.
    Gallery {
        /// cone, football, teardrop, global_quotient or point.
        name: String,
        #[arg(long, default_value_t = 1)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        q: u32,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Chart or bridge radius as "p/q".
        #[arg(long)]
        radius: Option<String>,
        /// For cones: add the inner chart B(0, 1/2), so the plain cone is a sub-atlas.
        #[arg(long)]
        with_inner: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Groupoid { .. } => "groupoid",
            Command::Laws { .. } => "laws",
            Command::Morita { .. } => "morita",
            Command::Reconstruct { .. } => "reconstruct",
            Command::Bijection { .. } => "bijection",
            Command::Gallery { .. } => "gallery",
        }
    }
}

/// What a command produced: text for the terminal, the JSON result and a verdict.
struct Outcome {
    text: String,
    json: Value,
    pass: bool,
}

impl Outcome {
    fn from_reports(reports: Vec<Report>, strict: bool, extra: Value) -> Outcome {
        let pass = reports.iter().all(|r| if strict { r.is_ok_strict() } else { r.is_ok() });
        let mut text: String = reports.iter().map(Report::render_text).collect();
        text.push_str(&format!("overall: {}\n", if pass { "pass" } else { "fail" }));
        Outcome {
            text,
            json: json!({ "reports": reports, "extra": extra }),
            pass,
        }
    }
}

/// Input problems: unreadable or malformed files.
struct InputError(String);

impl From<orbicat::Error> for InputError {
    fn from(e: orbicat::Error) -> Self {
        InputError(e.to_string())
    }
}

fn load(path: &Path) -> Result<Arc<Atlas>, InputError> {
    parse_atlas(path).map(Arc::new).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), InputError> {
    std::fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn run(cmd: &Command, c: &Common) -> Result<Outcome, InputError> {
    let (n, seed) = (c.samples, c.seed);
    match cmd {
        Command::Validate { atlas } => {
            let a = load(atlas)?;
            Ok(Outcome::from_reports(vec![validate_atlas(&a, n, seed)], c.strict, json!({})))
        }
        Command::Groupoid { atlas, emit } => {
            let a = load(atlas)?;
            let structural = validate_atlas(&a, 0, 0);
            if !structural.is_ok() {
                return Ok(Outcome::from_reports(vec![structural], c.strict, json!({})));
            }
            let g = build_translation_groupoid(a.clone())?;
            if let Some(p) = emit {
                write(p, &groupoid_to_json(&g))?;
            }
            // independent checks run in parallel; reports are assembled in a fixed order
            let (axioms, isotropy, preds, oracle) = std::thread::scope(|sc| {
                let ax = sc.spawn(|| check_groupoid_axioms(&g, n, seed));
                let iso = sc.spawn(|| check_isotropy(&g, n, seed));
                let pr = sc.spawn(|| structural_predicates(&g, n, seed));
                let or = (a.n_charts() == 1).then(|| check_action_oracle(&a, n, seed));
                let join = "check thread panicked";
                (ax.join().expect(join), iso.join().expect(join), pr.join().expect(join), or)
            });
            let mut reports = vec![axioms, isotropy?];
            let preds = preds?;
            let mut pr = Report::new("structural predicates");
            let at = || preds.witness.clone().unwrap_or_default();
            pr.record("groupoid.etale", preds.etale, at);
            pr.record("groupoid.proper", preds.proper, at);
            pr.record("groupoid.effective", preds.effective, at);
            reports.push(pr);
            if let Some(r) = oracle {
                reports.push(r?);
            }
            let extra = json!({ "units": g.units.len(), "components": g.n_components() });
            Ok(Outcome::from_reports(reports, c.strict, extra))
        }
        Command::Laws { atlas, diagrams } => {
            let a = load(atlas)?;
            let mut s = Sampler::new(seed);
            let mut laws = Report::new("2-category laws");
            let mut fun = Report::new("functor laws");
            for _ in 0..*diagrams {
                let d = random_gauge_diagram(&a, &mut s);
                laws.absorb("", check_2cat_laws(&d, &StandardOps)?);
                fun.absorb("", check_functor_laws(&d, &StandardOps, n, s.index(u32::MAX as usize) as u64)?);
            }
            Ok(Outcome::from_reports(vec![laws, fun], c.strict, json!({ "diagrams": diagrams })))
        }
        Command::Morita { sub, full } => {
            let (s, f) = (load(sub)?, load(full)?);
            let m = subatlas_inclusion_morphism(&s, &f)?;
            let v = validate_groupoid_morphism(&m, n, seed);
            let r = check_morita(&m, n, seed);
            let extra = json!({ "verdict": r.verdict, "unreached": r.unreached });
            Ok(Outcome::from_reports(vec![v, r.condition_i, r.condition_ii], c.strict, extra))
        }
        Command::Reconstruct { atlas, charts, emit } => {
            let a = load(atlas)?;
            let g = Arc::new(build_translation_groupoid(a.clone())?);
            let rec = reconstruct_atlas(&g, *charts, seed)?;
            if let Some(p) = emit {
                write(p, &atlas_to_json(&rec.atlas))?;
            }
            let m = reconstruction_morita_morphism(&rec, g)?;
            let mr = check_morita(&m, n, seed);
            let mut eq = Report::new("round trip");
            match atlases_equivalent(&rec.atlas, &a, &reconstruction_witness(&rec, &a)) {
                Ok(ok) => {
                    eq.record("reconstruct.equivalent", ok, || "reconstructed atlas does not cover the original".into());
                }
                Err(e) => eq.fail("reconstruct.equivalent", e.to_string()),
            }
            for p in &rec.skipped {
                eq.warn(format!("no chart around {p}"));
            }
            let extra = json!({ "charts": rec.atlas.n_charts(), "verdict": mr.verdict });
            Ok(Outcome::from_reports(vec![mr.condition_i, mr.condition_ii, eq], c.strict, extra))
        }
        Command::Bijection { left, right, witness } => {
            let (a, mut b) = (load(left)?, load(right)?);
            let w = match witness {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| InputError(format!("{}: {e}", p.display())))?;
                    let (w, relabel) = witness_from_json(&text)?;
                    if let Some(phi) = relabel {
                        b = Arc::new(pushforward_atlas(&phi, &b)?);
                    }
                    Some(w)
                }
                None => None,
            };
            let rep = bijection_demo(&a, &b, w.as_ref(), n.min(64), seed);
            let word = |v: Verdict| match v {
                Verdict::Equivalent => "equivalent",
                Verdict::Inequivalent => "inequivalent",
                Verdict::Unknown => "unknown",
            };
            let mut text = format!(
                "atlas verdict: {}\ngroupoid verdict: {}\n",
                word(rep.atlas_verdict),
                word(rep.groupoid_verdict)
            );
            for note in &rep.notes {
                text.push_str(&format!("note: {note}\n"));
            }
            text.push_str("note: the comparison is per instance; both verdicts come from bounded searches and invariants\n");
            text.push_str(&format!("verdict: {}\n", if rep.agree { word(rep.atlas_verdict) } else { "disagree" }));
            Ok(Outcome {
                text,
                pass: rep.agree,
                json: json!({ "bijection": rep }),
            })
        }
        Command::Gallery { name, p, q, dim, radius, with_inner } => {
            let mut params = GalleryParams::new(name.parse()?);
            params.p = *p;
            params.q = *q;
            params.dim = *dim;
            if matches!(name.as_str(), "point") {
                params.dim = 0;
            }
            if let Some(r) = radius {
                params = params.with_radius(parse_rational(r)?);
            }
            let a = if *with_inner {
                if name != "cone" || radius.is_some() {
                    return Err(InputError("--with-inner applies to the unit-radius cone only".into()));
                }
                cone_pair(*p)?
            } else {
                gallery(&params)?
            };
            let text = atlas_to_json(&a);
            Ok(Outcome {
                json: serde_json::from_str(&text).expect("canonical json"),
                text,
                pass: true,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command, &cli.common) {
        Ok(o) => {
            print!("{}", o.text);
            if let Some(p) = &cli.common.out {
                let doc = if matches!(cli.command, Command::Gallery { .. }) {
                    o.text.clone()
                } else {
                    to_canonical_json(&json!({
                        "command": cli.command.name(),
                        "samples": cli.common.samples,
                        "seed": cli.common.seed,
                        "strict": cli.common.strict,
                        "verdict": if o.pass { "pass" } else { "fail" },
                        "result": o.json,
                    }))
                };
                if let Err(InputError(e)) = write(p, &doc) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            }
            if o.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(InputError(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
