//! Subcommand pipelines. Each records stages and checks into a [`Recorder`]
//! and stops at the first domain error.

use agm3::agm_step::{agm_step, roundtrip_check, StepOutput};
use agm3::configuration::{build_space_model, extract_configuration, verify_tower_pattern, PlaneConfiguration};
use agm3::differentials::{canonical_iso_report, odd_space_report, AffineChart};
use agm3::numkernel::ToleranceProfile;
use agm3::quartic_theta::{alpha_class, bitangents, classify_all, enumerate_flags, is_syzygetic, BitangentRecord, FlagSpec, Quartic};
use serde_json::json;

use crate::input::{configuration_spec, parse_configuration, resolve_alpha, Document};
use crate::report::{CertificateOut, Recorder, Stage};
use crate::{Chain, UsageError};

pub enum Failure {
    Usage(UsageError),
    Domain(agm3::Error),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e)
    }
}

impl From<agm3::Error> for Failure {
    fn from(e: agm3::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome<T> = Result<T, Failure>;

pub struct Context<'a> {
    pub doc: &'a Document,
    pub profile: ToleranceProfile,
    pub flag: Option<FlagSpec>,
    pub n: usize,
    pub chain: Chain,
}

impl Context<'_> {
    fn flag(&self) -> Outcome<FlagSpec> {
        self.flag
            .ok_or_else(|| UsageError("this command needs a flag (--flag or `flag` in the config)".into()).into())
    }
}

const BITANGENT_RESIDUAL: f64 = 1e-8;
const GAP: f64 = 1e-8;
const HELD_OUT: f64 = 1e-7;
const INTERSECTION: f64 = 1e-7;
const LIFTED: f64 = 1e-10;
const ROUNDTRIP_FORMS: f64 = 1e-6;
const ROUNDTRIP_POINTS: f64 = 1e-7;
const NEGATIVE_CONTROL: f64 = 1e-2;
const IDENTITY: f64 = 1e-12;
const PENCIL_LINES: usize = 10;

fn run_bitangents(ctx: &Context, rec: &mut Recorder) -> Outcome<(Quartic, Vec<BitangentRecord>)> {
    let c = ctx.doc.quartic()?;
    let bt = rec.time("bitangents", || bitangents(&c, &ctx.profile))?;
    let worst = bt.iter().map(|b| b.residual).fold(0.0, f64::max);
    let lines: Vec<_> = bt.iter().map(|b| crate::input::form_spec(&b.line)).collect();
    let contacts: Vec<_> = bt
        .iter()
        .map(|b| [crate::input::point_spec(&b.contacts[0]), crate::input::point_spec(&b.contacts[1])])
        .collect();
    rec.stage(
        Stage::new("bitangents")
            .form("quartic", c.form())
            .residual("max_double_contact", worst)
            .data(json!({ "count": bt.len(), "lines": lines, "contacts": contacts })),
    );
    rec.check_eq("bitangent count", bt.len(), 28);
    rec.check("bitangent residual", worst, BITANGENT_RESIDUAL, false, "two-double-root residual");
    rec.check_runtime("bitangent runtime", "bitangents", 60.0);
    Ok((c, bt))
}

pub fn bitangents_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    run_bitangents(ctx, rec).map(|_| ())
}

pub fn classes_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let (_, bt) = run_bitangents(ctx, rec)?;
    classes_stage(ctx, rec, &bt)
}

fn classes_stage(ctx: &Context, rec: &mut Recorder, bt: &[BitangentRecord]) -> Outcome<()> {
    let table = rec.time("classes", || classify_all(bt, &ctx.profile))?;
    let n = table.classes.len();
    let mut symmetric = true;
    let mut alternating = true;
    let mut nondegenerate = true;
    let mut split_ok = true;
    for a in 0..n {
        alternating &= table.pairing(a, a) == 0;
        let mut ones = 0;
        for b in 0..n {
            let e = table.pairing(a, b);
            symmetric &= e == table.pairing(b, a);
            ones += e as usize;
        }
        nondegenerate &= ones > 0;
        split_ok &= ones == 32;
    }
    let pair_total: usize = table.classes.iter().map(|c| c.pairs().len()).sum();
    let mut quadruples = 0;
    let mut syzygetic = 0;
    for class in &table.classes {
        let pairs = class.pairs();
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                let (a, b) = pairs[i];
                let (c, d) = pairs[j];
                quadruples += 1;
                syzygetic += is_syzygetic([&bt[a], &bt[b], &bt[c], &bt[d]], &ctx.profile)?.syzygetic as usize;
            }
        }
    }
    let alpha = match &ctx.doc.alpha {
        Some(spec) => {
            let pair = resolve_alpha(spec, bt, &ctx.profile)?;
            let k = table.class_of(pair).expect("every pair has a class");
            let ones: usize = (0..n).map(|b| table.pairing(k, b) as usize).sum();
            Some(json!({ "pair": [pair.0, pair.1], "class": k, "pairs": table.classes[k].pairs(), "pairing_zero": n - ones, "pairing_one": ones }))
        }
        None => None,
    };
    rec.stage(Stage::new("classes").data(json!({
        "classes": table.classes.iter().map(|c| c.pairs().to_vec()).collect::<Vec<_>>(),
        "pair_total": pair_total,
        "within_class_quadruples": quadruples,
        "within_class_syzygetic": syzygetic,
        "alpha": alpha,
        "pairing": { "symmetric": symmetric, "alternating": alternating, "nondegenerate": nondegenerate, "split_31_32": split_ok },
    })));
    rec.check_eq("class count", n, 63);
    rec.check_eq("pairs partitioned", pair_total, 378);
    rec.check_eq("classes with 6 pairs", table.classes.iter().filter(|c| c.pairs().len() == 6).count(), 63);
    rec.check_eq("within-class quadruples syzygetic", syzygetic, 63 * 15);
    rec.check_eq("pairing symmetric", symmetric as usize, 1);
    rec.check_eq("pairing alternating", alternating as usize, 1);
    rec.check_eq("pairing nondegenerate", nondegenerate as usize, 1);
    rec.check_eq("pairing splits 31/32", split_ok as usize, 1);
    rec.check_runtime("classification runtime", "classes", 300.0);
    Ok(())
}

pub fn flags_cmd(_ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let e = enumerate_flags();
    rec.stage(Stage::new("flags").data(json!({
        "pairs": e.pairs.len(),
        "partitions": e.partitions.len(),
        "flags": e.flags.len(),
        "list": e.flags.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
    })));
    rec.check_eq("distinguished pairs", e.pairs.len(), 15);
    rec.check_eq("partitions", e.partitions.len(), 15);
    rec.check_eq("flags", e.flags.len(), 45);
    Ok(())
}

/// The configuration from the document, extracted from the quartic unless
/// given directly.
fn configuration(ctx: &Context, rec: &mut Recorder) -> Outcome<PlaneConfiguration> {
    if let Some(spec) = &ctx.doc.configuration {
        let config = parse_configuration(spec, &ctx.profile)?.map_err(|e| e.in_stage("configuration"))?;
        let mismatch = config.intersection_mismatch(&ctx.profile)?;
        rec.stage(
            Stage::new("configuration")
                .form("E", &config.e)
                .form("Q", &config.q_conic)
                .points("q", &config.q)
                .residual("intersection_mismatch", mismatch),
        );
        rec.check("Q ∩ E = q", mismatch, INTERSECTION, false, "input configuration");
        return Ok(config);
    }
    let (c, bt) = run_bitangents(ctx, rec)?;
    let spec = ctx
        .doc
        .alpha
        .as_ref()
        .ok_or_else(|| UsageError("config needs `alpha` or a direct `configuration`".into()))?;
    let pair = resolve_alpha(spec, &bt, &ctx.profile)?;
    let class = alpha_class(&bt, pair, &ctx.profile).map_err(|e| e.in_stage("alpha_class"))?;
    let (config, report) = rec
        .time("extract", || extract_configuration(&c, &bt, &class, &ctx.profile))
        .map_err(|e| e.in_stage("extract_configuration"))?;
    let q_cert = &config.certificates[0].certificate;
    let e_cert = &config.certificates[1].certificate;
    rec.stage(
        Stage::new("extract_configuration")
            .cert(&config.certificates[0])
            .cert(&config.certificates[1])
            .form("E", &config.e)
            .form("Q", &config.q_conic)
            .points("q", &config.q)
            .residual("held_out_max", report.held_out_max_residual)
            .residual("q_on_E_max", report.q_on_e_max_residual)
            .residual("q_on_Q_max", report.q_on_conic_max_residual)
            .residual("intersection_mismatch", report.intersection_mismatch)
            .data(json!({ "alpha": [pair.0, pair.1], "class": class.pairs(), "report": report })),
    );
    rec.check_eq("Q rank", q_cert.claimed_rank, 5);
    rec.check("Q gap ratio", q_cert.gap_ratio, GAP, false, "6 points on one conic");
    rec.check_eq("E rank", e_cert.claimed_rank, 9);
    rec.check("E gap ratio", e_cert.gap_ratio, GAP, false, "cross points and q on one cubic");
    rec.check_eq("cross points in fit", report.fit_points - 6, 15);
    rec.check("held-out cross points on E", report.held_out_max_residual, HELD_OUT, false, "");
    rec.check("Q ∩ E = q", report.intersection_mismatch, INTERSECTION, false, "");
    Ok(config)
}

fn model_stage(rec: &mut Recorder, config: &PlaneConfiguration) -> Outcome<()> {
    let model = build_space_model(config);
    let lifted = model.lifted_residual(&config.q);
    let odd = odd_space_report(&model)?;
    rec.stage(
        Stage::new("space_model")
            .residual("lifted_q", lifted)
            .data(json!({ "Q2": crate::input::form_spec(&model.q2), "Q3": crate::input::form_spec(&model.q3), "cone": model.is_cone(), "parity": odd })),
    );
    rec.check("lifted q on Q2 and Q3", lifted, LIFTED, false, "");
    rec.check_eq("odd dimension", odd.odd_dim, 3);
    rec.check_eq("even dimension", odd.even_dim, 1);
    Ok(())
}

pub fn extract_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let config = configuration(ctx, rec)?;
    model_stage(rec, &config)?;
    if let Some(flag) = ctx.flag {
        tower_stage(ctx, rec, &config, &flag)?;
    }
    Ok(())
}

fn tower_stage(ctx: &Context, rec: &mut Recorder, config: &PlaneConfiguration, flag: &FlagSpec) -> Outcome<()> {
    let p = &ctx.profile;
    let t = agm3::agm_step::projection_center(config, flag, p).map_err(|e| e.in_stage("projection_center"))?;
    let ram = agm3::agm_step::ramification_points(&config.e, &t, p).map_err(|e| e.in_stage("ramification_points"))?;
    let report = verify_tower_pattern(config, flag, &t, &ram.points, p).map_err(|e| e.in_stage("verify_tower_pattern"))?;
    let (a, b, c) = report.counts();
    rec.stage(
        Stage::new("verify_tower_pattern")
            .points("t", [&t])
            .points("ram", &ram.points)
            .residual("min_line_separation", report.min_separation)
            .data(json!({ "counts": report.type_counts, "distinct": report.distinct, "flex": ram.flex })),
    );
    rec.check_eq("tower ⊂⊂/= lines", a, 1);
    rec.check_eq("tower ⊂⊂/⊂ lines", b, 4);
    rec.check_eq("tower ⊂=/= lines", c, 4);
    rec.check_eq("tower pencil lines distinct", report.distinct as usize, 1);
    Ok(())
}

fn step_stage(ctx: &Context, rec: &mut Recorder, config: &PlaneConfiguration, flag: &FlagSpec, name: &str) -> Outcome<StepOutput> {
    let s = rec.time(name, || agm_step(config, flag, &ctx.profile))?;
    let out_config = s.configuration();
    let mut stage = Stage::new(name)
        .form("E'", &s.e_prime)
        .form("Q'", &s.q_prime)
        .points("q'", &s.q_points)
        .points("t", [&s.t])
        .points("ram", &s.ram)
        .residual("E'_at_t_and_ram", s.residuals.e_prime_points)
        .residual("E'_tangency", s.residuals.e_prime_tangency)
        .residual("Q'∩E'_vs_q'", s.residuals.q_prime_intersection)
        .residual("third_point_of_s1s2_vs_t", s.residuals.t_on_output_line)
        .residual("output_ramification_vs_old_q", s.residuals.swapped_ramification)
        .data(json!({
            "flag": flag.to_string(),
            "dual_flag": s.dual_flag.to_string(),
            "partition_candidates": s.partition_candidates.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
            "flex": s.flex,
            "input_tower": s.input_report.type_counts,
            "output_tower": s.output_report.type_counts,
            "output_configuration": configuration_spec(&out_config, Some(&s.dual_flag)),
        }));
    for c in &s.certificates {
        stage = stage.cert(CertificateOut::from(c));
    }
    rec.stage(stage);
    let (e, q) = (&s.certificates[0].certificate, &s.certificates[1].certificate);
    rec.check_eq(&format!("{name}: E' rank (13x10)"), e.claimed_rank, 9);
    rec.check(&format!("{name}: E' gap ratio"), e.gap_ratio, GAP, false, "");
    rec.check_eq(&format!("{name}: Q' rank (6x6)"), q.claimed_rank, 5);
    rec.check(&format!("{name}: Q' gap ratio"), q.gap_ratio, GAP, false, "six points, not only five");
    rec.check(&format!("{name}: Q' ∩ E' = q'"), s.residuals.q_prime_intersection, INTERSECTION, false, "");
    let (a, b, c) = s.output_report.counts();
    rec.check_eq(&format!("{name}: output tower pattern (1,4,4)"), (a == 1 && b == 4 && c == 4) as usize, 1);
    rec.check_runtime(&format!("{name}: runtime"), name, 1.0);
    Ok(s)
}

fn iso_stage(ctx: &Context, rec: &mut Recorder, s: &StepOutput) -> Outcome<()> {
    let chart = AffineChart::standard();
    let (iso, report) = canonical_iso_report(s, &chart, &chart, PENCIL_LINES, &ctx.profile)?;
    let m: Vec<Vec<crate::input::Scalar>> = (0..3)
        .map(|i| (0..3).map(|j| crate::input::scalar_of(iso.matrix[(i, j)])).collect())
        .collect();
    rec.stage(
        Stage::new("canonical_iso")
            .residual("off_identity", report.off_identity)
            .residual("t_displacement", report.t_displacement)
            .residual("max_pencil_line_displacement", report.max_pencil_displacement)
            .data(json!({ "matrix": m, "pencil_lines": report.pencil_lines })),
    );
    rec.check("isomorphism is the identity", report.off_identity, IDENTITY, false, "shared frames");
    rec.check("isomorphism fixes t", report.t_displacement, IDENTITY, false, "");
    rec.check("isomorphism fixes pencil lines through t", report.max_pencil_displacement, IDENTITY, false, "10 sampled lines");
    Ok(())
}

pub fn step_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let flag = ctx.flag()?;
    let config = configuration(ctx, rec)?;
    let s = step_stage(ctx, rec, &config, &flag, "agm_step")?;
    iso_stage(ctx, rec, &s)
}

fn roundtrip_stage(ctx: &Context, rec: &mut Recorder, config: &PlaneConfiguration, flag: &FlagSpec) -> Outcome<()> {
    step_stage(ctx, rec, config, flag, "agm_step")?;
    let (_, report) = rec
        .time("roundtrip", || roundtrip_check(config, flag, &ctx.profile))
        .map_err(|e| e.in_stage("roundtrip"))?;
    let best = report.best().clone();
    rec.stage(
        Stage::new("roundtrip")
            .residual("E_distance", best.e_distance)
            .residual("Q_distance", best.q_conic_distance)
            .residual("point_distance", best.point_distance)
            .residual("t_distance", best.t_distance)
            .data(json!({
                "candidates": report.candidates,
                "best": report.best,
                "tied": report.tied,
                "negative_control": report.negative_control,
            })),
    );
    rec.check("round trip E distance", best.e_distance, ROUNDTRIP_FORMS, false, "");
    rec.check("round trip Q distance", best.q_conic_distance, ROUNDTRIP_FORMS, false, "");
    rec.check("round trip point distance", best.point_distance, ROUNDTRIP_POINTS, false, "");
    let neg = report.negative_control.residual.unwrap_or(f64::INFINITY);
    rec.check(
        "negative control (wrong dual pair) rejected",
        neg,
        NEGATIVE_CONTROL,
        true,
        report.negative_control.error.clone().unwrap_or_default(),
    );
    Ok(())
}

pub fn roundtrip_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let flag = ctx.flag()?;
    let config = configuration(ctx, rec)?;
    roundtrip_stage(ctx, rec, &config, &flag)
}

pub fn iterate_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let mut flag = ctx.flag()?;
    let mut config = configuration(ctx, rec)?;
    let mut history = vec![config.clone()];
    for k in 0..ctx.n {
        let name = format!("step_{}", k + 1);
        let s = step_stage(ctx, rec, &config, &flag, &name).map_err(|f| match f {
            Failure::Domain(e) => Failure::Domain(e.in_stage(&name)),
            other => other,
        })?;
        config = s.configuration();
        flag = match ctx.chain {
            Chain::Dual => s.dual_flag,
            Chain::Fixed => flag,
        };
        history.push(config.clone());
    }
    // with dual chaining every second configuration returns
    let returns: Vec<f64> = (2..history.len()).map(|k| agm3::plane::coeff_distance(history[k].e.coeffs(), history[k - 2].e.coeffs())).collect();
    rec.stage(Stage::new("iterate").data(json!({
        "steps": ctx.n,
        "chain": ctx.chain,
        "E_distance_to_two_steps_back": returns,
    })));
    rec.check_eq("chained steps", history.len() - 1, ctx.n);
    Ok(())
}

pub fn verify_cmd(ctx: &Context, rec: &mut Recorder) -> Outcome<()> {
    let flag = ctx.flag()?;
    if ctx.doc.configuration.is_none() {
        let (_, bt) = run_bitangents(ctx, rec)?;
        classes_stage(ctx, rec, &bt)?;
        rec.stages.retain(|s| s.name != "bitangents");
        rec.checks.retain(|c| !c.name.starts_with("bitangent"));
    }
    flags_cmd(ctx, rec)?;
    let config = configuration(ctx, rec)?;
    model_stage(rec, &config)?;
    tower_stage(ctx, rec, &config, &flag)?;
    roundtrip_stage(ctx, rec, &config, &flag)?;
    let s = agm_step(&config, &flag, &ctx.profile)?;
    iso_stage(ctx, rec, &s)
}
