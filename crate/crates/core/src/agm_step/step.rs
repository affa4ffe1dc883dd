use crate::configuration::{non_generic_on_rank, verify_tower_pattern, NamedCertificate, PlaneConfiguration, RamificationReport, TowerType};
use crate::numkernel::{roots_univariate, seeded_unitary, with_escalation, ToleranceProfile, UnivariatePoly, C64};
use crate::plane::lines::line_distance;
use crate::plane::{
    fit_form_constrained, intersect, line_through, point_order, polar_conic, set_distance, third_point, Fit, HomogeneousForm, ProjPoint,
    TangencyConstraint,
};
use crate::quartic_theta::FlagSpec;
use crate::error::StageExt;
use crate::{Error, Result};

const SAME_POINT: f64 = 1e-6;

/// Third point of `E` on the line through the distinguished pair.
pub fn projection_center(config: &PlaneConfiguration, flag: &FlagSpec, profile: &ToleranceProfile) -> Result<ProjPoint> {
    let (a, b) = flag.pair();
    let t = third_point(&config.e, config.point(a), config.point(b), profile)?;
    for (i, q) in config.q.iter().enumerate() {
        if q.distance(&t) < profile.eps_point.sqrt() {
            return Err(Error::NonGeneric(format!("projection center coincides with q{}", i + 1)));
        }
    }
    Ok(t)
}

/// Contact points of the tangent lines from `t` to `E`.
#[derive(Debug, Clone)]
pub struct Ramification {
    pub points: [ProjPoint; 4],
    /// `t` is a flex of `E` and appears among its own ramification points.
    pub flex: bool,
}

/// `E ∩ polar(E, t)` with `t` removed twice.
///
/// For `u` off `t`, `E(u + mu t) = c0(u) + c1(u) mu + c2(u) mu^2` with
/// `c1 = polar(E, t)`. The line `ut` is tangent away from `t` iff
/// `c1^2 - 4 c0 c2 = 0`, a binary quartic on the pencil through `t`, and the
/// contact point is `2 c2(u) u - c1(u) t`. At a flex `t` the tangent line at
/// `t` has `c1 = c2 = 0` and contributes `t` itself.
pub fn ramification_points(e: &HomogeneousForm, t: &ProjPoint, profile: &ToleranceProfile) -> Result<Ramification> {
    if e.residual(t.coords()) > profile.eps_residual {
        return Err(Error::InvalidInput("projection center is off E".into()));
    }
    let e = e.normalized();
    let polar = polar_conic(&e, t)?;
    let mut last = None;
    for attempt in 0..4u64 {
        let frame = seeded_unitary(3, profile.sub_seed(0x7a40_0000 + attempt));
        let v: Vec<C64> = frame.column(0).iter().copied().collect();
        let w: Vec<C64> = frame.column(1).iter().copied().collect();
        let c0 = UnivariatePoly::new(e.restrict(&v, &w));
        let c1 = UnivariatePoly::new(polar.restrict(&v, &w));
        let c2_at = |u: &[C64]| e.restrict(u, t.coords())[2];
        let c2 = UnivariatePoly::new(vec![c2_at(&v), c2_at(&w)]);
        let sq = c1.mul(&c1);
        let prod = c0.mul(&c2);
        let disc: Vec<C64> = (0..5)
            .map(|k| sq.coeffs().get(k).copied().unwrap_or_default() - 4.0 * prod.coeffs().get(k).copied().unwrap_or_default())
            .collect();
        let disc = UnivariatePoly::new(disc);
        if disc.degree() < 4 || disc.leading().norm() < 1e-6 * disc.max_abs() {
            last = Some(Error::ChartDegenerate("tangent line from t through the frame point at infinity".into()));
            continue;
        }
        let roots = roots_univariate(&disc, profile)?;
        if roots.len() != 4 || roots.iter().any(|r| r.multiplicity != 1) {
            return Err(Error::NonGeneric(format!(
                "expected 4 distinct tangent lines from t, found multiplicities {:?}",
                roots.iter().map(|r| r.multiplicity).collect::<Vec<_>>()
            )));
        }
        let mut flex = false;
        let mut points = Vec::with_capacity(4);
        for r in &roots {
            let u: Vec<C64> = v.iter().zip(&w).map(|(a, b)| a + r.value * b).collect();
            let (a1, a2) = (c1.eval(r.value), c2.eval(r.value));
            let scale = u.iter().map(|x| x.norm()).fold(0.0, f64::max);
            let p = if a1.norm().max(a2.norm()) < profile.eps_point.sqrt() * scale {
                flex = true;
                t.clone()
            } else {
                let c: Vec<C64> = u.iter().zip(t.coords()).map(|(x, y)| 2.0 * a2 * x - a1 * y).collect();
                polish_on(&e, &polar, ProjPoint::new(&c)?)
            };
            points.push(p);
        }
        for (i, p) in points.iter().enumerate() {
            let r = e.residual(p.coords()).max(polar.residual(p.coords()));
            if r > profile.eps_residual {
                return Err(Error::NonGeneric(format!("ramification point {} has residual {r:.3e}", i + 1)));
            }
            if points[i + 1..].iter().any(|q| q.distance(p) < profile.eps_point.sqrt()) {
                return Err(Error::NonGeneric("two ramification points coincide".into()));
            }
        }
        points.sort_by(point_order);
        let points: [ProjPoint; 4] = points.try_into().expect("four points");
        return Ok(Ramification { points, flex });
    }
    Err(last.expect("at least one attempt"))
}

/// Newton on `F = G = 0` with the step orthogonal to the current point;
/// a step is kept only if it lowers the residual.
fn polish_on(f: &HomogeneousForm, g: &HomogeneousForm, mut p: ProjPoint) -> ProjPoint {
    let res = |q: &ProjPoint| f.residual(q.coords()).max(g.residual(q.coords()));
    let mut best = res(&p);
    for _ in 0..6 {
        let x = p.coords();
        let (gf, gg) = (f.gradient(x), g.gradient(x));
        let m = nalgebra::Matrix3::from_fn(|i, j| match i {
            0 => gf[j],
            1 => gg[j],
            _ => x[j].conj(),
        });
        let rhs = nalgebra::Vector3::new(-f.eval(x), -g.eval(x), C64::new(0.0, 0.0));
        let Some(d) = m.lu().solve(&rhs) else { break };
        let next: Vec<C64> = x.iter().zip(d.iter()).map(|(a, b)| a + b).collect();
        let Ok(q) = ProjPoint::new(&next) else { break };
        let r = res(&q);
        if r < best {
            p = q;
            best = r;
        } else {
            break;
        }
    }
    p
}

/// The cubic through `t` and the ramification points that is tangent at
/// the other four marked points to their lines through `t`.
pub fn fit_e_prime(
    config: &PlaneConfiguration,
    flag: &FlagSpec,
    t: &ProjPoint,
    ram: &[ProjPoint; 4],
    profile: &ToleranceProfile,
) -> Result<Fit> {
    let mut points = vec![t.clone()];
    for r in ram {
        if r.distance(t) >= SAME_POINT {
            points.push(r.clone());
        }
    }
    let tangencies = flag
        .partition()
        .iter()
        .flat_map(|&(x, y)| [x, y])
        .map(|j| {
            let qj = config.point(j).clone();
            let l = line_through(t, &qj, profile.eps_point)?;
            TangencyConstraint::new(qj, l, profile.eps_point.sqrt())
        })
        .collect::<Result<Vec<_>>>()?;
    with_escalation(profile, |p| fit_form_constrained(3, &points, &tangencies, p))
}

/// The conic through the ramification points and the two further points of
/// the line through the distinguished pair on `E'`.
#[derive(Debug, Clone)]
pub struct QPrimeFit {
    pub fit: Fit,
    pub s: [ProjPoint; 2],
}

pub fn fit_q_prime(
    config: &PlaneConfiguration,
    flag: &FlagSpec,
    e_prime: &HomogeneousForm,
    t: &ProjPoint,
    ram: &[ProjPoint; 4],
    profile: &ToleranceProfile,
) -> Result<QPrimeFit> {
    let (a, b) = flag.pair();
    let line = line_through(config.point(a), config.point(b), profile.eps_point)?;
    let mut pts = intersect(&line, e_prime, profile)?;
    let (k, d) = pts
        .iter()
        .enumerate()
        .map(|(k, p)| (k, p.point.distance(t)))
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .expect("three points");
    if d > SAME_POINT {
        return Err(Error::NonGeneric("t is not on E' ∩ line(q1, q2)".into()));
    }
    if pts[k].multiplicity > 1 {
        return Err(Error::NonGeneric("the line through the distinguished pair is tangent to E' at t".into()));
    }
    pts.remove(k);
    if pts.len() != 2 {
        return Err(Error::NonGeneric("the two new distinguished points coincide".into()));
    }
    let s = [pts[0].point.clone(), pts[1].point.clone()];
    let mut points: Vec<ProjPoint> = ram.to_vec();
    points.extend(s.iter().cloned());
    let fit = with_escalation(profile, |p| fit_form_constrained(2, &points, &[], p))?;
    Ok(QPrimeFit { fit, s })
}

/// Residual diagnostics of one step.
#[derive(Debug, Clone, Default, serde::Serialize)]
pub struct StepResiduals {
    /// `|E'|` at `t` and at the ramification points.
    pub e_prime_points: f64,
    /// Distance of the tangent line of `E'` at `q_j` from `line(t, q_j)`.
    pub e_prime_tangency: f64,
    /// `Q' ∩ E'` against `{s1, s2, ram}` as sets.
    pub q_prime_intersection: f64,
    /// Third point of `E'` on `line(s1, s2)` against `t`.
    pub t_on_output_line: f64,
    /// Ramification of `E'` from `t` against the old marked points.
    pub swapped_ramification: f64,
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub e_prime: HomogeneousForm,
    pub q_prime: HomogeneousForm,
    /// `s1, s2, ram1..ram4`, labelled 1..6 in this order.
    pub q_points: Vec<ProjPoint>,
    pub t: ProjPoint,
    pub ram: [ProjPoint; 4],
    pub flex: bool,
    /// Distinguished pair `{1, 2}` with the first partition candidate.
    pub dual_flag: FlagSpec,
    pub partition_candidates: [FlagSpec; 3],
    pub certificates: Vec<NamedCertificate>,
    pub input_report: RamificationReport,
    pub output_report: RamificationReport,
    pub residuals: StepResiduals,
}

impl StepOutput {
    pub fn configuration(&self) -> PlaneConfiguration {
        PlaneConfiguration {
            e: self.e_prime.clone(),
            q_conic: self.q_prime.clone(),
            q: self.q_points.clone(),
            certificates: self.certificates.clone(),
        }
    }
}

pub fn dual_partition_candidates() -> [FlagSpec; 3] {
    [
        FlagSpec::new((1, 2), [(3, 4), (5, 6)]).expect("valid"),
        FlagSpec::new((1, 2), [(3, 5), (4, 6)]).expect("valid"),
        FlagSpec::new((1, 2), [(3, 6), (4, 5)]).expect("valid"),
    ]
}

/// One AGM step on a configuration with a flag.
pub fn agm_step(config: &PlaneConfiguration, flag: &FlagSpec, profile: &ToleranceProfile) -> Result<StepOutput> {
    let t = projection_center(config, flag, profile).stage("projection_center")?;
    let ramification = ramification_points(&config.e, &t, profile).stage("ramification_points")?;
    let ram = ramification.points.clone();
    let input_report = verify_tower_pattern(config, flag, &t, &ram, profile).stage("verify_tower_pattern")?;
    let e_fit = fit_e_prime(config, flag, &t, &ram, profile)
        .map_err(non_generic_on_rank)
        .stage("fit_e_prime")?;
    let e_prime = e_fit.form.clone();
    let q_fit = fit_q_prime(config, flag, &e_prime, &t, &ram, profile)
        .map_err(non_generic_on_rank)
        .stage("fit_q_prime")?;
    let q_prime = q_fit.fit.form.clone();

    let mut q_points = q_fit.s.to_vec();
    q_points.extend(ram.iter().cloned());
    let output =
        PlaneConfiguration::new(e_prime.clone(), q_prime.clone(), q_points.clone(), profile).stage("output_configuration")?;

    let mut residuals = StepResiduals {
        e_prime_points: std::iter::once(&t)
            .chain(ram.iter())
            .map(|p| e_prime.residual(p.coords()))
            .fold(0.0, f64::max),
        ..StepResiduals::default()
    };
    for (x, y) in flag.partition() {
        for j in [x, y] {
            let qj = config.point(j);
            let tangent = HomogeneousForm::linear(&e_prime.gradient(qj.coords()));
            let expected = line_through(&t, qj, profile.eps_point)?;
            residuals.e_prime_tangency = residuals.e_prime_tangency.max(line_distance(&tangent, &expected));
        }
    }
    residuals.q_prime_intersection = output.intersection_mismatch(profile).stage("output_configuration")?;

    let candidates = dual_partition_candidates();
    let dual_flag = candidates[0];
    let t_out = projection_center(&output, &dual_flag, profile).stage("output_projection_center")?;
    residuals.t_on_output_line = t_out.distance(&t);
    let ram_out = ramification_points(&e_prime, &t, profile).stage("output_ramification")?;
    let old_marked: Vec<ProjPoint> = flag
        .partition()
        .iter()
        .flat_map(|&(x, y)| [config.point(x).clone(), config.point(y).clone()])
        .collect();
    residuals.swapped_ramification = set_distance(&ram_out.points, &old_marked);
    let output_report =
        verify_tower_pattern(&output, &dual_flag, &t, &ram_out.points, profile).stage("verify_output_tower")?;
    check_swap(&input_report, &output_report)?;

    let certificates = vec![
        NamedCertificate::new("E' (13 conditions)", e_fit.certificate),
        NamedCertificate::new("Q' (6 conditions)", q_fit.fit.certificate),
    ];
    Ok(StepOutput {
        e_prime,
        q_prime,
        q_points,
        t,
        ram,
        flex: ramification.flex,
        dual_flag,
        partition_candidates: candidates,
        certificates,
        input_report,
        output_report,
        residuals,
    })
}

/// The tangent lines of the output are the marked-point lines of the input
/// and vice versa; the line through the distinguished pair is kept.
fn check_swap(input: &RamificationReport, output: &RamificationReport) -> Result<()> {
    let matches = |a: Vec<&HomogeneousForm>, b: Vec<&HomogeneousForm>| {
        a.len() == b.len()
            && a.iter().all(|x| b.iter().any(|y| line_distance(x, y) < SAME_POINT))
    };
    let ok = matches(
        input.lines_of(TowerType::SplitSplitRamified),
        output.lines_of(TowerType::SplitRamifiedUnramified),
    ) && matches(
        input.lines_of(TowerType::SplitRamifiedUnramified),
        output.lines_of(TowerType::SplitSplitRamified),
    ) && matches(
        input.lines_of(TowerType::SplitSplitUnramified),
        output.lines_of(TowerType::SplitSplitUnramified),
    );
    if ok {
        Ok(())
    } else {
        Err(Error::NonGeneric("output tower does not exchange tangent and marked-point lines".into()).in_stage("verify_output_tower"))
    }
}
