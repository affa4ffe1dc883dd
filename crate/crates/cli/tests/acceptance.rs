//! End-to-end acceptance run. Each criterion prints one PASS/FAIL line; the
//! process exits non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use agm3::numkernel::ToleranceProfile;
use agm3::quartic_theta::{bitangents, classify_all};
use serde_json::Value;

const RANDOM_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

struct Run {
    code: i32,
    report: Value,
}

fn agm3(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_agm3")).args(args).output().expect("binary runs");
    let code = out.status.code().unwrap_or(-1);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    Run { code, report }
}

fn stage<'a>(r: &'a Value, name: &str) -> Result<&'a Value, String> {
    r["stages"]
        .as_array()
        .and_then(|s| s.iter().find(|s| s["name"] == name))
        .ok_or_else(|| format!("report has no `{name}` stage"))
}

fn num(v: &Value) -> Result<f64, String> {
    v.as_f64().ok_or_else(|| format!("not a number: {v}"))
}

fn below(what: &str, v: f64, bound: f64) -> Result<(), String> {
    if v < bound {
        Ok(())
    } else {
        Err(format!("{what} = {v:.3e}, needs < {bound:.0e}"))
    }
}

fn expect<T: PartialEq + std::fmt::Debug>(what: &str, got: T, want: T) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got:?}, expected {want:?}"))
    }
}

struct Fixture {
    name: String,
    path: PathBuf,
    verify: Run,
}

fn scratch() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("agm3-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fixtures(dir: &Path) -> Vec<Fixture> {
    let mut named = vec![("trott".to_string(), PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/trott.json"))];
    for seed in RANDOM_SEEDS {
        let path = dir.join(format!("random-{seed}.json"));
        let s = seed.to_string();
        let run = Command::new(env!("CARGO_BIN_EXE_agm3"))
            .args(["fixture", "random", "--seed", &s, "--out", path.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(run.success(), "fixture generation failed for seed {seed}");
        named.push((format!("random-{seed}"), path));
    }
    std::thread::scope(|scope| {
        let handles: Vec<_> = named
            .into_iter()
            .map(|(name, path)| {
                scope.spawn(move || {
                    let verify = agm3(&["verify", "--config", path.to_str().unwrap()]);
                    Fixture { name, path, verify }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn each(fx: &[Fixture], f: impl Fn(&Value) -> Result<String, String>) -> Result<String, String> {
    let mut notes = Vec::new();
    for x in fx {
        if x.verify.code != 0 {
            return Err(format!("{}: verify exited {} ({})", x.name, x.verify.code, x.verify.report["verdict"]["error"]));
        }
        notes.push(format!("{}: {}", x.name, f(&x.verify.report).map_err(|e| format!("{}: {e}", x.name))?));
    }
    Ok(notes.join("; "))
}

fn bitangent_count(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let s = stage(r, "bitangents")?;
        expect("count", s["data"]["count"].as_u64(), Some(28))?;
        let res = num(&s["residuals"]["max_double_contact"])?;
        below("two-double-root residual", res, 1e-8)?;
        let ms = num(&r["timings_ms"]["bitangents"])?;
        below("runtime (s)", ms / 1e3, 60.0)?;
        Ok(format!("28 lines, residual {res:.1e}, {ms:.0} ms"))
    })
}

fn class_structure(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let d = &stage(r, "classes")?["data"];
        let classes = d["classes"].as_array().ok_or("no class list")?;
        expect("classes", classes.len(), 63)?;
        let mut seen = BTreeSet::new();
        for c in classes {
            let pairs = c.as_array().ok_or("bad class")?;
            expect("pairs per class", pairs.len(), 6)?;
            for p in pairs {
                let (a, b) = (p[0].as_u64().ok_or("bad pair")?, p[1].as_u64().ok_or("bad pair")?);
                if !seen.insert((a.min(b), a.max(b))) {
                    return Err(format!("pair ({a}, {b}) in two classes"));
                }
            }
        }
        expect("distinct pairs covered", seen.len(), 378)?;
        expect("within-class quadruples", d["within_class_quadruples"].as_u64(), Some(63 * 15))?;
        expect("syzygetic quadruples", d["within_class_syzygetic"].as_u64(), Some(63 * 15))?;
        let ms = num(&r["timings_ms"]["classes"])?;
        below("runtime (s)", ms / 1e3, 300.0)?;
        Ok(format!("63 x 6 partition, 945/945 syzygetic, {ms:.0} ms"))
    })
}

fn conic_incidence(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let c = &stage(r, "extract_configuration")?["certificates"][0];
        expect("Q certificate rank", c["claimed_rank"].as_u64(), Some(5))?;
        expect("Q conditions", c["singular_values"].as_array().map(Vec::len), Some(6))?;
        let gap = num(&c["gap_ratio"])?;
        below("gap ratio", gap, 1e-8)?;
        Ok(format!("gap {gap:.1e}"))
    })
}

fn cubic_consistency(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let s = stage(r, "extract_configuration")?;
        let c = &s["certificates"][1];
        expect("E certificate rank", c["claimed_rank"].as_u64(), Some(9))?;
        below("E gap ratio", num(&c["gap_ratio"])?, 1e-8)?;
        let rep = &s["data"]["report"];
        let cross = rep["fit_points"].as_u64().ok_or("no fit_points")? - 6;
        if cross < 15 {
            return Err(format!("only {cross} cross points in the fit"));
        }
        if rep["held_out_points"].as_u64().unwrap_or(0) == 0 {
            return Err("no held-out cross points".into());
        }
        let held = num(&rep["held_out_max_residual"])?;
        below("held-out residual", held, 1e-7)?;
        Ok(format!("{cross}+6 points, held-out {held:.1e}"))
    })
}

fn tower_genericity(fx: &[Fixture], dir: &Path) -> Result<String, String> {
    let generic = each(fx, |r| {
        let d = &stage(r, "verify_tower_pattern")?["data"];
        let c = &d["counts"];
        expect("counts", (c["⊂⊂/="].as_u64(), c["⊂⊂/⊂"].as_u64(), c["⊂=/="].as_u64()), (Some(1), Some(4), Some(4)))?;
        expect("pencil lines distinct", d["distinct"].as_bool(), Some(true))?;
        Ok("(1,4,4)".into())
    })?;
    let trott = fx[0].path.to_str().unwrap();

    // the Trott symmetry makes this flag's pencil lines coincide
    let a = agm3(&["step", "--config", trott, "--flag", "pair=5,6;partition=1-2,3-4"]);
    expect("coinciding pencil lines exit", a.code, 2)?;
    expect("coinciding pencil lines stage", a.report["verdict"]["error"]["stages"][0].as_str(), Some("verify_tower_pattern"))?;

    // alpha = (0, 1) on Trott makes two marked points coincide
    let doc = std::fs::read_to_string(trott).unwrap().replace("[2, 7]", "[0, 1]");
    let path = dir.join("trott-alpha01.json");
    std::fs::write(&path, doc).unwrap();
    let b = agm3(&["extract", "--config", path.to_str().unwrap()]);
    expect("coinciding marked points exit", b.code, 2)?;

    // a direct configuration with a repeated marked point
    let cfg = dir.join("repeated.json");
    let gen = agm3(&["fixture", "random", "--seed", "3", "--extracted", "--out", cfg.to_str().unwrap()]);
    expect("fixture exit", gen.code, 0)?;
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&cfg).unwrap()).unwrap();
    v["configuration"]["q"][1] = v["configuration"]["q"][0].clone();
    std::fs::write(&cfg, v.to_string()).unwrap();
    let c = agm3(&["step", "--config", cfg.to_str().unwrap()]);
    expect("repeated marked point exit", c.code, 2)?;

    Ok(format!("{generic}; 3 synthetic degeneracies rejected as non-generic"))
}

fn step_consistency(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let s = stage(r, "agm_step")?;
        let (e, q) = (&s["certificates"][0], &s["certificates"][1]);
        expect("E' unknowns", e["singular_values"].as_array().map(Vec::len), Some(10))?;
        expect("E' rank", e["claimed_rank"].as_u64(), Some(9))?;
        let ge = num(&e["gap_ratio"])?;
        below("E' gap", ge, 1e-8)?;
        expect("Q' unknowns", q["singular_values"].as_array().map(Vec::len), Some(6))?;
        expect("Q' rank", q["claimed_rank"].as_u64(), Some(5))?;
        let gq = num(&q["gap_ratio"])?;
        below("Q' gap", gq, 1e-8)?;
        let inter = num(&s["residuals"]["Q'∩E'_vs_q'"])?;
        below("Q' ∩ E' vs q'", inter, 1e-7)?;
        let ms = num(&r["timings_ms"]["agm_step"])?;
        below("runtime (s)", ms / 1e3, 1.0)?;
        Ok(format!("gaps {ge:.1e}/{gq:.1e}, Q'∩E' {inter:.1e}, {ms:.1} ms"))
    })
}

fn symmetry_round_trip(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let s = stage(r, "roundtrip")?;
        let e = num(&s["residuals"]["E_distance"])?;
        let q = num(&s["residuals"]["Q_distance"])?;
        let p = num(&s["residuals"]["point_distance"])?;
        below("E distance", e, 1e-6)?;
        below("Q distance", q, 1e-6)?;
        below("point distance", p, 1e-7)?;
        let neg = &s["data"]["negative_control"];
        let control = match neg["residual"].as_f64() {
            Some(x) if x > 1e-2 => format!("control {x:.2}"),
            Some(x) => return Err(format!("negative control residual {x:.3e} not above 1e-2")),
            None if neg["error"].is_string() => "control rejected by the step".to_string(),
            None => return Err("negative control has neither residual nor error".into()),
        };
        Ok(format!("E {e:.1e}, Q {q:.1e}, points {p:.1e}, {control}"))
    })
}

fn canonical_isomorphism(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let s = stage(r, "canonical_iso")?;
        let off = num(&s["residuals"]["off_identity"])?;
        below("off-identity norm", off, 1e-12)?;
        below("t displacement", num(&s["residuals"]["t_displacement"])?, 1e-12)?;
        expect("pencil lines", s["data"]["pencil_lines"].as_u64(), Some(10))?;
        below("pencil line displacement", num(&s["residuals"]["max_pencil_line_displacement"])?, 1e-12)?;
        Ok(format!("off-identity {off:.1e}"))
    })
}

fn combinatorics(fx: &[Fixture]) -> Result<String, String> {
    let f = agm3(&["flags"]);
    expect("flags exit", f.code, 0)?;
    let d = &stage(&f.report, "flags")?["data"];
    expect("counts", (d["pairs"].as_u64(), d["partitions"].as_u64(), d["flags"].as_u64()), (Some(15), Some(15), Some(45)))?;

    let reported = each(fx, |r| {
        let p = &stage(r, "classes")?["data"]["pairing"];
        for key in ["symmetric", "alternating", "nondegenerate", "split_31_32"] {
            expect(key, p[key].as_bool(), Some(true))?;
        }
        let a = &stage(r, "classes")?["data"]["alpha"];
        expect("split against alpha", (a["pairing_zero"].as_u64(), a["pairing_one"].as_u64()), (Some(31), Some(32)))?;
        Ok("ok".into())
    })?;

    // independent recomputation of the pairing table on the Trott fixture
    let profile = ToleranceProfile::default();
    let bt = bitangents(&agm3::fixtures::trott(), &profile).map_err(|e| e.to_string())?;
    let table = classify_all(&bt, &profile).map_err(|e| e.to_string())?;
    let n = table.classes.len();
    expect("classes", n, 63)?;
    for a in 0..n {
        expect("alternating", table.pairing(a, a), 0)?;
        let ones: usize = (0..n).map(|b| table.pairing(a, b) as usize).sum();
        expect("pairing against a fixed class, ones", ones, 32)?;
        for b in 0..n {
            expect("symmetric", table.pairing(a, b), table.pairing(b, a))?;
            if let Some(s) = table.sum(a, b) {
                for c in 0..n {
                    expect("bilinear", table.pairing(s, c), table.pairing(a, c) ^ table.pairing(b, c))?;
                }
            }
        }
    }
    Ok(format!("15/15/45; pairing checks per fixture [{reported}]; Trott table recomputed and bilinear"))
}

fn space_model(fx: &[Fixture]) -> Result<String, String> {
    each(fx, |r| {
        let s = stage(r, "space_model")?;
        let lifted = num(&s["residuals"]["lifted_q"])?;
        below("lifted residual", lifted, 1e-10)?;
        let p = &s["data"]["parity"];
        expect("(odd, even)", (p["odd_dim"].as_u64(), p["even_dim"].as_u64()), (Some(3), Some(1)))?;
        Ok(format!("lifted {lifted:.1e}, (3, 1)"))
    })
}

type Criterion<'a> = Box<dyn Fn() -> Result<String, String> + 'a>;

fn main() {
    let dir = scratch();
    let fx = fixtures(&dir);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("bitangent count", Box::new(|| bitangent_count(&fx))),
        ("alpha-class structure", Box::new(|| class_structure(&fx[..1]))),
        ("conic incidence", Box::new(|| conic_incidence(&fx))),
        ("cubic E consistency", Box::new(|| cubic_consistency(&fx))),
        ("tower genericity", Box::new(|| tower_genericity(&fx, &dir))),
        ("step consistency", Box::new(|| step_consistency(&fx))),
        ("symmetry round trip", Box::new(|| symmetry_round_trip(&fx))),
        ("canonical isomorphism", Box::new(|| canonical_isomorphism(&fx))),
        ("combinatorics", Box::new(|| combinatorics(&fx))),
        ("P3 model", Box::new(|| space_model(&fx))),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", k + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {reason}", k + 1);
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
