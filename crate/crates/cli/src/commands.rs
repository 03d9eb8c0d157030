use serde_json::{json, Value};
use upfrac_core::{
    generate_set_capped, ChangeOfVariables, ClosedForm, Error, Generator, Grid, LatticeSpec, Result,
    SampledFunction,
};
use upfrac_density::{decay_audit, estimate_density, DecayModel, DecayModelKind};
use upfrac_nup::{build_nup, choose_bump, verify_lattice_vanishing, VanishingMode};
use upfrac_ops::{apply_multiplier, frac_laplacian_at, MultiplierSpec, QuadratureConfig, SpectralConfig};
use upfrac_phase::{
    blaschke_condition, theorem_a_hypotheses, theorem_b_bound, verify_p1, verify_p2, PhaseSequence, TheoremAConfig,
};

use crate::args::{DecayArgs, DensityArgs, FraclapArgs, NupArgs, PhaseArgs};

/// Result document plus files written under `--out`.
pub struct Outcome {
    pub result: Value,
    pub artifacts: Vec<(String, String)>,
}

fn from_tag<T: serde::de::DeserializeOwned>(what: &str, v: Value) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|_| Error::Parameter(format!("unknown {what} {v}")))
}

fn lattice(a: Option<&str>, d: usize) -> Result<LatticeSpec> {
    let l = match a {
        Some(text) => LatticeSpec::parse(text)?,
        None => LatticeSpec::identity(d),
    };
    if l.dim() != d {
        return Err(Error::Parameter(format!("lattice has dimension {}, expected d = {d}", l.dim())));
    }
    Ok(l)
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive, got {v}")))
    }
}

pub fn density(args: &DensityArgs) -> Result<Outcome> {
    finite("R", args.radius)?;
    let generator = match args.set.as_str() {
        "lattice" => Generator::Lattice { lattice: lattice(args.a.as_deref(), args.d)? },
        tag => from_tag("set", json!({"generator": tag, "alpha": args.alpha, "c": args.c}))?,
    };
    let map: ChangeOfVariables = from_tag("map", json!({"kind": args.map, "alpha": args.alpha, "c": args.c}))?;
    map.validate(args.d)?;
    if map.image_inner_radius() > 0.0 && args.radius <= map.image_inner_radius() {
        return Err(Error::Domain(format!("R must exceed {} for this map", map.image_inner_radius())));
    }
    let domain_radius = map.radial_inverse(args.radius);
    let set = generate_set_capped(&generator, args.d, domain_radius, args.cap)?;
    let r_values = match &args.r {
        Some(r) => r.clone(),
        None => [50.0, 10.0, 4.0].iter().map(|q| (args.radius / q).powi(args.d as i32)).collect(),
    };
    let e = estimate_density(&set, &map, &r_values)?;
    let result = json!({
        "points": set.len(),
        "domain_radius": domain_radius,
        "r": e.r_values,
        "sup_ratio": e.sup_ratios(),
        "inf_ratio": e.inf_ratios(),
        "upper": e.upper,
        "lower": e.lower,
        "converging": e.trend.converging,
    });
    Ok(Outcome { result, artifacts: vec![("density.csv".into(), e.to_csv())] })
}

pub fn nup(args: &NupArgs) -> Result<Outcome> {
    let l = lattice(args.a.as_deref(), args.d)?;
    let mut spec = json!({"kind": args.multiplier, "s": args.s, "lambda": args.lambda, "gamma": args.gamma, "d": args.d});
    if let Some(p) = &args.profile {
        spec["profile"] = json!(p);
    }
    let op = MultiplierSpec::from_json(&spec.to_string()).map_err(|e| match e {
        Error::Input(_) => Error::Parameter(format!("unknown multiplier '{}' or missing fields", args.multiplier)),
        other => other,
    })?;
    let mode: VanishingMode = from_tag("mode", json!(args.mode))?;
    let bump = choose_bump(&l, &l.dual_vector(0))?;
    let witness = build_nup(&l, &op, &bump)?;
    let report = verify_lattice_vanishing(&witness, args.k, mode)?;
    let tol = args.tol.unwrap_or(if args.d == 1 { 1e-8 } else { 1e-6 });
    if report.max_residual() > tol {
        return Err(Error::Accuracy { estimate: report.max_residual(), target: tol });
    }
    let result = json!({
        "certified": witness.certified,
        "min_g": witness.min_g,
        "shifts": witness.shifts,
        "mode": report.mode,
        "K": report.k_max,
        "nodes_per_axis": report.nodes_per_axis,
        "f_norm": report.f_norm,
        "tf_norm": report.tf_norm,
        "max_f_residual": report.max_f_residual,
        "max_tf_residual": report.max_tf_residual,
        "tolerance": tol,
    });
    Ok(Outcome {
        result,
        artifacts: vec![("nup.json".into(), witness.to_json()), ("residuals.csv".into(), report.to_csv())],
    })
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

pub fn phase(args: &PhaseArgs) -> Result<Outcome> {
    let seq = PhaseSequence::new(args.alpha, args.ell)?.with_n_max(args.n_max);
    seq.validate()?;
    match args.check.as_str() {
        "P1" | "P2" => {
            let r = if args.check == "P1" {
                verify_p1(&seq, args.window, args.samples)?
            } else {
                verify_p2(&seq, args.k, args.window, args.samples)?
            };
            let result = json!({
                "k": r.k,
                "band": [r.band.0, r.band.1],
                "drift": r.drift,
                "max_tail_bound": r.tail_bounds.iter().copied().fold(0.0, f64::max),
                "condition": to_value(&r.condition),
                "pass": r.pass,
            });
            Ok(Outcome { result, artifacts: vec![("phase.csv".into(), r.to_csv())] })
        }
        "theoremA" => {
            let generator = match args.gamma.as_str() {
                "Z_alpha" => Generator::ZAlpha { alpha: args.alpha },
                "lattice" => Generator::Lattice { lattice: LatticeSpec::identity(1) },
                other => return Err(Error::Parameter(format!("unknown set '{other}'"))),
            };
            let set = generate_set_capped(&generator, 1, args.radius, upfrac_core::DEFAULT_POINT_CAP)?;
            let r = theorem_a_hypotheses(&set, &seq, &TheoremAConfig::default())?;
            let result = to_value(&r);
            Ok(Outcome { artifacts: vec![("theorem_a.json".into(), pretty(&result))], result })
        }
        "theoremB" => {
            let b = theorem_b_bound(&seq, args.x0, args.k)?;
            let result = json!({
                "k": b.k,
                "x0": b.x0,
                "bound": b.bound,
                "bracket": [b.bracket.re, b.bracket.im],
                "bracket_error": b.bracket_error,
                "condition": to_value(&b.condition),
            });
            Ok(Outcome { result, artifacts: Vec::new() })
        }
        "blaschke" => {
            let checkpoints: Vec<u64> = (1..=6).map(|p| 10u64.pow(p)).filter(|n| *n <= args.n_max).collect();
            let c = blaschke_condition(&seq, &checkpoints)?;
            Ok(Outcome { result: to_value(&c), artifacts: Vec::new() })
        }
        other => Err(Error::Parameter(format!("unknown check '{other}'"))),
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

pub fn fraclap(args: &FraclapArgs) -> Result<Outcome> {
    let f = match (args.function.as_str(), args.d) {
        ("gaussian", d) => ClosedForm::gaussian(d),
        ("modulated_gaussian", 1) => ClosedForm::modulated_gaussian(args.a),
        ("lorentzian", 1) => ClosedForm::lorentzian(),
        (name, d) => return Err(Error::Parameter(format!("no function '{name}' in d = {d}"))),
    };
    let x = args.x.clone().unwrap_or_else(|| vec![0.0; args.d]);
    if x.len() != args.d {
        return Err(Error::Parameter(format!("point has {} coordinates, expected {}", x.len(), args.d)));
    }
    let (singular, spectral) = match args.method.as_str() {
        "singular" => (true, false),
        "spectral" => (false, true),
        "both" => (true, true),
        other => return Err(Error::Parameter(format!("unknown method '{other}'"))),
    };
    let mut result = json!({"x": x});
    if singular {
        let q = QuadratureConfig { target: args.target, ..QuadratureConfig::default() };
        let e = frac_laplacian_at(&f, args.s, &x, &q)?;
        result["singular"] = json!({"re": e.value.re, "im": e.value.im, "error": e.error});
    }
    if spectral {
        let (l, n) = match args.d {
            1 => (8192.0, 1 << 18),
            2 => (256.0, 2560),
            _ => (16.0, 64),
        };
        let grid = Grid::new(args.d, args.half_width.unwrap_or(l), args.points.unwrap_or(n))?;
        let idx = grid.locate(&x, 1e-12).ok_or_else(|| {
            Error::Parameter(format!("spectral evaluation needs a grid node (spacing {})", grid.spacing()))
        })?;
        let sampled = SampledFunction::from_closed_form(grid, f)?;
        let out = apply_multiplier(&sampled, &MultiplierSpec::frac_laplacian(args.s, args.d)?, &SpectralConfig::default())?;
        let v = out.values[idx];
        result["spectral"] = json!({"re": v.re, "im": v.im});
    }
    Ok(Outcome { result, artifacts: Vec::new() })
}

pub fn decay(args: &DecayArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.input)
        .map_err(|e| Error::Input(format!("{}: {e}", args.input.display())))?;
    let mut samples = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let get = |j: usize| -> Result<f64> {
            cols.get(j)
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::Input(format!("line {}: bad or missing column {j}", i + 1)))
        };
        samples.push((get(0)?, get(args.column)?));
    }
    let kind = match args.model.as_str() {
        "exp_power" => DecayModelKind::ExpPower,
        "poly" => DecayModelKind::Poly,
        other => return Err(Error::Parameter(format!("unknown model '{other}'"))),
    };
    let fit = decay_audit(&samples, kind)?;
    let model = match fit.model {
        DecayModel::Zero => json!({"name": "zero"}),
        DecayModel::ExpPower { amplitude, rate, exponent } => {
            json!({"name": "exp_power", "amplitude": amplitude, "rate": rate, "exponent": exponent})
        }
        DecayModel::Poly { amplitude, exponent } => json!({"name": "poly", "amplitude": amplitude, "exponent": exponent}),
    };
    let result = json!({
        "samples": samples.len(),
        "model": model,
        "residual": fit.residual,
        "envelope_points": fit.envelope_points,
        "pass": fit.passes(args.slack),
    });
    Ok(Outcome { result, artifacts: Vec::new() })
}
