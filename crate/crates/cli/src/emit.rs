//! Deterministic JSON and CSV emission. All floating-point numbers are
//! written with 17 significant digits so identical inputs produce
//! byte-identical files.

use dirac_spectra::tracer::CurveSet;
use dirac_spectra::verify::{BsEquivalenceReport, ContainmentReport, OptimalityWitness};
use dirac_spectra::Complex64;

/// 17 significant digits, exponent form; valid as a JSON number. The
/// non-finite values (an infinite exponent, say) have no JSON number
/// representation and are emitted as strings.
pub fn f(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x == f64::INFINITY {
        "\"inf\"".to_string()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        "\"nan\"".to_string()
    }
}

pub fn complex_obj(z: Complex64) -> String {
    format!("{{\"re\":{},\"im\":{}}}", f(z.re), f(z.im))
}

pub fn complex_pair(z: Complex64) -> String {
    format!("[{},{}]", f(z.re), f(z.im))
}

pub fn curveset_json(c: &CurveSet, m: f64, budget: f64, bound: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"m\":{},\"Q\":{},\"bound\":\"{bound}\",\"components\":[",
        f(m),
        f(budget)
    ));
    for (ci, pl) in c.polylines.iter().enumerate() {
        if ci > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"closed\":{},\"points\":[",
            if c.closed[ci] { "true" } else { "false" }
        ));
        for (pi, p) in pl.iter().enumerate() {
            if pi > 0 {
                out.push(',');
            }
            match &c.flags {
                Some(flags) => out.push_str(&format!(
                    "[{},{},{}]",
                    f(p[0]),
                    f(p[1]),
                    if flags[ci][pi] { "true" } else { "false" }
                )),
                None => out.push_str(&format!("[{},{}]", f(p[0]), f(p[1]))),
            }
        }
        out.push_str("]}");
    }
    out.push_str("]}");
    out
}

pub fn curveset_csv(c: &CurveSet) -> String {
    let mut out = String::new();
    if c.flags.is_some() {
        out.push_str("component_id,x,y,flag\n");
    } else {
        out.push_str("component_id,x,y\n");
    }
    for (ci, pl) in c.polylines.iter().enumerate() {
        for (pi, p) in pl.iter().enumerate() {
            match &c.flags {
                Some(flags) => out.push_str(&format!(
                    "{ci},{},{},{}\n",
                    f(p[0]),
                    f(p[1]),
                    u8::from(flags[ci][pi])
                )),
                None => out.push_str(&format!("{ci},{},{}\n", f(p[0]), f(p[1]))),
            }
        }
    }
    out
}

pub fn containment_json(r: &ContainmentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"suite\":\"containment\",\"kind\":\"{}\",\"m\":{},\"p\":{},\"Q\":{},\"trials\":{},\"N\":{},\"seed\":{},\"violations\":{},\"spurious\":{},\"genuine_total\":{},\"skipped_near_spectrum\":{},\"trial_data\":[",
        r.kind.as_str(),
        f(r.m),
        f(r.p),
        f(r.budget),
        r.trials,
        r.n_sites,
        r.seed,
        r.violations,
        r.spurious,
        r.genuine_total,
        r.skipped_near_spectrum
    ));
    for (ti, t) in r.trial_data.iter().enumerate() {
        if ti > 0 {
            out.push(',');
        }
        out.push_str("{\"eigenvalues\":[");
        for (i, e) in t.eigenvalues.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&complex_pair(*e));
        }
        out.push_str("],\"genuine\":[");
        push_bools(&mut out, &t.genuine);
        out.push_str("],\"member\":[");
        push_bools(&mut out, &t.member);
        out.push_str(&format!("],\"skipped\":{}}}", t.skipped));
    }
    out.push_str("]}");
    out
}

fn push_bools(out: &mut String, bools: &[bool]) {
    for (i, b) in bools.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(if *b { "true" } else { "false" });
    }
}

pub fn bs_json(r: &BsEquivalenceReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"suite\":\"bs\",\"trials\":{},\"N\":{},\"seed\":{},\"eig_side_passes\":{},\"control_side_passes\":{},\"trial_data\":[",
        r.trials, r.n_sites, r.seed, r.eig_side_passes, r.control_side_passes
    ));
    for (ti, t) in r.trial_data.iter().enumerate() {
        if ti > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"m\":{},\"l1_norm\":{},\"eigenvalue\":{},\"eig_side_gap\":{},\"control\":{},\"control_side_gap\":{},\"redraws\":{}}}",
            f(t.m),
            f(t.l1_norm),
            complex_pair(t.eigenvalue),
            f(t.eig_side_gap),
            complex_pair(t.control),
            f(t.control_side_gap),
            t.redraws
        ));
    }
    out.push_str("]}");
    out
}

pub fn optimality_json(m: f64, budget: f64, witnesses: &[OptimalityWitness]) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"suite\":\"optimality\",\"m\":{},\"Q\":{},\"count\":{},\"witnesses\":[",
        f(m),
        f(budget),
        witnesses.len()
    ));
    for (i, w) in witnesses.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!(
            "{{\"lambda\":{},\"k\":{},\"upsilon0\":[{},{},{},{}],\"upsilon0_norm\":{},\"det_residual\":{},\"eig_gap\":{},\"N\":{}}}",
            complex_pair(w.lambda),
            complex_pair(w.k),
            complex_pair(w.upsilon0.a11),
            complex_pair(w.upsilon0.a12),
            complex_pair(w.upsilon0.a21),
            complex_pair(w.upsilon0.a22),
            f(w.upsilon0_norm),
            f(w.det_residual),
            f(w.eig_gap),
            w.n_sites
        ));
    }
    out.push_str("]}");
    out
}
