use serde::Serialize;
use serde_json::{json, Value};

use zaremba_core::census::{
    census_oracle, enumerate_with, proportion_csv, table_from_set, CensusOptions, ORACLE_MAX_N,
};
use zaremba_core::dimension::{
    pressure_bisection, truncate_decimals, DimensionReport, ThresholdSet,
};
use zaremba_core::ensemble::{
    build_ensemble, factorize, ladder, ladder_depth, FactorizationParams,
};
use zaremba_core::expsum::{
    arc_cover_check, balanced_nu, default_density, kloosterman_bound, l2_ratio_report,
    lipschitz_check, optimal_nu, parseval_check, partition_grid, region_mass, short_arc_bound,
    spectrum, threshold_arithmetic, RegionParams, RegionReport, SpectrumHistogram,
};
use zaremba_core::Alphabet;

use crate::config::RunConfig;
use crate::{progress, CliError};

/// What a subcommand produced: the JSON result, an optional CSV table, and
/// extra files for `--out`.
pub struct Output {
    pub result: Value,
    pub csv: Option<String>,
    pub files: Vec<(String, String)>,
}

impl Output {
    fn json(result: Value) -> Self {
        Self {
            result,
            csv: None,
            files: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

// Above this horizon the arc cover and region masses take minutes.
pub const QUADRATURE_MAX_N: u64 = 20_000;

const DIMENSION_TOL: f64 = 1e-9;
// Cylinder words at the automatically chosen depth stay below this.
const AUTO_DEPTH_WORDS: f64 = 2e5;
const MAX_AUTO_DEPTH: usize = 12;

/// Deepest `k <= 12` with `|A|^(k+1)` below the word budget, at least 1.
pub fn auto_depth(a: &Alphabet) -> usize {
    let per_level = (a.len() as f64).ln();
    let k = (AUTO_DEPTH_WORDS.ln() / per_level).floor() as usize;
    k.saturating_sub(1).clamp(1, MAX_AUTO_DEPTH)
}

pub fn census(c: &RunConfig) -> Result<Output, CliError> {
    let a = c.nontrivial_alphabet()?;
    let horizons = c.horizons()?;
    let top = *horizons.last().unwrap();
    progress(format!("census of {a} up to N = {top}"));
    let opts = CensusOptions {
        witnesses: c.witnesses,
        ..CensusOptions::default()
    };
    let set = enumerate_with(a, top, opts)?;
    let rows = table_from_set(&set, horizons);
    let oracle = if c.oracle {
        if top > ORACLE_MAX_N {
            return Err(CliError::Validation(format!(
                "--oracle is limited to N <= {ORACLE_MAX_N}"
            )));
        }
        progress("running the quadratic oracle");
        Some(census_oracle(a, top)?.members() == set.members())
    } else {
        None
    };
    let mut files = vec![("census.csv".to_string(), proportion_csv(&rows))];
    if let Some(lines) = set.witness_lines() {
        files.push(("witnesses.txt".to_string(), lines));
    }
    let result = json!({
        "alphabet": a,
        "rows": to_value(&rows),
        "oracle_agrees": oracle,
    });
    Ok(Output {
        result,
        csv: Some(proportion_csv(&rows)),
        files,
    })
}

pub fn dimension(c: &RunConfig) -> Result<Output, CliError> {
    let a = c.nontrivial_alphabet()?;
    let depth = c.depth.unwrap_or_else(|| auto_depth(a));
    progress(format!("bracketing the dimension of {a} at depth {depth}"));
    let b = pressure_bisection(a, depth, DIMENSION_TOL)?;
    let report = DimensionReport::new(a, &b);
    let result = json!({
        "report": to_value(&report),
        "width": b.width(),
        "distortion_bracket": [b.distortion.0, b.distortion.1],
        "operator_bracket": [b.operator.0, b.operator.1],
    });
    Ok(Output::json(result))
}

fn default_split(c: &RunConfig, n: u64) -> (f64, f64) {
    let m = (c.q0_override as f64).max((n as f64).powf(0.25));
    (c.m1.unwrap_or(m), c.m3.unwrap_or(m))
}

pub fn ensemble(c: &RunConfig) -> Result<Output, CliError> {
    let a = c.nontrivial_alphabet()?;
    let n = c.single_horizon()?;
    let eps0 = c.strict_eps0()?;
    progress(format!("building the ensemble of {a} at N = {n}"));
    let e = build_ensemble(a, n, c.window_ratio)?;
    let (m1, m3) = default_split(c, n);
    let p = FactorizationParams::new(a.max_letter(), m1, m3, eps0, Some(c.q0_override))?;
    progress("factorizing");
    let f = factorize(&e, &p, c.slack)?;
    let exact = f
        .splits
        .iter()
        .zip(e.members())
        .filter(|(s, m)| s.product().ok() == Some(m.matrix))
        .count();

    let log_n = (n as f64).ln();
    let ladder_info = match ladder(log_n, eps0, a.max_letter()) {
        Ok(l) => json!({ "ok": true, "ladder": to_value(&l) }),
        Err(err) => json!({
            "ok": false,
            "depth": ladder_depth(log_n, eps0, a.max_letter()).ok(),
            "error": err.to_string(),
        }),
    };
    let result = json!({
        "alphabet": a,
        "horizon": n,
        "members": e.len(),
        "growth_exponent": e.growth_exponent(),
        "reconstructed": exact,
        "factorization": to_value(&f.report),
        "ladder": ladder_info,
    });
    Ok(Output {
        result,
        csv: None,
        files: vec![("ensemble.txt".to_string(), e.to_lines())],
    })
}

fn resolve_gamma(c: &RunConfig, a: Option<&Alphabet>) -> Result<(f64, &'static str), CliError> {
    if let Some(g) = c.gamma {
        return Ok((g, "given"));
    }
    let a = a.ok_or_else(|| CliError::Validation("need --gamma or --alphabet".into()))?;
    let depth = c.depth.unwrap_or_else(|| auto_depth(a));
    progress(format!("gamma from the dimension bracket at depth {depth}"));
    let b = pressure_bisection(a, depth, DIMENSION_TOL)?;
    Ok((1.0 - b.midpoint(), "one minus bracket midpoint"))
}

fn masses(
    c: &RunConfig,
    h: &SpectrumHistogram,
    n: u64,
    gamma: f64,
) -> Result<Option<RegionReport>, CliError> {
    if n > QUADRATURE_MAX_N {
        progress(format!(
            "region masses skipped above N = {QUADRATURE_MAX_N}"
        ));
        return Ok(None);
    }
    let p = RegionParams::new(n, gamma, c.eps0, c.nu, c.q0_override)?;
    progress("integrating region masses");
    Ok(Some(region_mass(h, &p, c.grid, 1e-4)?))
}

pub fn spectrum_cmd(c: &RunConfig) -> Result<Output, CliError> {
    let a = c.nontrivial_alphabet()?;
    let horizons = c.horizons()?;
    let mut trend = Vec::new();
    let mut last = None;
    for &n in horizons {
        progress(format!("spectrum of {a} at N = {n}"));
        let h = spectrum(&build_ensemble(a, n, c.window_ratio)?);
        trend.push(l2_ratio_report(&h, n)?);
        last = Some((n, h));
    }
    let (n, h) = last.unwrap();
    let s0 = h.s_n(0.0);
    let sanity = json!({
        "members": h.total(),
        "re": s0.re,
        "im": s0.im,
        "ok": s0.re == h.total() as f64 && s0.im == 0.0,
    });
    let parseval = parseval_check(&h, 1e-9)?;
    let density = c
        .density
        .unwrap_or_else(|| default_density(h.max_norm().unwrap_or(n)));
    progress(format!("lipschitz discretisation at T = {density}"));
    let lipschitz = lipschitz_check(&h, n, density)?;
    let arc = if (2..=QUADRATURE_MAX_N).contains(&n) {
        progress("arc cover");
        Some(arc_cover_check(&h, n, c.grid, 1e-3, 1e-6)?)
    } else {
        None
    };
    let (gamma, gamma_source) = resolve_gamma(c, Some(a))?;
    let regions = if n >= 4 {
        masses(c, &h, n, gamma)?
    } else {
        None
    };
    let result = json!({
        "alphabet": a,
        "horizon": n,
        "support": [h.min_norm(), h.max_norm()],
        "theta_zero": sanity,
        "l2_trend": to_value(&trend),
        "parseval": to_value(&parseval),
        "lipschitz": to_value(&lipschitz),
        "arc_cover": arc.map(|x| to_value(&x)),
        "gamma": gamma,
        "gamma_source": gamma_source,
        "regions": regions.map(|x| to_value(&x)),
    });
    Ok(Output {
        result,
        csv: Some(h.to_csv()),
        files: vec![("histogram.csv".to_string(), h.to_csv())],
    })
}

fn regions_csv(r: &RegionReport) -> String {
    let mut out = String::from("region,count,mass,share\n");
    for e in &r.regions {
        let label = serde_json::to_string(&e.region).unwrap();
        out.push_str(&format!(
            "{},{},{},{}\n",
            label.trim_matches('"'),
            e.count,
            zaremba_core::json::fmt_f64(e.mass),
            zaremba_core::json::fmt_f64(e.share)
        ));
    }
    out
}

pub fn regions(c: &RunConfig) -> Result<Output, CliError> {
    let n = c.single_horizon()?;
    let a = c.alphabet.as_ref();
    if let Some(a) = a {
        a.require_nontrivial()?;
    }
    let (gamma, gamma_source) = resolve_gamma(c, a)?;
    let p = RegionParams::new(n, gamma, c.eps0, c.nu, c.q0_override)?;
    progress(format!("labelling a {0}x{0} (q, K) grid", c.partition_size));
    let grid = partition_grid(&p, c.partition_size, c.partition_size)?;
    let report = match a {
        Some(a) => {
            let h = spectrum(&build_ensemble(a, n, c.window_ratio)?);
            masses(c, &h, n, gamma)?
        }
        None => None,
    };
    let csv = report.as_ref().map(regions_csv);
    let mut files = Vec::new();
    if let Some(t) = &csv {
        files.push(("regions.csv".to_string(), t.clone()));
    }
    let result = json!({
        "gamma": gamma,
        "gamma_source": gamma_source,
        "params": to_value(&p),
        "grid": to_value(&grid),
        "masses": report.map(|x| to_value(&x)),
    });
    Ok(Output { result, csv, files })
}

pub fn thresholds(c: &RunConfig) -> Result<Output, CliError> {
    let t = ThresholdSet::default();
    let truncated = [t.t1, t.t2, t.t3].map(|x| truncate_decimals(x, 4));
    let bounds = threshold_arithmetic(c.nu, c.eps0)?;
    let unperturbed = threshold_arithmetic(c.nu, 0.0)?;
    let opt = balanced_nu(1e-4);
    let result = json!({
        "thresholds": to_value(&t),
        "truncated": truncated,
        "gamma_bounds": to_value(&bounds),
        "gamma_bounds_eps0_zero": to_value(&unperturbed),
        "short_arc_at_three_halves": short_arc_bound(1.5),
        "nu_optimum": to_value(&opt),
        "kloosterman_at_optimum": kloosterman_bound(optimal_nu()),
    });
    let mut csv = String::from("name,value\n");
    for (name, v) in [
        ("t1", t.t1),
        ("t2", t.t2),
        ("t3", t.t3),
        ("outer", bounds.outer),
        ("large_modulus", bounds.large_modulus),
        ("intermediate", bounds.intermediate),
        ("middle_arc", bounds.middle_arc),
        ("short_arc", bounds.short_arc),
        ("short_arc_core", bounds.short_arc_core),
        ("combined", bounds.combined),
        ("nu_star", opt.nu_star),
        ("nu_star_value", opt.value),
    ] {
        csv.push_str(&format!("{name},{}\n", zaremba_core::json::fmt_f64(v)));
    }
    Ok(Output {
        result,
        csv: Some(csv),
        files: Vec::new(),
    })
}
