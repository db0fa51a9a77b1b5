//! A fast, seeded self-check of the library invariants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use zaremba_core::census::{census_oracle, enumerate_denominators};
use zaremba_core::cf::{cf_of_rational, continuant, gcd};
use zaremba_core::dimension::pressure_bisection;
use zaremba_core::ensemble::{build_ensemble, factorize, FactorizationParams};
use zaremba_core::expsum::{
    dirichlet_decompose, first_violation, isqrt, parseval_check, partition_grid, spectrum,
    RegionParams,
};
use zaremba_core::Alphabet;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type Outcome = Result<(bool, String), zaremba_core::Error>;

fn census_engines() -> Outcome {
    let mut mismatches = Vec::new();
    for mask in 3u32..32 {
        if mask.count_ones() < 2 {
            continue;
        }
        let a = Alphabet::new((1..=5).filter(|d| mask >> (d - 1) & 1 == 1))?;
        if enumerate_denominators(&a, 300)?.members() != census_oracle(&a, 300)?.members() {
            mismatches.push(a.to_string());
        }
    }
    Ok((mismatches.is_empty(), format!("mismatches: {mismatches:?}")))
}

fn pinned_census() -> Outcome {
    let s = enumerate_denominators(&Alphabet::new([1, 2])?, 10)?;
    Ok((
        s.members() == [1, 2, 3, 4, 5, 7, 8, 10],
        format!("D = {:?}", s.members()),
    ))
}

fn round_trip(rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for _ in 0..2_000 {
        let d: u128 = rng.gen_range(1..1_000_000);
        let b: u128 = rng.gen_range(1..=d);
        if gcd(b, d) != 1 {
            continue;
        }
        if continuant(&cf_of_rational(b, d)?)? != d {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("{bad} failures")))
}

fn nested_brackets() -> Outcome {
    let a = Alphabet::new([1, 2])?;
    let coarse = pressure_bisection(&a, 4, 1e-10)?;
    let fine = pressure_bisection(&a, 8, 1e-10)?;
    let ok = coarse.lower <= fine.lower && fine.upper <= coarse.upper && fine.contains(0.5312805);
    Ok((
        ok,
        format!(
            "[{:.6}, {:.6}] within [{:.6}, {:.6}]",
            fine.lower, fine.upper, coarse.lower, coarse.upper
        ),
    ))
}

fn parseval() -> Outcome {
    let h = spectrum(&build_ensemble(&Alphabet::new([1, 2])?, 2_000, 2.0)?);
    let p = parseval_check(&h, 1e-9)?;
    Ok((
        p.relative_error <= 1e-9,
        format!("relative error {:.1e}", p.relative_error),
    ))
}

fn symmetry(rng: &mut ChaCha8Rng) -> Outcome {
    let h = spectrum(&build_ensemble(&Alphabet::new([1, 3])?, 2_000, 2.0)?);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let t: f64 = rng.gen();
        let (s, r) = (h.s_n(t), h.s_n(-t));
        worst = worst.max((s - r.conj()).norm() / h.total() as f64);
    }
    Ok((
        worst <= 1e-9,
        format!("max |S(t) - conj S(-t)| / |Omega| = {worst:.1e}"),
    ))
}

fn dirichlet(rng: &mut ChaCha8Rng) -> Outcome {
    let mut bad = 0;
    for _ in 0..5_000 {
        let n: u64 = rng.gen_range(4..10_000_000);
        let p = dirichlet_decompose(rng.gen(), n);
        let root = isqrt(n) as f64;
        let ok = p.q >= 1
            && p.q as f64 <= root
            && gcd(p.a as u128, p.q as u128) == 1
            && p.k.abs() <= n as f64 / (p.q as f64 * (root + 1.0)) * (1.0 + 1e-9);
        bad += !ok as usize;
    }
    Ok((bad == 0, format!("{bad} of 5000 decompositions off")))
}

fn partition() -> Outcome {
    let p = RegionParams::new(100_000_000, 0.15, 0.001, 1.0, 10)?;
    let g = partition_grid(&p, 128, 128)?;
    let ok = g.outside == 0 && g.inconsistent == 0 && g.uncovered == 0;
    Ok((
        ok,
        format!("counts {:?}, {} unlabelled", g.counts, g.outside),
    ))
}

fn exhaustive(v: &[f64], c1: f64, c2: f64) -> bool {
    (1u32..1 << v.len()).all(|mask| {
        let sum: f64 = (0..v.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| v[i])
            .sum();
        let bound = c1 * (mask.count_ones() as f64).sqrt() + c2;
        sum <= bound + 1e-12 * bound.abs().max(sum.abs())
    })
}

fn subset_rule(rng: &mut ChaCha8Rng) -> Outcome {
    let mut disagreements = 0;
    for i in 0..500 {
        let v: Vec<f64> = (0..1 + i % 12).map(|_| rng.gen::<f64>()).collect();
        let (c1, c2) = (rng.gen::<f64>() * 1.5, rng.gen::<f64>() * 0.5);
        disagreements += (first_violation(&v, c1, c2).is_none() != exhaustive(&v, c1, c2)) as usize;
    }
    Ok((disagreements == 0, format!("{disagreements} disagreements")))
}

fn factorization() -> Outcome {
    let e = build_ensemble(&Alphabet::new([1, 2])?, 2_000, 2.0)?;
    let p = FactorizationParams::new(2, 6.0, 6.0, 1e-4, Some(5))?;
    let f = factorize(&e, &p, 8.0)?;
    let exact = f
        .splits
        .iter()
        .zip(e.members())
        .filter(|(s, m)| s.product().ok() == Some(m.matrix))
        .count();
    Ok((
        exact == e.len(),
        format!("{exact}/{} reconstructed", e.len()),
    ))
}

pub fn run(seed: u64) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut record = |name: &'static str, r: Outcome| {
        let (pass, detail) = r.unwrap_or_else(|e| (false, format!("error: {e}")));
        out.push(Check { name, pass, detail });
    };
    record("census engines agree", census_engines());
    record("pinned census", pinned_census());
    record("rational round trip", round_trip(&mut rng));
    record("nested dimension brackets", nested_brackets());
    record("parseval", parseval());
    record("conjugate symmetry", symmetry(&mut rng));
    record("dirichlet decomposition", dirichlet(&mut rng));
    record("region partition", partition());
    record("subset prefix rule", subset_rule(&mut rng));
    record("factorization", factorization());
    out
}
