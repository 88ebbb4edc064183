//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::{PI, SQRT_2};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qcorr::bell::{bell_scores, bv, m_value, NONZERO_BV};
use qcorr::experiments::{
    verify_bell_monogamy, verify_boundary, verify_ckw, verify_eq15, verify_theorem,
    verify_w_tangle, Axis, Theorem, TheoremOptions, VerificationReport,
};
use qcorr::families::{gghz, haar_random, sample_stream};
use qcorr::measures::{
    discord_score, ggm, quantum_discord, tangle_score, work_deficit, work_deficit_score, Arrow,
    Party,
};
use qcorr::numerics::{binary_entropy, hermitian_eigenvalues, spectral_entropy, ComplexMatrix};
use qcorr::{Density, FamilyKind, Matrix, State};
use rayon::prelude::*;

const SEED: u64 = 2016;

const CLOSED_FORM_TOL: f64 = 1e-9;
const OPTIMIZER_TOL: f64 = 1e-6;
const BELL_TOL: f64 = 1e-12;
const IDENTITY_TOL: f64 = 1e-9;
const BOUNDARY_SLACK: f64 = 1e-6;
const BOUNDARY_APPROACH: f64 = 0.02;
const THEOREM_SLACK: f64 = 1e-6;
const ORACLE_ABOVE: f64 = 1e-6;
const ORACLE_BELOW: f64 = 1e-4;
const ORACLE_GRID: usize = 256;

struct Gate {
    failures: usize,
}

impl Gate {
    fn record(&mut self, id: u32, name: &str, outcome: Result<String, String>, elapsed: Duration) {
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{id:>2}] {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                self.failures += 1;
                println!("FAIL [{id:>2}] {name}: {detail} ({secs:.1}s)");
            }
        }
    }

    fn run(
        &mut self,
        id: u32,
        name: &str,
        limit: Option<Duration>,
        check: impl FnOnce() -> Result<String, String>,
    ) {
        let start = Instant::now();
        let mut outcome = check();
        let elapsed = start.elapsed();
        if let (Some(limit), Ok(detail)) = (limit, &outcome) {
            if elapsed > limit {
                outcome = Err(format!("{detail}; exceeded {}s", limit.as_secs()));
            }
        }
        self.record(id, name, outcome, elapsed);
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn clean(r: &VerificationReport) -> Result<String, String> {
    let detail = format!(
        "{}: samples={} skipped={} violations={} worst_margin={:?}",
        r.suite, r.samples, r.skipped, r.violations, r.worst_margin
    );
    ensure(r.pass && r.violations == 0 && r.samples > 0, || {
        detail.clone()
    })?;
    Ok(detail)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn closed_form_pipeline() -> Result<String, String> {
    let f = |l: f64| 2.0 * (1.0 + 4.0 * l * (1.0 - l)).sqrt() - 2.0;
    let (mut worst_closed, mut worst_opt) = (0.0f64, 0.0f64);
    for i in 0..200 {
        let l = 0.5 + 0.5 * i as f64 / 199.0;
        let psi: State = gghz(3, l, 0.0).map_err(err)?;
        let h = binary_entropy(l).map_err(err)?;
        let s = bell_scores(&psi, 0).map_err(err)?;
        for (got, want) in [
            (s.delta_bv, f(l)),
            (ggm(&psi).map_err(err)?, 1.0 - l),
            (
                tangle_score(&psi, 0).map_err(err)?.score,
                4.0 * l * (1.0 - l),
            ),
        ] {
            worst_closed = worst_closed.max((got - want).abs());
        }
        for arrow in [Arrow::Forward, Arrow::Backward] {
            let d = discord_score(&psi, 0, arrow).map_err(err)?.score;
            let w = work_deficit_score(&psi, 0, arrow).map_err(err)?.score;
            worst_opt = worst_opt.max((d - h).abs()).max((w - h).abs());
        }
    }
    let detail =
        format!("max closed-form error {worst_closed:.2e}, max discord/WD error {worst_opt:.2e}");
    ensure(
        worst_closed <= CLOSED_FORM_TOL && worst_opt <= OPTIMIZER_TOL,
        || detail.clone(),
    )?;
    Ok(detail)
}

fn maximal_violation() -> Result<String, String> {
    let c = |re: f64| Complex64::new(re, 0.0);
    // |ψ⁻⟩ = (|01⟩ − |10⟩)/√2
    let psi =
        State::new(2, vec![c(0.0), c(1.0 / SQRT_2), c(-1.0 / SQRT_2), c(0.0)]).map_err(err)?;
    let rho = psi.density();
    let m = m_value(&rho).map_err(err)?;
    let b = bv(&rho).map_err(err)?;
    let detail = format!("M = {m}, BV = {b}");
    ensure(
        (m - 2.0).abs() <= BELL_TOL && (b - (2.0 * SQRT_2 - 2.0)).abs() <= BELL_TOL,
        || detail.clone(),
    )?;
    Ok(detail)
}

fn boundary() -> Result<String, String> {
    let ghz = verify_boundary(FamilyKind::Ghz3, 3, Axis::Ggm, 10_000, SEED, BOUNDARY_SLACK)
        .map_err(err)?;
    let w = verify_boundary(
        FamilyKind::WClass,
        3,
        Axis::Ggm,
        10_000,
        SEED,
        BOUNDARY_SLACK,
    )
    .map_err(err)?;
    let a = clean(&ghz)?;
    let b = clean(&w)?;
    let closest = ghz.worst_margin.unwrap().min(w.worst_margin.unwrap());
    ensure(closest <= BOUNDARY_APPROACH, || {
        format!("closest sample {closest} above the curve")
    })?;
    Ok(format!("{a}; {b}; closest approach {closest:.3e}"))
}

fn two_theorems(which: [Theorem; 2]) -> Result<String, String> {
    let mut out = Vec::new();
    for th in which {
        let opts = TheoremOptions {
            tolerance: THEOREM_SLACK,
            ..TheoremOptions::for_theorem(th)
        };
        out.push(clean(
            &verify_theorem(th, 1000, 3, SEED, &opts).map_err(err)?,
        )?);
    }
    Ok(out.join("; "))
}

/// Projector `|m⟩⟨m|` for the Bloch direction `(θ, φ)` and its complement.
fn projectors(theta: f64, phi: f64) -> [Matrix; 2] {
    let (s, c) = (theta / 2.0).sin_cos();
    let m = [Complex64::new(c, 0.0), Complex64::from_polar(s, phi)];
    let p = ComplexMatrix::new(
        2,
        2,
        vec![
            m[0] * m[0].conj(),
            m[0] * m[1].conj(),
            m[1] * m[0].conj(),
            m[1] * m[1].conj(),
        ],
    )
    .unwrap();
    let q = ComplexMatrix::identity(2)
        .add(&p.scale(Complex64::new(-1.0, 0.0)))
        .unwrap();
    [p, q]
}

fn entropy_of(m: &Matrix) -> f64 {
    spectral_entropy(hermitian_eigenvalues(m).unwrap().values()).unwrap()
}

/// Dense-grid discord and work deficit with explicit 4×4 projections.
fn grid_oracle(rho: &Density, party: Party) -> (f64, f64) {
    let id = ComplexMatrix::identity(2);
    let joint = entropy_of(rho.matrix());
    let measured_marginal = rho
        .partial_trace(&[if party == Party::First { 0 } else { 1 }])
        .unwrap();
    let s_measured = entropy_of(measured_marginal.matrix());
    let mut best_cond = f64::INFINITY;
    let mut best_deph = f64::INFINITY;
    for i in 0..ORACLE_GRID {
        let theta = PI * i as f64 / (ORACLE_GRID - 1) as f64;
        for j in 0..ORACLE_GRID {
            let phi = 2.0 * PI * j as f64 / ORACLE_GRID as f64;
            let mut cond = 0.0;
            let mut dephased = ComplexMatrix::zeros(4, 4);
            for p in projectors(theta, phi) {
                let full = match party {
                    Party::First => p.kron(&id),
                    Party::Second => id.kron(&p),
                };
                let post = full.matmul(rho.matrix()).unwrap().matmul(&full).unwrap();
                let prob = post.trace().re;
                if prob > 1e-15 {
                    cond += prob * entropy_of(&post.scale(Complex64::new(1.0 / prob, 0.0)));
                }
                dephased = dephased.add(&post).unwrap();
            }
            best_cond = best_cond.min(cond);
            best_deph = best_deph.min(entropy_of(&dephased));
        }
    }
    (s_measured - joint + best_cond, best_deph - joint)
}

fn optimizer_oracle() -> Result<String, String> {
    let results: Vec<Result<(f64, f64), String>> = (0..50u64)
        .into_par_iter()
        .map(|i| {
            let psi: State = haar_random(4, &mut sample_stream(SEED, i)).map_err(err)?;
            let rho = psi.pair_state(0, 1).map_err(err)?;
            let (mut above, mut below) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for party in [Party::First, Party::Second] {
                let (d_ref, w_ref) = grid_oracle(&rho, party);
                let d = quantum_discord(&rho, party).map_err(err)?.value;
                let w = work_deficit(&rho, party).map_err(err)?.value;
                for (got, oracle) in [(d, d_ref), (w, w_ref)] {
                    above = above.max(got - oracle);
                    below = below.max(oracle - got);
                }
            }
            Ok((above, below))
        })
        .collect();
    let (mut above, mut below) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for r in results {
        let (a, b) = r?;
        above = above.max(a);
        below = below.max(b);
    }
    let detail = format!("max(value - oracle) = {above:.2e}, max(oracle - value) = {below:.2e}");
    ensure(above <= ORACLE_ABOVE && below <= ORACLE_BELOW, || {
        detail.clone()
    })?;
    Ok(detail)
}

fn cli_bytes(args: &[&str]) -> Result<Vec<u8>, String> {
    let mut out = Vec::new();
    let mut errs = Vec::new();
    let code = qcorr_cli::run_with(
        std::iter::once("qcorr").chain(args.iter().copied()),
        &mut out,
        &mut errs,
    );
    ensure(code == 0, || {
        format!("{args:?} exited {code}: {}", String::from_utf8_lossy(&errs))
    })?;
    Ok(out)
}

fn determinism() -> Result<String, String> {
    let runs: [&[&str]; 4] = [
        &[
            "scatter",
            "--class",
            "w3",
            "-n",
            "3",
            "--samples",
            "5",
            "--seed",
            "1",
            "--measures",
            "all",
        ],
        &[
            "scatter",
            "--class",
            "haar",
            "-n",
            "4",
            "--samples",
            "200",
            "--seed",
            "9",
            "--measures",
            "ggm,tangle",
        ],
        &[
            "verify",
            "--suite",
            "eq15",
            "--samples",
            "500",
            "--seed",
            "7",
        ],
        &[
            "verify",
            "--suite",
            "theorem3",
            "--samples",
            "100",
            "--seed",
            "3",
        ],
    ];
    for args in runs {
        let first = cli_bytes(args)?;
        let second = cli_bytes(args)?;
        ensure(!first.is_empty() && first == second, || {
            format!("{args:?} differs between runs")
        })?;
    }
    Ok(format!(
        "{} invocations byte-identical on repeat",
        runs.len()
    ))
}

fn main() {
    let mut gate = Gate { failures: 0 };
    let minute = Some(Duration::from_secs(60));
    gate.run(
        1,
        "gGHZ closed-form pipeline agreement (200 lambdas)",
        minute,
        closed_form_pipeline,
    );
    gate.run(
        2,
        "maximal Bell violation of the singlet",
        None,
        maximal_violation,
    );
    gate.run(
        3,
        "M-difference identity on 1e3 Haar 3-qubit states",
        Some(Duration::from_secs(5)),
        || clean(&verify_eq15(1000, SEED, IDENTITY_TOL).map_err(err)?),
    );
    gate.run(4, "Bell monogamy (1e4 N=3, 1e3 N=4)", None, || {
        let a = clean(&verify_bell_monogamy(3, 10_000, SEED, NONZERO_BV).map_err(err)?)?;
        let b = clean(&verify_bell_monogamy(4, 1000, SEED, NONZERO_BV).map_err(err)?)?;
        Ok(format!("{a}; {b}"))
    });
    gate.run(
        5,
        "nodal-maximal pairs satisfy CHSH (1e4 states)",
        None,
        || {
            let th = Theorem::NodalMaximal;
            clean(
                &verify_theorem(th, 10_000, 3, SEED, &TheoremOptions::for_theorem(th))
                    .map_err(err)?,
            )
        },
    );
    gate.run(
        6,
        "symmetric states above gGHZ at matched GGM (N=3,4,5)",
        minute,
        || {
            let th = Theorem::SymmetricGgm;
            let mut out = Vec::new();
            for n in 3..=5 {
                let opts = TheoremOptions {
                    tolerance: IDENTITY_TOL,
                    ..TheoremOptions::for_theorem(th)
                };
                out.push(clean(
                    &verify_theorem(th, 1000, n, SEED, &opts).map_err(err)?,
                )?);
            }
            Ok(out.join("; "))
        },
    );
    gate.run(
        7,
        "GHZ- and W-class scatter above the sGHZ GGM boundary",
        Some(Duration::from_secs(600)),
        boundary,
    );
    gate.run(
        8,
        "non-distributive states above gGHZ at matched tangle/discord/WD",
        None,
        || {
            two_theorems([
                Theorem::NonDistributiveTangle,
                Theorem::NonDistributiveDiscord,
            ])
        },
    );
    gate.run(
        9,
        "W-class tangle vanishes, GHZ-class tangle nonnegative",
        None,
        || {
            let a = clean(&verify_w_tangle(10_000, SEED, IDENTITY_TOL).map_err(err)?)?;
            let b = clean(&verify_ckw(10_000, SEED, IDENTITY_TOL).map_err(err)?)?;
            Ok(format!("{a}; {b}"))
        },
    );
    gate.run(
        10,
        "two-stage optimizer vs 256x256 grid oracle (50 states)",
        None,
        optimizer_oracle,
    );
    gate.run(11, "same seed, byte-identical output", None, determinism);
    println!("acceptance: {} of 11 criteria failed", gate.failures);
    if gate.failures > 0 {
        std::process::exit(1);
    }
}
