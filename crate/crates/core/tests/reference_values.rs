// Values frozen from an independent dense numpy/scipy computation
// (explicit partial traces, Pauli expectation values, 121×240 grid plus
// Nelder–Mead polishing for discord and work deficit). Concurrences and
// tangles come from 50-digit eigenvalues of ρρ̃.

use approx::assert_abs_diff_eq;
use num_complex::Complex64;
use qcorr::bell::{bell_scores, m_value};
use qcorr::families::{sghz, w_state};
use qcorr::measures::{
    discord_score, ggm, pair_concurrence, quantum_discord, tangle_score, work_deficit,
    work_deficit_score, Arrow, Party,
};
use qcorr::qstate::schmidt_lambda1;
use qcorr::State;

const CLOSED: f64 = 1e-12;
const OPTIMIZED: f64 = 1e-7;

fn psi3() -> State {
    let c = Complex64::new;
    let amps = vec![
        c(0.1, 0.2),
        c(0.3, 0.0),
        c(0.0, -0.25),
        c(0.4, 0.1),
        c(0.05, 0.0),
        c(-0.3, 0.2),
        c(0.0, 0.15),
        c(0.35, 0.0),
    ];
    State::normalized(3, amps).unwrap()
}

fn psi4() -> State {
    let amps = (0..16)
        .map(|k| {
            let k = k as f64;
            Complex64::new(k.cos(), (2.0 * k).sin()) * ((k + 1.0) / 16.0)
        })
        .collect();
    State::normalized(4, amps).unwrap()
}

struct Expected {
    lambdas: &'static [f64],
    ggm: f64,
    bv_rest: f64,
    bv_pairs: &'static [f64],
    m_pairs: &'static [f64],
    concurrences: &'static [f64],
    tangle: f64,
}

fn check_closed(psi: &State, e: &Expected) {
    for (q, &l) in e.lambdas.iter().enumerate() {
        assert_abs_diff_eq!(schmidt_lambda1(psi, q).unwrap(), l, epsilon = CLOSED);
    }
    assert_abs_diff_eq!(ggm(psi).unwrap(), e.ggm, epsilon = CLOSED);
    let s = bell_scores(psi, 0).unwrap();
    assert_abs_diff_eq!(s.bv_one_vs_rest, e.bv_rest, epsilon = CLOSED);
    for (k, &(partner, bv)) in s.bv_pairs.iter().enumerate() {
        assert_eq!(partner, k + 1);
        assert_abs_diff_eq!(bv, e.bv_pairs[k], epsilon = CLOSED);
        let m = m_value(&psi.pair_state(0, partner).unwrap()).unwrap();
        assert_abs_diff_eq!(m, e.m_pairs[k], epsilon = CLOSED);
        let c = pair_concurrence(psi, 0, partner).unwrap();
        assert_abs_diff_eq!(c, e.concurrences[k], epsilon = CLOSED);
    }
    let sum: f64 = e.bv_pairs.iter().sum();
    assert_abs_diff_eq!(s.delta_bv, e.bv_rest - sum, epsilon = CLOSED);
    assert_abs_diff_eq!(
        tangle_score(psi, 0).unwrap().score,
        e.tangle,
        epsilon = CLOSED
    );
}

#[test]
fn generic_three_qubit_state() {
    check_closed(
        &psi3(),
        &Expected {
            lambdas: &[0.5812258156997802, 0.6313336236843373, 0.7888971070494453],
            ggm: 0.21110289295055473,
            bv_rest: 0.8097042317337402,
            bv_pairs: &[0.23787008946557942, 0.0],
            m_pairs: &[1.2520156343311701, 0.7223114923193361],
            concurrences: &[0.64578691230531788, 0.39011365664241898],
            tangle: 0.40438006625186581,
        },
    );
}

#[test]
fn generic_four_qubit_state() {
    check_closed(
        &psi4(),
        &Expected {
            lambdas: &[
                0.9135343400455203,
                0.7922607930680603,
                0.7805055653026858,
                0.757724240370351,
            ],
            ggm: 0.08646565995447975,
            bv_rest: 0.29430372741924815,
            bv_pairs: &[0.0, 0.0, 0.0],
            m_pairs: &[0.31185473840199224, 0.5747069092985817, 0.4327011678778894],
            concurrences: &[
                0.11689826818448264,
                0.21666196958078429,
                0.05552441710477839,
            ],
            tangle: 0.25226682335048496,
        },
    );
}

#[test]
fn generic_three_qubit_discord_and_work_deficit() {
    let psi = psi3();
    let pairs = [psi.pair_state(0, 1).unwrap(), psi.pair_state(0, 2).unwrap()];
    let expect = [
        // (party, discord, work deficit) per pair
        (
            Party::First,
            [0.42253015278428585, 0.21647315563929415],
            [0.4365980962836613, 0.23054109913866982],
        ),
        (
            Party::Second,
            [0.44658874793808107, 0.3182269000005248],
            [0.4906929210166362, 0.5060416036896662],
        ),
    ];
    for (party, d, w) in expect {
        for (k, rho) in pairs.iter().enumerate() {
            assert_abs_diff_eq!(
                quantum_discord(rho, party).unwrap().value,
                d[k],
                epsilon = OPTIMIZED
            );
            assert_abs_diff_eq!(
                work_deficit(rho, party).unwrap().value,
                w[k],
                epsilon = OPTIMIZED
            );
        }
    }
    let scores = [
        (Arrow::Forward, 0.3418753181274068, 0.31373943112865565),
        (Arrow::Backward, 0.21606297861238088, -0.01585589815531563),
    ];
    for (arrow, d, w) in scores {
        assert_abs_diff_eq!(
            discord_score(&psi, 0, arrow).unwrap().score,
            d,
            epsilon = OPTIMIZED
        );
        assert_abs_diff_eq!(
            work_deficit_score(&psi, 0, arrow).unwrap().score,
            w,
            epsilon = OPTIMIZED
        );
    }
}

#[test]
fn w_state_values() {
    let w: State = w_state(3).unwrap();
    check_closed(
        &w,
        &Expected {
            lambdas: &[2.0 / 3.0; 3],
            ggm: 1.0 / 3.0,
            bv_rest: 0.7487370837451071,
            bv_pairs: &[0.0, 0.0],
            m_pairs: &[8.0 / 9.0, 8.0 / 9.0],
            concurrences: &[2.0 / 3.0, 2.0 / 3.0],
            tangle: 0.0,
        },
    );
    assert_abs_diff_eq!(
        bell_scores(&w, 0).unwrap().delta_bv,
        2.0 * (17.0f64 / 9.0).sqrt() - 2.0,
        epsilon = CLOSED
    );
    for arrow in [Arrow::Forward, Arrow::Backward] {
        let d = discord_score(&w, 0, arrow).unwrap();
        assert_abs_diff_eq!(d.parts[0], 0.5500477595827569, epsilon = OPTIMIZED);
        assert_abs_diff_eq!(d.score, -0.1817996851110244, epsilon = OPTIMIZED);
        let wd = work_deficit_score(&w, 0, arrow).unwrap();
        assert_abs_diff_eq!(wd.parts[0], 0.6314420130168312, epsilon = OPTIMIZED);
        assert_abs_diff_eq!(wd.score, -0.3445881919791731, epsilon = OPTIMIZED);
    }
}

#[test]
fn sghz_boundary_samples() {
    let cases: [(f64, f64, f64, f64, f64); 4] = [
        // (beta, ggm, pair BV, delta_bv, tangle)
        (0.25, 0.375, 0.06155281280882985, 0.7668743119373604, 0.9375),
        (0.5, 0.25, 0.23606797749978936, 0.5923591472464009, 0.75),
        (0.6, 0.2, 0.3323807579381195, 0.4960463668080708, 0.64),
        (0.75, 0.125, 0.5, 0.32842712474619074, 0.4375),
    ];
    for (beta, g, bv, delta, tau) in cases {
        let psi: State = sghz(3, beta, 0.0).unwrap();
        assert_abs_diff_eq!(ggm(&psi).unwrap(), g, epsilon = CLOSED);
        let s = bell_scores(&psi, 0).unwrap();
        assert_abs_diff_eq!(s.bv_pairs[0].1, bv, epsilon = CLOSED);
        assert_eq!(s.bv_pairs[1].1, 0.0);
        assert_abs_diff_eq!(s.delta_bv, delta, epsilon = CLOSED);
        assert_abs_diff_eq!(tangle_score(&psi, 0).unwrap().score, tau, epsilon = 1e-10);
    }
    let psi: State = sghz(3, 0.6, 0.0).unwrap();
    let expect = [
        (Arrow::Forward, 0.7219280948873636, 0.721928094887363),
        (Arrow::Backward, 0.53100440641072, 0.2628465340491186),
    ];
    for (arrow, d, w) in expect {
        assert_abs_diff_eq!(
            discord_score(&psi, 0, arrow).unwrap().score,
            d,
            epsilon = OPTIMIZED
        );
        assert_abs_diff_eq!(
            work_deficit_score(&psi, 0, arrow).unwrap().score,
            w,
            epsilon = OPTIMIZED
        );
    }
}
