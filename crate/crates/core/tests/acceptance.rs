//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sqwalk::closedform::{amplitude_homogeneous, amplitude_unbiased, HomogeneousParams};
use sqwalk::evolution::{apply_u, apply_u_dagger, evolve, evolve_trajectory};
use sqwalk::greens::{amplitude_via_greens, greens_function, walls_for, GreensSpec};
use sqwalk::lattice::{make_unbiased_lattice, Window};
use sqwalk::paths::{
    count_paths, count_paths_coined, enumerate_all_paths, enumerate_paths, group_by_monomial,
    path_amplitude,
};
use sqwalk::random::{random_lattice, random_vertex, seeded_lattice};
use sqwalk::stats::{dispersion_sweep, distribution, oscillation_counts, side_maxima, Route};
use sqwalk::{BasisState, Direction, Lattice, PowerSeries, VertexAmplitudes, WalkState};

const P: Direction = Direction::Plus;
const M: Direction = Direction::Minus;

struct Outcome {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn binom(n: i64, k: i64) -> u128 {
    if n < 0 || k < 0 || k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u128 {
        acc = acc * (n as u128 - i) / (i + 1);
    }
    acc
}

fn three_route_equivalence() -> Outcome {
    let start = Instant::now();
    let m_max = 12;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for index in 0..50 {
        let lat = seeded_lattice(2024, index, -15, 15);
        for sigma in [P, M] {
            let traj = evolve_trajectory(&WalkState::basis(BasisState::new(sigma, 0)), &lat, m_max)
                .unwrap();
            for (m, ev) in traj.iter().enumerate() {
                let mut by_paths = WalkState::new();
                for p in enumerate_all_paths(sigma, 0, m).unwrap() {
                    by_paths.add(p.end, path_amplitude(&p, &lat));
                }
                let mi = m as i64;
                for jp in (-mi..=mi).step_by(2) {
                    for nu in [P, M] {
                        let b = BasisState::new(nu, jp);
                        let e = ev.amplitude(b);
                        let g = amplitude_via_greens(sigma, 0, nu, jp, m, &lat).unwrap();
                        let p = by_paths.amplitude(b);
                        worst = worst
                            .max((e - g).norm())
                            .max((e - p).norm())
                            .max((g - p).norm());
                        checked += 1;
                    }
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-9 && elapsed <= Duration::from_secs(60),
        format!(
            "{checked} amplitudes, max pairwise residual {worst:.2e}, {:.1} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn worked_interference_example() -> Outcome {
    let lat = make_unbiased_lattice();
    let ev = evolve(&WalkState::basis(BasisState::plus(0)), &lat, 5).unwrap();
    let via_paths = |jp| -> Complex64 {
        enumerate_paths(P, 0, P, jp, 5)
            .unwrap()
            .iter()
            .map(|p| path_amplitude(p, &lat))
            .sum()
    };
    let near = [
        ev.amplitude(BasisState::plus(1)),
        amplitude_via_greens(P, 0, P, 1, 5, &lat).unwrap(),
        via_paths(1),
        amplitude_unbiased(P, P, 1, 5),
    ];
    let far = [
        ev.amplitude(BasisState::plus(3)),
        amplitude_via_greens(P, 0, P, 3, 5, &lat).unwrap(),
        via_paths(3),
        amplitude_unbiased(P, P, 3, 5),
    ];
    let near_max = near.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let far_dev = far
        .iter()
        .map(|a| (a.norm_sqr() - 0.5).abs())
        .fold(0.0, f64::max);
    outcome(
        near_max < 1e-12 && far_dev < 1e-12,
        format!("max |a(+,j+1)| = {near_max:.1e}, max ||a(+,j+3)|^2 - 1/2| = {far_dev:.1e}"),
    )
}

fn counting_identities() -> Outcome {
    let mut ok = true;
    for m in 0..=14usize {
        for sigma in [P, M] {
            let mut counts: BTreeMap<BasisState, u128> = BTreeMap::new();
            let all = enumerate_all_paths(sigma, 0, m).unwrap();
            ok &= all.len() as u128 == 1u128 << m;
            for p in &all {
                *counts.entry(p.end).or_insert(0) += 1;
            }
            let mi = m as i64;
            let mut total = BigUint::from(0u32);
            for jp in -mi - 1..=mi + 1 {
                for nu in [P, M] {
                    let c = count_paths(sigma, 0, nu, jp, m);
                    let e = counts.get(&BasisState::new(nu, jp)).copied().unwrap_or(0);
                    ok &= c == BigUint::from(e);
                    total += c;
                }
            }
            ok &= total == BigUint::from(1u32) << m;
        }
    }
    for m in 0..=64usize {
        let mi = m as i64;
        for dj in -mi - 1..=mi + 1 {
            for sigma in [P, M] {
                let sum = count_paths(sigma, 0, P, dj, m) + count_paths(sigma, 0, M, dj, m);
                let coined = count_paths_coined(0, dj, m);
                ok &= sum == coined;
                if (mi + dj) % 2 == 0 && dj.abs() <= mi {
                    ok &= coined == BigUint::from(binom(mi, (mi + dj) / 2));
                }
            }
        }
    }
    outcome(
        ok,
        "enumeration = count formula for m <= 14, totals 2^m, coined identity for m <= 64",
    )
}

fn group_structure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let lattices = [
        VertexAmplitudes::unbiased(),
        random_vertex(&mut rng),
        random_vertex(&mut rng),
    ];
    let mut mult_ok = true;
    let mut spread = 0.0f64;
    let mut sign_dev = 0.0f64;
    for m in 1..=14usize {
        for sigma in [P, M] {
            let all = enumerate_all_paths(sigma, 0, m).unwrap();
            let mut by_end: BTreeMap<BasisState, Vec<_>> = BTreeMap::new();
            for p in all {
                by_end.entry(p.end).or_default().push(p);
            }
            for (end, paths) in &by_end {
                let groups = group_by_monomial(paths).unwrap();
                let delta = i64::from(end.sigma == sigma);
                let dj = end.j;
                let d_sigma = (m as i64 + sigma.sign() * dj) / 2;
                let d_other = m as i64 - d_sigma;
                let mut seen: BTreeMap<i64, usize> = BTreeMap::new();
                for g in &groups {
                    *seen.entry(g.n).or_insert(0) += g.multiplicity;
                }
                let n_sup = (d_sigma - delta).min(d_other - 1);
                for n in -delta..=n_sup.max(-delta) {
                    let expected = if n == -1 {
                        u128::from(d_other == 0)
                    } else {
                        binom(d_sigma, n + delta) * binom(d_other - 1, n)
                    };
                    mult_ok &= seen.get(&n).copied().unwrap_or(0) as u128 == expected;
                }
                mult_ok &= seen.keys().all(|n| *n >= -delta && *n <= n_sup.max(-delta));

                for v in &lattices {
                    let lat = Lattice::homogeneous(*v).unwrap();
                    let (t, r) = (v.t(), v.r());
                    let mut common: Vec<(i64, Complex64)> = Vec::new();
                    for g in &groups {
                        let amps: Vec<Complex64> = g
                            .members
                            .iter()
                            .map(|&i| path_amplitude(&paths[i], &lat))
                            .collect();
                        for a in &amps {
                            spread = spread.max((a - amps[0]).norm());
                        }
                        common.push((g.n, amps[0]));
                    }
                    common.sort_by_key(|c| c.0);
                    for w in common.windows(2) {
                        // C_{n+1} / C_n = -(r/t)^2
                        let ratio = w[1].1 / w[0].1;
                        let expected = (-(r / t).powi(2)).powi((w[1].0 - w[0].0) as i32);
                        sign_dev = sign_dev.max((ratio - expected).norm() / expected.abs());
                    }
                }
            }
        }
    }
    outcome(
        mult_ok && spread < 1e-12 && sign_dev < 1e-12,
        format!("f_n exact: {mult_ok}, within-group spread {spread:.1e}, alternation deviation {sign_dev:.1e}"),
    )
}

fn normalization_and_support() -> Outcome {
    let m = 100;
    let ev = evolve(
        &WalkState::basis(BasisState::plus(0)),
        &make_unbiased_lattice(),
        m,
    )
    .unwrap();
    let norm_dev = (ev.norm_sqr() - 1.0).abs();
    let nonzero = ev.nonzero_count();
    let mi = m as i64;
    let mut holes_exact = true;
    for jp in -mi - 2..=mi + 2 {
        if (jp - mi).rem_euclid(2) != 0 {
            for nu in [P, M] {
                holes_exact &= ev.amplitude(BasisState::new(nu, jp)) == Complex64::default();
            }
        }
    }
    outcome(
        norm_dev < 1e-10 && nonzero == 2 * m && holes_exact,
        format!("|sum p - 1| = {norm_dev:.1e}, {nonzero} nonzero amplitudes, parity holes exact: {holes_exact}"),
    )
}

fn superdiffusion() -> Outcome {
    let start = Instant::now();
    let ms: Vec<usize> = (1..=20).map(|k| 10 * k).collect();
    let sweep = dispersion_sweep(&make_unbiased_lattice(), BasisState::plus(0), &ms).unwrap();
    let elapsed = start.elapsed();
    let fit = sweep.fit.unwrap();
    let classical_dev = sweep
        .rows
        .iter()
        .map(|r| (r.delta_c - (r.m as f64).sqrt()).abs())
        .fold(0.0, f64::max);
    outcome(
        fit.r_squared >= 0.9999 && classical_dev < 1e-12 && elapsed <= Duration::from_secs(30),
        format!(
            "R^2 = {:.7}, slope = {:.4}, intercept = {:.3}, classical deviation {classical_dev:.1e}, {:.2} s",
            fit.r_squared,
            fit.slope,
            fit.intercept,
            elapsed.as_secs_f64()
        ),
    )
}

fn distribution_morphology() -> Outcome {
    let d = distribution(
        BasisState::plus(0),
        &make_unbiased_lattice(),
        100,
        Route::Evolve,
    )
    .unwrap();
    let (left, right) = side_maxima(&d);
    let osc = oscillation_counts(&d);
    outcome(
        right > left && osc.outer > osc.inner,
        format!(
            "max p: + side {right:.4}, - side {left:.4}; derivative sign changes: outer {}, inner {}",
            osc.outer, osc.inner
        ),
    )
}

fn closed_form_consistency() -> Outcome {
    let p = HomogeneousParams::unbiased();
    let mut worst = 0.0f64;
    let mut discrepancies = Vec::new();
    for m in 0..=50usize {
        let mi = m as i64;
        for sigma in [P, M] {
            for dj in (-mi..=mi).step_by(2) {
                for nu in [P, M] {
                    let h = amplitude_homogeneous(sigma, nu, dj, m, &p);
                    let u = amplitude_unbiased(sigma, nu, dj, m);
                    let diff = (h - u).norm();
                    worst = worst.max(diff);
                    if diff >= 1e-9 {
                        discrepancies.push(format!("({sigma}->{nu}, dj {dj}, m {m}): {diff:.2e}"));
                    }
                }
            }
        }
    }
    let mut detail = format!("max |hypergeometric - class sum| = {worst:.1e}");
    if !discrepancies.is_empty() {
        detail += &format!("; discrepancies: {}", discrepancies.join(", "));
    }
    outcome(discrepancies.is_empty(), detail)
}

fn random_state(rng: &mut ChaCha8Rng) -> WalkState {
    let mut s = WalkState::new();
    for j in -3..=3 {
        for d in [P, M] {
            s.add(
                BasisState::new(d, j),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    let n = s.norm_sqr().sqrt();
    WalkState::from_amplitudes(s.iter().map(|(b, a)| (*b, a / n)))
}

fn random_series(rng: &mut ChaCha8Rng, order: usize) -> PowerSeries {
    PowerSeries::from_coeffs(
        (0..=order)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);

    let mut round_trip = 0.0f64;
    for _ in 0..100 {
        let lat = random_lattice(&mut rng, -8, 8);
        let s = random_state(&mut rng);
        let back = apply_u_dagger(&apply_u(&s, &lat).unwrap(), &lat).unwrap();
        round_trip = round_trip.max(back.max_abs_diff(&s));
    }

    let mut walls = 0.0f64;
    for _ in 0..10 {
        let lat = random_lattice(&mut rng, -30, 30);
        let m = 10;
        let initial = BasisState::minus(1);
        let free = evolve(&WalkState::basis(initial), &lat, m).unwrap();
        let walled = lat
            .clone()
            .with_window(Window::new(1 - m as i64 - 1, 1 + m as i64 + 1).unwrap());
        walls =
            walls.max(free.max_abs_diff(&evolve(&WalkState::basis(initial), &walled, m).unwrap()));
        for (target, _) in free.iter() {
            let (l, r) = walls_for(initial, *target, m, &lat);
            let base =
                greens_function(&GreensSpec::for_transition(initial, *target, l, r), &lat, m)
                    .unwrap();
            let wide = greens_function(
                &GreensSpec::for_transition(initial, *target, l - 4, r + 4),
                &lat,
                m,
            )
            .unwrap();
            walls = walls.max(base.max_abs_diff(&wide));
        }
    }

    let mut phases = 0.0f64;
    for _ in 0..20 {
        let v = random_vertex(&mut rng);
        let mut other =
            VertexAmplitudes::from_polar(v.t(), v.r(), random_vertex(&mut rng).phases());
        if sqwalk::lattice::validate_vertex(&other).is_err() {
            other = v;
        }
        let a = evolve(
            &WalkState::basis(BasisState::plus(0)),
            &Lattice::homogeneous(v).unwrap(),
            15,
        )
        .unwrap();
        let b = evolve(
            &WalkState::basis(BasisState::plus(0)),
            &Lattice::homogeneous(other).unwrap(),
            15,
        )
        .unwrap();
        for (k, x) in a.iter() {
            phases = phases.max((x.norm() - b.amplitude(*k).norm()).abs());
        }
    }

    let mut ring = 0.0f64;
    for _ in 0..100 {
        let (a, b, c) = (
            random_series(&mut rng, 12),
            random_series(&mut rng, 12),
            random_series(&mut rng, 12),
        );
        ring = ring
            .max(a.mul(&b).mul(&c).max_abs_diff(&a.mul(&b.mul(&c))))
            .max(a.mul(&b).max_abs_diff(&b.mul(&a)))
            .max(a.add(&b).max_abs_diff(&b.add(&a)))
            .max(a.mul(&b.add(&c)).max_abs_diff(&a.mul(&b).add(&a.mul(&c))));
    }

    outcome(
        round_trip < 1e-12 && walls < 1e-12 && phases < 1e-12 && ring < 1e-12,
        format!(
            "round trip {round_trip:.1e}, walls {walls:.1e}, phase convention {phases:.1e}, ring axioms {ring:.1e}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("three-route equivalence", three_route_equivalence),
        ("worked interference example", worked_interference_example),
        ("counting identities", counting_identities),
        ("group structure", group_structure),
        ("normalization and support", normalization_and_support),
        ("superdiffusion", superdiffusion),
        ("distribution morphology", distribution_morphology),
        ("closed-form consistency", closed_form_consistency),
        ("property suites", property_suites),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {} [{tag}] {name}: {}", i + 1, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
