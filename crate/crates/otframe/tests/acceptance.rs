//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `--nocapture`). Expected values are produced by
//! independent oracles built inside this file (direct modular arithmetic
//! and exhaustive enumeration), not by the code paths under test.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use otframe::adversary::{cheat_extraction, escape_event_table, escape_experiment, EscapeStats};
use otframe::commit::CoinOpening;
use otframe::ddh::{DdhFamily, DdhInstance, DdhParams};
use otframe::math::{Bits, OtRng, SchnorrGroup};
use otframe::protocol::{
    gamma_sample, run_local_session, run_local_session_with_rngs, FlowF1, FlowF2, FlowF3, FlowF4,
    FlowF6, Permutation, ProtocolConfig, WitnessOpening,
};
use otframe::residuosity::{DnrFamily, DqrFamily};
use otframe::sph::{
    lhl_extract, AmpParams, AmpProjKey, Amplified, ExtractorSeed, Family, Kind, Profile,
};
use otframe::wire;

fn b(x: u64) -> BigUint {
    BigUint::from(x)
}

fn report(criterion: &str, ok: bool, detail: &str) {
    if ok {
        println!("criterion {criterion}: PASS");
    } else {
        println!("criterion {criterion}: FAIL - {detail}");
    }
    assert!(ok, "criterion {criterion} failed: {detail}");
}

fn toy_cfg(n: usize, h: usize, k: usize, msg_len: usize) -> ProtocolConfig {
    ProtocolConfig {
        n,
        h,
        k_cut: k,
        msg_len,
        profile: Profile::Toy,
    }
}

// ---------------------------------------------------------------- shared runs

struct CorrectnessRun {
    assumption: &'static str,
    sessions: usize,
    output_mismatches: usize,
    flow_count_errors: usize,
    aborts: usize,
}

struct CorrectnessReport {
    runs: Vec<CorrectnessRun>,
    elapsed: Duration,
}

static CORRECTNESS: OnceLock<CorrectnessReport> = OnceLock::new();

fn correctness_sessions<F: Family>(assumption: &'static str, seed: u64) -> CorrectnessRun {
    let mut master = OtRng::seeded(seed);
    let mut run = CorrectnessRun {
        assumption,
        sessions: 0,
        output_mismatches: 0,
        flow_count_errors: 0,
        aborts: 0,
    };
    for _ in 0..200 {
        let n = 2 + master.index(5); // 2..=6
        let h = 1 + master.index(n - 1); // 1..n
        let cfg = toy_cfg(n, h, 8, 16);
        let messages: Vec<Vec<u8>> = (0..n)
            .map(|_| {
                let mut m = vec![0u8; 16];
                master.fill(&mut m);
                m
            })
            .collect();
        let mut selection = BTreeSet::new();
        while selection.len() < h {
            selection.insert(master.index(n));
        }
        let session =
            run_local_session::<F>(&cfg, messages.clone(), &selection, &mut master).unwrap();
        run.sessions += 1;
        if session.transcript.len() != 6 {
            run.flow_count_errors += 1;
        }
        match session.outcome {
            Ok(received) => {
                let expected: Vec<&Vec<u8>> = selection.iter().map(|&j| &messages[j]).collect();
                if received.len() != expected.len()
                    || received
                        .iter()
                        .zip(&expected)
                        .any(|(got, want)| &got != want)
                {
                    run.output_mismatches += 1;
                }
            }
            Err(_) => run.aborts += 1,
        }
    }
    run
}

fn correctness_report() -> &'static CorrectnessReport {
    CORRECTNESS.get_or_init(|| {
        let started = Instant::now();
        let runs = vec![
            correctness_sessions::<DdhFamily>("ddh", 1001),
            correctness_sessions::<Amplified<DqrFamily>>("dqr", 1002),
            correctness_sessions::<Amplified<DnrFamily>>("dnr", 1003),
        ];
        CorrectnessReport {
            runs,
            elapsed: started.elapsed(),
        }
    })
}

static ESCAPE: OnceLock<(EscapeStats, Duration)> = OnceLock::new();

fn escape_stats() -> &'static (EscapeStats, Duration) {
    ESCAPE.get_or_init(|| {
        let cfg = toy_cfg(2, 1, 8, 16);
        let started = Instant::now();
        let stats = escape_experiment::<DdhFamily>(&cfg, 2, 100_000, 424242).unwrap();
        (stats, started.elapsed())
    })
}

// ------------------------------------------------------------------ criteria

/// 200 seeded toy sessions per assumption: the receiver's output equals the
/// selected messages byte for byte, with no aborts, in under 60 seconds.
#[test]
fn criterion_01_end_to_end_correctness() {
    let report_data = correctness_report();
    let mut ok = report_data.elapsed < Duration::from_secs(60);
    let mut detail = String::new();
    for run in &report_data.runs {
        if run.sessions != 200 || run.output_mismatches != 0 || run.aborts != 0 {
            ok = false;
        }
        detail.push_str(&format!(
            "[{}: {} sessions, {} mismatches, {} aborts] ",
            run.assumption, run.sessions, run.output_mismatches, run.aborts
        ));
    }
    detail.push_str(&format!("elapsed {:.1?}", report_data.elapsed));
    report("1 (end-to-end correctness)", ok, &detail);
}

/// Every completed transcript from criterion 1 contains exactly 6 flows.
#[test]
fn criterion_02_round_count() {
    let report_data = correctness_report();
    let bad: usize = report_data.runs.iter().map(|r| r.flow_count_errors).sum();
    report(
        "2 (six-flow transcripts)",
        bad == 0,
        &format!("{bad} transcripts deviated"),
    );
}

/// 1000 randomized toy trials per instantiation: the two hash evaluation
/// routes agree exactly on projective instances.
#[test]
fn criterion_03_projection_identity() {
    fn trials<F: Family>(seed: u64) -> usize {
        let mut rng = OtRng::seeded(seed);
        let params = F::pg(Profile::Toy, &mut rng).unwrap();
        let mut failures = 0;
        for _ in 0..1000 {
            let pair = F::is(&params, Kind::Projective, &mut rng);
            let keys = F::kg(&params, &pair.instance, &mut rng);
            let direct = F::hash(&params, &pair.instance, &keys.hash_key);
            let projected = F::phash(&params, &pair.instance, &keys.proj_key, &pair.witness);
            if direct != projected {
                failures += 1;
            }
        }
        failures
    }
    let failures = [
        ("ddh", trials::<DdhFamily>(21)),
        ("dqr-base", trials::<DqrFamily>(22)),
        ("dnr-base", trials::<DnrFamily>(23)),
        ("dqr-amplified", trials::<Amplified<DqrFamily>>(24)),
        ("dnr-amplified", trials::<Amplified<DnrFamily>>(25)),
    ];
    let bad: usize = failures.iter().map(|(_, f)| *f).sum();
    report(
        "3 (projection identity)",
        bad == 0,
        &format!("{failures:?}"),
    );
}

/// Exhaustive oracle over all 121 key pairs at q = 11: on a smooth
/// instance, every projective key occurs exactly q times and, conditioned
/// on each, every hash value occurs exactly once.
#[test]
fn criterion_04_exact_ddh_smoothness() {
    let (p, q, g) = (b(23), b(11), b(2));
    // Smooth instance (g^3, g^4, g^5): 5 != 3*4 mod 11.
    let alpha = g.modpow(&b(3), &p);
    let beta = g.modpow(&b(4), &p);
    let gamma = g.modpow(&b(5), &p);
    let mut per_pk: HashMap<BigUint, Vec<BigUint>> = HashMap::new();
    for u in 0u64..11 {
        for v in 0u64..11 {
            let pk = alpha.modpow(&b(u), &p) * g.modpow(&b(v), &p) % &p;
            let hk = gamma.modpow(&b(u), &p) * beta.modpow(&b(v), &p) % &p;
            per_pk.entry(pk).or_default().push(hk);
        }
    }
    let mut ok = per_pk.len() == 11;
    for hks in per_pk.values() {
        if hks.len() != 11 {
            ok = false;
        }
        let distinct: HashSet<&BigUint> = hks.iter().collect();
        if distinct.len() != hks.len() {
            ok = false;
        }
    }
    let _ = q;
    report(
        "4 (exact DDH smoothness)",
        ok,
        &format!("{} distinct pk buckets", per_pk.len()),
    );
}

/// Exhaustive conditional-probability bound over the whole hash-key space.
fn max_guess_probability(
    g: &BigUint,
    modulus: &BigUint,
    x: &BigUint,
    key_space: u64,
) -> (u64, u64) {
    let mut per_pk: HashMap<BigUint, HashMap<BigUint, u64>> = HashMap::new();
    for hk in 0..key_space {
        let hk = b(hk);
        let pk = g.modpow(&hk, modulus);
        let y = x.modpow(&hk, modulus);
        *per_pk.entry(pk).or_default().entry(y).or_default() += 1;
    }
    let mut worst = (0u64, 1u64);
    for counts in per_pk.values() {
        let total: u64 = counts.values().sum();
        let best: u64 = counts.values().copied().max().unwrap_or(0);
        if best * worst.1 > worst.0 * total {
            worst = (best, total);
        }
    }
    worst
}

/// The guessing probability on a smooth instance, conditioned on the
/// projective key, stays at or below 1/2 under exhaustive enumeration of
/// the hash-key space. Checked at N=15 for the N-th residuosity family and
/// at N=77 for the quadratic one.
#[test]
fn criterion_05a_dnr_universality() {
    let mut rng = OtRng::seeded(31);
    let params = DnrFamily::pg(Profile::Toy, &mut rng).unwrap();
    assert_eq!(params.n, b(15));
    let smooth = DnrFamily::is(&params, Kind::Smooth, &mut rng);
    let n_sq = &params.n * &params.n;
    let (num, den) = max_guess_probability(&params.g, &n_sq, &smooth.instance, 225);
    report(
        "5a (DNR universality at N=15)",
        num * 2 <= den,
        &format!("max conditional guess probability {num}/{den}"),
    );
}

#[test]
fn criterion_05b_dqr_universality() {
    let mut rng = OtRng::seeded(32);
    let params = DqrFamily::pg(Profile::Toy, &mut rng).unwrap();
    assert_eq!(params.n, b(77));
    let smooth = DqrFamily::is(&params, Kind::Smooth, &mut rng);
    let (num, den) = max_guess_probability(&params.g, &params.n, &smooth.instance, 77);
    // The registered bound is 1/2. The exhaustive table at N=77 yields
    // exactly 3/5: given a projective key, the hash value is determined up
    // to sign, and the hash keys mapping to that projective key split 3:2
    // between the two signs because 77 = 5*15 + 2 makes the key classes
    // odd-sized. The 1/2 bound is only approached as N grows.
    report(
        "5b (DQR universality at N=77)",
        num * 2 <= den,
        &format!("max conditional guess probability {num}/{den}"),
    );
}

/// K = 8, d = 2, 100k trials: the escape rate sits within three binomial
/// standard deviations of 2^-8, in under 120 seconds; exhaustively over all
/// 2^8 coins, the escape events are exactly the coins leaving the illegal
/// vectors unopened.
#[test]
fn criterion_06_escape_rate() {
    let (stats, elapsed) = escape_stats();
    let p = 1.0 / 256.0;
    let sigma = (p * (1.0 - p) / stats.trials as f64).sqrt();
    let window = 3.0 * sigma;
    let rate = stats.rate();
    let rate_ok = (rate - p).abs() <= window;
    let time_ok = *elapsed < Duration::from_secs(120);
    // Every escape must really have yielded more than h correct messages.
    let verified_ok = stats.escapes_verified == stats.escapes;

    let cfg = toy_cfg(2, 1, 8, 16);
    let table = escape_event_table::<DdhFamily>(&cfg, 2, 777).unwrap();
    let mut exact_ok = table.len() == 256;
    for run in &table {
        // Escape expected exactly when the coin leaves vectors 0 and 1
        // unopened and opens everything else.
        let expected = !run.coin[0] && !run.coin[1] && run.coin[2..].iter().all(|&c| c);
        if run.escape != expected {
            exact_ok = false;
        }
        if expected && run.correct_decrypts <= cfg.h {
            exact_ok = false;
        }
        let overlap = run.coin[0] || run.coin[1];
        if run.aborted != overlap {
            exact_ok = false;
        }
    }

    report(
        "6 (cut-and-choose escape rate)",
        rate_ok && time_ok && verified_ok && exact_ok,
        &format!(
            "rate {rate:.6} vs 2^-8 = {p:.6} (window {window:.6}), verified {}/{} escapes, \
             exhaustive-exact {exact_ok}, elapsed {elapsed:.1?}",
            stats.escapes_verified, stats.escapes
        ),
    );
}

/// Whenever an illegal vector is chosen for opening, the sender aborts.
#[test]
fn criterion_07_detection_completeness() {
    let (stats, _) = escape_stats();
    report(
        "7 (detection completeness)",
        stats.overlap_trials > 0 && stats.overlap_aborts == stats.overlap_trials,
        &format!(
            "{}/{} overlap trials aborted",
            stats.overlap_aborts, stats.overlap_trials
        ),
    );
}

/// Feasible cheating: with all-projective vectors in the unopened slots the
/// receiver recovers every message; with prescribed vectors it recovers
/// exactly the selected ones.
#[test]
fn criterion_08_cheat_extraction() {
    fn run<F: Family>(seed_base: u64) -> (usize, usize) {
        let mut full_failures = 0;
        let mut honest_failures = 0;
        for trial in 0..50u64 {
            let mut rng = OtRng::seeded(seed_base + trial);
            let n = 2 + (trial as usize % 4); // 2..=5
            let h = 1 + (trial as usize % (n - 1));
            let cfg = toy_cfg(n, h, 8, 16);
            let messages: Vec<Vec<u8>> = (0..n)
                .map(|_| {
                    let mut m = vec![0u8; 16];
                    rng.fill(&mut m);
                    m
                })
                .collect();
            let mut selection = BTreeSet::new();
            while selection.len() < h {
                selection.insert(rng.index(n));
            }
            let got = cheat_extraction::<F>(&cfg, &messages, &selection, false, &mut rng).unwrap();
            if got != messages {
                full_failures += 1;
            }
            let got = cheat_extraction::<F>(&cfg, &messages, &selection, true, &mut rng).unwrap();
            for (j, msg) in got.iter().enumerate() {
                let should_match = selection.contains(&j);
                if (msg == &messages[j]) != should_match {
                    honest_failures += 1;
                }
            }
        }
        (full_failures, honest_failures)
    }
    let ddh = run::<DdhFamily>(5000);
    let dqr = run::<Amplified<DqrFamily>>(6000);
    let dnr = run::<Amplified<DnrFamily>>(7000);
    let ok = [ddh, dqr, dnr].iter().all(|&(a, b)| a == 0 && b == 0);
    report(
        "8 (feasible-cheating extraction)",
        ok,
        &format!("(full,honest) failures ddh {ddh:?} dqr {dqr:?} dnr {dnr:?}"),
    );
}

/// Amplifier smoothness at (epsilon = 1/2, ell_out = 2, sigma = 3), N = 77:
/// the statistical distance of the extracted value from uniform, computed
/// exactly per key draw by enumerating the conditional hash distributions,
/// averages at most 2^-3 over the key randomness.
#[test]
fn criterion_09_amplifier_smoothness() {
    let mut rng = OtRng::seeded(91);
    let base = DqrFamily::pg(Profile::Toy, &mut rng).unwrap();
    let params: AmpParams<DqrFamily> = AmpParams::new(base.clone(), (1, 2), 2, 3).unwrap();
    assert_eq!(params.reps, 8, "m = ceil((2 + 2*3) / 1)");
    let smooth = DqrFamily::is(&base, Kind::Smooth, &mut rng);
    let x = &smooth.instance;

    // Conditional distribution of x^hk given g^hk = pk, by exhaustive
    // enumeration of the key space.
    let conditional = |pk: &BigUint| -> Vec<(BigUint, f64)> {
        let mut hits: HashMap<BigUint, u64> = HashMap::new();
        let mut total = 0u64;
        for hk in 0u64..77 {
            let hk = b(hk);
            if &base.g.modpow(&hk, &base.n) == pk {
                *hits.entry(x.modpow(&hk, &base.n)).or_default() += 1;
                total += 1;
            }
        }
        hits.into_iter()
            .map(|(y, c)| (y, c as f64 / total as f64))
            .collect()
    };

    let trials = 300;
    let mut sum_sd = 0.0;
    for _ in 0..trials {
        // One amplified key draw: 8 base keys plus a fresh extractor seed.
        let keys = Amplified::<DqrFamily>::kg(&params, x, &mut rng);
        let AmpProjKey { base: pks, seed } = keys.proj_key;
        let rep_dists: Vec<Vec<(BigUint, f64)>> = pks.iter().map(&conditional).collect();
        // Product measure over the 8 repetitions, pushed through the
        // extractor; supports are tiny (two values per repetition).
        let mut dist: HashMap<Vec<u8>, f64> = HashMap::new();
        dist.insert(Vec::new(), 1.0);
        for rep in &rep_dists {
            let mut next: HashMap<Vec<u8>, f64> = HashMap::new();
            for (prefix, p0) in &dist {
                for (y, py) in rep {
                    let mut ext = prefix.clone();
                    ext.extend_from_slice(&otframe::math::canonical_encode(y, 1).unwrap());
                    *next.entry(ext).or_default() += p0 * py;
                }
            }
            dist = next;
        }
        let mut out = [0.0f64; 4];
        for (bytes, p0) in &dist {
            let input = Bits::from_bytes(bytes, 64).unwrap();
            let extracted = lhl_extract(&seed, &input).unwrap();
            let z = (extracted.get(0) as usize) << 1 | extracted.get(1) as usize;
            out[z] += p0;
        }
        let sd: f64 = out.iter().map(|p0| (p0 - 0.25).abs()).sum::<f64>() / 2.0;
        sum_sd += sd;
    }
    let mean_sd = sum_sd / trials as f64;
    report(
        "9 (amplifier smoothness)",
        mean_sd <= 0.125,
        &format!("mean exact statistical distance {mean_sd:.4} vs 2^-3 = 0.125"),
    );
}

/// The constrained permutation sampler maps the source set onto the target
/// set on every draw and is uniform over the valid permutations.
#[test]
fn criterion_10_gamma_contract() {
    let mut rng = OtRng::seeded(101);
    let mut constraint_ok = true;
    for _ in 0..10_000 {
        let n = 2 + rng.index(7);
        let h = 1 + rng.index(n - 1);
        let mut b1 = BTreeSet::new();
        while b1.len() < h {
            b1.insert(rng.index(n));
        }
        let mut b2 = BTreeSet::new();
        while b2.len() < h {
            b2.insert(rng.index(n));
        }
        let pi = gamma_sample(&b1, &b2, n, &mut rng).unwrap();
        if pi.image_of_set(&b1) != b2 {
            constraint_ok = false;
        }
    }

    // Uniformity over the 2! * 2! = 4 valid permutations at n = 4, h = 2.
    let b1: BTreeSet<usize> = [0, 1].into();
    let b2: BTreeSet<usize> = [2, 3].into();
    let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
    let draws = 10_000usize;
    for _ in 0..draws {
        let pi = gamma_sample(&b1, &b2, 4, &mut rng).unwrap();
        *counts.entry(pi.images().to_vec()).or_default() += 1;
    }
    let expected = draws as f64 / 4.0;
    let chi2: f64 = counts
        .values()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    // df = 3, significance 0.001.
    let chi_ok = counts.len() == 4 && chi2 < 16.266;
    report(
        "10 (constrained permutation sampler)",
        constraint_ok && chi_ok,
        &format!("constraint {constraint_ok}, chi-square {chi2:.2} (threshold 16.266)"),
    );
}

// ------------------------------------------------- random frame generation

fn toy_ddh_params() -> DdhParams {
    DdhParams {
        group: SchnorrGroup {
            p: b(23),
            q: b(11),
            g: b(2),
        },
    }
}

fn random_subgroup_element(group: &SchnorrGroup, rng: &mut OtRng) -> BigUint {
    group.pow(&group.g, &rng.below(&group.q))
}

fn random_ddh_instance(params: &DdhParams, rng: &mut OtRng) -> DdhInstance {
    DdhInstance {
        alpha: random_subgroup_element(&params.group, rng),
        beta: random_subgroup_element(&params.group, rng),
        gamma: random_subgroup_element(&params.group, rng),
    }
}

fn random_coin_opening(chunks: usize, rng: &mut OtRng) -> CoinOpening {
    CoinOpening {
        chunks: (0..chunks)
            .map(|_| otframe::commit::Decommitment {
                value: rng.below(&b(8)),
                randomness: rng.below(&b(11)),
            })
            .collect(),
    }
}

/// Random structurally-valid frames over the toy DDH family.
fn random_ddh_frame(cfg: &ProtocolConfig, chunks: usize, rng: &mut OtRng) -> (u8, Vec<u8>) {
    let params = toy_ddh_params();
    match rng.index(7) {
        0 => {
            let f1: FlowF1<DdhFamily> = FlowF1 {
                nonce: rng.bytes16(),
                params: params.clone(),
                commit_group: params.group.clone(),
                vectors: (0..cfg.k_cut)
                    .map(|_| {
                        (0..cfg.n)
                            .map(|_| random_ddh_instance(&params, rng))
                            .collect()
                    })
                    .collect(),
                coin_commitment: (0..chunks)
                    .map(|_| {
                        (
                            random_subgroup_element(&params.group, rng),
                            random_subgroup_element(&params.group, rng),
                        )
                    })
                    .collect(),
            };
            (1, wire::encode_f1::<DdhFamily>(&f1))
        }
        1 => {
            let f2 = FlowF2 {
                nonce: rng.bytes16(),
                coin_commitment: (0..chunks)
                    .map(|_| random_subgroup_element(&params.group, rng))
                    .collect(),
            };
            (2, wire::encode_f2(&f2))
        }
        2 => {
            let f3 = FlowF3 {
                opening: random_coin_opening(chunks, rng),
            };
            (3, wire::encode_f3(&f3))
        }
        3 => {
            let mut positions: Vec<(usize, usize)> = Vec::new();
            for i in 0..cfg.k_cut {
                for j in 0..cfg.n {
                    if rng.coin() {
                        positions.push((i, j));
                    }
                }
            }
            let f4: FlowF4<DdhFamily> = FlowF4 {
                opening: random_coin_opening(chunks, rng),
                openings: positions
                    .into_iter()
                    .map(|(vector, position)| WitnessOpening {
                        vector,
                        position,
                        witness: otframe::ddh::DdhWitness {
                            a: rng.below(&b(11)),
                            b: rng.below(&b(11)),
                        },
                    })
                    .collect(),
                perms: {
                    let mut perms = Vec::new();
                    for i in 0..cfg.k_cut {
                        if rng.coin() {
                            perms.push((i, Permutation::random(cfg.n, rng)));
                        }
                    }
                    perms
                },
            };
            (4, wire::encode_f4::<DdhFamily>(&f4, &params, cfg))
        }
        4 => (5, wire::encode_f5()),
        5 => {
            let rows: Vec<usize> = (0..cfg.k_cut).filter(|_| rng.coin()).collect();
            let f6: FlowF6<DdhFamily> = FlowF6 {
                ciphertexts: (0..cfg.n)
                    .map(|_| {
                        let mut c = vec![0u8; cfg.msg_len];
                        rng.fill(&mut c);
                        c
                    })
                    .collect(),
                proj_keys: rows
                    .into_iter()
                    .map(|i| {
                        (
                            i,
                            (0..cfg.n)
                                .map(|_| random_subgroup_element(&params.group, rng))
                                .collect(),
                        )
                    })
                    .collect(),
            };
            (6, wire::encode_f6::<DdhFamily>(&f6, &params, cfg))
        }
        _ => (0x7f, wire::encode_abort()),
    }
}

fn roundtrip_ddh_frame(
    tag: u8,
    bytes: &[u8],
    cfg: &ProtocolConfig,
    chunks: usize,
) -> Result<Vec<u8>, String> {
    let params = toy_ddh_params();
    let (flow_tag, body) = wire::split_frame(bytes).map_err(|e| e.to_string())?;
    if flow_tag as u8 != tag {
        return Err("tag mismatch".into());
    }
    Ok(match tag {
        1 => wire::encode_f1::<DdhFamily>(
            &wire::decode_f1::<DdhFamily>(body, cfg).map_err(|e| e.to_string())?,
        ),
        2 => wire::encode_f2(&wire::decode_f2(body, chunks).map_err(|e| e.to_string())?),
        3 => wire::encode_f3(&wire::decode_f3(body, chunks).map_err(|e| e.to_string())?),
        4 => wire::encode_f4::<DdhFamily>(
            &wire::decode_f4::<DdhFamily>(body, &params, cfg, chunks).map_err(|e| e.to_string())?,
            &params,
            cfg,
        ),
        5 => {
            wire::decode_f5(body).map_err(|e| e.to_string())?;
            wire::encode_f5()
        }
        6 => wire::encode_f6::<DdhFamily>(
            &wire::decode_f6::<DdhFamily>(body, &params, cfg).map_err(|e| e.to_string())?,
            &params,
            cfg,
        ),
        _ => wire::encode_abort(),
    })
}

/// 10^4 random frames re-encode to identical bytes after decoding, and the
/// in-memory and TCP transports produce identical transcripts and outputs
/// under the same seeds.
#[test]
fn criterion_11_wire_determinism() {
    let cfg = toy_cfg(4, 2, 8, 16);
    let chunks = 3; // K = 8 bits over 3-bit chunks (q = 11)
    let mut rng = OtRng::seeded(111);
    let mut roundtrip_failures = 0;
    for _ in 0..10_000 {
        let (tag, bytes) = random_ddh_frame(&cfg, chunks, &mut rng);
        match roundtrip_ddh_frame(tag, &bytes, &cfg, chunks) {
            Ok(re) if re == bytes => {}
            _ => roundtrip_failures += 1,
        }
    }

    // Amplified projective keys roundtrip too.
    let mut amp_failures = 0;
    {
        let mut arng = OtRng::seeded(112);
        let base = DqrFamily::pg(Profile::Toy, &mut arng).unwrap();
        let params: AmpParams<DqrFamily> =
            AmpParams::for_profile(base.clone(), (1, 2), Profile::Toy).unwrap();
        for _ in 0..200 {
            let pk = AmpProjKey::<DqrFamily> {
                base: (0..params.reps)
                    .map(|_| base.g.modpow(&arng.below(&base.n), &base.n))
                    .collect(),
                seed: ExtractorSeed::sample(params.ell_out, params.ell_in(), &mut arng),
            };
            let mut w = otframe::wire::ByteWriter::new();
            Amplified::<DqrFamily>::write_proj_key(&params, &pk, &mut w);
            let bytes = w.into_bytes();
            let mut r = otframe::wire::ByteReader::new(&bytes);
            let decoded = Amplified::<DqrFamily>::read_proj_key(&params, &mut r).unwrap();
            let mut w2 = otframe::wire::ByteWriter::new();
            Amplified::<DqrFamily>::write_proj_key(&params, &decoded, &mut w2);
            if w2.into_bytes() != bytes {
                amp_failures += 1;
            }
        }
    }

    // Transport transparency: local driver, mem: and tcp: give identical
    // transcripts and outputs for the same party seeds.
    fn transports_agree<F: Family>(seed: u64) -> bool {
        let cfg = toy_cfg(3, 1, 8, 16);
        let mut mrng = OtRng::seeded(seed);
        let messages: Vec<Vec<u8>> = (0..3)
            .map(|_| {
                let mut m = vec![0u8; 16];
                mrng.fill(&mut m);
                m
            })
            .collect();
        let selection: BTreeSet<usize> = [1].into();

        let local = run_local_session_with_rngs::<F>(
            &cfg,
            messages.clone(),
            &selection,
            &mut OtRng::seeded(seed + 1),
            &mut OtRng::seeded(seed + 2),
        )
        .unwrap();

        let (mem_r, mem_s) = otframe::net::mem_session::<F>(
            &cfg,
            messages.clone(),
            &selection,
            OtRng::seeded(seed + 1),
            OtRng::seeded(seed + 2),
            Duration::from_secs(10),
        )
        .unwrap();

        // TCP loopback with the same seeds.
        let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        let cfg_s = cfg;
        let messages_s = messages.clone();
        let sender_thread = std::thread::spawn(move || {
            let (stream, _) = listener.accept().unwrap();
            let mut link = otframe::net::TcpLink::new(stream, Duration::from_secs(10)).unwrap();
            let mut rng = OtRng::seeded(seed + 2);
            otframe::net::drive_sender::<F>(&mut link, &cfg_s, messages_s, &mut rng).unwrap()
        });
        let mut rng = OtRng::seeded(seed + 1);
        let tcp_r = otframe::net::connect_receiver::<F>(
            &addr.to_string(),
            &cfg,
            &selection,
            &mut rng,
            Duration::from_secs(10),
        )
        .unwrap();
        let tcp_s = sender_thread.join().unwrap();

        let local_frames: Vec<&Vec<u8>> = local.transcript.iter().map(|f| &f.bytes).collect();
        let mem_frames: Vec<&Vec<u8>> = mem_r.transcript.iter().map(|f| &f.bytes).collect();
        let tcp_frames: Vec<&Vec<u8>> = tcp_r.transcript.iter().map(|f| &f.bytes).collect();
        let tcp_sender_frames: Vec<&Vec<u8>> = tcp_s.transcript.iter().map(|f| &f.bytes).collect();
        let mem_sender_frames: Vec<&Vec<u8>> = mem_s.transcript.iter().map(|f| &f.bytes).collect();

        let expected = match local.outcome {
            Ok(m) => m,
            Err(_) => return false,
        };
        let mem_out = match mem_r.outcome {
            otframe::net::SessionOutcome::Received(m) => m,
            _ => return false,
        };
        let tcp_out = match tcp_r.outcome {
            otframe::net::SessionOutcome::Received(m) => m,
            _ => return false,
        };
        local_frames == mem_frames
            && local_frames == tcp_frames
            && tcp_frames == tcp_sender_frames
            && mem_frames == mem_sender_frames
            && expected == mem_out
            && expected == tcp_out
    }

    let transports_ok = transports_agree::<DdhFamily>(9000)
        && transports_agree::<Amplified<DqrFamily>>(9100)
        && transports_agree::<Amplified<DnrFamily>>(9200);

    report(
        "11 (wire determinism)",
        roundtrip_failures == 0 && amp_failures == 0 && transports_ok,
        &format!(
            "{roundtrip_failures} frame roundtrip failures, {amp_failures} amplified-key \
             failures, transports agree: {transports_ok}"
        ),
    );
}
