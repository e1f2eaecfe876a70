//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spherecode::block_codes::{
    bch_code, bch_parameters, reed_muller_code, reed_solomon_code, repetition_code, LinearCode,
};
use spherecode::bounds::{
    achievable_max_cosine, gv_largest_dmin, message_bits, prop2_cosine_bound, rankin_converse,
    reed_solomon_simplex_bound, simplex_component_sq_distance,
};
use spherecode::cli::{cmd_generate, CodebookFile, GenerateRequest};
use spherecode::optimize::{loss_avg, loss_lse, optimize_prototypes, LossKind, OptimizerConfig};
use spherecode::sphere_map::{
    codebook_from_code, gram_matrix, map_binary, onehot_codebook, pairwise_cosines,
    qary_codebook, separation_stats, simplex_codebook, DEFAULT_BINS,
};
use spherecode::{CodeFamily, Scheme};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    ensure(
        elapsed.as_secs_f64() < limit_s,
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64()),
    )
}

/// Codewords by direct GF(2) combination of generator rows, message bits
/// most significant first.
fn brute_codewords(code: &LinearCode) -> Vec<Vec<u8>> {
    let g = code.generator_rows();
    let k = g.len();
    let n = code.length();
    (0u64..1 << k)
        .map(|msg| {
            let mut w = vec![0u8; n];
            for (i, row) in g.iter().enumerate() {
                if (msg >> (k - 1 - i)) & 1 == 1 {
                    for (x, &r) in w.iter_mut().zip(row) {
                        *x ^= r as u8;
                    }
                }
            }
            w
        })
        .collect()
}

fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rep = codebook_from_code(&repetition_code(3).map_err(|e| e.to_string())?, 2, None)
        .map_err(|e| e.to_string())?;
    let rep_max = separation_stats(&rep, DEFAULT_BINS).max_cosine;
    ensure(rep_max == -1.0, format!("repetition max cosine {rep_max}"))?;

    let even = LinearCode::binary(vec![vec![0, 1, 1], vec![1, 0, 1]], CodeFamily::Custom)
        .map_err(|e| e.to_string())?;
    let tetra = codebook_from_code(&even, 4, None).map_err(|e| e.to_string())?;
    let cos = pairwise_cosines(&tetra);
    let worst = cos.iter().map(|c| (c + 1.0 / 3.0).abs()).fold(0.0, f64::max);
    ensure(cos.len() == 6 && worst <= 1e-12, format!("tetrahedron deviation {worst:e}"))?;

    let oh = onehot_codebook(3).map_err(|e| e.to_string())?;
    let oh_max = separation_stats(&oh, DEFAULT_BINS).max_cosine;
    ensure(oh_max == 0.0, format!("one-hot max cosine {oh_max}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("-1, -1/3 (dev {worst:.1e}), 0"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut codes = Vec::new();
    for m in 1..=6 {
        for r in 0..=2.min(m) {
            codes.push(reed_muller_code(r, m).map_err(|e| e.to_string())?);
        }
    }
    for m in 2..=5 {
        for (delta, _) in bch_parameters(m).map_err(|e| e.to_string())? {
            codes.push(bch_code(m, delta).map_err(|e| e.to_string())?);
        }
    }
    for n in 1..=16 {
        codes.push(repetition_code(n).map_err(|e| e.to_string())?);
    }
    codes.retain(|c| c.dimension() <= 10);
    let mut pairs = 0u64;
    let mut worst = 0.0f64;
    for code in &codes {
        let words = brute_codewords(code);
        if words.len() < 2 {
            continue;
        }
        let cb = codebook_from_code(code, words.len(), None).map_err(|e| e.to_string())?;
        let cos = pairwise_cosines(&cb);
        let n = code.length() as f64;
        let mut idx = 0;
        for i in 0..words.len() {
            for j in i + 1..words.len() {
                let want = 1.0 - 2.0 * hamming(&words[i], &words[j]) as f64 / n;
                worst = worst.max((cos[idx] - want).abs());
                idx += 1;
            }
        }
        pairs += idx as u64;
    }
    ensure(worst <= 1e-12, format!("max deviation {worst:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("{} codes, {pairs} pairs, max deviation {worst:.1e}", codes.len()))
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for m in 5..=7u32 {
        let code = reed_muller_code(1, m).map_err(|e| e.to_string())?;
        let n = 1usize << m;
        let words = brute_codewords(&code);
        let brute_dmin = words.iter().skip(1).map(|w| w.iter().filter(|&&b| b == 1).count()).min();
        let d = code.d_min().map_err(|e| e.to_string())?;
        ensure(
            d == n / 2 && brute_dmin == Some(n / 2),
            format!("RM(1,{m}) d_min {d}, brute {brute_dmin:?}"),
        )?;
        let cb = codebook_from_code(&code, words.len(), None).map_err(|e| e.to_string())?;
        let max = separation_stats(&cb, DEFAULT_BINS).max_cosine;
        ensure(max == 0.0, format!("RM(1,{m}) max cosine {max:e}"))?;
        notes.push(format!("m={m}: d={d}"));
    }
    let rm = reed_muller_code(1, 6).map_err(|e| e.to_string())?;
    let cb = codebook_from_code(&rm, 100, None).map_err(|e| e.to_string())?;
    let max = separation_stats(&cb, DEFAULT_BINS).max_cosine;
    ensure(max <= 0.0, format!("RM(1,6) K=100 max cosine {max:e}"))?;
    Ok(format!("{}, K=100 max {max}", notes.join(", ")))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    ensure(rankin_converse(100) == -1.0 / 99.0, "rankin_converse(100) != -1/99")?;

    let mut mismatches = 0;
    for n in 1..=127usize {
        let mut binom = BigUint::from(1u8);
        let mut prefix = vec![BigUint::from(0u8)];
        for i in 0..n {
            let next = prefix[i].clone() + &binom;
            prefix.push(next);
            binom = binom * (n - 1 - i) / (i + 1);
        }
        for k in 1..=n {
            let lhs = BigUint::from(1u8) << (n - k);
            let exact = (1..=n).filter(|&d| lhs > prefix[d - 1]).max().unwrap();
            if gv_largest_dmin(n, k).map_err(|e| e.to_string())? != exact {
                mismatches += 1;
            }
        }
    }
    ensure(mismatches == 0, format!("{mismatches} GV mismatches"))?;

    let mut cache: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut checked = 0u64;
    for classes in 2..=1024usize {
        let k = message_bits(classes);
        let converse = rankin_converse(classes);
        for n in k..=1024 {
            let a = match cache.get(&(k, n)) {
                Some(&a) => a,
                None => {
                    let a = achievable_max_cosine(n, classes).map_err(|e| e.to_string())?;
                    cache.insert((k, n), a);
                    a
                }
            };
            if a < converse {
                return Err(format!("achievable {a} < converse {converse} at K={classes}, n={n}"));
            }
            checked += 1;
        }
    }
    within(start.elapsed(), 60.0)?;
    Ok(format!("0 GV mismatches over n<=127, {checked} (K, n) points sandwiched"))
}

fn criterion_5() -> Outcome {
    let mut worst = 0.0f64;
    for classes in [2usize, 3, 4, 10, 100, 1000] {
        let cb = simplex_codebook(classes).map_err(|e| e.to_string())?;
        ensure(cb.dim() == classes - 1, format!("K={classes} dim {}", cb.dim()))?;
        let g = gram_matrix(&cb);
        let target = rankin_converse(classes);
        for i in 0..classes {
            for j in 0..classes {
                if i != j {
                    worst = worst.max((g[i * classes + j] - target).abs());
                }
            }
        }
    }
    ensure(worst <= 1e-9, format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation from -1/(K-1): {worst:.1e}"))
}

fn final_max(classes: usize, dim: usize, cfg: &OptimizerConfig) -> Result<f64, String> {
    let (cb, _) = optimize_prototypes(classes, dim, cfg).map_err(|e| e.to_string())?;
    Ok(separation_stats(&cb, DEFAULT_BINS).max_cosine)
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let lse = OptimizerConfig::with_loss(LossKind::Lse);
    let avg = OptimizerConfig::with_loss(LossKind::Avg);

    let a = final_max(2, 2, &lse)?;
    let b = final_max(10, 16, &lse)?;
    let c = final_max(10, 8, &lse)?;
    let mut best_lse = f64::INFINITY;
    let mut best_avg = f64::INFINITY;
    for seed in 0..3 {
        best_lse = best_lse.min(final_max(100, 32, &OptimizerConfig { seed, ..lse.clone() })?);
        best_avg = best_avg.min(final_max(100, 32, &OptimizerConfig { seed, ..avg.clone() })?);
    }
    let parts = [
        ("a", a <= -1.0 + 1e-3, format!("K=2 n=2 {a:.6}")),
        ("b", (b + 1.0 / 9.0).abs() <= 5e-3, format!("K=10 n=16 {b:.6}")),
        ("c", c <= 1e-3, format!("K=10 n=8 {c:.2e}")),
        (
            "d",
            best_lse <= best_avg + 1e-3,
            format!("K=100 n=32 lse {best_lse:.4} vs avg {best_avg:.4}"),
        ),
    ];
    let detail = parts
        .iter()
        .map(|(tag, ok, text)| format!("({tag}) {} {text}", if *ok { "ok" } else { "MISS" }))
        .collect::<Vec<_>>()
        .join("; ");
    ensure(parts.iter().all(|p| p.1), detail.clone())?;
    within(start.elapsed(), 300.0)?;
    Ok(detail)
}

fn relative_gap(analytic: &[f64], numeric: &[f64]) -> f64 {
    let diff: f64 = analytic.iter().zip(numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let scale: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt().max(1e-300);
    diff / scale
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for trial in 0..10 {
        let classes = rng.random_range(2..=8usize);
        let dim = rng.random_range(2..=8usize);
        let t = rng.random_range(1.0..=classes as f64);
        let mut rows: Vec<f64> = (0..classes * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        for r in rows.chunks_exact_mut(dim) {
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            r.iter_mut().for_each(|x| *x /= norm);
        }
        type LossFn = Box<dyn Fn(&[f64]) -> (f64, Vec<f64>)>;
        let losses: [(&str, LossFn); 2] = [
            ("lse", Box::new(move |x: &[f64]| {
                let e = loss_lse(x, classes, dim, t);
                (e.value, e.gradient)
            })),
            ("avg", Box::new(move |x: &[f64]| {
                let e = loss_avg(x, classes, dim);
                (e.value, e.gradient)
            })),
        ];
        for (name, f) in &losses {
            let (_, grad) = f(&rows);
            let numeric: Vec<f64> = (0..rows.len())
                .map(|p| {
                    let mut plus = rows.clone();
                    let mut minus = rows.clone();
                    plus[p] += h;
                    minus[p] -= h;
                    (f(&plus).0 - f(&minus).0) / (2.0 * h)
                })
                .collect();
            let gap = relative_gap(&grad, &numeric);
            if gap > 1e-4 {
                return Err(format!("{name} trial {trial} (K={classes}, n={dim}): relative error {gap:e}"));
            }
            worst = worst.max(gap);
        }
    }
    Ok(format!("10 configurations, worst relative error {worst:.1e}"))
}

fn criterion_8() -> Outcome {
    let code = reed_muller_code(1, 4).map_err(|e| e.to_string())?;
    let words = brute_codewords(&code);
    let classes = words.len();
    ensure(classes == 32, format!("RM(1,4) has {classes} codewords"))?;
    let n = code.length();
    let mut weights: BTreeMap<usize, u64> = BTreeMap::new();
    for w in &words {
        *weights.entry(w.iter().filter(|&&b| b == 1).count()).or_default() += 1;
    }
    let mut predicted: Vec<(f64, u64)> = weights
        .iter()
        .filter(|(&w, _)| w > 0)
        .map(|(&w, &count)| (1.0 - 2.0 * w as f64 / n as f64, classes as u64 * count / 2))
        .collect();
    predicted.sort_by(|a, b| a.0.total_cmp(&b.0));

    let cb = codebook_from_code(&code, classes, None).map_err(|e| e.to_string())?;
    let stats = separation_stats(&cb, DEFAULT_BINS);
    let measured: Vec<(f64, u64)> = stats.atoms.iter().map(|a| (a.cosine, a.count)).collect();
    ensure(measured == predicted, format!("atoms {measured:?} vs {predicted:?}"))?;

    let mut expected_bins = vec![0u64; DEFAULT_BINS];
    let width = 2.0 / DEFAULT_BINS as f64;
    for &(c, count) in &predicted {
        let b = (((c + 1.0) / width).floor() as usize).min(DEFAULT_BINS - 1);
        expected_bins[b] += count;
    }
    let got: Vec<u64> = stats.histogram.iter().map(|b| b.count).collect();
    ensure(got == expected_bins, "binned histogram differs from the pushforward")?;
    let antipodal = predicted.first().copied().unwrap_or((0.0, 0));
    ensure(
        antipodal == (-1.0, classes as u64 / 2),
        format!("atom at -1: {antipodal:?}"),
    )?;
    Ok(format!("{} atoms, {} pairs at -1", predicted.len(), antipodal.1))
}

fn criterion_9() -> Outcome {
    for code in [
        reed_muller_code(1, 4).map_err(|e| e.to_string())?,
        bch_code(4, 5).map_err(|e| e.to_string())?,
        repetition_code(5).map_err(|e| e.to_string())?,
    ] {
        let words = brute_codewords(&code);
        let cb = qary_codebook(&code, words.len()).map_err(|e| e.to_string())?;
        for (row, word) in cb.rows().zip(&words) {
            let expected = map_binary(word);
            if !row.iter().zip(&expected).all(|(a, b)| a.to_bits() == b.to_bits()) {
                return Err(format!("q=2 mismatch for {:?}", code.family()));
            }
        }
    }
    let rs = reed_solomon_code(4, 2).map_err(|e| e.to_string())?;
    let cb = qary_codebook(&rs, 16).map_err(|e| e.to_string())?;
    ensure(cb.dim() == 12, format!("RS composite dim {}", cb.dim()))?;
    let max = separation_stats(&cb, DEFAULT_BINS).max_cosine;
    ensure(max <= 0.0, format!("RS max cosine {max:e}"))?;
    let cert = prop2_cosine_bound(3, 4, simplex_component_sq_distance(4));
    ensure(cert == 0.0, format!("certificate {cert:e}"))?;
    ensure(reed_solomon_simplex_bound(4, 2) == 0.0, "RS helper certificate differs")?;
    Ok(format!("bit-exact q=2 reduction, RS max {max}, certificate {cert}"))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_spherecode"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cases: [(&str, usize, Option<usize>, &str); 6] = [
        ("simplex", 100, None, "csv"),
        ("rm", 100, Some(64), "csv"),
        ("bch", 20, Some(31), "json"),
        ("rs-simplex", 16, Some(12), "csv"),
        ("random", 50, Some(24), "json"),
        ("lse", 12, Some(6), "csv"),
    ];
    for (scheme, classes, dim, format) in cases {
        let path = dir.path().join(format!("{scheme}.{format}"));
        let path_s = path.to_str().unwrap();
        let classes_s = classes.to_string();
        let mut args = vec!["generate", "--scheme", scheme, "-K", &classes_s, "--seed", "5"];
        let dim_s = dim.map(|d| d.to_string());
        if let Some(d) = &dim_s {
            args.extend(["-n", d.as_str()]);
        }
        args.extend(["--epochs", "200", "--format", format, "--out", path_s]);
        let out = run_cli(&args)?;
        ensure(out.status.success(), format!("{scheme}: generate failed: {}", String::from_utf8_lossy(&out.stderr)))?;

        let mut req = GenerateRequest::new(scheme.parse::<Scheme>().map_err(|e| e.to_string())?, classes, dim);
        req.seed = 5;
        req.optimizer.epochs = 200;
        let memory = cmd_generate(&req).map_err(|e| e.to_string())?;
        let disk = CodebookFile::read(&path).map_err(|e| e.to_string())?;
        let same_bits = memory.codebook.as_flat().len() == disk.codebook.as_flat().len()
            && memory
                .codebook
                .as_flat()
                .iter()
                .zip(disk.codebook.as_flat())
                .all(|(a, b)| a.to_bits() == b.to_bits());
        ensure(same_bits, format!("{scheme}: file differs from in-memory codebook"))?;

        let out = run_cli(&["stats", path_s])?;
        ensure(out.status.success(), format!("{scheme}: stats failed"))?;
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
        let stats = separation_stats(&memory.codebook, DEFAULT_BINS);
        let file_max = json["max_cosine"].as_f64().unwrap_or(f64::NAN);
        let file_mean = json["mean_cosine"].as_f64().unwrap_or(f64::NAN);
        ensure(
            file_max.to_bits() == stats.max_cosine.to_bits()
                && file_mean.to_bits() == stats.mean_cosine.to_bits(),
            format!("{scheme}: stats {file_max}/{file_mean} vs {}/{}", stats.max_cosine, stats.mean_cosine),
        )?;
        if let Some(bound) = memory.header.certified_max_cosine_bound {
            ensure(
                stats.max_cosine <= bound + 1e-12,
                format!("{scheme}: max {} above certificate {bound}", stats.max_cosine),
            )?;
        }
    }

    let rejections: [(&[&str], &[&str]); 3] = [
        (&["generate", "--scheme", "rm", "-K", "100", "-n", "60"], &["32", "64"]),
        (&["generate", "--scheme", "bch", "-K", "100", "-n", "60"], &["31", "63"]),
        (&["generate", "--scheme", "simplex", "-K", "10", "-n", "12"], &["9"]),
    ];
    for (args, hints) in rejections {
        let out = run_cli(args)?;
        let err = String::from_utf8_lossy(&out.stderr);
        ensure(out.status.code() == Some(2), format!("{args:?}: exit {:?}", out.status.code()))?;
        for h in hints {
            ensure(err.contains(h), format!("{args:?}: hint {h} missing from '{}'", err.trim()))?;
        }
    }
    Ok("6 schemes round-tripped bit-exactly, 3 invalid dimensions rejected with hints".into())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("small configurations: antipodal, tetrahedron, one-hot", criterion_1),
        ("cosine equals 1 - 2d/n for every mapped codeword pair", criterion_2),
        ("first-order Reed-Muller codes reach zero max cosine", criterion_3),
        ("converse value, exact GV agreement, bound sandwich", criterion_4),
        ("regular simplex meets the converse bound", criterion_5),
        ("optimizer reaches known optima; LSE beats AVG", criterion_6),
        ("loss gradients match finite differences", criterion_7),
        ("cosine histogram equals weight-distribution pushforward", criterion_8),
        ("q-ary mapping reduces to binary; RS certificate", criterion_9),
        ("CLI round trip and dimension hints", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {:>2}: {name} [{detail}] ({secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {:>2}: {name} [{why}] ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
