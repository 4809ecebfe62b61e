//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use convention_core::agents::{
    classic_speaker_utility, literal_builder_distribution, message_utility,
    pragmatic_builder_distribution, update_belief, Message, MessageKind, SubMessage, Theta,
    UpdateSide,
};
use convention_core::convention::{aggregate_lengths, run_simulation1};
use convention_core::dsl::{
    Block, Chunk, Position, Step, Symbol, SymbolKind, TowerId, TowerProgram,
};
use convention_core::io::config::{AbstractionConfig, ModalityConfig, DEFAULT_SEED};
use convention_core::lexicon::{
    lexicons, Gesture, Lexicon, LexiconBelief, Semantics, Utterance, Word,
};
use convention_core::optim::LhsNelderMead;
use convention_core::preference::{
    fit_base, fit_target, predicted_modality_distribution, simulate_modality_preferences, FitLabel,
    FitSpace, FitTarget, ModalitySettings, PositionAveraged,
};
use convention_core::rng::stream_rng;
use rand::Rng;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn criterion_1() -> Outcome {
    let cfg = AbstractionConfig::default();
    let mut r4 = Vec::new();
    let mut monotone = true;
    let mut trails = Vec::new();
    for beta_u in [0.1, 0.5, 1.0] {
        let runs = run_simulation1(&cfg.settings(beta_u), 100, DEFAULT_SEED).expect("simulation");
        let stats = aggregate_lengths(&runs).expect("stats");
        let means: Vec<f64> = stats.iter().map(|s| s.mean).collect();
        monotone &= means.windows(2).all(|w| w[1] <= w[0] + 0.2);
        trails.push(format!(
            "beta_u={beta_u}: {}",
            means
                .iter()
                .map(|m| format!("{m:.3}"))
                .collect::<Vec<_>>()
                .join(" ")
        ));
        r4.push(means[3]);
    }
    let ordered = r4[2] < r4[1] && r4[1] < r4[0];
    let near_two = (r4[2] - 2.0).abs() <= 0.75;
    outcome(
        ordered && near_two && monotone,
        format!("{} (ordered={ordered}, R4(1.0) within 2.0+-0.75={near_two}, non-increasing={monotone})", trails.join("; ")),
    )
}

fn criterion_2() -> Outcome {
    let m = ModalityConfig::default();
    let settings = ModalitySettings::default();
    let mut pass = true;
    let mut parts = Vec::new();
    for cond in &m.conditions {
        let r4 = cond.theta_r4(&m.r1);
        let stats = simulate_modality_preferences(&m.r1, &r4, 200, DEFAULT_SEED, &settings)
            .expect("simulation");
        let (kind, label) = if cond.name == "PreferU" {
            (MessageKind::LanguageOnly, "language_only")
        } else {
            (MessageKind::Complementary, "complementary")
        };
        let first = stats[0].mean.get(kind);
        let last = stats[3].mean.get(kind);
        let expected = predicted_modality_distribution(&r4).unwrap().get(kind)
            - predicted_modality_distribution(&m.r1).unwrap().get(kind);
        let ok = last - first >= 0.05;
        pass &= ok;
        parts.push(format!(
            "{} {label} {first:.4} -> {last:.4} (increase {:.4}, model expectation {expected:.4}, >=0.05: {ok})",
            cond.name,
            last - first
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut rng = stream_rng(DEFAULT_SEED, 3);
    let minimizer = LhsNelderMead::default();
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for i in 0..10 {
        let truth = Theta {
            beta_u: rng.random_range(0.0..40.0),
            beta_h: rng.random_range(0.0..40.0),
            sem: Semantics::new(rng.random_range(0.5..1.0), rng.random_range(0.5..1.0)).unwrap(),
            ..fit_base()
        };
        let observed = predicted_modality_distribution(&truth).unwrap();
        let target = FitTarget {
            label: FitLabel::R1,
            observed,
        };
        let fit = fit_target(
            &target,
            &fit_base(),
            FitSpace::Full,
            &PositionAveraged,
            &minimizer,
            40,
            200,
            i,
        )
        .expect("fit");
        let gap = fit.best_loss - fit.target_entropy;
        worst = worst.max(gap);
        failures += usize::from(gap > 0.02);
    }
    outcome(
        failures == 0,
        format!("worst cross-entropy excess {worst:.2e} over 10 targets ({failures} above 0.02)"),
    )
}

/// All bijections from words to chunks, by direct recursion.
fn brute_force_bijections() -> Vec<[Chunk; 5]> {
    fn extend(prefix: &mut Vec<Chunk>, out: &mut Vec<[Chunk; 5]>) {
        if prefix.len() == 5 {
            out.push([prefix[0], prefix[1], prefix[2], prefix[3], prefix[4]]);
            return;
        }
        for c in Chunk::ALL {
            if !prefix.contains(&c) {
                prefix.push(c);
                extend(prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), &mut out);
    out
}

fn criterion_4() -> Outcome {
    let theta = Theta::new(1.0, 1.0, 1.0, 0.5, Semantics::BINARY).unwrap();
    let sub =
        SubMessage::new(Utterance::Chunk(Word::Alpha), None, Symbol::Chunk(Chunk::C)).unwrap();
    let all = brute_force_bijections();
    let consistent = all.iter().filter(|m| m[0] == Chunk::C).count();
    let mut ok = all.len() == 120 && consistent == 24;
    for side in [UpdateSide::Instructor, UpdateSide::Builder] {
        let post = update_belief(
            &LexiconBelief::uniform(),
            &[(sub, Symbol::Chunk(Chunk::C))],
            side,
            &theta,
        )
        .unwrap();
        for images in &all {
            let p = post.prob(&Lexicon::from_images(*images).unwrap());
            if images[0] == Chunk::C {
                ok &= (p * consistent as f64 - 1.0).abs() < 1e-14;
            } else {
                ok &= p == 0.0;
            }
        }
    }
    outcome(
        ok,
        format!(
            "{consistent} of {} bijections consistent; each carries 1/24 on both update sides",
            all.len()
        ),
    )
}

fn criterion_5() -> Outcome {
    let theta = Theta::new(1.0, 1.0, 0.0, 0.5, Semantics::BINARY).unwrap();
    let lex = Lexicon::IDENTITY;
    let positions = SymbolKind::Position.symbols();
    let blocks = SymbolKind::Block.symbols();
    let mut max_diff: f64 = 0.0;
    let mut ok = true;
    let mut checked = 0;
    for target in Position::all() {
        let program = TowerProgram::new(TowerId::C, vec![Step::block(Block::Red, target)]);
        let block_u = Utterance::Block(Block::Red);
        let block_sub = SubMessage::new(block_u, None, Symbol::Block(Block::Red)).unwrap();
        let block_classic = classic_speaker_utility(
            block_u,
            Symbol::Block(Block::Red),
            &blocks,
            Semantics::BINARY,
            &lex,
        )
        .unwrap();
        for said in Position::all() {
            let u = Utterance::Position(said);
            let sub = SubMessage::new(u, None, Symbol::Position(target)).unwrap();
            let multimodal =
                message_utility(&Message::new(vec![block_sub, sub]), &program, &theta, &lex)
                    .unwrap();
            let classic = block_classic
                + classic_speaker_utility(
                    u,
                    Symbol::Position(target),
                    &positions,
                    Semantics::BINARY,
                    &lex,
                )
                .unwrap();
            checked += 1;
            if multimodal.is_infinite() || classic.is_infinite() {
                ok &= multimodal == classic;
            } else {
                max_diff = max_diff.max((multimodal - classic).abs());
            }
        }
    }
    ok &= max_diff < 1e-12;
    outcome(
        ok,
        format!("{checked} target/utterance pairs, max difference {max_diff:.1e}"),
    )
}

/// Literal value of a signal for a target, written out case by case.
fn naive_literal(
    signal: (Option<Utterance>, Option<Gesture>),
    target: Symbol,
    images: &[Chunk; 5],
    x_u: f64,
    x_h: f64,
) -> f64 {
    let chunk_of = |w: Word| Symbol::Chunk(images[w as usize]);
    let soft = |denoted: Symbol, x: f64| if denoted == target { x } else { 1.0 - x };
    match signal {
        (Some(Utterance::Here), None) => 1.0 / 9.0,
        (Some(Utterance::Block(b)), None) => soft(Symbol::Block(b), x_u),
        (Some(Utterance::Position(p)), None) => soft(Symbol::Position(p), x_u),
        (Some(Utterance::Chunk(w)), None) => soft(chunk_of(w), x_u),
        (None, Some(Gesture::Point(p))) => soft(Symbol::Position(p), x_h),
        (None, Some(Gesture::Shape(w))) => soft(chunk_of(w), x_h),
        _ => unreachable!(),
    }
}

fn naive_speaker(
    options: &[(Option<Utterance>, Option<Gesture>, f64)],
    t: Symbol,
    images: &[Chunk; 5],
    th: &Theta,
    beta: f64,
) -> Vec<f64> {
    let space = t.kind().symbols();
    let scores: Vec<f64> = options
        .iter()
        .map(|&(u, g, cost)| {
            let total: f64 = space
                .iter()
                .map(|&s| naive_literal((u, g), s, images, th.sem.x_u(), th.sem.x_h()))
                .sum();
            let p = naive_literal((u, g), t, images, th.sem.x_u(), th.sem.x_h()) / total;
            let info = if th.beta_i == 0.0 {
                0.0
            } else {
                th.beta_i * p.ln()
            };
            info - beta * cost
        })
        .collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

fn utterance_options(kind: SymbolKind) -> Vec<(Option<Utterance>, Option<Gesture>, f64)> {
    match kind {
        SymbolKind::Block => Block::ALL
            .iter()
            .map(|&b| (Some(Utterance::Block(b)), None, 0.4))
            .collect(),
        SymbolKind::Position => Position::all()
            .iter()
            .map(|&p| {
                (
                    Some(Utterance::Position(p)),
                    None,
                    if p == Position::at(2, 2) { 0.6 } else { 0.7 },
                )
            })
            .chain([(Some(Utterance::Here), None, 0.1)])
            .collect(),
        SymbolKind::Chunk => Word::ALL
            .iter()
            .map(|&w| (Some(Utterance::Chunk(w)), None, 0.4))
            .collect(),
    }
}

fn gesture_options(kind: SymbolKind) -> Vec<(Option<Utterance>, Option<Gesture>, f64)> {
    match kind {
        SymbolKind::Block => vec![],
        SymbolKind::Position => Position::all()
            .iter()
            .map(|&p| (None, Some(Gesture::Point(p)), 0.6))
            .collect(),
        SymbolKind::Chunk => Word::ALL
            .iter()
            .map(|&w| (None, Some(Gesture::Shape(w)), 0.6))
            .collect(),
    }
}

/// Reference pragmatic Builder: loops over every bijection and every target.
fn naive_pragmatic(sub: &SubMessage, belief: &LexiconBelief, th: &Theta) -> Option<Vec<f64>> {
    let kind = sub.category();
    let space = kind.symbols();
    let u_opts = utterance_options(kind);
    let g_opts = gesture_options(kind);
    let mut weights = vec![0.0; space.len()];
    for images in brute_force_bijections() {
        let prior = belief.prob(&Lexicon::from_images(images).unwrap());
        for (w, &t) in weights.iter_mut().zip(&space) {
            let pu = naive_speaker(&u_opts, t, &images, th, th.beta_u);
            let u_index = u_opts
                .iter()
                .position(|o| o.0 == Some(sub.utterance()))
                .unwrap();
            let likelihood = match (sub.kind(), sub.gesture()) {
                (MessageKind::Complementary, Some(g)) => {
                    let pg = naive_speaker(&g_opts, t, &images, th, th.beta_h);
                    let g_index = g_opts.iter().position(|o| o.1 == Some(g)).unwrap();
                    th.gamma * pu[u_index] + (1.0 - th.gamma) * pg[g_index]
                }
                _ => pu[u_index],
            };
            *w += prior * likelihood;
        }
    }
    let z: f64 = weights.iter().sum();
    (z > 0.0).then(|| weights.into_iter().map(|w| w / z).collect())
}

fn random_case<R: Rng>(rng: &mut R) -> (SubMessage, LexiconBelief, Theta) {
    let speaker = lexicons()[rng.random_range(0..120)];
    let sub = loop {
        let symbols = Symbol::all();
        let intended = symbols[rng.random_range(0..symbols.len())];
        let kind = MessageKind::ALL[rng.random_range(0..3)];
        if let Some(s) = SubMessage::of_kind(kind, intended, &speaker) {
            break s;
        }
    };
    let weights: Vec<f64> = (0..120)
        .map(|_| {
            if rng.random_bool(0.3) {
                0.0
            } else {
                rng.random::<f64>().powi(3)
            }
        })
        .collect();
    let belief = if weights.iter().sum::<f64>() > 0.0 {
        LexiconBelief::from_weights(weights).unwrap()
    } else {
        LexiconBelief::uniform()
    };
    let theta = Theta::new(
        rng.random_range(0.0..10.0),
        rng.random_range(0.0..40.0),
        rng.random_range(0.0..40.0),
        rng.random_range(0.0..=1.0),
        Semantics::new(rng.random_range(0.5..1.0), rng.random_range(0.5..1.0)).unwrap(),
    )
    .unwrap();
    (sub, belief, theta)
}

fn criterion_6() -> Outcome {
    let mut rng = stream_rng(DEFAULT_SEED, 6);
    let mut max_diff: f64 = 0.0;
    let mut mismatched = 0;
    for _ in 0..1000 {
        let (sub, belief, theta) = random_case(&mut rng);
        let space = sub.category().symbols();
        let fast = pragmatic_builder_distribution(&sub, &space, &belief, &theta).ok();
        match (fast, naive_pragmatic(&sub, &belief, &theta)) {
            (Some(a), Some(b)) => {
                for (x, y) in a.iter().zip(&b) {
                    max_diff = max_diff.max((x - y).abs());
                }
            }
            (None, None) => {}
            _ => mismatched += 1,
        }
    }
    outcome(
        max_diff < 1e-12 && mismatched == 0,
        format!(
            "1000 cases, max abs difference {max_diff:.1e}, {mismatched} definedness mismatches"
        ),
    )
}

fn criterion_7() -> Outcome {
    let (x_u, x_h) = (0.87, 0.62);
    let sem = Semantics::new(x_u, x_h).unwrap();
    let lex = Lexicon::IDENTITY;
    let p = Position::at(1, 1);
    let space = SymbolKind::Position.symbols();
    let at = space
        .iter()
        .position(|&s| s == Symbol::Position(p))
        .unwrap();

    let oracle = |clear: bool| {
        let weight = |q: Position| {
            let u = if !clear {
                1.0 / 9.0
            } else if q == p {
                x_u
            } else {
                1.0 - x_u
            };
            let h = if q == p { x_h } else { 1.0 - x_h };
            u * h
        };
        weight(p) / Position::all().iter().map(|&q| weight(q)).sum::<f64>()
    };
    let ambiguous =
        literal_builder_distribution(&SubMessage::complementary(p), &space, sem, &lex).unwrap()[at];
    let redundant_sub =
        SubMessage::of_kind(MessageKind::Redundant, Symbol::Position(p), &lex).unwrap();
    let clear = literal_builder_distribution(&redundant_sub, &space, sem, &lex).unwrap()[at];
    let ok = (ambiguous - 0.1694).abs() < 1e-4
        && (clear - 0.5772).abs() < 1e-4
        && (ambiguous - oracle(false)).abs() < 1e-12
        && (clear - oracle(true)).abs() < 1e-12;
    outcome(
        ok,
        format!(
            "here+point {ambiguous:.4} (oracle {:.4}), clear+point {clear:.4} (oracle {:.4})",
            oracle(false),
            oracle(true)
        ),
    )
}

fn run_cli(args: &[&str], out: &Path, threads: usize) -> Result<Vec<u8>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_convsim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    std::fs::read(out).map_err(|e| e.to_string())
}

fn criterion_8() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str]); 4] = [
        (
            "abstraction",
            &["sim-abstraction", "--seed", "11", "--runs", "20"],
        ),
        ("modality", &["sim-modality", "--seed", "11"]),
        ("fit", &["fit", "--seed", "11"]),
        ("fit-json", &["fit", "--seed", "11", "--format", "json"]),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, args) in cases {
        let outputs: Result<Vec<Vec<u8>>, String> = [(1, "a"), (1, "b"), (4, "c")]
            .iter()
            .map(|(threads, tag)| {
                run_cli(args, &dir.path().join(format!("{name}-{tag}")), *threads)
            })
            .collect();
        let ok = match outputs {
            Ok(o) => !o[0].is_empty() && o[0] == o[1] && o[0] == o[2],
            Err(e) => {
                parts.push(format!("{name} failed: {e}"));
                false
            }
        };
        pass &= ok;
        parts.push(format!("{name} identical={ok}"));
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let criteria: [(&str, Check); 8] = [
        (
            "1 abstraction: program length falls with utterance cost",
            criterion_1,
        ),
        (
            "2 modality: preference shifts across repetitions",
            criterion_2,
        ),
        ("3 fit recovery on synthetic targets", criterion_3),
        ("4 belief update after one consensus pair", criterion_4),
        (
            "5 multimodal utility reduces to single-utterance utility",
            criterion_5,
        ),
        ("6 pragmatic Builder matches naive reference", criterion_6),
        ("7 literal Builder spot values", criterion_7),
        (
            "8 CLI outputs are byte-identical across reruns and thread counts",
            criterion_8,
        ),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "[{}] {name} ({secs:.1}s): {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
