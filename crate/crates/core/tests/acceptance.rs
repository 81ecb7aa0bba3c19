//! Acceptance suite. Prints one `[PASS]` or `[FAIL]` line per criterion and
//! exits non-zero if any criterion fails.
//!
//!     cargo test -p gar --test acceptance

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use common::*;
use gar::augment::{
    extract_sentence_target, extract_title_target, find_positive_passages, prepare_targets,
    rm3_expand, ContextType, Rm3Params, SEP,
};
use gar::config::{load_config, Overrides};
use gar::corpus::{load_corpus, load_questions};
use gar::eval::{
    contains_run, exact_match, normalize_answer, normalized_tokens, rouge_f1, topk_accuracy,
};
use gar::fusion::{round_robin_fuse, rrf_fuse};
use gar::index::WeightedQuery;
use gar::pipeline::{context_run_name, run_pipeline, FUSED_RUN, PLAIN_RUN};
use gar::run::{RankedList, RunSet, ScoredPassage};
use gar::voting::{baseline_select, vote, ReaderOutput, ReaderPassage, Span, VotingConfig};
use gar::{Bm25Params, Corpus, InvertedIndex, Passage, Question};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn main() {
    let criteria: Vec<(&str, Criterion)> = vec![
        ("BM25 oracle equivalence", bm25_oracle_equivalence),
        ("Fusion oracles", fusion_oracles),
        ("Metric correctness", metric_correctness),
        ("ROUGE oracle", rouge_oracle),
        ("Span voting", span_voting),
        ("Target extraction", target_extraction),
        ("End-to-end qualitative reproduction", end_to_end),
        ("RM3 sanity", rm3_sanity),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let started = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[PASS] {name} ({secs:.2}s): {detail}"),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {name} ({secs:.2}s): {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn bm25_oracle_equivalence() -> Outcome {
    let started = Instant::now();
    let mut rng = rng(0xB325);
    let mut queries = 0;
    for c in 0..50 {
        let corpus = random_corpus(&mut rng, 100);
        let index = InvertedIndex::build(&corpus, Bm25Params::default());
        let texts = corpus_texts(&corpus);
        for qi in 0..10 {
            let vocab = 70;
            let n = rng.gen_range(1..=8);
            let query: Vec<String> = (0..n).map(|_| random_word(&mut rng, vocab)).collect();
            let query = query.join(" ");
            let got = index.search("q", &query, corpus.len());
            let want = bm25_oracle(&texts, &query, 0.9, 0.4);
            let got_ids: Vec<&str> = got.passage_ids().collect();
            let want_ids: Vec<&str> = want.iter().map(|(id, _)| id.as_str()).collect();
            ensure(got_ids == want_ids, || {
                format!("corpus {c} query {qi} {query:?}: order {got_ids:?} != {want_ids:?}")
            })?;
            for (g, (id, s)) in got.entries().iter().zip(&want) {
                ensure(close(g.score, *s, 1e-9), || {
                    format!(
                        "corpus {c} query {query:?} passage {id}: {} vs {s}",
                        g.score
                    )
                })?;
            }
            queries += 1;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("50 corpora, {queries} queries, {elapsed:.2?}"))
}

fn fusion_oracles() -> Outcome {
    let mut rng = rng(0xF05E);
    for i in 0..200 {
        let runs = random_runs(&mut rng, "q", 5, 20);
        let lists: Vec<Vec<String>> = runs.iter().map(|r| ranked_ids(r, "q")).collect();
        let k = rng.gen_range(1..=60);

        let rr: Vec<String> = round_robin_fuse(&runs, "q", k)
            .passage_ids()
            .map(String::from)
            .collect();
        let want = round_robin_oracle(&lists, k);
        ensure(rr == want, || {
            format!("instance {i}: round robin {rr:?} != {want:?}")
        })?;

        let c = if i % 2 == 0 {
            60.0
        } else {
            rng.gen_range(0.5..100.0)
        };
        let fused = rrf_fuse(&runs, "q", usize::MAX, c);
        let want = rrf_oracle(&lists, c);
        ensure(fused.len() == want.len(), || {
            format!("instance {i}: rrf size")
        })?;
        for e in fused.entries() {
            ensure(close(e.score, want[&e.passage_id], 1e-12), || {
                format!(
                    "instance {i}: rrf {} = {} vs {}",
                    e.passage_id, e.score, want[&e.passage_id]
                )
            })?;
        }

        // any strictly increasing map of each run's scores keeps the ranks
        let transformed: Vec<RunSet> = runs
            .iter()
            .map(|run| {
                let a = rng.gen_range(0.1..10.0);
                let b = rng.gen_range(-50.0..50.0);
                let lists = run.lists().map(|l| {
                    let entries = l
                        .entries()
                        .iter()
                        .map(|e| ScoredPassage::new(e.passage_id.clone(), a * e.score.exp() + b))
                        .collect();
                    RankedList::new(l.question_id.clone(), l.tag.clone(), entries)
                });
                RunSet::from_lists(run.name.clone(), lists.collect::<Vec<_>>()).unwrap()
            })
            .collect();
        let again = rrf_fuse(&transformed, "q", usize::MAX, c);
        ensure(again == fused, || {
            format!("instance {i}: rrf changed under a monotone transform")
        })?;
    }
    Ok("200 instances".into())
}

fn metric_correctness() -> Outcome {
    // depths 1, 3, none, 7
    let mut passages = vec![Passage::new("hit", "", "the answer is zebra")];
    passages.extend((0..10).map(|i| Passage::new(format!("miss{i}"), "", "nothing here")));
    let corpus = Corpus::from_passages(passages).unwrap();
    let with_hit_at = |qid: &str, depth: Option<usize>| {
        let mut ids: Vec<String> = (0..8).map(|i| format!("miss{i}")).collect();
        if let Some(d) = depth {
            ids.insert(d - 1, "hit".into());
        }
        let entries = ids
            .iter()
            .enumerate()
            .map(|(r, id)| ScoredPassage::new(id.clone(), 100.0 - r as f64))
            .collect();
        RankedList::new(qid, "t", entries)
    };
    let run = RunSet::from_lists(
        "fixture",
        [
            with_hit_at("a", Some(1)),
            with_hit_at("b", Some(3)),
            with_hit_at("c", None),
            with_hit_at("d", Some(7)),
        ],
    )
    .unwrap();
    let questions: Vec<Question> = ["a", "b", "c", "d"]
        .iter()
        .map(|q| Question::new(*q, "?", ["Zebra"]))
        .collect();
    let report =
        topk_accuracy(&run, &questions, &corpus, &[1, 5, 10]).map_err(|e| e.to_string())?;
    let got = (report.at(1), report.at(5), report.at(10));
    ensure(got == (Some(0.25), Some(0.5), Some(0.75)), || {
        format!("fixture gave {got:?}")
    })?;

    let mut rng = rng(0xACC);
    for i in 0..100 {
        let corpus = random_corpus(&mut rng, 40);
        let ids: Vec<String> = corpus.iter().map(|p| p.id.clone()).collect();
        let questions: Vec<Question> = (0..10)
            .map(|q| Question::new(format!("q{q}"), "?", [random_text(&mut rng, 30, 2)]))
            .collect();
        let mut lists = Vec::new();
        for q in &questions {
            if rng.gen_bool(0.1) {
                continue;
            }
            let mut ids = ids.clone();
            ids.shuffle(&mut rng);
            let len = rng.gen_range(0..=30);
            let entries = ids
                .into_iter()
                .take(len)
                .map(|id| ScoredPassage::new(id, rng.gen_range(0.0..1.0)))
                .collect();
            lists.push(RankedList::new(q.id.clone(), "r", entries));
        }
        let run = RunSet::from_lists("r", lists).unwrap();
        let ks: Vec<usize> = (1..=40).collect();
        let report = topk_accuracy(&run, &questions, &corpus, &ks).map_err(|e| e.to_string())?;
        let accs: Vec<f64> = ks.iter().map(|k| report.at(*k).unwrap()).collect();
        ensure(accs.windows(2).all(|w| w[0] <= w[1]), || {
            format!("run {i}: not monotone {accs:?}")
        })?;
    }

    let norm = normalize_answer("The September 1977.");
    ensure(norm == "september 1977", || {
        format!("normalize gave {norm:?}")
    })?;
    for (pred, answers, want) in [
        ("The September 1977.", vec!["September 1977"], true),
        ("September 1977", vec!["September 1977"], true),
        ("the september 1977", vec!["September 1977"], true),
        ("1977", vec!["September 1977"], false),
        ("September 1977", vec!["1977", "Sept 1977"], false),
    ] {
        ensure(exact_match(pred, &answers) == want, || {
            format!("exact_match({pred:?}, {answers:?}) != {want}")
        })?;
    }
    Ok("depth fixture, 100 random runs, Exact Match cases".into())
}

fn rouge_oracle() -> Outcome {
    let mut rng = rng(0x0A6E);
    let words = ["the", "cat", "sat", "ran", "on", "mat", "a", "dog"];
    let sample = |rng: &mut rand_chacha::ChaCha8Rng| -> String {
        let n = rng.gen_range(0..=12);
        (0..n)
            .map(|_| *words.choose(rng).unwrap())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for i in 0..500 {
        let (c, r) = (sample(&mut rng), sample(&mut rng));
        let (ct, rt) = (naive_tokens(&c), naive_tokens(&r));
        let got = rouge_f1(&c, &r);
        let want = if ct.is_empty() || rt.is_empty() {
            (0.0, 0.0, 0.0)
        } else {
            (
                rouge_n_oracle(&ct, &rt, 1),
                rouge_n_oracle(&ct, &rt, 2),
                rouge_l_oracle(&ct, &rt),
            )
        };
        ensure(
            close(got.rouge1_f1, want.0, 1e-9)
                && close(got.rouge2_f1, want.1, 1e-9)
                && close(got.rouge_l_f1, want.2, 1e-9),
            || format!("pair {i} {c:?} / {r:?}: {got:?} vs {want:?}"),
        )?;
    }
    let s = rouge_f1("the cat sat", "the cat ran");
    ensure(
        close(s.rouge1_f1, 2.0 / 3.0, 1e-12)
            && close(s.rouge2_f1, 0.5, 1e-12)
            && close(s.rouge_l_f1, 2.0 / 3.0, 1e-12),
        || format!("cat sat / cat ran gave {s:?}"),
    )?;
    Ok("500 pairs and the worked example".into())
}

fn same_votes(a: &[gar::voting::VotedAnswer], b: &[gar::voting::VotedAnswer]) -> bool {
    let ma: BTreeMap<&str, f64> = a.iter().map(|v| (v.key.as_str(), v.score)).collect();
    let mb: BTreeMap<&str, f64> = b.iter().map(|v| (v.key.as_str(), v.score)).collect();
    ma.len() == mb.len()
        && ma
            .iter()
            .all(|(k, s)| mb.get(k).is_some_and(|t| close(*s, *t, 1e-9)))
        && a.first().map(|v| &v.key) == b.first().map(|v| &v.key)
}

fn span_voting() -> Outcome {
    let mut rng = rng(0x707E);
    for i in 0..200 {
        let out = random_reader_output(&mut rng, "q");
        for (normalize, n) in [(true, 5), (false, 3)] {
            let config = VotingConfig {
                spans_per_passage: n,
                normalize,
            };
            let votes = vote(&out, &config).map_err(|e| e.to_string())?;
            let total: f64 = votes.iter().map(|v| v.score).sum();
            ensure(close(total, 1.0, 1e-9), || {
                format!("output {i}: total {total}")
            })?;
            let key = |s: &str| {
                if normalize {
                    normalize_answer(s)
                } else {
                    s.to_string()
                }
            };
            let oracle = voting_oracle(&out, n, key);
            for v in &votes {
                ensure(close(v.score, oracle[&v.key], 1e-9), || {
                    format!("output {i}: {} vs oracle", v.key)
                })?;
            }

            let mut shifted = out.clone();
            let d = rng.gen_range(-20.0..20.0);
            shifted.passages.iter_mut().for_each(|p| p.score += d);
            let j = rng.gen_range(0..shifted.passages.len());
            let s = rng.gen_range(-20.0..20.0);
            shifted.passages[j]
                .spans
                .iter_mut()
                .for_each(|sp| sp.score += s);
            let again = vote(&shifted, &config).map_err(|e| e.to_string())?;
            ensure(same_votes(&votes, &again), || {
                format!("output {i}: shift changed the vote")
            })?;
        }
    }

    let two = ReaderOutput {
        question_id: "q".into(),
        passages: vec![
            ReaderPassage {
                passage_id: "1".into(),
                score: 2f64.ln(),
                spans: vec![
                    Span {
                        text: "a".into(),
                        score: 0.0,
                    },
                    Span {
                        text: "b".into(),
                        score: 0.0,
                    },
                ],
            },
            ReaderPassage {
                passage_id: "2".into(),
                score: 0.0,
                spans: vec![Span {
                    text: "b".into(),
                    score: 17.0,
                }],
            },
        ],
    };
    let votes = vote(&two, &VotingConfig::default()).map_err(|e| e.to_string())?;
    ensure(
        votes[0].key == "b" && close(votes[0].score, 2.0 / 3.0, 1e-12),
        || format!("two-passage example gave {votes:?}"),
    )?;

    // a single passage whose retained spans all have distinct surfaces and a strict maximum
    let surfaces = [
        "Paris",
        "Lyon",
        "Nice",
        "Marseille",
        "Lille",
        "Nantes",
        "Brest",
        "Metz",
    ];
    for i in 0..200 {
        let mut names = surfaces.to_vec();
        names.shuffle(&mut rng);
        let n = rng.gen_range(1..=5);
        let spans: Vec<Span> = names[..n]
            .iter()
            .map(|t| Span {
                text: t.to_string(),
                score: rng.gen_range(-5.0..5.0),
            })
            .collect();
        let out = ReaderOutput {
            question_id: "q".into(),
            passages: vec![ReaderPassage {
                passage_id: "p".into(),
                score: rng.gen_range(-3.0..3.0),
                spans,
            }],
        };
        let voted = vote(&out, &VotingConfig::default()).map_err(|e| e.to_string())?;
        let base = baseline_select(&out).map_err(|e| e.to_string())?;
        ensure(voted[0].text == base, || {
            format!(
                "single passage {i}: vote {:?} vs baseline {base:?}",
                voted[0].text
            )
        })?;
    }
    Ok("200 random outputs, shifts, worked example, single-passage agreement".into())
}

fn sentence_targets_contain_answers(
    corpus: &Corpus,
    questions: &[Question],
) -> Result<usize, String> {
    let index = InvertedIndex::build(corpus, Bm25Params::default());
    let targets = prepare_targets(corpus, &index, questions, ContextType::Sentence, 100)
        .map_err(|e| e.to_string())?;
    for t in &targets {
        let q = questions.iter().find(|q| q.id == t.question_id).unwrap();
        for sentence in t.reference.split(SEP) {
            let toks = normalized_tokens(sentence);
            ensure(
                q.answers
                    .iter()
                    .any(|a| contains_run(&toks, &normalized_tokens(a))),
                || format!("{}: sentence {sentence:?} has no answer", q.id),
            )?;
        }
    }
    Ok(targets.len())
}

fn target_extraction() -> Outcome {
    let dir = data_dir().join("bat_out_of_hell");
    let corpus = load_corpus(&dir.join("corpus.jsonl")).map_err(|e| e.to_string())?;
    let questions = load_questions(&dir.join("questions.jsonl")).map_err(|e| e.to_string())?;
    ensure(corpus.len() == 20, || {
        format!("fixture has {} passages", corpus.len())
    })?;
    let index = InvertedIndex::build(&corpus, Bm25Params::default());
    let q = questions
        .iter()
        .find(|q| q.answers.iter().any(|a| a == "September 1977"))
        .ok_or("no Bat Out of Hell question")?;

    let title = extract_title_target(&corpus, &index, q, 100).map_err(|e| e.to_string())?;
    let title = title.map(|t| t.reference);
    ensure(title.as_deref() == Some("Bat Out of Hell"), || {
        format!("title target {title:?}")
    })?;

    let positives = find_positive_passages(&corpus, &index, q, 100).map_err(|e| e.to_string())?;
    let passages: Vec<&Passage> = positives
        .passage_ids()
        .map(|id| corpus.get(id).unwrap())
        .collect();
    let sentence = extract_sentence_target(q, &passages).map(|t| t.reference);
    let want =
        "The album was released in September 1977 on Cleveland International / Epic Records.";
    ensure(sentence.as_deref() == Some(want), || {
        format!("sentence target {sentence:?}")
    })?;

    let mut checked = sentence_targets_contain_answers(&corpus, &questions)?;
    let toy = data_dir().join("toy");
    let toy_corpus = load_corpus(&toy.join("corpus.jsonl")).map_err(|e| e.to_string())?;
    let toy_questions = load_questions(&toy.join("questions.jsonl")).map_err(|e| e.to_string())?;
    checked += sentence_targets_contain_answers(&toy_corpus, &toy_questions)?;
    Ok(format!(
        "title and sentence targets match, {checked} sentence targets contain an answer"
    ))
}

fn end_to_end() -> Outcome {
    let started = Instant::now();
    let dir = data_dir().join("toy");
    let corpus = load_corpus(&dir.join("corpus.jsonl")).map_err(|e| e.to_string())?;
    let questions = load_questions(&dir.join("questions.jsonl")).map_err(|e| e.to_string())?;
    ensure(corpus.len() >= 50 && questions.len() >= 20, || {
        "fixture too small".into()
    })?;
    for q in &questions {
        let qt = normalized_tokens(&q.text);
        for a in &q.answers {
            let shared: Vec<String> = normalized_tokens(a)
                .into_iter()
                .filter(|t| qt.contains(t))
                .collect();
            ensure(shared.is_empty(), || {
                format!("{}: answer shares {shared:?} with the question", q.id)
            })?;
        }
    }

    let out = tempfile::tempdir().map_err(|e| e.to_string())?;
    let overrides = Overrides {
        output_dir: Some(out.path().to_path_buf()),
        // context runs only; external runs are not part of this comparison
        external_runs: Some(Vec::new()),
        ..Overrides::default()
    };
    let config =
        load_config(Some(&dir.join("pipeline.toml")), &overrides).map_err(|e| e.to_string())?;
    let outcome = run_pipeline(&config).map_err(|e| e.to_string())?;
    let top5 = |run: &str| {
        outcome
            .report(run)
            .and_then(|r| r.accuracy.get(&5).copied())
    };

    let plain = top5(PLAIN_RUN).ok_or("no plain run")?;
    let fused = top5(FUSED_RUN).ok_or("no fused run")?;
    let mut detail = format!("top-5 plain {plain:.3}");
    for ty in ContextType::ALL {
        let name = context_run_name(ty);
        let single = top5(&name).ok_or_else(|| format!("no {name} run"))?;
        ensure(plain < single && single <= fused, || {
            format!("{name} {single:.3} breaks plain {plain:.3} < single <= fused {fused:.3}")
        })?;
        detail.push_str(&format!(", {ty} {single:.3}"));
    }
    detail.push_str(&format!(", fused {fused:.3}"));
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(30), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{detail}, {elapsed:.2?}"))
}

fn rm3_sanity() -> Outcome {
    let mut rng = rng(0x5A3);
    for c in 0..50 {
        let corpus = random_corpus(&mut rng, 100);
        let index = InvertedIndex::build(&corpus, Bm25Params::default());
        let texts = corpus_texts(&corpus);
        for _ in 0..5 {
            let query = random_text(&mut rng, 70, 8);
            let params = Rm3Params {
                fb_docs: rng.gen_range(1..=10),
                fb_terms: rng.gen_range(1..=15),
                alpha: 1.0,
            };
            let expanded = rm3_expand(&index, &query, params).map_err(|e| e.to_string())?;
            let plain = index.search("q", &query, corpus.len());
            let again = index.search_weighted("q", &expanded, corpus.len());
            let (a, b): (Vec<&str>, Vec<&str>) =
                (plain.passage_ids().collect(), again.passage_ids().collect());
            ensure(a == b, || {
                format!("corpus {c} {query:?}: alpha = 1 changed the ranking")
            })?;

            let params = Rm3Params {
                alpha: rng.gen_range(0.0..1.0),
                ..params
            };
            let expanded = rm3_expand(&index, &query, params).map_err(|e| e.to_string())?;
            let want = rm3_oracle(
                &texts,
                &query,
                params.fb_docs,
                params.fb_terms,
                params.alpha,
            );
            check_weights(&expanded, &want)
                .map_err(|e| format!("corpus {c} {query:?} {params:?}: {e}"))?;
        }
    }
    Ok("50 corpora, 250 queries".into())
}

fn check_weights(got: &WeightedQuery, want: &BTreeMap<String, f64>) -> Result<(), String> {
    let got: BTreeMap<&str, f64> = got.terms().iter().map(|(t, w)| (t.as_str(), *w)).collect();
    ensure(got.len() == want.len(), || {
        format!("{} terms vs {}", got.len(), want.len())
    })?;
    for (t, w) in want {
        let g = got
            .get(t.as_str())
            .copied()
            .ok_or_else(|| format!("missing term {t}"))?;
        ensure(close(g, *w, 1e-9), || format!("term {t}: {g} vs {w}"))?;
    }
    Ok(())
}
