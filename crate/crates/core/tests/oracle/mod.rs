//! Naive reference implementations used to cross-check the library.
//!
//! Everything here is written for clarity over speed: linear scans instead of
//! hash maps, full sorts instead of counting tricks. Shared with the CLI
//! acceptance suite through a `#[path]` include.
#![allow(dead_code, clippy::needless_range_loop)]

pub mod fixture;

pub const DIM: usize = 18;

// ---------------------------------------------------------------- lexical

pub fn tokens(text: &str) -> Vec<String> {
    let mut cleaned = String::new();
    for c in text.chars() {
        if c == '’' {
            cleaned.push('\'');
        } else if c.is_alphanumeric() || c == '\'' {
            for l in c.to_lowercase() {
                cleaned.push(l);
            }
        } else {
            cleaned.push(' ');
        }
    }
    cleaned
        .split_whitespace()
        .map(|t| t.trim_matches('\'').to_string())
        .filter(|t| !t.is_empty())
        .collect()
}

fn grams(toks: &[String], n: usize) -> Vec<Vec<String>> {
    if toks.len() < n {
        return vec![];
    }
    (0..=toks.len() - n).map(|i| toks[i..i + n].to_vec()).collect()
}

fn count(list: &[Vec<String>], g: &[String]) -> usize {
    list.iter().filter(|x| x.as_slice() == g).count()
}

fn dedup(list: Vec<Vec<String>>) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = vec![];
    for g in list {
        if !out.contains(&g) {
            out.push(g);
        }
    }
    out
}

fn clipped_shared(source: &[Vec<String>], target: &[Vec<String>]) -> usize {
    dedup(target.to_vec())
        .iter()
        .map(|g| count(target, g).min(count(source, g)))
        .sum()
}

fn div(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn recall(source: &str, target: &str, n: usize, by_tokens: bool) -> f64 {
    let (s, t) = (tokens(source), tokens(target));
    let (sg, tg) = (grams(&s, n), grams(&t, n));
    let den = if by_tokens { t.len() } else { tg.len() };
    div(clipped_shared(&sg, &tg), den)
}

pub fn precision(source: &str, target: &str, n: usize) -> f64 {
    let (sg, tg) = (grams(&tokens(source), n), grams(&tokens(target), n));
    div(clipped_shared(&sg, &tg), sg.len())
}

pub fn jaccard(a: &str, b: &str) -> f64 {
    let a = dedup(grams(&tokens(a), 1));
    let b = dedup(grams(&tokens(b), 1));
    let inter = a.iter().filter(|g| b.contains(g)).count();
    div(inter, a.len() + b.len() - inter)
}

pub fn minus_q(context: &str, question: &str, answer: &str, n: usize) -> f64 {
    let c = grams(&tokens(context), n);
    let q = grams(&tokens(question), n);
    let rest: Vec<_> = dedup(grams(&tokens(answer), n))
        .into_iter()
        .filter(|g| !q.contains(g))
        .collect();
    div(rest.iter().filter(|g| c.contains(g)).count(), rest.len())
}

/// TF-IDF cosine over the full vocabulary of `docs`, with
/// `idf = ln((1 + N) / (1 + df)) + 1`.
pub fn tfidf(a: &str, b: &str, docs: &[&str]) -> f64 {
    let doc_tokens: Vec<Vec<String>> = docs.iter().map(|d| tokens(d)).collect();
    let (ta, tb) = (tokens(a), tokens(b));
    let mut vocab: Vec<String> = doc_tokens.iter().flatten().cloned().collect();
    vocab.extend(ta.iter().cloned());
    vocab.extend(tb.iter().cloned());
    vocab.sort();
    vocab.dedup();
    let n = docs.len() as f64;
    let vec_of = |t: &[String]| -> Vec<f64> {
        vocab
            .iter()
            .map(|term| {
                let tf = t.iter().filter(|x| *x == term).count() as f64;
                let df = doc_tokens.iter().filter(|d| d.contains(term)).count() as f64;
                tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
            })
            .collect()
    };
    let (va, vb) = (vec_of(&ta), vec_of(&tb));
    cosine(&va, &vb).clamp(0.0, 1.0)
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut nu = 0.0;
    let mut nv = 0.0;
    for i in 0..u.len() {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        (dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0)
    }
}

pub fn density(answer: &str, tags: &[&str]) -> f64 {
    let t = tokens(answer);
    assert_eq!(t.len(), tags.len(), "fixture tags out of step with `{answer}`");
    let content = tags
        .iter()
        .filter(|g| ["NN", "VB", "JJ", "RB"].iter().any(|p| g.starts_with(p)))
        .count();
    div(content, t.len())
}

pub struct Doc<'a> {
    pub context: &'a str,
    pub question: &'a str,
    pub rubric_fc: &'a str,
    pub rubric_nc: &'a str,
    pub answer: &'a str,
    pub tags: &'a [&'a str],
    pub e_ctx: &'a [f64],
    pub e_q: &'a [f64],
    pub e_ans: &'a [f64],
    pub e_fc: &'a [f64],
}

/// All 18 components in canonical order, IDF fitted on `idf_docs`.
pub fn features(d: &Doc, idf_docs: &[&str]) -> [f64; DIM] {
    [
        cosine(d.e_ctx, d.e_q),
        cosine(d.e_ctx, d.e_ans),
        cosine(d.e_fc, d.e_ans),
        recall(d.rubric_fc, d.answer, 2, true),
        recall(d.rubric_nc, d.answer, 2, true),
        tokens(d.answer).len() as f64,
        density(d.answer, d.tags),
        jaccard(d.question, d.answer),
        jaccard(d.context, d.answer),
        recall(d.question, d.answer, 2, false),
        recall(d.context, d.answer, 2, false),
        minus_q(d.context, d.question, d.answer, 2),
        tfidf(d.question, d.answer, idf_docs),
        tfidf(d.context, d.answer, idf_docs),
        precision(d.question, d.answer, 1),
        recall(d.question, d.answer, 1, false),
        recall(d.context, d.answer, 1, false),
        minus_q(d.context, d.question, d.answer, 1),
    ]
}

// -------------------------------------------------------------- selection

#[derive(Debug, Clone)]
pub struct Row {
    pub id: String,
    pub domain: String,
    pub label: u8,
    pub x: [f64; DIM],
}

pub fn mean(rows: &[&Row]) -> [f64; DIM] {
    let mut m = [0.0; DIM];
    for j in 0..DIM {
        let mut s = 0.0;
        for r in rows {
            s += r.x[j];
        }
        m[j] = s / rows.len() as f64;
    }
    m
}

/// Two-pass population mean and standard deviation per column.
pub fn moments(rows: &[Row]) -> ([f64; DIM], [f64; DIM]) {
    let all: Vec<&Row> = rows.iter().collect();
    let m = mean(&all);
    let mut s = [0.0; DIM];
    for j in 0..DIM {
        let mut acc = 0.0;
        for r in rows {
            acc += (r.x[j] - m[j]) * (r.x[j] - m[j]);
        }
        s[j] = (acc / rows.len() as f64).sqrt();
    }
    (m, s)
}

pub fn zscore(x: &[f64; DIM], m: &[f64; DIM], s: &[f64; DIM]) -> [f64; DIM] {
    let mut z = [0.0; DIM];
    for j in 0..DIM {
        z[j] = if s[j] > 0.0 { (x[j] - m[j]) / s[j] } else { 0.0 };
    }
    z
}

pub fn dist(a: &[f64; DIM], b: &[f64; DIM]) -> f64 {
    let mut s = 0.0;
    for j in 0..DIM {
        s += (a[j] - b[j]) * (a[j] - b[j]);
    }
    s.sqrt()
}

/// `ceil(pct * n / 100)`, at least 1, in integer arithmetic.
pub fn quota_pct(n: usize, pct: usize) -> usize {
    if n == 0 {
        0
    } else {
        ((pct * n).div_ceil(100)).clamp(1, n)
    }
}

/// Sorts every candidate by (score, id) and keeps each group's quota.
pub fn pick(cand: &[Row], scores: &[f64], key: impl Fn(&Row) -> String, pct: usize) -> Vec<String> {
    let mut order: Vec<usize> = (0..cand.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .unwrap()
            .then(cand[a].id.cmp(&cand[b].id))
    });
    let mut keys: Vec<String> = cand.iter().map(&key).collect();
    keys.sort();
    keys.dedup();
    let mut chosen = vec![];
    for k in &keys {
        let size = cand.iter().filter(|r| key(r) == *k).count();
        let q = quota_pct(size, pct);
        chosen.extend(order.iter().filter(|&&i| key(&cand[i]) == *k).take(q).copied());
    }
    chosen.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .unwrap()
            .then(cand[a].id.cmp(&cand[b].id))
    });
    chosen.into_iter().map(|i| cand[i].id.clone()).collect()
}

fn project(rows: &[Row], reference: &[Row], standardize: bool) -> Vec<Row> {
    let (m, s) = moments(reference);
    rows.iter()
        .map(|r| Row {
            x: if standardize { zscore(&r.x, &m, &s) } else { r.x },
            ..r.clone()
        })
        .collect()
}

pub fn method1(reference: &[Row], cand: &[Row], standardize: bool, pct: usize) -> (Vec<f64>, Vec<String>) {
    let (m, s) = moments(reference);
    let proj = project(cand, reference, standardize);
    let scores: Vec<f64> = proj
        .iter()
        .map(|c| {
            let same: Vec<&Row> = reference.iter().filter(|r| r.label == c.label).collect();
            let mut target = mean(&same);
            if standardize {
                target = zscore(&target, &m, &s);
            }
            dist(&c.x, &target)
        })
        .collect();
    let ids = pick(cand, &scores, |r| r.label.to_string(), pct);
    (scores, ids)
}

/// `centers` are in raw feature units.
pub fn method2(
    reference: &[Row],
    centers: &[[f64; DIM]],
    cand: &[Row],
    standardize: bool,
    pct: usize,
) -> (Vec<f64>, Vec<String>) {
    let (m, s) = moments(reference);
    let proj = project(cand, reference, standardize);
    let scores: Vec<f64> = proj
        .iter()
        .map(|c| {
            centers
                .iter()
                .map(|k| dist(&c.x, &if standardize { zscore(k, &m, &s) } else { *k }))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let ids = pick(cand, &scores, |r| r.domain.clone(), pct);
    (scores, ids)
}

/// Literal pooled sort: reference rows plus the other candidates (and the
/// query itself when `include_self`), ordered by distance, then reference
/// before candidate, then id.
pub fn method3(
    reference: &[Row],
    cand: &[Row],
    standardize: bool,
    m: usize,
    include_self: bool,
    pct: usize,
) -> (Vec<f64>, Vec<String>) {
    let rp = project(reference, reference, standardize);
    let cp = project(cand, reference, standardize);
    let scores: Vec<f64> = (0..cp.len())
        .map(|a| {
            // (distance, is_candidate, id)
            let mut pool: Vec<(f64, bool, String)> =
                rp.iter().map(|r| (dist(&cp[a].x, &r.x), false, r.id.clone())).collect();
            for (i, c) in cp.iter().enumerate() {
                if i != a || include_self {
                    pool.push((dist(&cp[a].x, &c.x), true, c.id.clone()));
                }
            }
            pool.sort_by(|p, q| {
                p.0.partial_cmp(&q.0)
                    .unwrap()
                    .then(p.1.cmp(&q.1))
                    .then(p.2.cmp(&q.2))
            });
            let positions: Vec<usize> = pool
                .iter()
                .enumerate()
                .filter(|(_, e)| !e.1)
                .map(|(i, _)| i)
                .take(m)
                .collect();
            positions.iter().sum::<usize>() as f64 / m as f64
        })
        .collect();
    let ids = pick(cand, &scores, |_| String::new(), pct);
    (scores, ids)
}

// ------------------------------------------------------------------ stats

/// Two-sided signed-rank p-value by enumerating all sign assignments of
/// `1..=n` ranks (no ties).
pub fn wilcoxon_enumerate(diffs: &[f64]) -> (f64, f64) {
    let n = diffs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diffs[a].abs().partial_cmp(&diffs[b].abs()).unwrap());
    let mut rank = vec![0.0; n];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = (r + 1) as f64;
    }
    let total: f64 = rank.iter().sum();
    let plus: f64 = (0..n).filter(|&i| diffs[i] > 0.0).map(|i| rank[i]).sum();
    let w = plus.min(total - plus);
    let mut hits = 0u64;
    for mask in 0u64..(1 << n) {
        let p: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| rank[i]).sum();
        if p.min(total - p) <= w {
            hits += 1;
        }
    }
    (w, hits as f64 / (1u64 << n) as f64)
}

pub fn qwk(y_true: &[u8], y_pred: &[u8], k: usize) -> f64 {
    let n = y_true.len() as f64;
    let mut obs = vec![vec![0.0; k]; k];
    for (t, p) in y_true.iter().zip(y_pred) {
        obs[*t as usize][*p as usize] += 1.0;
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..k {
        for j in 0..k {
            let w = ((i as f64 - j as f64) / (k as f64 - 1.0)).powi(2);
            let row_i: f64 = obs[i].iter().sum();
            let col_j: f64 = (0..k).map(|r| obs[r][j]).sum();
            num += w * obs[i][j];
            den += w * row_i * col_j / n;
        }
    }
    1.0 - num / den
}

pub fn macro_recall(y_true: &[u8], y_pred: &[u8], k: u8) -> f64 {
    let mut sum = 0.0;
    for c in 0..k {
        let idx: Vec<usize> = (0..y_true.len()).filter(|&i| y_true[i] == c).collect();
        let hit = idx.iter().filter(|&&i| y_pred[i] == c).count();
        sum += hit as f64 / idx.len() as f64;
    }
    sum / k as f64
}
