//! Regenerates the bundled demo data under `crates/cli/demo/`.
//!
//! ```text
//! cargo run -p dtfsel-cli --example make_demo [-- OUT_DIR]
//! ```
//!
//! Embeddings are hashed bags of words (64 dimensions, unit length), a
//! stand-in for a real sentence encoder that keeps the demo self-contained.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use dtfsel_core::corpus::{Corpus, DataPoint};
use dtfsel_core::lexical::tokenize;
use dtfsel_core::rng::{self, SeededRng};
use rand::seq::IndexedRandom;
use rand::Rng;
use sha2::{Digest, Sha256};

const DIM: usize = 64;

struct Topic {
    domain: &'static str,
    context: &'static str,
    question: &'static str,
    fc: &'static str,
    pc: &'static str,
    nc: &'static str,
    full: &'static [&'static str],
    partial: &'static [&'static str],
    wrong: &'static [&'static str],
}

const TOPICS: &[Topic] = &[
    Topic {
        domain: "biology",
        context: "Plants make their own food through photosynthesis. Inside the leaves, chlorophyll absorbs sunlight. The plant uses this energy to turn water and carbon dioxide into glucose, and oxygen is released as a by-product.",
        question: "What do plants need for photosynthesis?",
        fc: "Names sunlight, water and carbon dioxide.",
        pc: "Names one or two of sunlight, water and carbon dioxide.",
        nc: "Names soil nutrients or food from the ground only.",
        full: &["plants need sunlight water and carbon dioxide", "they use light energy with water and carbon dioxide to make glucose", "sunlight is absorbed by chlorophyll and water and carbon dioxide become glucose"],
        partial: &["plants need sunlight", "they need water and light", "the leaves take in carbon dioxide"],
        wrong: &["plants eat soil", "they get food from the ground", "plants need nutrients from dirt"],
    },
    Topic {
        domain: "biology",
        context: "The heart pumps blood around the body. Arteries carry blood away from the heart, while veins bring it back. Red blood cells carry oxygen from the lungs to the organs.",
        question: "Why does the body need blood to circulate?",
        fc: "Explains that blood carries oxygen from the lungs to the organs.",
        pc: "Mentions transport without naming oxygen.",
        nc: "Says blood keeps the body warm only or gives no reason.",
        full: &["blood carries oxygen from the lungs to the organs", "red blood cells bring oxygen to every organ so they can work", "circulation delivers oxygen from the lungs around the body"],
        partial: &["blood moves things around the body", "the heart pumps blood to the organs", "it carries stuff the body needs"],
        wrong: &["blood keeps you warm", "so the heart stays busy", "because veins are blue"],
    },
    Topic {
        domain: "biology",
        context: "Vaccines train the immune system. They contain a weakened or inactive part of a germ. The body makes antibodies against it and remembers how to fight the real infection later.",
        question: "How does a vaccine protect a person?",
        fc: "Explains that the immune system makes antibodies and remembers the germ.",
        pc: "Mentions the immune system without memory or antibodies.",
        nc: "Says vaccines kill germs directly.",
        full: &["the vaccine makes the body produce antibodies and remember the germ", "the immune system learns the germ from a weak part and remembers how to fight it", "antibodies are made and the body remembers the infection"],
        partial: &["it helps the immune system", "the body learns to fight", "it makes you stronger against germs"],
        wrong: &["the vaccine kills all germs", "it is a medicine that cures you", "it stops you from touching germs"],
    },
    Topic {
        domain: "chemistry",
        context: "Water boils at 100 degrees Celsius at sea level. At higher altitudes the air pressure is lower, so water boils at a lower temperature. Pressure cookers raise the pressure and the boiling point.",
        question: "Why does water boil at a lower temperature on a mountain?",
        fc: "Explains that air pressure is lower at altitude, lowering the boiling point.",
        pc: "Mentions altitude or air without linking pressure to boiling point.",
        nc: "Says it is colder on mountains.",
        full: &["the air pressure is lower so the boiling point drops", "lower pressure at high altitude lowers the boiling point of water", "on a mountain the pressure is lower and water boils below 100 degrees"],
        partial: &["because the mountain is high", "the air is different up there", "there is less air on a mountain"],
        wrong: &["because it is cold on mountains", "the water is cleaner", "mountains are closer to the sun"],
    },
    Topic {
        domain: "chemistry",
        context: "Iron rusts when it reacts with oxygen and water. Rust is iron oxide, a flaky red-brown compound. Paint and oil protect iron by keeping water and oxygen away from the surface.",
        question: "How does paint stop a bike from rusting?",
        fc: "Explains that paint keeps water and oxygen away from the iron.",
        pc: "Says paint covers the metal without naming water or oxygen.",
        nc: "Says paint makes the metal stronger.",
        full: &["paint keeps water and oxygen away from the iron", "the paint is a barrier so oxygen and water cannot react with iron", "it stops water and oxygen reaching the surface so no iron oxide forms"],
        partial: &["paint covers the metal", "it protects the surface", "the bike is coated"],
        wrong: &["paint makes the metal stronger", "the colour scares rust away", "paint is waterproof glue"],
    },
    Topic {
        domain: "chemistry",
        context: "Salt dissolves in water because water molecules surround the sodium and chloride ions. Warm water dissolves salt faster because its molecules move more quickly. Stirring also speeds up dissolving.",
        question: "Why does salt dissolve faster in warm water?",
        fc: "Explains that water molecules move faster when warm.",
        pc: "Mentions heat without molecular motion.",
        nc: "Says salt melts in warm water.",
        full: &["warm water molecules move faster and surround the ions quickly", "the molecules move more quickly so the salt dissolves faster", "heat makes water molecules move faster around the sodium and chloride ions"],
        partial: &["because the water is hot", "heat helps it dissolve", "warm things mix better"],
        wrong: &["the salt melts", "warm water has less salt", "salt likes heat"],
    },
    Topic {
        domain: "history",
        context: "The printing press was developed by Johannes Gutenberg around 1440. Books became cheaper and faster to produce. Ideas spread more widely and literacy grew across Europe.",
        question: "What was one effect of the printing press?",
        fc: "States that books became cheaper so ideas and literacy spread.",
        pc: "States that more books existed without the wider effect.",
        nc: "Names an unrelated invention or effect.",
        full: &["books became cheaper so ideas spread and more people could read", "ideas spread more widely because books were cheaper and faster to produce", "literacy grew because printed books were cheaper"],
        partial: &["there were more books", "printing was faster", "books were made by machines"],
        wrong: &["people started using computers", "it made paper", "kings wrote more letters"],
    },
    Topic {
        domain: "history",
        context: "The Roman aqueducts carried water from distant springs into cities. They used a slight downward slope so gravity moved the water. Clean water supported baths, fountains and a growing population.",
        question: "How did aqueducts move water without pumps?",
        fc: "Explains that a gentle slope let gravity move the water.",
        pc: "Mentions channels or bridges without gravity.",
        nc: "Says slaves carried the water.",
        full: &["they used a slight slope so gravity moved the water", "gravity pulled the water down a gentle slope into the city", "the channels sloped downward and gravity did the work"],
        partial: &["they used long channels", "water flowed over bridges", "the romans built them carefully"],
        wrong: &["slaves carried buckets", "they used electric pumps", "the water was pushed by wind"],
    },
    Topic {
        domain: "history",
        context: "The Silk Road was a network of trade routes linking China with the Mediterranean. Merchants traded silk, spices and metals. Religions, technologies and diseases also travelled along the routes.",
        question: "Besides goods, what spread along the Silk Road?",
        fc: "Names ideas such as religions or technologies, or diseases.",
        pc: "Names people or traders only.",
        nc: "Names only goods such as silk.",
        full: &["religions and technologies spread along the routes", "ideas like religion and new technology travelled, and also diseases", "diseases and religions moved along the trade routes"],
        partial: &["merchants travelled", "people moved between countries", "traders met each other"],
        wrong: &["only silk", "spices and metals", "nothing else"],
    },
    Topic {
        domain: "physics",
        context: "Objects fall because of gravity. Near the surface of the Earth, gravity accelerates objects at about 9.8 metres per second squared. Air resistance slows light objects such as feathers.",
        question: "Why does a feather fall more slowly than a stone?",
        fc: "Explains that air resistance slows the light feather more.",
        pc: "Says the feather is lighter without air resistance.",
        nc: "Says gravity does not pull feathers.",
        full: &["air resistance slows the light feather more than the stone", "the feather is slowed by air resistance while gravity pulls both", "air pushes against the feather so it falls more slowly"],
        partial: &["the feather is lighter", "feathers are soft", "the stone is heavier"],
        wrong: &["gravity does not pull feathers", "feathers fly", "stones are magnetic"],
    },
    Topic {
        domain: "physics",
        context: "Sound is a vibration that travels through a medium such as air or water. It cannot travel through a vacuum because there are no particles to vibrate. Sound moves faster in solids than in gases.",
        question: "Why can astronauts not hear each other in space without radios?",
        fc: "Explains that space is a vacuum with no particles to carry vibrations.",
        pc: "Says space is empty without explaining vibrations.",
        nc: "Says helmets block the sound.",
        full: &["space is a vacuum so there are no particles to carry the vibration", "sound needs a medium and space has no air particles", "there is no air in space to vibrate so sound cannot travel"],
        partial: &["space is empty", "there is no air", "it is too quiet in space"],
        wrong: &["helmets block the sound", "it is too cold", "astronauts are too far apart"],
    },
    Topic {
        domain: "physics",
        context: "Metals conduct electricity because they have free electrons. When a voltage is applied, the electrons drift through the metal and form a current. Plastic and rubber have no free electrons and act as insulators.",
        question: "Why are electric wires covered with plastic?",
        fc: "Explains that plastic is an insulator without free electrons.",
        pc: "Says plastic is safe without explaining insulation.",
        nc: "Says plastic makes electricity faster.",
        full: &["plastic is an insulator because it has no free electrons", "the plastic insulates the wire so current cannot flow into you", "plastic has no free electrons so it does not conduct electricity"],
        partial: &["so it is safe", "plastic protects you", "to stop shocks"],
        wrong: &["plastic makes electricity faster", "it looks nicer", "plastic keeps the wire warm"],
    },
];

const FILLERS: &[&str] = &["i think", "basically", "well", "so", "in my opinion", "because", "actually", "probably"];
const EXTRAS: &[&str] = &[
    "this is what we learned in class",
    "that is the main reason",
    "it happens every time",
    "the book says this too",
    "this is important",
];

fn answer(rng: &mut SeededRng, t: &Topic, label: u8, verbose: bool) -> String {
    let pool = match label {
        2 => t.full,
        1 => t.partial,
        _ => t.wrong,
    };
    let mut parts: Vec<String> = Vec::new();
    if rng.random_bool(if verbose { 0.7 } else { 0.3 }) {
        parts.push(FILLERS.choose(rng).unwrap().to_string());
    }
    parts.push(pool.choose(rng).unwrap().to_string());
    if label == 2 && rng.random_bool(0.4) {
        parts.push(format!("and {}", t.partial.choose(rng).unwrap()));
    }
    let extra = if verbose { 0.8 } else { 0.2 };
    while rng.random_bool(extra) && parts.len() < 6 {
        parts.push(EXTRAS.choose(rng).unwrap().to_string());
    }
    let mut text = parts.join(", ");
    if let Some(first) = text.get(..1) {
        text = first.to_uppercase() + &text[1..];
    }
    text + "."
}

fn corpus(name: &str, seed: u64, n: usize, verbose: bool) -> Corpus {
    let mut rng = rng::from_seed(seed);
    let datapoints = (0..n)
        .map(|i| {
            let t = &TOPICS[rng.random_range(0..TOPICS.len())];
            let label = if verbose {
                [0, 1, 1, 2, 2, 2][rng.random_range(0..6)]
            } else {
                (i % 3) as u8
            };
            DataPoint {
                id: format!("{name}-{i:03}"),
                domain: t.domain.to_string(),
                context: t.context.to_string(),
                question: t.question.to_string(),
                rubric_fc: t.fc.to_string(),
                rubric_pc: t.pc.to_string(),
                rubric_nc: t.nc.to_string(),
                answer: answer(&mut rng, t, label, verbose),
                label,
                extra: Default::default(),
            }
        })
        .collect();
    Corpus {
        name: name.to_string(),
        datapoints,
    }
}

fn hashed_embedding(text: &str) -> Vec<f64> {
    let mut v = vec![0.0; DIM];
    for tok in tokenize(text) {
        let h = Sha256::digest(tok.as_bytes());
        let idx = u16::from_le_bytes([h[0], h[1]]) as usize % DIM;
        v[idx] += if h[2] & 1 == 0 { 1.0 } else { -1.0 };
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

fn embeddings(c: &Corpus) -> String {
    let mut out = format!("# model=hashed-bag-of-words dim={DIM} pooling=sum normalized=true\n");
    for d in &c.datapoints {
        for (field, text) in [
            ("context", &d.context),
            ("question", &d.question),
            ("answer", &d.answer),
            ("rubric_fc", &d.rubric_fc),
        ] {
            let row = serde_json::json!({"id": d.id, "field": field, "vector": hashed_embedding(text)});
            out += &row.to_string();
            out.push('\n');
        }
    }
    out
}

fn texts(seed: u64) -> String {
    let mut rng = rng::from_seed(seed);
    let mut out = String::new();
    for doc in 0..6 {
        let n = rng.random_range(40..160);
        let body: Vec<&str> = (0..n)
            .map(|_| {
                let t = &TOPICS[rng.random_range(0..TOPICS.len())];
                *[t.context, t.fc, t.pc, t.question].choose(&mut rng).unwrap()
            })
            .collect();
        let row = serde_json::json!({"id": format!("doc-{doc}"), "text": body.join(" ")});
        out += &row.to_string();
        out.push('\n');
    }
    out
}

fn series(seed: u64, base: f64, slope: f64) -> String {
    let mut rng = rng::from_seed(seed);
    let mut out = String::from("step,accuracy\n");
    for i in 1..=30 {
        let acc: f64 = base + slope * i as f64 + rng.random_range(-0.015..0.015);
        let _ = writeln!(out, "{},{:.4}", i * 187, acc.clamp(0.0, 1.0));
    }
    out
}

fn pairs(seed: u64) -> String {
    let mut rng = rng::from_seed(seed);
    let mut out = String::from("id,true,pred\n");
    for i in 0..90 {
        let t: u8 = [0, 1, 1, 2, 2, 2][rng.random_range(0..6)];
        let p = if rng.random_bool(0.7) { t } else { rng.random_range(0..3) };
        let _ = writeln!(out, "a{i:03},{t},{p}");
    }
    out
}

fn write(dir: &Path, name: &str, text: &str) {
    fs::write(dir.join(name), text).unwrap_or_else(|e| panic!("writing {name}: {e}"));
}

fn main() {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("demo"));
    fs::create_dir_all(&dir).unwrap();

    let reference = corpus("ref", 1, 60, false);
    let candidates = corpus("cand", 2, 160, true);
    let jsonl = |c: &Corpus| {
        let mut buf = Vec::new();
        dtfsel_core::corpus::write_corpus(c, &mut buf).unwrap();
        String::from_utf8(buf).unwrap()
    };
    write(&dir, "reference.jsonl", &jsonl(&reference));
    write(&dir, "candidates.jsonl", &jsonl(&candidates));
    write(&dir, "reference_embeddings.jsonl", &embeddings(&reference));
    write(&dir, "candidate_embeddings.jsonl", &embeddings(&candidates));
    write(&dir, "texts.jsonl", &texts(3));
    write(&dir, "series_a.csv", &series(4, 0.62, 0.004));
    write(&dir, "series_b.csv", &series(5, 0.61, 0.0035));
    write(&dir, "pairs.csv", &pairs(6));
    println!("demo data written to {}", dir.display());
}
