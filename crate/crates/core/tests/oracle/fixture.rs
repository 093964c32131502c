//! Five hand-written datapoints covering clipping, apostrophes, an answer
//! identical to its question, a one-token answer and a zero embedding.

use dtfsel_core::corpus::{parse_corpus, Corpus};
use dtfsel_core::embedding::{EmbeddedField, EmbeddingTable};
use dtfsel_core::lexical::{PrecomputedTagger, TagRecord};

pub struct Entry {
    pub id: &'static str,
    pub domain: &'static str,
    pub label: u8,
    pub context: &'static str,
    pub question: &'static str,
    pub rubric_fc: &'static str,
    pub rubric_pc: &'static str,
    pub rubric_nc: &'static str,
    pub answer: &'static str,
    pub tags: &'static [&'static str],
}

pub const ENTRIES: [Entry; 5] = [
    Entry {
        id: "bio-1",
        domain: "biology",
        label: 2,
        context: "Plants make food through photosynthesis. Photosynthesis uses light, water and \
                  carbon dioxide. The leaves contain chlorophyll, which absorbs light.",
        question: "How do plants make their food?",
        rubric_fc: "The answer says plants make food by photosynthesis using light.",
        rubric_pc: "Mentions light or leaves but not photosynthesis.",
        rubric_nc: "Says plants eat soil or gives no process.",
        answer: "Plants make food by photosynthesis, using light, water and carbon dioxide in \
                 the leaves.",
        tags: &[
            "NNS", "VBP", "NN", "IN", "NN", "VBG", "NN", "NN", "CC", "NN", "NN", "IN", "DT",
            "NNS",
        ],
    },
    Entry {
        id: "bio-2",
        domain: "biology",
        label: 1,
        context: "Leaves are green because of chlorophyll. The leaves make food for the plant.",
        question: "Why are leaves green?",
        rubric_fc: "Chlorophyll makes the leaves green.",
        rubric_pc: "",
        rubric_nc: "The leaves are painted.",
        answer: "The leaves, the leaves make food food.",
        tags: &["DT", "NNS", "DT", "NNS", "VBP", "NN", "NN"],
    },
    Entry {
        id: "hist-1",
        domain: "history",
        label: 0,
        context: "The Roman Empire was founded in 27 BC. Augustus was its first emperor.",
        question: "Who was the first Roman emperor?",
        rubric_fc: "Augustus was the first emperor.",
        rubric_pc: "Names a Roman leader.",
        rubric_nc: "Julius Caesar was the first emperor.",
        answer: "Who was the first Roman emperor?",
        tags: &["WP", "VBD", "DT", "JJ", "JJ", "NN"],
    },
    Entry {
        id: "phys-1",
        domain: "physics",
        label: 2,
        context: "Objects fall because of gravity. Earth's gravity pulls at 9.8 m/s² near the \
                  surface.",
        question: "What makes objects fall?",
        rubric_fc: "Gravity pulls objects toward Earth.",
        rubric_pc: "Mentions a force.",
        rubric_nc: "Objects fall because they're heavy.",
        answer: "Gravity.",
        tags: &["NN"],
    },
    Entry {
        id: "phys-2",
        domain: "physics",
        label: 1,
        context: "CO2 traps heat in the atmosphere. It’s called the greenhouse effect, and it \
                  warms Earth's climate.",
        question: "What does CO2 do to the climate?",
        rubric_fc: "CO2 traps heat and warms the climate.",
        rubric_pc: "Says it changes the weather.",
        rubric_nc: "CO2 cools the climate.",
        answer: "It’s trapping heat, so the climate gets warmer and warmer.",
        tags: &["PRP", "VBG", "NN", "RB", "DT", "NN", "VBZ", "JJR", "CC", "JJR"],
    },
];

pub const EMB_DIM: usize = 6;

/// Deterministic synthetic embedding; `hist-1`'s question is the zero vector.
pub fn embedding(doc: usize, field: usize) -> Vec<f64> {
    if doc == 2 && field == 1 {
        return vec![0.0; EMB_DIM];
    }
    (0..EMB_DIM)
        .map(|j| (1.0 + 0.7 * j as f64 + 1.3 * field as f64 + 2.1 * doc as f64).sin())
        .collect()
}

pub const FIELDS: [EmbeddedField; 4] = [
    EmbeddedField::Context,
    EmbeddedField::Question,
    EmbeddedField::Answer,
    EmbeddedField::RubricFc,
];

pub fn corpus_jsonl() -> String {
    ENTRIES
        .iter()
        .map(|e| {
            serde_json::json!({
                "id": e.id, "domain": e.domain, "label": e.label,
                "context": e.context, "question": e.question,
                "rubric_fc": e.rubric_fc, "rubric_pc": e.rubric_pc,
                "rubric_nc": e.rubric_nc, "answer": e.answer,
            })
            .to_string()
                + "\n"
        })
        .collect()
}

pub fn corpus() -> Corpus {
    parse_corpus("fixture", &corpus_jsonl(), true).unwrap().0
}

pub fn embeddings_jsonl() -> String {
    let mut out = String::from("# synthetic fixture vectors\n");
    for (d, e) in ENTRIES.iter().enumerate() {
        for (f, field) in FIELDS.iter().enumerate() {
            out += &serde_json::json!({"id": e.id, "field": field.as_str(), "vector": embedding(d, f)})
                .to_string();
            out.push('\n');
        }
    }
    out
}

pub fn embeddings() -> EmbeddingTable {
    let mut t = EmbeddingTable::new(EMB_DIM);
    for (d, e) in ENTRIES.iter().enumerate() {
        for (f, field) in FIELDS.iter().enumerate() {
            t.insert(e.id, *field, embedding(d, f)).unwrap();
        }
    }
    t
}

pub fn tag_records() -> Vec<TagRecord> {
    ENTRIES
        .iter()
        .map(|e| TagRecord {
            id: e.id.into(),
            field: "answer".into(),
            tags: e.tags.iter().map(|t| t.to_string()).collect(),
        })
        .collect()
}

pub fn tags_jsonl() -> String {
    tag_records()
        .iter()
        .map(|r| serde_json::to_string(r).unwrap() + "\n")
        .collect()
}

pub fn tagger() -> PrecomputedTagger {
    PrecomputedTagger::from_records(tag_records()).unwrap()
}

/// Every context, question and answer, one document each.
pub fn idf_docs() -> Vec<&'static str> {
    ENTRIES
        .iter()
        .flat_map(|e| [e.context, e.question, e.answer])
        .collect()
}

pub fn oracle_rows() -> Vec<[f64; super::DIM]> {
    let docs = idf_docs();
    ENTRIES
        .iter()
        .enumerate()
        .map(|(d, e)| {
            let emb: Vec<Vec<f64>> = (0..4).map(|f| embedding(d, f)).collect();
            super::features(
                &super::Doc {
                    context: e.context,
                    question: e.question,
                    rubric_fc: e.rubric_fc,
                    rubric_nc: e.rubric_nc,
                    answer: e.answer,
                    tags: e.tags,
                    e_ctx: &emb[0],
                    e_q: &emb[1],
                    e_ans: &emb[2],
                    e_fc: &emb[3],
                },
                &docs,
            )
        })
        .collect()
}
