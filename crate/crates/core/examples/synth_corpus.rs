//! Writes the synthetic fixture corpus shipped in `fixtures/`.
//!
//! The inventories are a reconstruction (broad phonemic inventories of
//! Japanese, Korean and Mandarin, with the four Mandarin tones as tone
//! tokens); the names and attributes are synthetic. Attributes share a
//! latent "strength" that also nudges name length and the odds of a few
//! tokens, so the pipeline has a learnable signal to find.
//!
//! Usage: `cargo run -p threatskew --example synth_corpus -- [OUT_DIR] [PER_LANGUAGE]`

use std::fmt::Write as _;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Language {
    code: &'static str,
    consonants: &'static [&'static str],
    /// Consonants favoured by strong names.
    strong: &'static [&'static str],
    vowels: &'static [&'static str],
    codas: &'static [&'static str],
    tones: &'static [&'static str],
    /// Whether size attributes track name length in this language.
    size_tracks_length: bool,
}

const LANGUAGES: [Language; 3] = [
    Language {
        code: "ja",
        consonants: &[
            "k", "g", "s", "z", "t", "d", "n", "h", "b", "p", "m", "j", "ɾ", "w", "tɕ", "ɕ", "ts",
            "dz", "ɸ", "ç",
        ],
        strong: &["g", "z", "d", "b", "ɾ"],
        vowels: &["a", "i", "u", "e", "o"],
        codas: &["ɴ", "Q", "ː"],
        tones: &[],
        size_tracks_length: true,
    },
    Language {
        code: "zh",
        consonants: &[
            "p", "pʰ", "m", "f", "t", "tʰ", "n", "l", "k", "kʰ", "x", "tɕ", "tɕʰ", "ɕ", "ʈʂ",
            "ʈʂʰ", "ʂ", "ʐ", "ts", "tsʰ", "s", "j", "w",
        ],
        strong: &["ʈʂ", "kʰ", "l", "tɕ"],
        vowels: &["a", "o", "ɤ", "e", "i", "u", "y", "ɚ"],
        codas: &["n", "ŋ"],
        tones: &["T:1", "T:2", "T:3", "T:4"],
        size_tracks_length: false,
    },
    Language {
        code: "ko",
        consonants: &[
            "p", "pʰ", "p͈", "t", "tʰ", "t͈", "k", "kʰ", "k͈", "s", "s͈", "tɕ", "tɕʰ", "t͈ɕ", "h", "m",
            "n", "l", "j", "w",
        ],
        strong: &["k͈", "t͈", "tɕʰ", "kʰ"],
        vowels: &["a", "e", "i", "o", "u", "ɯ", "ʌ"],
        codas: &["ŋ", "l", "k̚", "p̚"],
        tones: &[],
        size_tracks_length: true,
    },
];

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn pick<'a>(rng: &mut ChaCha8Rng, xs: &'a [&'static str]) -> &'a str {
    xs.choose(rng).expect("non-empty")
}

fn name(rng: &mut ChaCha8Rng, lang: &Language, strength: f64) -> Vec<String> {
    let syllables = (2.6 + 0.6 * strength + 0.8 * normal(rng))
        .round()
        .clamp(1.0, 6.0) as usize;
    let p_strong = (0.25 + 0.12 * strength).clamp(0.05, 0.6);
    let mut tokens = Vec::new();
    for _ in 0..syllables {
        if rng.gen_bool(0.85) {
            let c = if rng.gen_bool(p_strong) {
                pick(rng, lang.strong)
            } else {
                pick(rng, lang.consonants)
            };
            tokens.push(c.to_string());
        }
        tokens.push(pick(rng, lang.vowels).to_string());
        if rng.gen_bool(0.25) {
            tokens.push(pick(rng, lang.codas).to_string());
        }
        if !lang.tones.is_empty() {
            let p_falling = (0.3 + 0.1 * strength).clamp(0.05, 0.7);
            let tone = if rng.gen_bool(p_falling) {
                "T:4"
            } else {
                pick(rng, &lang.tones[..3])
            };
            tokens.push(tone.to_string());
        }
    }
    tokens
}

fn main() {
    let mut args = std::env::args().skip(1);
    let out = PathBuf::from(args.next().unwrap_or_else(|| "fixtures".into()));
    let per_language: usize = args.next().map_or(898, |s| s.parse().expect("count"));
    std::fs::create_dir_all(&out).expect("create output dir");

    let mut inventory = String::from("language,token,is_tone\n");
    for lang in &LANGUAGES {
        let mut seen = Vec::new();
        for t in lang.consonants.iter().chain(lang.vowels).chain(lang.codas) {
            if !seen.contains(t) {
                seen.push(*t);
                writeln!(inventory, "{},{},0", lang.code, t).unwrap();
            }
        }
        for t in lang.tones {
            writeln!(inventory, "{},{},1", lang.code, t).unwrap();
        }
    }

    let mut corpus = String::from("id,language,name,transcription,attack,defend,height,weight\n");
    let mut rng = ChaCha8Rng::seed_from_u64(898);
    for lang in &LANGUAGES {
        for i in 0..per_language {
            let strength = normal(&mut rng);
            let tokens = name(&mut rng, lang, strength);
            let size_latent = if lang.size_tracks_length {
                0.5 * strength + 0.87 * normal(&mut rng)
            } else {
                normal(&mut rng)
            };
            let attack = (75.0 + 22.0 * strength + 12.0 * normal(&mut rng))
                .round()
                .max(5.0);
            let defend = (70.0 + 18.0 * strength + 14.0 * normal(&mut rng))
                .round()
                .max(5.0);
            let height =
                (1.1 * (0.45 * size_latent + 0.25 * normal(&mut rng)).exp() * 10.0).round() / 10.0;
            let weight =
                (30.0 * (0.9 * size_latent + 0.4 * normal(&mut rng)).exp() * 10.0).round() / 10.0;
            let weight = if i % 97 == 13 {
                String::new()
            } else {
                weight.to_string()
            };
            writeln!(
                corpus,
                "{code}-{i:04},{code},{code}{i:04},{tr},{attack},{defend},{height},{weight}",
                code = lang.code,
                tr = tokens.join(" "),
            )
            .unwrap();
        }
    }

    std::fs::write(out.join("inventory.csv"), inventory).expect("write inventory");
    std::fs::write(out.join("corpus.csv"), corpus).expect("write corpus");
    eprintln!(
        "wrote {} names per language to {}",
        per_language,
        out.display()
    );
}
