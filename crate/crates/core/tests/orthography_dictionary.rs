mod common;

use std::collections::BTreeSet;

use approx::assert_abs_diff_eq;
use common::*;
use diachron::dictionary::{
    crossover_period, crossovers_csv, dictionary_crossovers, dictionary_to_json, load_dictionary, replacement_series,
    sample_dictionary, CrossoverRule,
};
use diachron::lexicon::Level;
use diachron::orthography::{
    circumflex_frequency, default_exclusions, detect_variant_pairs, ending_ratio_in, CircumflexOp, EndingRatioOp,
    PairClass, CIRCUMFLEX_LETTERS,
};
use diachron::{Error, PerPeriod};

fn pair_forms(words: &[(&str, u64)], class: PairClass) -> Vec<(String, String)> {
    detect_variant_pairs(&vocab(1930, words), class, &default_exclusions())
        .into_iter()
        .map(|p| (p.soft_form, p.hard_form))
        .collect()
}

#[test]
fn variant_pair_detection() {
    assert_eq!(pair_forms(&[("kitab", 1), ("kitap", 1)], PairClass::BP), [("kitab".into(), "kitap".into())]);
    assert!(pair_forms(&[("kitab", 1)], PairClass::BP).is_empty());
    assert_eq!(
        pair_forms(&[("et", 4), ("ed", 2), ("ahmed", 1), ("ahmet", 1)], PairClass::DT),
        [("ahmed".into(), "ahmet".into())]
    );
    // the hard form alone, or a one-letter word, never starts a pair
    assert!(pair_forms(&[("p", 1), ("b", 1), ("kitap", 1)], PairClass::BP).is_empty());
    let none = detect_variant_pairs(&vocab(1930, &[("ed", 1), ("et", 1)]), PairClass::DT, &BTreeSet::new());
    assert_eq!(none.len(), 1);
}

#[test]
fn ending_ratio_arithmetic() {
    let v = vocab(1930, &[("kitab", 10), ("kitap", 90)]);
    let pairs = detect_variant_pairs(&v, PairClass::BP, &default_exclusions());
    let r = ending_ratio_in(&v, &pairs);
    assert_abs_diff_eq!(r.ratio.unwrap(), 10.0 / 90.0, epsilon = 1e-12);
    assert_eq!(r.type_ratio, Some(1.0));

    let late = vocab(1980, &[("kitap", 5)]);
    assert_eq!(ending_ratio_in(&late, &pairs).ratio, Some(0.0));
    assert_eq!(ending_ratio_in(&vocab(1990, &[("x", 1)]), &pairs).ratio, None);
}

#[test]
fn ending_ratio_op_needs_pairs() {
    let node = tree(vec![leaf(1930, &["kitab kitab kalem"])]);
    let err = node.perform(&EndingRatioOp::new(PairClass::BP)).unwrap_err();
    assert!(matches!(&err, Error::Validation(m) if m.contains("b-p")), "{err:?}");
}

#[test]
fn ending_ratio_ignores_duplication() {
    let texts = ["kitab mektub kitap", "ahmet ahmed hesap hesab hesab"];
    let doubled: Vec<&str> = texts.iter().chain(texts.iter()).copied().collect();
    for class in [PairClass::BP, PairClass::DT] {
        let once = tree(vec![leaf(1930, &texts)]).perform(&EndingRatioOp::new(class)).unwrap();
        let twice = tree(vec![leaf(1930, &doubled)]).perform(&EndingRatioOp::new(class)).unwrap();
        assert_eq!(once.series.entries[0].value.ratio, twice.series.entries[0].value.ratio);
        assert_eq!(twice.series.entries[0].value.soft_total, 2 * once.series.entries[0].value.soft_total);
    }
}

#[test]
fn fixture_ratios_match_golden_and_decline() {
    let node = fixture_tree();
    for (class, file) in [(PairClass::BP, "ortho_bp.csv"), (PairClass::DT, "ortho_dt.csv")] {
        let report = node.perform(&EndingRatioOp::new(class)).unwrap();
        assert_eq!(report.to_csv(), golden(file));
        let ratios: Vec<f64> = report.series.values().map(|r| r.ratio.unwrap()).collect();
        assert!(ratios.windows(2).all(|w| w[1] < w[0]), "{ratios:?}");
        assert!(report.pairs.iter().all(|p| p.soft_form != "ed" && p.hard_form != "et"));
    }
    let lemma_level = EndingRatioOp { level: Level::Lemma, ..EndingRatioOp::new(PairClass::BP) };
    let lemma = node.perform(&lemma_level).unwrap();
    assert!(lemma.pairs.iter().any(|p| p.soft_form == "kitab"));
}

#[test]
fn circumflex_counts() {
    let mut v = vocab(1930, &[("kâğıt", 3)]);
    v.token_total = 1_000_000;
    let c = circumflex_frequency(&v, &CIRCUMFLEX_LETTERS);
    assert_eq!((c.raw, c.per_million), (3, 3.0));
    assert_eq!(circumflex_frequency(&vocab(1930, &[("kitap", 9)]), &CIRCUMFLEX_LETTERS).raw, 0);
    assert_eq!(circumflex_frequency(&vocab(1930, &[("abidevî", 2)]), &CIRCUMFLEX_LETTERS).raw, 2);

    let texts = ["hikâye lâzım kâtip", "ilmî"];
    let doubled: Vec<&str> = texts.iter().chain(texts.iter()).copied().collect();
    let once = tree(vec![leaf(1930, &texts)]).perform(&CircumflexOp::default()).unwrap();
    let twice = tree(vec![leaf(1930, &doubled)]).perform(&CircumflexOp::default()).unwrap();
    assert_eq!(once.entries[0].value.raw, 4);
    assert_eq!(twice.entries[0].value.raw, 8);
    assert_abs_diff_eq!(once.entries[0].value.per_million, twice.entries[0].value.per_million, epsilon = 1e-9);

    let fixture = fixture_tree().perform(&CircumflexOp::default()).unwrap();
    let per_million: Vec<f64> = fixture.values().map(|c| c.per_million).collect();
    assert!(per_million[0] > per_million[1]);
}

#[test]
fn dictionary_loading() {
    let one = load_dictionary(r#"[{"modern":"yıl","old":["sene"]}]"#).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].old_forms, ["sene"]);
    assert!(one[0].senses.is_none());

    let dup = load_dictionary(r#"[{"modern":"yıl","old":["sene"]},{"modern":"yıl","old":["sene"]}]"#);
    assert!(matches!(dup, Err(Error::Validation(_))));
    assert!(matches!(load_dictionary(r#"[{"modern":"","old":["sene"]}]"#), Err(Error::Validation(_))));
    assert!(matches!(load_dictionary(r#"[{"modern":"yıl","old":[]}]"#), Err(Error::Validation(_))));
    assert!(matches!(load_dictionary("[{"), Err(Error::Json { .. })));

    let sample = sample_dictionary();
    assert_eq!(sample.len(), 12);
    assert!(sample.iter().any(|e| e.modern == "bakan" && e.old_forms == ["vekil"]));
    assert_eq!(load_dictionary(&dictionary_to_json(&sample)).unwrap(), sample);
}

#[test]
fn crossover_rules() {
    let node = tree(vec![leaf(1930, &["sene sene yıl"]), leaf(1940, &["sene yıl yıl"]), leaf(1950, &["yıl"])]);
    let c = |m: &str, o: &str, rule| crossover_period(&node, m, o, None, rule).unwrap();
    assert_eq!(c("yıl", "sene", CrossoverRule::Sustained), Some(decade(1940)));
    assert_eq!(c("sene", "yıl", CrossoverRule::Sustained), None);
    assert_eq!(c("sene", "yıl", CrossoverRule::FirstTouch), Some(decade(1930)));
    assert_eq!(c("bakan", "vekil", CrossoverRule::Sustained), None);
    assert_eq!(c("yıl", "vekil", CrossoverRule::Sustained), Some(decade(1930)));

    let flip = tree(vec![leaf(1930, &["b a a"]), leaf(1940, &["a b b"]), leaf(1950, &["a a b"])]);
    assert_eq!(crossover_period(&flip, "b", "a", None, CrossoverRule::Sustained).unwrap(), None);
    assert_eq!(crossover_period(&flip, "b", "a", None, CrossoverRule::FirstTouch).unwrap(), Some(decade(1940)));

    let absent = replacement_series(&node, "bakan", "vekil", None).unwrap();
    assert!(absent.modern_series.values().chain(absent.old_series.values()).all(|&v| v == 0.0));
}

#[test]
fn fixture_crossovers_match_golden() {
    let node = fixture_tree();
    let rows = dictionary_crossovers(&node, &sample_dictionary(), None, CrossoverRule::Sustained).unwrap();
    assert_eq!(crossovers_csv(&rows), golden("dict_crossover.csv"));

    let late = node.leaves()[1].period();
    assert_eq!(crossover_period(&node, "yıl", "sene", None, CrossoverRule::Sustained).unwrap(), Some(late));

    let s = replacement_series(&node, "gerek", "mucip", None).unwrap();
    let (m, o): (Vec<f64>, Vec<f64>) = (s.modern_series.values().copied().collect(), s.old_series.values().copied().collect());
    assert!(o[0] > m[0] && m[1] > o[1]);
    assert!(m.iter().chain(&o).all(|&v| (0.0..=1.0).contains(&v)));
    // same path as the lexicon frequency query
    let direct = node.perform(&PerPeriod::new(diachron::lexicon::Frequency::new("gerek", true))).unwrap();
    assert_eq!(direct, s.modern_series);
}
