use std::collections::{BTreeMap, BTreeSet};

use codemix::corpus::{split, split_sizes, Dataset, LabeledExample, SplitSpec};
use proptest::prelude::*;

#[test]
fn reference_split_sizes() {
    for (n, expected) in [
        (3879, (2715, 582, 582)),
        (4578, (3204, 687, 687)),
        (4864, (3404, 730, 730)),
        (151311, (105917, 22697, 22697)),
        (10, (7, 1, 2)),
    ] {
        assert_eq!(split_sizes(n, 0.7), expected, "n = {n}");
    }
}

fn dataset(labels: &[u8]) -> Dataset {
    let examples =
        labels.iter().enumerate().map(|(i, l)| LabeledExample::new(format!("id{i}"), "w", format!("L{l}"))).collect();
    Dataset::new("p", examples).unwrap()
}

fn ids(d: &Dataset) -> BTreeSet<String> {
    d.examples.iter().map(|e| e.id.clone()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn size_rule_for_every_n(n in 3usize..200_000) {
        let (t, v, s) = split_sizes(n, 0.7);
        prop_assert_eq!(t + v + s, n);
        prop_assert_eq!(t, (7 * n) / 10);
        prop_assert_eq!(v, (n - t) / 2);
    }

    #[test]
    fn partition_is_exact(labels in prop::collection::vec(0u8..4, 3..300), seed in any::<u64>(), stratified in any::<bool>()) {
        let d = dataset(&labels);
        let spec = SplitSpec { seed, stratified, ..SplitSpec::default() };
        let s = match split(&d, &spec) {
            Ok(s) => s,
            Err(codemix::corpus::CorpusError::StratumTooSmall { count, .. }) => {
                prop_assert!(stratified && count < 3);
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let (tr, va, te) = (ids(&s.train), ids(&s.val), ids(&s.test));
        prop_assert!(tr.is_disjoint(&va) && tr.is_disjoint(&te) && va.is_disjoint(&te));
        let all: BTreeSet<String> = tr.union(&va).chain(te.iter()).cloned().collect();
        prop_assert_eq!(all, ids(&d));
        prop_assert_eq!((s.train.len(), s.val.len(), s.test.len()), split_sizes(d.len(), 0.7));

        // re-running with the same seed, or with the examples in another order, changes nothing
        let again = split(&d, &spec).unwrap();
        prop_assert_eq!(ids(&again.train), tr.clone());
        let mut reversed = d.clone();
        reversed.examples.reverse();
        let r = split(&reversed, &spec).unwrap();
        prop_assert_eq!(ids(&r.train), tr);
        prop_assert_eq!(ids(&r.test), te);

        if stratified {
            let mut per_class: BTreeMap<&str, [usize; 4]> = BTreeMap::new();
            for e in &d.examples { per_class.entry(e.label.as_str()).or_default()[0] += 1; }
            for (part, slot) in [(&s.train, 1), (&s.val, 2), (&s.test, 3)] {
                for e in &part.examples { per_class.get_mut(e.label.as_str()).unwrap()[slot] += 1; }
            }
            for counts in per_class.values() {
                let n = counts[0] as f64;
                let ideal_train = 0.7 * n;
                let ideal_val = 0.15 * n;
                prop_assert!((counts[1] as f64 - ideal_train).abs() <= 1.0 + 1e-9, "{:?}", counts);
                prop_assert!((counts[2] as f64 - ideal_val).abs() <= 1.0 + 1e-9, "{:?}", counts);
                prop_assert!((counts[3] as f64 - ideal_val).abs() <= 1.0 + 1e-9, "{:?}", counts);
            }
        }
    }
}
