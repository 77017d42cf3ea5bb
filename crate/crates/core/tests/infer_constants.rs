mod support;

use proptest::prelude::*;
use support::*;

#[test]
fn length_constraint_of_the_decimal_prefix() {
    positive_length_fixture().unwrap();
}

#[test]
fn fifty_random_symbolic_regexes() {
    let line = infer_suite(50).unwrap();
    eprintln!("{line}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inference_is_complete_and_encoding_sound(seed in 1000u64..1_000_000) {
        let mut u = Universe::new(b"a1.", 5);
        let p = random_symbolic(seed);
        if let Some(ex) = examples_for(&p, seed, &mut u) {
            let r = check_infer(&p, &ex, &mut u);
            prop_assert!(r.is_ok(), "{:?}", r);
        }
    }
}
