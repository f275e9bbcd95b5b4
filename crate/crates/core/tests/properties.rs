use std::sync::Arc;

use proptest::prelude::*;

use antibracket::algebra::{random_element, random_endo, seeded_rng, Algebra, Parity, Signature};
use antibracket::antibrackets::{hierarchy, inversion_check, jacobi_check, phi_direct, Method};
use antibracket::exec::{set_strategy, Strategy};
use antibracket::multiop::Multiplications;
use antibracket::universal::solve_coefficients;

fn alg(p: usize, q: usize, d: usize) -> Arc<Algebra> {
    Algebra::new(Signature::commutative(p, q, d)).unwrap()
}

fn parity(bit: bool) -> Parity {
    if bit {
        Parity::Odd
    } else {
        Parity::Even
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn brackets_are_supersymmetric(seed in 0u64..1000, fp in any::<bool>(), bits in prop::collection::vec(any::<bool>(), 3)) {
        let a = alg(1, 2, 3);
        let f = random_endo(&a, seed, parity(fp));
        let mut rng = seeded_rng(seed + 1);
        let args: Vec<_> = bits.iter().map(|&b| random_element(&a, &mut rng, parity(b))).collect();
        let base = phi_direct(&f, 3, &args).unwrap();
        for i in 0..2 {
            let mut swapped = args.clone();
            swapped.swap(i, i + 1);
            let sign = if bits[i] && bits[i + 1] { -1 } else { 1 };
            let other = phi_direct(&f, 3, &swapped).unwrap();
            prop_assert_eq!(other.scale(&sign.into()), base.clone());
        }
    }

    #[test]
    fn constructions_agree(seed in 0u64..1000, fp in any::<bool>()) {
        let a = alg(1, 2, 3);
        let f = random_endo(&a, seed, parity(fp));
        let hs: Vec<_> = Method::ALL.iter().map(|&m| hierarchy(&f, 4, m).unwrap()).collect();
        for n in 1..=4 {
            for h in &hs[1..] {
                prop_assert_eq!(h.get(n), hs[0].get(n));
            }
        }
    }

    #[test]
    fn inversion_holds(seed in 0u64..1000, fp in any::<bool>(), bits in prop::collection::vec(any::<bool>(), 1..=4)) {
        let a = alg(1, 2, 3);
        let f = random_endo(&a, seed, parity(fp));
        let mut rng = seeded_rng(seed ^ 0x5a);
        let args: Vec<_> = bits.iter().map(|&b| random_element(&a, &mut rng, parity(b))).collect();
        prop_assert!(inversion_check(&f, args.len(), &args).unwrap());
    }

    #[test]
    fn jacobi_holds(seed in 0u64..1000, fp in any::<bool>(), gp in any::<bool>()) {
        let a = alg(1, 1, 3);
        let f = random_endo(&a, seed, parity(fp));
        let g = random_endo(&a, seed + 7, parity(gp));
        for n in 1..=3 {
            prop_assert!(jacobi_check(&f, &g, n).unwrap());
        }
    }
}

#[test]
fn standard_form_reproduces_brackets() {
    let a = alg(1, 2, 4);
    let mults = Multiplications::new(&a);
    for (seed, p) in [(3, Parity::Odd), (4, Parity::Even)] {
        let f = random_endo(&a, seed, p);
        let h = hierarchy(&f, 6, Method::Akman).unwrap();
        for n in 1..=5 {
            let c = solve_coefficients(n).unwrap();
            assert_eq!(&c.apply(&f, &mults).unwrap(), h.get(n + 1), "seed {seed}, n = {n}");
        }
    }
}

#[test]
fn strategies_give_identical_tables() {
    let a = alg(2, 1, 4);
    let f = random_endo(&a, 9, Parity::Odd);
    set_strategy(Some(Strategy::Sequential));
    let seq = hierarchy(&f, 4, Method::Corollary).unwrap();
    set_strategy(Some(Strategy::Parallel));
    let par = hierarchy(&f, 4, Method::Corollary).unwrap();
    set_strategy(None);
    for n in 1..=4 {
        assert_eq!(seq.get(n), par.get(n));
        assert_eq!(seq.get(n).dump_lines(), par.get(n).dump_lines());
    }
}
