use super::*;
use crate::ring::RingSpec;

fn ring(s: &str) -> Ring {
    Ring::build(&s.parse::<RingSpec>().unwrap()).unwrap()
}

/// Independent nilpotency oracle: `N^(2n) = 0`.
fn nilpotent_by_powers(m: &MatRing<'_>, x: &Mat) -> bool {
    m.pow(x, 2 * m.ring().n()) == m.zero()
}

#[test]
fn det_trace_examples() {
    let r = ring("Z/3^2");
    let m = r.matrices();
    assert_eq!(m.det(&m.at([4, 1, 0, 7])), r.one());
    assert_eq!(m.det(&m.identity()), r.one());
    assert_eq!(m.trace(&m.identity()), r.at(2));
    let f = ring("Z/3^1");
    assert_eq!(f.matrices().trace(&f.matrices().at([1, 2, 2, 1])), f.at(2));
}

#[test]
fn inverse_examples() {
    let r = ring("Z/3^2");
    let m = r.matrices();
    let a = m.at([4, 1, 0, 7]);
    let inv = m.inverse(&a).unwrap();
    assert_eq!(inv, m.at([7, 8, 0, 4]));
    assert_eq!(m.mul(&a, &inv), m.identity());
    assert_eq!(m.mul(&inv, &a), m.identity());
    assert_eq!(m.inverse(&m.identity()), Ok(m.identity()));
    assert_eq!(m.inverse(&m.at([3, 0, 0, 3])), Err(Error::NotInvertible));
}

#[test]
fn checked_arithmetic_rejects_foreign_matrices() {
    let (r, s) = (ring("Z/3^2"), ring("Z/5^1"));
    let (m, other) = (r.matrices(), s.matrices());
    let x = m.identity();
    let y = other.identity();
    assert_eq!(m.arith(MatOp::Add, &x, Some(&y)), Err(Error::RingMismatch));
    assert_eq!(m.arith(MatOp::Mul, &x, Some(&x)), Ok(x));
    assert_eq!(m.try_scale(s.one(), &x), Err(Error::RingMismatch));
    assert_eq!(m.conj(&x, &y), Err(Error::RingMismatch));
}

#[test]
fn nilpotency_examples() {
    let r = ring("Z/3^2");
    let m = r.matrices();
    let n = m.at([3, 1, 0, 6]);
    assert!(m.is_nilpotent(&n) && nilpotent_by_powers(&m, &n));
    assert!(m.is_nilpotent(&m.zero()));
    assert!(!m.is_nilpotent(&m.identity()));
    let f = ring("Z/3^1");
    let fm = f.matrices();
    assert!(fm.is_nilpotent(&fm.at([0, 1, 0, 0])));
    assert!(fm.is_unipotent(&fm.identity()));
    assert!(fm.is_unipotent(&fm.at([1, 1, 0, 1])));
    // (I + E12)(I + E21) = [[2,1],[1,1]] has trace 0 and is not unipotent
    let prod = fm.mul(&fm.upper(f.one()), &fm.lower(f.one()));
    assert_eq!(prod, fm.at([2, 1, 1, 1]));
    assert!(!fm.is_unipotent(&prod));
}

#[test]
fn nilpotency_criterion_matches_power_oracle() {
    for s in ["Z/3^1", "Z/5^1", "Z/7^1", "Z/3^2", "GF(9)", "GF(3)[u]/u^2"] {
        let r = ring(s);
        let m = r.matrices();
        for x in m.all() {
            assert_eq!(m.is_nilpotent(&x), nilpotent_by_powers(&m, &x), "{s} {x}");
            if m.is_nilpotent(&x) {
                assert!(r.valuation(m.trace(&x)) >= 1 && r.valuation(m.det(&x)) >= 1);
            }
        }
    }
}

#[test]
fn det_one_plus_examples() {
    let r = ring("Z/3^2");
    let m = r.matrices();
    let a = m.at([3, 1, 0, 6]);
    assert_eq!(m.det_one_plus(&a), r.one());
    assert_eq!(m.det(&m.add(&m.identity(), &a)), r.one());
    assert_eq!(m.det_one_plus(&m.zero()), r.one());
    let f = ring("Z/3^1");
    let fm = f.matrices();
    assert_eq!(fm.det_one_plus(&fm.identity()), f.one());
}

#[test]
fn det_one_plus_equals_det_exhaustive() {
    for s in ["Z/3^1", "Z/3^2", "GF(3)[u]/u^2"] {
        let r = ring(s);
        let m = r.matrices();
        for x in m.all() {
            assert_eq!(m.det_one_plus(&x), m.det(&m.add(&m.identity(), &x)));
        }
    }
}

#[test]
fn conjugation_examples() {
    let f = ring("Z/3^1");
    let fm = f.matrices();
    let a = fm.at([0, 0, 1, 0]);
    assert_eq!(fm.conj(&fm.identity(), &a), Ok(a));
    assert_eq!(fm.conj(&fm.upper(f.one()), &a), Ok(fm.at([1, 2, 1, 2])));
    assert_eq!(
        fm.conj_by_u(f.one(), &fm.at([1, 0, 0, 2])),
        fm.at([1, 1, 0, 2])
    );
    assert_eq!(fm.conj_by_u(f.zero(), &a), a);
    let r = ring("Z/3^2");
    let m = r.matrices();
    assert_eq!(
        m.conj_by_l(r.one(), &m.at([1, 3, 0, 2])),
        m.at([7, 3, 5, 5])
    );
    assert_eq!(
        m.conj(&m.at([3, 0, 0, 3]), &m.identity()),
        Err(Error::NotInvertible)
    );
}

#[test]
fn closed_forms_match_generic_conjugation() {
    for s in ["Z/3^1", "Z/3^2", "GF(3)[u]/u^2"] {
        let r = ring(s);
        let m = r.matrices();
        for t in r.elements() {
            let (u, l) = (m.upper(t), m.lower(t));
            for x in m.all() {
                assert_eq!(m.conj_by_u(t, &x), m.conj(&u, &x).unwrap());
                assert_eq!(m.conj_by_l(t, &x), m.conj(&l, &x).unwrap());
            }
        }
    }
}

#[test]
fn diag_word_examples() {
    let r = ring("Z/3^2");
    let m = r.matrices();
    let w = m.diag_factorization(r.one()).unwrap();
    assert_eq!(m.evaluate_word(&w), Ok(m.identity()));
    let w = m.diag_factorization(r.at(2)).unwrap();
    assert_eq!(w.len(), 4);
    assert_eq!(m.evaluate_word(&w), Ok(m.diag(r.at(2), r.at(5))));
    assert_eq!(m.diag_factorization(r.at(3)), Err(Error::NotAUnit(3)));
    let f = ring("GF(5)");
    let fm = f.matrices();
    let w = fm.diag_factorization(f.at(3)).unwrap();
    assert_eq!(fm.evaluate_word(&w), Ok(fm.diag(f.at(3), f.at(2))));
}

#[test]
fn evaluate_word_examples() {
    let f = ring("Z/3^1");
    let fm = f.matrices();
    assert_eq!(
        fm.evaluate_word(&ElementaryWord::default()),
        Ok(fm.identity())
    );
    let w = ElementaryWord(vec![Factor::Upper(f.one()), Factor::Lower(f.one())]);
    assert_eq!(fm.evaluate_word(&w), Ok(fm.at([2, 1, 1, 1])));
    let other = ring("Z/5^1");
    let foreign = ElementaryWord(vec![Factor::Upper(other.one())]);
    assert_eq!(fm.evaluate_word(&foreign), Err(Error::RingMismatch));
}

#[test]
fn factor_examples() {
    let f = ring("Z/3^1");
    let fm = f.matrices();
    assert!(fm.factor_unipotent(&fm.identity()).unwrap().is_empty());
    let w = fm.factor_unipotent(&fm.at([1, 1, 0, 1])).unwrap();
    assert_eq!(w.factors(), &[Factor::Upper(f.one())]);
    assert_eq!(w.to_json(), r#"[{"kind":"U","value":1}]"#);
    assert_eq!(
        fm.factor_unipotent(&fm.at([2, 1, 1, 1])),
        Err(Error::NotUnipotent)
    );

    let r = ring("Z/3^2");
    let m = r.matrices();
    let a = m.at([4, 1, 0, 7]);
    let w = m.factor_unipotent(&a).unwrap();
    assert_eq!(m.evaluate_word(&w), Ok(a));
    assert!(w.len() <= 7);
    assert!(!w.factors().iter().any(|f| matches!(f, Factor::Central(_))));
}

#[test]
fn factorization_reconstructs_every_unipotent() {
    for s in ["Z/3^1", "Z/5^1", "Z/7^1", "GF(9)", "Z/3^2", "GF(3)[u]/u^2"] {
        let r = ring(s);
        let m = r.matrices();
        let mut count = 0;
        for x in m.all().filter(|x| m.is_unipotent(x)) {
            count += 1;
            let w = m.factor_unipotent(&x).unwrap();
            assert_eq!(m.evaluate_word(&w), Ok(x), "{s} {x}");
            assert!(w.len() <= 12);
            let centrals: Vec<_> = w
                .factors()
                .iter()
                .filter(|f| matches!(f, Factor::Central(_)))
                .collect();
            assert!(centrals.len() <= 1);
            for c in centrals {
                assert!(r.valuation(r.sub(c.value(), r.one())) >= 1);
            }
            let back = ElementaryWord::from_json(&r, &w.to_json()).unwrap();
            assert_eq!(back, w);
        }
        let (q, n) = (r.q() as u64, r.n());
        assert_eq!(count, q.pow(4 * n - 2), "{s}");
    }
}

#[test]
fn word_json_rejects_garbage() {
    let r = ring("Z/3^1");
    assert!(matches!(
        ElementaryWord::from_json(&r, "[{\"kind\":\"X\",\"value\":1}]"),
        Err(Error::Parse(_))
    ));
    assert!(matches!(
        ElementaryWord::from_json(&r, "[{\"kind\":\"U\",\"value\":7}]"),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(matches!(
        ElementaryWord::from_json(&r, "nope"),
        Err(Error::Parse(_))
    ));
}

#[test]
fn ad_rank_examples() {
    let f = ring("Z/3^1");
    let fm = f.matrices();
    assert_eq!(fm.ad_rank_residue(&fm.scalar(f.at(2))), 0);
    assert_eq!(fm.ad_rank_residue(&fm.at([0, 1, 0, 0])), 2);
    let y = fm.at([1, 0, 1, 0]); // alpha = 1, gamma = 1, delta = 0
                                 // r [[-gamma, alpha - delta], [0, gamma]] with r = 1
    assert_eq!(fm.ad_apply(&fm.at([0, 1, 0, 0]), &y), fm.at([2, 1, 0, 1]));
    let r = ring("Z/3^2");
    let m = r.matrices();
    assert_eq!(m.ad_rank_residue(&m.at([1, 3, 0, 2])), 2);
    assert_eq!(m.ad_rank_residue(&m.at([4, 3, 6, 1])), 0);
}

#[test]
fn ad_rank_is_two_off_the_centre() {
    for s in ["Z/3^1", "Z/5^1", "Z/7^1", "GF(9)"] {
        let r = ring(s);
        let m = r.matrices();
        for x in m.all() {
            let expected = if m.is_scalar(&x) { 0 } else { 2 };
            assert_eq!(m.ad_rank_residue(&x), expected);
        }
    }
}

mod props {
    use super::*;
    use proptest::prelude::*;

    fn mat_strategy(size: u32) -> impl Strategy<Value = [u32; 4]> {
        prop::array::uniform4(0..size)
    }

    proptest! {
        #[test]
        fn det_and_trace_laws(x in mat_strategy(27), y in mat_strategy(27)) {
            let r = ring("Z/27");
            let m = r.matrices();
            let (x, y) = (m.at(x), m.at(y));
            prop_assert_eq!(m.det(&m.mul(&x, &y)), r.mul(m.det(&x), m.det(&y)));
            prop_assert_eq!(m.trace(&m.mul(&x, &y)), m.trace(&m.mul(&y, &x)));
            prop_assert_eq!(m.det_one_plus(&x), m.det(&m.add(&m.identity(), &x)));
        }

        #[test]
        fn conjugation_preserves_trace_and_det(p in mat_strategy(81), x in mat_strategy(81)) {
            let r = ring("GF(9)[u]/u^2");
            let m = r.matrices();
            let (p, x) = (m.at(p), m.at(x));
            match m.conj(&p, &x) {
                Ok(y) => {
                    prop_assert_eq!(m.trace(&y), m.trace(&x));
                    prop_assert_eq!(m.det(&y), m.det(&x));
                }
                Err(e) => {
                    prop_assert_eq!(e, Error::NotInvertible);
                    prop_assert!(!m.is_invertible(&p));
                }
            }
        }

        #[test]
        fn factorization_on_larger_rings(p in mat_strategy(81), t in 0u32..81, js in prop::array::uniform3(0u32..81)) {
            let r = ring("GF(9)[u]/u^2");
            let m = r.matrices();
            // I + P [[j1, t], [j2, j3]] P^{-1} with j_i in J is unipotent
            let x = r.radical_generator();
            let js = js.map(|j| r.mul(x, r.at(j)));
            let core = Mat { a: js[0], b: r.at(t), c: js[1], d: js[2] };
            let p = m.at(p);
            let n = m.conj(&p, &core).unwrap_or(core);
            let a = m.add(&m.identity(), &n);
            prop_assert!(m.is_unipotent(&a));
            let w = m.factor_unipotent(&a).unwrap();
            prop_assert_eq!(m.evaluate_word(&w), Ok(a));
        }
    }
}
