use std::sync::Arc;

use geoloop::group::{action_mu, chain_word, contract_step, DEFAULT_CHAIN_BUDGET};
use geoloop::sampling::{random_based_word, random_element, random_step, rng, stream, uniform_int, Rng};
use geoloop::words::class_equal;
use geoloop::{GeoError, GroupElement, Manifold, Point, Species, Word};
use proptest::prelude::*;

fn manifolds() -> Vec<Arc<Manifold>> {
    vec![
        Arc::new(Manifold::sphere(2, 1.0).unwrap()),
        Arc::new(Manifold::flat_torus(2).unwrap()),
        Arc::new(Manifold::hyperbolic_disk()),
        Arc::new(Manifold::projective_plane()),
    ]
}

/// Insert duplicates and there-and-back excursions into a valid word.
fn inflate(w: &Word, r: &mut Rng, moves: usize) -> Word {
    let m = w.manifold();
    let mut pts = w.points().to_vec();
    for _ in 0..moves {
        let i = uniform_int(r, 0, pts.len() - 1);
        if uniform_int(r, 0, 1) == 0 {
            pts.insert(i, pts[i].clone());
        } else {
            let y = random_step(m, &pts[i], r).unwrap();
            let x = pts[i].clone();
            pts.insert(i + 1, y);
            pts.insert(i + 2, x);
        }
    }
    Word::new(m.clone(), w.species(), w.basepoint().cloned(), pts).unwrap()
}

/// Rule-by-rule rewriting to a fixed point, choosing the last applicable
/// deletion each time. Independent of the library's scan order.
fn rewrite_from_the_right(m: &Manifold, mut pts: Vec<Point>) -> Vec<Point> {
    loop {
        let n = pts.len();
        let mut hit = None;
        for i in (0..n).rev() {
            let dup = i + 1 < n && m.points_equal(&pts[i], &pts[i + 1]);
            let back = i >= 1 && i + 1 < n && m.points_equal(&pts[i - 1], &pts[i + 1]);
            if dup || back {
                hit = Some(i);
                break;
            }
        }
        match hit {
            Some(i) => {
                pts.remove(i);
            }
            None => return pts,
        }
    }
}

#[test]
fn reduction_matches_right_to_left_rewriting() {
    for (k, m) in manifolds().into_iter().enumerate() {
        let v0 = m.default_basepoint();
        for i in 0..300 {
            let mut r = stream(70 + k as u64, i);
            let steps = uniform_int(&mut r, 0, 6);
            let w = inflate(&random_based_word(&m, &v0, steps, &mut r).unwrap(), &mut r, 4);
            let expected = rewrite_from_the_right(&m, w.points().to_vec());
            let got = w.reduce().unwrap();
            assert_eq!(got.points().len(), expected.len());
            assert!(got.points().iter().zip(&expected).all(|(a, b)| m.points_equal(a, b)));
        }
    }
}

#[test]
fn class_equal_is_an_equivalence_relation() {
    let m = Arc::new(Manifold::sphere(2, 1.0).unwrap());
    let v0 = m.default_basepoint();
    let mut r = rng(80);
    for _ in 0..200 {
        let g = random_element(&m, &v0, 8, &mut r).unwrap();
        let a = inflate(g.word(), &mut r, 3);
        let b = inflate(g.word(), &mut r, 3);
        let c = inflate(&b, &mut r, 2);
        let h = random_element(&m, &v0, 8, &mut r).unwrap();
        assert!(class_equal(&a, &a).unwrap());
        assert!(class_equal(&a, &b).unwrap() && class_equal(&b, &a).unwrap());
        assert!(class_equal(&b, &c).unwrap() && class_equal(&a, &c).unwrap());
        if !g.class_eq(&h).unwrap() {
            assert!(!class_equal(&a, h.word()).unwrap());
        }
    }
}

#[test]
fn class_equal_rejects_mixed_species() {
    let m = Arc::new(Manifold::euclidean(2).unwrap());
    let v0 = m.default_basepoint();
    let g = Word::identity(m.clone(), v0.clone()).unwrap();
    let z = Word::new(m, Species::Z, None, vec![v0]).unwrap();
    assert!(matches!(class_equal(&g, &z), Err(GeoError::Species { .. })));
}

#[test]
fn action_is_a_right_action() {
    for (k, m) in manifolds().into_iter().enumerate() {
        let v0 = m.default_basepoint();
        let e = GroupElement::identity(m.clone(), v0.clone()).unwrap();
        for i in 0..200 {
            let mut r = stream(90 + k as u64, i);
            let steps = uniform_int(&mut r, 0, 6);
            let z = random_based_word(&m, &v0, steps, &mut r).unwrap();
            let g = random_element(&m, &v0, 6, &mut r).unwrap();
            let h = random_element(&m, &v0, 6, &mut r).unwrap();
            let zg_h = action_mu(&action_mu(&z, &g).unwrap(), &h).unwrap();
            let z_gh = action_mu(&z, &g.mul(&h).unwrap()).unwrap();
            assert!(class_equal(&zg_h, &z_gh).unwrap());
            assert!(class_equal(&action_mu(&z, &e).unwrap(), &z).unwrap());
            // the action does not move the head
            assert!(m.points_equal(action_mu(&z, &g).unwrap().project_pi(), z.head()));
        }
    }
}

#[test]
fn chain_words_are_valid_and_end_at_the_target() {
    for m in manifolds() {
        let v0 = m.default_basepoint();
        let mut r = rng(100);
        for _ in 0..100 {
            let p = geoloop::sampling::random_point(&m, &mut r).unwrap();
            let c = chain_word(&m, &v0, &p, DEFAULT_CHAIN_BUDGET).unwrap();
            assert!(c.is_valid());
            assert!(m.points_equal(c.head(), &p));
            assert!(m.points_equal(c.tail(), &v0));
        }
    }
}

#[test]
fn antipodal_chain_needs_an_intermediate_point() {
    let m = Arc::new(Manifold::sphere(2, 1.0).unwrap());
    let v0 = m.default_basepoint();
    let c = chain_word(&m, &v0, &Point::new(vec![-1.0, 0.0, 0.0]), DEFAULT_CHAIN_BUDGET).unwrap();
    assert!(c.word_length() >= 2);
    assert!(c.is_valid());
}

#[test]
fn partial_contraction_stays_on_the_first_segment() {
    let m = Arc::new(Manifold::euclidean(2).unwrap());
    let v0 = m.default_basepoint();
    let w = Word::new(
        m.clone(),
        Species::ZBased,
        Some(v0.clone()),
        vec![Point::new(vec![2.0, 2.0]), Point::new(vec![2.0, 0.0]), v0],
    )
    .unwrap();
    let half = contract_step(0.5, &w).unwrap();
    assert_eq!(half.head().coords(), &[2.0, 1.0]);
    assert_eq!(contract_step(0.0, &w).unwrap().points(), w.points());
    assert!(contract_step(1.5, &w).is_err());
}

fn seeds() -> impl Strategy<Value = (usize, u64, usize)> {
    (0usize..4, any::<u64>(), 0usize..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduce_is_idempotent_and_valid((k, seed, steps) in seeds()) {
        let m = manifolds().swap_remove(k);
        let v0 = m.default_basepoint();
        let mut r = rng(seed);
        let w = inflate(&random_based_word(&m, &v0, steps, &mut r).unwrap(), &mut r, 3);
        let once = w.reduce().unwrap();
        prop_assert!(once.is_valid());
        prop_assert!(once.word_length() <= w.word_length());
        prop_assert!(m.points_equal(once.head(), w.head()));
        prop_assert!(m.points_equal(once.tail(), w.tail()));
        let twice = once.reduce().unwrap();
        prop_assert!(twice.points_match(&once));
    }

    #[test]
    fn reduction_commutes_with_reversal((k, seed, steps) in seeds()) {
        let m = manifolds().swap_remove(k);
        let v0 = m.default_basepoint();
        let mut r = rng(seed);
        let w = inflate(&random_based_word(&m, &v0, steps, &mut r).unwrap(), &mut r, 3);
        let a = w.reversed(Species::Z, None).unwrap().reduce().unwrap();
        let b = w.reduce().unwrap().reversed(Species::Z, None).unwrap();
        prop_assert!(a.points_match(&b));
    }

    #[test]
    fn inserted_cancellations_do_not_change_the_class((k, seed, steps) in seeds()) {
        let m = manifolds().swap_remove(k);
        let v0 = m.default_basepoint();
        let mut r = rng(seed);
        let g = random_element(&m, &v0, steps.max(2), &mut r).unwrap();
        let inflated = inflate(g.word(), &mut r, 4);
        prop_assert!(class_equal(&inflated, g.word()).unwrap());
    }

    #[test]
    fn inverse_is_an_anti_homomorphism((k, seed, _s) in seeds()) {
        let m = manifolds().swap_remove(k);
        let v0 = m.default_basepoint();
        let mut r = rng(seed);
        let a = random_element(&m, &v0, 6, &mut r).unwrap();
        let b = random_element(&m, &v0, 6, &mut r).unwrap();
        let lhs = a.mul(&b).unwrap().inverse();
        let rhs = b.inverse().mul(&a.inverse()).unwrap();
        prop_assert!(lhs.class_eq(&rhs).unwrap());
        prop_assert!(a.inverse().inverse().class_eq(&a).unwrap());
    }
}
