use hopfring::dyer_lashof::*;
use hopfring::Prime;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn schedules_agree_on_random_words() {
    let p = Prime::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let w = random_word(&mut rng, p, 3, 60);
        let a = adem_reduce_with(&w, p, Schedule::LeftmostEager);
        let b = adem_reduce_with(&w, p, Schedule::RightmostLazy);
        assert_eq!(a, b, "{w:?}");
        let left = dl_multiply(&adem_reduce(&w[..2], p), &adem_reduce(&w[2..], p));
        let right = dl_multiply(&adem_reduce(&w[..1], p), &adem_reduce(&w[1..], p));
        assert_eq!(left, a, "{w:?}");
        assert_eq!(right, a, "{w:?}");
    }
}

#[test]
fn rewriting_preserves_degree_and_length() {
    let p = Prime::new(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let w = random_word(&mut rng, p, 3, 120);
        for (s, _) in adem_reduce(&w, p).sorted_terms() {
            assert_eq!(s.degree(p), word_degree(&w, p));
            assert!(s.len() <= 3 && s.is_admissible(p) && s.excess(p) >= 0);
        }
    }
}

#[test]
fn random_words_exercise_rewriting() {
    let p = Prime::new(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut inadm, mut nonzero) = (0, 0);
    for _ in 0..500 {
        let w = random_word(&mut rng, p, 3, 60);
        if !DlString::new(w.clone()).is_admissible(p) {
            inadm += 1;
            if !adem_reduce(&w, p).is_zero() {
                nonzero += 1;
            }
        }
    }
    eprintln!("inadmissible {inadm}, nonzero after reduction {nonzero}");
    assert!(nonzero > 20);
}
