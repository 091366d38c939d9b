use ss3_core::field_tower::make_field;
use ss3_core::intersection_atlas as ia;

#[test]
fn census_at_two() {
    let c = ia::intersection_census(2).unwrap();
    let row = |d: u32| c.per_degree.iter().find(|r| r.degree == d).unwrap().clone();
    for (d, n) in ia::census_closed_form(2) {
        assert_eq!(row(d).points as i128, n);
        // low-degree points all lie on Δ
        assert_eq!(row(d).in_delta, row(d).points);
    }
    assert_eq!(c.rhs_without_epsilon, 2826);
    assert!(c.count >= 1377);
    assert_eq!(c.count, 1809);
    assert_eq!(c.epsilon, 1017);
    for r in &c.per_degree {
        assert_eq!(r.orbits_in_delta * r.degree as u64, r.in_delta);
    }
}

#[test]
fn witnesses_lie_in_the_census() {
    let c = ia::intersection_census(2).unwrap();
    let ml = ia::witness_degree_p_plus_1(2).unwrap();
    let akio = ia::witness_degree_2p_plus_2(2).unwrap();
    for w in [&ml, &akio] {
        assert!(w.all_checks_pass());
        assert!(c.contains(w.point.degree, &w.point.representative));
    }
    let ctx = make_field(2, 3).unwrap();
    assert!(ml.point.check(&ctx));
}

#[test]
fn odd_prime_witnesses() {
    for p in [3, 5] {
        let w = ia::witness_degree_p_plus_1(p).unwrap();
        assert_eq!(w.point.degree as u64, p + 1);
    }
    let w = ia::witness_degree_2p_plus_2(3).unwrap();
    assert_eq!(w.point.degree, 8);
    assert!(w.checks["x_bar_exceeds_p2_plus_p"]);
    let sets = ia::akio_search_sets(3).unwrap();
    assert_eq!((sets.z, sets.y, sets.x_bar), (2, 18, 20));
}

#[test]
fn unsupported_primes() {
    assert_eq!(ia::intersection_census(3).unwrap_err(), ia::AtlasError::UnsupportedPrime(3));
    assert!(ia::witness_degree_p_plus_1(7).is_err());
    assert!(ia::witness_degree_2p_plus_2(5).is_err());
}
