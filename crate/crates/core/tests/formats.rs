use varieties_core::rankcert::{find_avoiding_line, verify_certificate, LineSearch, DEFAULT_NODE_BUDGET};
use varieties_core::rng::seeded;
use varieties_core::{MultilinearForm, RankCertificate, RankSearchParams, UnitriMatrix, UtParams};

#[test]
fn form_and_matrix_round_trip() {
    let mut rng = seeded(11);
    for _ in 0..20 {
        let f = MultilinearForm::random(5, 2, 3, &mut rng);
        let back: MultilinearForm = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);

        let a = UnitriMatrix::random(UtParams::lemma(3, 2).unwrap(), &mut rng);
        let back: UnitriMatrix = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }
}

#[test]
fn matrix_rejects_unknown_version() {
    let a = UnitriMatrix::identity(UtParams::lemma(3, 1).unwrap());
    let text = serde_json::to_string(&a).unwrap().replace("\"version\":1", "\"version\":2");
    assert!(serde_json::from_str::<UnitriMatrix>(&text).is_err());
}

#[test]
fn certificate_round_trip_keeps_hash() {
    let LineSearch::Found { certificate } =
        find_avoiding_line(RankSearchParams::new(3, 2, 2, 1).unwrap(), DEFAULT_NODE_BUDGET).unwrap()
    else {
        panic!("2x2 matrices of rank 2 avoid rank-one sums");
    };
    let text = serde_json::to_string(&certificate).unwrap();
    let back: RankCertificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back.hash, certificate.hash);
    assert_eq!(verify_certificate(&back, DEFAULT_NODE_BUDGET).unwrap().valid, Some(true));
}
