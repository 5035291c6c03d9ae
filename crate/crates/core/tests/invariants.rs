use aperylike::congruences::{
    detect_period, gessel_criterion, nonperiodicity_primes, reflection_failures, Period,
};
use aperylike::exact::{is_prime, reduce};
use aperylike::modular::{candidates, check_lp_convolution};
use aperylike::sequences::{FnSource, Geometric};
use aperylike::survey::{heuristic_f64, survey, survey_with_workers, E_MINUS_HALF};
use aperylike::{
    LaurentPolynomial, ModularEngine, SequenceId, SequenceRef, SurveyReport, TermSource,
};
use num_bigint::BigInt;

fn primes(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&n| is_prime(n)).collect()
}

#[test]
fn gessel_passes_exactly_at_listed_primes() {
    let e = ModularEngine::new();
    for id in SequenceId::ALL {
        let listed = nonperiodicity_primes(&id).unwrap();
        for p in primes(2, 199) {
            let pass = gessel_criterion(&e, id, p).unwrap();
            if listed.contains(&p) {
                assert!(pass, "{id} p={p}");
            }
            if p > 5 {
                assert!(!pass, "{id} p={p}");
            }
        }
    }
}

#[test]
fn eventual_periodicity_evidence_mod_8() {
    let e = ModularEngine::new();
    // C(1) = 4 for both, so the zero tail starts at n = 2.
    for id in [SequenceId::Epsilon, SequenceId::S7] {
        let found = detect_period(&e, id, 8, 2000, 16).unwrap();
        assert_eq!(
            found,
            Some(Period {
                preperiod: 2,
                period: 1
            }),
            "{id}"
        );
        assert_eq!(e.term_mod(id, 1, 8).unwrap(), 4);
        assert_eq!(e.term_mod(id, 2000, 8).unwrap(), 0);
    }
    for id in [SequenceId::D, SequenceId::Alpha] {
        let found = detect_period(&e, id, 4, 2000, 8).unwrap();
        assert_eq!(
            found,
            Some(Period {
                preperiod: 1,
                period: 1
            }),
            "{id}"
        );
    }
}

#[test]
fn reflection_observation_scan() {
    // Reported, not asserted: the observation is unproven beyond the Apéry numbers.
    let e = ModularEngine::new();
    let mut report = Vec::new();
    for id in SequenceId::ALL {
        for p in primes(7, 97) {
            let f = reflection_failures(&e, id, p).unwrap();
            if !f.is_empty() {
                report.push(format!("{id} p={p} n={f:?}"));
            }
        }
    }
    for p in primes(7, 97) {
        assert!(reflection_failures(&e, SequenceId::Gamma, p)
            .unwrap()
            .is_empty());
    }
    println!("reflection exceptions: {report:?}");
}

#[test]
fn lucas_convolution_of_apery_summand() {
    // Row sums of C(n,k)^2 C(n+k,k)^2 against constant sequences are the Apéry numbers.
    let l = candidates::apery_summand();
    let one = Geometric(1);
    for p in [2, 3, 5, 7] {
        assert_eq!(check_lp_convolution(&l, &one, &one, p, 60).unwrap(), None);
    }
    let shifted = FnSource::new("n+2", |n| BigInt::from(n + 2));
    assert!(check_lp_convolution(&l, &shifted, &one, 3, 60)
        .unwrap()
        .is_some());
}

#[test]
fn survey_independent_of_workers() {
    let one = survey_with_workers(SequenceId::Zeta, 3000, 1).unwrap();
    for w in [2, 5, 8] {
        assert_eq!(survey_with_workers(SequenceId::Zeta, 3000, w).unwrap(), one);
    }
    assert_eq!(survey(SequenceId::Zeta, 3000).unwrap(), one);
}

#[test]
fn survey_rows_agree_with_residues() {
    let e = ModularEngine::new();
    let r = survey(SequenceId::Eta, 400).unwrap();
    for row in &r.rows {
        let table = e.residue_table(SequenceId::Eta, row.prime).unwrap();
        assert_eq!(row.divides, table.contains(&0));
        if let Some(n) = row.first_zero_index {
            assert_eq!(table[n as usize], 0);
            assert!(table[..n as usize].iter().all(|&x| x != 0));
        }
    }
}

#[test]
fn heuristic_near_limit() {
    let far = heuristic_f64(9973).unwrap();
    let near = heuristic_f64(101).unwrap();
    assert!((far - E_MINUS_HALF).abs() < (near - E_MINUS_HALF).abs());
}

#[test]
fn reports_round_trip_through_json() {
    let r = survey(SequenceId::B, 200).unwrap();
    let s = serde_json::to_string(&r).unwrap();
    let back: SurveyReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back, r);

    let k = aperylike::laurent::apery_kernel();
    let back: LaurentPolynomial =
        serde_json::from_str(&serde_json::to_string(&k).unwrap()).unwrap();
    assert_eq!(back, k);

    for text in ["gamma", "s18", "eta(1,1)", "apery(2,1)"] {
        let r: SequenceRef = text.parse().unwrap();
        let back: SequenceRef = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}

#[test]
fn residues_agree_with_exact_terms_for_composite_moduli() {
    let e = ModularEngine::new();
    for id in SequenceId::ALL {
        let exact = id.terms(120);
        for m in [4u64, 8, 9, 16, 25, 1000] {
            let seq = e.residue_seq(id, 120, m);
            let want: Vec<u64> = exact.iter().map(|t| reduce(t, m)).collect();
            assert_eq!(seq.residues, want, "{id} mod {m}");
        }
    }
}
