use std::collections::BTreeMap;

use proptest::prelude::*;
use semlink::semantic_theory::*;
use semlink::Error;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/worlds.toml");

#[test]
fn fixture_world_model() {
    let m = WorldModel::load(FIXTURE).unwrap();
    assert_eq!(m.worlds().len(), 4);
    let lp = |s: &str| logical_probability(&m, &s.into()).unwrap();
    let h = |s: &str| semantic_entropy(&m, &s.into()).unwrap();
    assert_eq!(lp("anything"), 1.0);
    assert_eq!(h("anything"), 0.0);
    assert_eq!(lp("a_bird"), 0.75);
    assert!((h("a_bird") - 0.415037).abs() < 1e-6);
    assert_eq!(h("bird_perched"), 1.0);
    assert_eq!(h("a_cat"), 3.0);
    assert_eq!(lp("an_animal"), 0.875);
    assert!(matches!(
        semantic_entropy(&m, &"nothing".into()),
        Err(Error::ContradictoryMessage(_))
    ));
    assert!(matches!(
        logical_probability(&m, &"a_dog".into()),
        Err(Error::UnknownMessage(_))
    ));
}

#[test]
fn malformed_declarations() {
    let bad = [
        "[[worlds]]\nid = \"a\"\np = 0.5\n",
        "[[worlds]]\nid = \"a\"\np = 1.0\n[messages]\nm = [\"b\"]\n",
        "[[worlds]]\nid = \"a\"\np = 1.0\nweight = 2\n",
        "[[worlds]]\nid = \"a\"\np = 0.5\n[[worlds]]\nid = \"a\"\np = 0.5\n",
        "worlds = []\n",
    ];
    for src in bad {
        assert!(WorldModel::from_toml_str(src).is_err(), "{src}");
    }
}

#[test]
fn objective_matches_hand_summation() {
    // values from an independent triple-sum script
    let bsc = DiscreteJoint {
        px: vec![0.5, 0.5],
        p_z_given_x: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        p_xhat_given_z: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        h_se: vec![0.0, 0.0],
    };
    assert!((capacity_objective(&bsc).unwrap() - 0.06200881282143772).abs() < 1e-9);
    let skew = DiscreteJoint {
        px: vec![0.3, 0.7],
        p_z_given_x: vec![vec![0.9, 0.1], vec![0.1, 0.9]],
        p_xhat_given_z: vec![vec![0.8, 0.2], vec![0.25, 0.75]],
        h_se: vec![0.5, 1.5],
    };
    assert!((capacity_objective(&skew).unwrap() - 0.7156675634589259).abs() < 1e-9);
}

#[test]
fn sup_over_binary_symmetric_channel() {
    let ch = vec![vec![0.89, 0.11], vec![0.11, 0.89]];
    let coarse = capacity_sup(&[0.5, 0.5], &ch, &[0.0, 0.0], 21).unwrap();
    let fine = capacity_sup(&[0.5, 0.5], &ch, &[0.0, 0.0], 51).unwrap();
    // 1 - h2(0.11), attained by deterministic coding
    assert!((coarse.value - 0.5000840418354721).abs() < 1e-9);
    assert!((fine.value - coarse.value).abs() < 1e-9);
    let ident = DiscreteJoint {
        px: vec![0.5, 0.5],
        p_z_given_x: coarse.p_z_given_x.clone(),
        p_xhat_given_z: ch.clone(),
        h_se: vec![0.0, 0.0],
    };
    assert!((capacity_objective(&ident).unwrap() - coarse.value).abs() < 1e-12);
    assert!(matches!(
        capacity_sup(&[0.2; 5], &ch, &[0.0, 0.0], 3),
        Err(Error::TooLarge(_))
    ));
}

#[test]
fn classifier_boundary() {
    assert_eq!(
        hypothesis_classifier(2.0, 1.0).unwrap(),
        Hypothesis::SemanticAmbiguity
    );
    assert_eq!(
        hypothesis_classifier(1.0, 2.0).unwrap(),
        Hypothesis::DecoderOvercomes
    );
    assert_eq!(
        hypothesis_classifier(1.0, 1.0).unwrap(),
        Hypothesis::DecoderOvercomes
    );
    assert!(hypothesis_classifier(-0.1, 1.0).is_err());
    assert!(hypothesis_classifier(f64::NAN, 1.0).is_err());
}

// Independent evaluation: build the full p(x, z, x̂) table and sum it.
#[allow(clippy::needless_range_loop)]
fn triple_sum(j: &DiscreteJoint) -> f64 {
    let (nx, nz, nxh) = (j.px.len(), j.p_xhat_given_z.len(), j.h_se.len());
    let mut t = vec![vec![vec![0.0; nxh]; nz]; nx];
    for x in 0..nx {
        for z in 0..nz {
            for k in 0..nxh {
                t[x][z][k] = j.px[x] * j.p_z_given_x[x][z] * j.p_xhat_given_z[z][k];
            }
        }
    }
    let p_xk = |x: usize, k: usize| (0..nz).map(|z| t[x][z][k]).sum::<f64>();
    let p_k = |k: usize| (0..nx).map(|x| p_xk(x, k)).sum::<f64>();
    let p_xz = |x: usize, z: usize| (0..nxh).map(|k| t[x][z][k]).sum::<f64>();
    let mut mi = 0.0;
    let mut noise = 0.0;
    let mut hse = 0.0;
    for x in 0..nx {
        for k in 0..nxh {
            let p = p_xk(x, k);
            if p > 0.0 {
                mi += p * (p / (j.px[x] * p_k(k))).ln() / std::f64::consts::LN_2;
            }
        }
        for z in 0..nz {
            let p = p_xz(x, z);
            if p > 0.0 {
                noise -= p * (p / j.px[x]).ln() / std::f64::consts::LN_2;
            }
        }
    }
    for (k, h) in j.h_se.iter().enumerate() {
        hse += p_k(k) * h;
    }
    mi - noise + hse
}

fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], n)
        .prop_filter("non-zero mass", |v| v.iter().sum::<f64>() > 0.0)
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            v.into_iter().map(|p| p / s).collect()
        })
}

fn joint() -> impl Strategy<Value = DiscreteJoint> {
    (1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(nx, nz, nxh)| {
        (
            distribution(nx),
            prop::collection::vec(distribution(nz), nx),
            prop::collection::vec(distribution(nxh), nz),
            prop::collection::vec(0.0f64..4.0, nxh),
        )
            .prop_map(|(px, p_z_given_x, p_xhat_given_z, h_se)| DiscreteJoint {
                px,
                p_z_given_x,
                p_xhat_given_z,
                h_se,
            })
    })
}

fn world_model() -> impl Strategy<Value = (WorldModel, Vec<bool>, Vec<bool>)> {
    (1usize..=8)
        .prop_flat_map(|n| {
            (
                distribution(n),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(p, small, extra)| {
            let big: Vec<bool> = small.iter().zip(&extra).map(|(a, b)| *a || *b).collect();
            let ids = |mask: &[bool]| -> Vec<String> {
                mask.iter()
                    .enumerate()
                    .filter(|(_, m)| **m)
                    .map(|(i, _)| format!("w{i}"))
                    .collect()
            };
            let mut msgs = BTreeMap::new();
            msgs.insert("small".to_string(), ids(&small));
            msgs.insert("big".to_string(), ids(&big));
            let worlds = p
                .iter()
                .enumerate()
                .map(|(i, p)| (format!("w{i}"), *p))
                .collect();
            (WorldModel::new(worlds, msgs).unwrap(), small, big)
        })
}

proptest! {
    #[test]
    fn objective_equals_triple_sum(j in joint()) {
        let got = capacity_objective(&j).unwrap();
        let want = triple_sum(&j);
        prop_assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        let t = capacity_terms(&j).unwrap();
        prop_assert!(t.mutual_information >= 0.0 && t.encoding_noise >= 0.0);
    }

    #[test]
    fn logical_probability_bounds_and_monotonicity((m, _, _) in world_model()) {
        let small = logical_probability(&m, &"small".into()).unwrap();
        let big = logical_probability(&m, &"big".into()).unwrap();
        prop_assert!((0.0..=1.0).contains(&small));
        prop_assert!(big >= small);
        if small > 0.0 {
            let hs = semantic_entropy(&m, &"small".into()).unwrap();
            let hb = semantic_entropy(&m, &"big".into()).unwrap();
            prop_assert!(hs >= hb && hb >= 0.0);
            prop_assert!((hs + small.log2()).abs() < 1e-12);
        } else {
            prop_assert!(semantic_entropy(&m, &"small".into()).is_err());
        }
    }

    #[test]
    fn sup_is_monotone_on_nested_grids(
        px in distribution(2),
        ch in prop::collection::vec(distribution(2), 2),
        h in prop::collection::vec(0.0f64..2.0, 2),
    ) {
        // levels 1/2 ⊂ 1/4 ⊂ 1/8
        let v: Vec<f64> = [3, 5, 9].iter().map(|&s| capacity_sup(&px, &ch, &h, s).unwrap().value).collect();
        prop_assert!(v[0] <= v[1] + 1e-12 && v[1] <= v[2] + 1e-12, "{v:?}");
        let corner = DiscreteJoint {
            px: px.clone(),
            p_z_given_x: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            p_xhat_given_z: ch.clone(),
            h_se: h.clone(),
        };
        prop_assert!(v[0] + 1e-12 >= capacity_objective(&corner).unwrap());
    }
}
