use qcsp::horn::{models_of, ClauseSet};
use qcsp::point::{enumerate_weak_orders, PointRelation, WeakOrder};
use qcsp::poly::*;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(k: usize, pred: impl Fn(&[u8]) -> bool) -> PointRelation {
    PointRelation::flat(k, enumerate_weak_orders(k).unwrap().into_iter().filter(|w| pred(w.ranks())))
}

fn imp() -> PointRelation {
    rel(4, |r| r[0] != r[1] || r[2] == r[3])
}

fn apply(op: ThresholdOp, a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(&x, &y)| match op {
        ThresholdOp::Pp => if x < 0 { x } else { y },
        ThresholdOp::DualPp => if x < 0 { y } else { x },
    }).collect()
}

/// Looks for a violating pair among integer tuples with entries in `lo..=hi`.
fn concrete_violation(r: &PointRelation, op: ThresholdOp, lo: i64, hi: i64) -> Option<(Vec<i64>, Vec<i64>)> {
    let k = r.arity();
    let mut tuples = vec![vec![]];
    for _ in 0..k {
        tuples = tuples.into_iter().flat_map(|t: Vec<i64>| (lo..=hi).map(move |x| [t.clone(), vec![x]].concat())).collect();
    }
    let members: Vec<Vec<i64>> = tuples.into_iter().filter(|t| r.contains_values(t)).collect();
    for a in &members {
        for b in &members {
            if !r.contains_values(&apply(op, a, b)) {
                return Some((a.clone(), b.clone()));
            }
        }
    }
    None
}

#[test]
fn apply_op_examples() {
    // t1 = (-1,-1,2,2), t2 = (1,2,1,2); classes -1 < 1 < 2, zero below class 1
    let jr = JointRealization {
        combined: WeakOrder::from_ranks(&[-1, -1, 2, 2, 1, 2, 1, 2]),
        zero_cut: ZeroCut::Below(1),
    };
    assert_eq!(jr.render(), (vec![-1, -1, 2, 2], vec![1, 2, 1, 2]));
    assert_eq!(apply_op(ThresholdOp::Pp, &jr), WeakOrder::from_ranks(&[-1, -1, 1, 2]));
    assert_eq!(apply_op(ThresholdOp::DualPp, &jr), WeakOrder::from_ranks(&[1, 2, 2, 2]));
    let nonneg = JointRealization { zero_cut: ZeroCut::Below(0), ..jr.clone() };
    assert_eq!(apply_op(ThresholdOp::Pp, &nonneg), jr.second());
    let at = JointRealization { zero_cut: ZeroCut::At(0), ..jr.clone() };
    assert_eq!(apply_op(ThresholdOp::Pp, &at), jr.second());
    assert_eq!(at.render().0, vec![0, 0, 2, 2]);
}

#[test]
fn implication_violations() {
    let r = imp();
    let pp = preserved_by(&r, ThresholdOp::Pp).unwrap();
    let v = pp.violation().expect("pp violates the implication");
    assert_eq!(v.to_string(), "(-1,-1,2,2), (1,2,1,2) -> (-1,-1,1,2)");

    let dual = preserved_by(&r, ThresholdOp::DualPp).unwrap();
    let v = dual.violation().expect("dual-pp violates the implication");
    assert!(r.contains_values(&v.first) && r.contains_values(&v.second));
    assert_eq!(v.result, apply(ThresholdOp::DualPp, &v.first, &v.second));
    assert!(!r.contains_values(&v.result));
    assert_eq!(apply_op(ThresholdOp::DualPp, &v.realization), WeakOrder::from_ranks(&v.result));
}

#[test]
fn full_relations_are_preserved() {
    for k in 1..=4 {
        let full = PointRelation::full(k).unwrap();
        for op in [ThresholdOp::Pp, ThresholdOp::DualPp] {
            assert!(preserved_by(&full, op).unwrap().is_preserved());
        }
    }
    assert!(preserved_by(&PointRelation::full(7).unwrap(), ThresholdOp::Pp).is_err());
    assert!(preserved_by_with_cap(&PointRelation::full(2).unwrap(), ThresholdOp::Pp, 1).is_err());
}

#[test]
fn enumeration_agrees_with_concrete_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for k in 1..=3 {
        let all = enumerate_weak_orders(k).unwrap();
        for _ in 0..25 {
            let r = PointRelation::flat(k, all.iter().filter(|_| rng.random_bool(0.5)).cloned());
            if r.is_empty() {
                continue;
            }
            let models = r.flat_models();
            for op in [ThresholdOp::Pp, ThresholdOp::DualPp] {
                let p = preserved_by(&r, op).unwrap();
                let mut sampled = false;
                for _ in 0..10_000 {
                    // random realization of two random models by values in -3..=3
                    let realize = |w: &WeakOrder, rng: &mut ChaCha8Rng| {
                        let mut vals: Vec<i64> = (-3..=3).collect::<Vec<_>>().choose_multiple(rng, w.num_classes()).copied().collect();
                        vals.sort();
                        w.ranks().iter().map(|&c| vals[c as usize]).collect::<Vec<i64>>()
                    };
                    let (m1, m2) = (models.choose(&mut rng).unwrap(), models.choose(&mut rng).unwrap());
                    let a = realize(m1, &mut rng);
                    let b = realize(m2, &mut rng);
                    if !r.contains_values(&apply(op, &a, &b)) {
                        sampled = true;
                        break;
                    }
                }
                assert_eq!(p.is_preserved(), !sampled, "k={k} {op}");
                if let Some(v) = p.violation() {
                    assert!(r.contains_values(&v.first) && r.contains_values(&v.second));
                    assert!(!r.contains_values(&apply(op, &v.first, &v.second)));
                }
            }
        }
    }
}

#[test]
fn ord_horn_relations_lie_in_both_ll_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let lits = ["x < y", "x <= y", "x = y", "y < z", "z <= w", "x != y \\/ z = w", "x != z \\/ y < w", "y != z \\/ x <= w", "x != w"];
    for _ in 0..20 {
        let mut text = String::new();
        for _ in 0..rng.random_range(1..=3) {
            text += lits.choose(&mut rng).unwrap();
            text += "\n";
        }
        let cs = ClauseSet::parse_with(ClauseSet::new(&["x", "y", "z", "w"]), &text).unwrap();
        let r = models_of(&cs, 4).unwrap();
        if r.is_empty() {
            continue;
        }
        assert!(qcsp::horn::ordhorn_definable(&r).unwrap().is_definable());
        assert!(qcsp::horn::llhorn_definable(&r, false).unwrap().is_definable(), "{text}");
        assert!(qcsp::horn::llhorn_definable(&r, true).unwrap().is_definable(), "{text}");
    }
    // ORD-Horn does not imply pp-closure: the implication is a single
    // ORD-Horn clause and pp violates it
    let r = models_of(&ClauseSet::parse("x != y \\/ u = v").unwrap(), 4).unwrap();
    assert!(!preserved_by(&r, ThresholdOp::Pp).unwrap().is_preserved());
}

#[test]
fn report_examples() {
    let imp_in = || ReportInput { id: "imp".into(), relation: imp(), clauses: None };
    let report = tractability_report(&[imp_in()]).unwrap();
    let r = &report.relations[0];
    assert!(r.ll_horn && r.dual_ll_horn && r.ord_horn);
    assert_eq!(r.classes, ["ORD-Horn", "ll-Horn", "dual-ll-Horn", "violates pp", "violates dual-pp"]);
    assert_eq!(r.maximal_classes, ["ll-Horn", "dual-ll-Horn"]);
    assert!(!report.tags.iter().any(|t| t == TAG_NP_HARD));

    let single = ReportInput { id: "w".into(), relation: rel(3, |r| r == [0, 1, 1]), clauses: None };
    let report = tractability_report(&[single]).unwrap();
    assert!(report.relations[0].ord_horn);
    assert!(report.tags.iter().any(|t| t == TAG_ORD_HORN));

    let two = rel(4, |r| r[0] < r[1] || r[2] < r[3]);
    for op in [ThresholdOp::Pp, ThresholdOp::DualPp] {
        assert!(concrete_violation(&two, op, -3, 3).is_some());
    }
    let cs = ClauseSet::parse("z1 < z2 \\/ z3 < z4").unwrap();
    let report = tractability_report(&[imp_in(), ReportInput { id: "two".into(), relation: two, clauses: Some(cs) }]).unwrap();
    assert_eq!(report.relations[1].syntactic_ll_horn, Some(false));
    assert!(report.tags.iter().any(|t| t == TAG_NP_HARD));
    let json = serde_json::to_value(&report).unwrap();
    assert_eq!(json["relations"][0]["pp"]["status"], "violated");
    assert_eq!(json["relations"][0]["pp"]["first"], serde_json::json!([-1, -1, 2, 2]));
}
