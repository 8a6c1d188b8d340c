use std::collections::BTreeSet;

use qcsp::horn::*;
use qcsp::point::{enumerate_weak_orders, PointRelation, WeakOrder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cs(text: &str) -> ClauseSet {
    ClauseSet::parse(text).unwrap()
}

fn rel(k: usize, pred: impl Fn(&[u8]) -> bool) -> PointRelation {
    PointRelation::flat(k, enumerate_weak_orders(k).unwrap().into_iter().filter(|w| pred(w.ranks())))
}

fn pairs(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|a| (a + 1..k).map(move |b| (a, b))).collect()
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1u32 << items.len())
        .map(|m| items.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, x)| x.clone()).collect())
        .collect()
}

/// Every ORD-Horn clause over `k` variables.
fn all_ord_clauses(k: usize) -> Vec<Clause> {
    let mut heads = vec![None];
    for a in 0..k {
        for b in 0..k {
            if a != b {
                heads.push(Some(SeqLit::Lt(a, b)));
                heads.push(Some(SeqLit::Le(a, b)));
                if a < b {
                    heads.push(Some(SeqLit::Eq(a, b)));
                }
            }
        }
    }
    let mut out = Vec::new();
    for neq in subsets(&pairs(k)) {
        for h in &heads {
            out.push(Clause::new(neq.clone(), h.iter().cloned().collect()));
        }
    }
    out
}

/// Every ll-Horn clause over `k` variables (dual: heads on the left).
fn all_ll_clauses(k: usize, dual: bool) -> Vec<Clause> {
    let mut out = Vec::new();
    for neq in subsets(&pairs(k)) {
        out.push(Clause::new(neq.clone(), vec![]));
        for h in 0..k {
            let others: Vec<usize> = (0..k).filter(|&z| z != h).collect();
            for tail in subsets(&others) {
                for all_equal in [false, true] {
                    if tail.is_empty() {
                        continue;
                    }
                    let mut seq: Vec<SeqLit> =
                        tail.iter().map(|&t| if dual { SeqLit::Lt(h, t) } else { SeqLit::Lt(t, h) }).collect();
                    if all_equal {
                        let mut all = tail.clone();
                        all.push(h);
                        seq.push(SeqLit::AllEqual(all));
                    }
                    out.push(Clause::new(neq.clone(), seq));
                }
            }
        }
    }
    out
}

/// Oracle: `r` is definable in a clause class iff it equals the intersection
/// of all clauses of the class that hold on `r`.
fn definable_by(class: &[Clause], r: &PointRelation) -> bool {
    let models: Vec<WeakOrder> = r.flat_models();
    let valid: Vec<&Clause> = class.iter().filter(|c| models.iter().all(|m| c.holds(m.ranks()))).collect();
    enumerate_weak_orders(r.arity())
        .unwrap()
        .into_iter()
        .all(|w| r.contains(&w) == valid.iter().all(|c| c.holds(w.ranks())))
}

fn brute_models(set: &ClauseSet, k: usize) -> BTreeSet<WeakOrder> {
    enumerate_weak_orders(k).unwrap().into_iter().filter(|w| set.holds(w.ranks())).collect()
}

#[test]
fn syntactic_classes() {
    assert!(is_ll_horn(&cs("x = y -> z1 < z0 \\/ z2 < z0")));
    assert!(!is_ll_horn(&cs("z1 < z2 \\/ z3 < z4")));
    assert!(is_ll_horn(&ClauseSet::default()));
    assert!(is_ll_horn(&cs("-> z1 < z0 \\/ z2 < z0 [alleq]")));
    assert!(is_ll_horn(&cs("z1 <= z0")));
    assert!(!is_ll_horn(&cs("z1 < z0 \\/ z2 <= z0")));
    assert!(!is_ll_horn(&cs("z0 < z1 \\/ z0 < z2")));
    let mut dual = cs("z0 < z1 \\/ z0 < z2");
    dual.dual = true;
    assert!(is_ll_horn(&dual));

    assert!(is_ord_horn(&cs("x != y \\/ u = v")));
    assert!(!is_ord_horn(&cs("-> z1 < z0 \\/ z2 < z0")));
    assert!(is_ord_horn(&cs("x <= y")));
    assert!(!is_ord_horn(&cs("x = y = z")));
}

#[test]
fn parser_round_trips_and_reports_lines() {
    let text = "x != y \\/ u = v\nx = y, u = v -> z1 < z0 \\/ z2 < z0 [alleq]\na >= b\nfalse\n";
    let set = cs(text);
    assert_eq!(set.clauses.len(), 4);
    let again = ClauseSet::parse_with(ClauseSet { clauses: vec![], ..set.clone() }, &set.to_string()).unwrap();
    assert_eq!(again.clauses, set.clauses);
    assert_eq!(set.clauses[2].seq, vec![SeqLit::Le(set.vars.iter().position(|v| v == "b").unwrap(), 7)]);
    match ClauseSet::parse("x < y\nx ?? y") {
        Err(qcsp::Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(ClauseSet::parse("-> x < y \\/ z < w [alleq]").is_err());
}

#[test]
fn models_of_examples() {
    assert_eq!(models_of(&cs("x < y"), 2).unwrap().len(), 1);
    // x = y leaves 13 orders of (xy, u, v), 3 of which tie u and v: 75 - 10
    let m = models_of(&cs("x != y \\/ u = v"), 4).unwrap();
    let direct = enumerate_weak_orders(4).unwrap().iter().filter(|w| {
        let r = w.ranks();
        r[0] != r[1] || r[2] == r[3]
    }).count();
    assert_eq!(direct, 65);
    assert_eq!(m.len(), 65);
    assert_eq!(models_of(&ClauseSet::with_arity(3), 3).unwrap().len(), 13);
    assert!(models_of(&cs("x < y"), 1).is_err());
}

#[test]
fn definability_examples() {
    let imp = rel(4, |r| r[0] != r[1] || r[2] == r[3]);
    let d = ordhorn_definable(&imp).unwrap();
    let set = d.clauses().unwrap();
    assert!(is_ord_horn(set));
    assert_eq!(models_of(set, 4).unwrap(), imp);

    let single = rel(3, |r| r == [0, 1, 1]);
    assert!(ordhorn_definable(&single).unwrap().is_definable());

    let two = rel(4, |r| r[0] < r[1] || r[2] < r[3]);
    for d in [ordhorn_definable(&two).unwrap(), llhorn_definable(&two, false).unwrap(), llhorn_definable(&two, true).unwrap()] {
        let Definable::No { witness } = d else { panic!("z1<z2 or z3<z4 is not Horn") };
        assert!(!two.contains(&witness));
    }
    assert!(!definable_by(&all_ll_clauses(4, false), &two));

    let fan = rel(3, |r| r[1] < r[0] || r[2] < r[0]);
    let d = llhorn_definable(&fan, false).unwrap();
    assert!(is_ll_horn(d.clauses().unwrap()));
    assert_eq!(models_of(d.clauses().unwrap(), 3).unwrap(), fan);
    assert!(!ordhorn_definable(&fan).unwrap().is_definable());

    let full = PointRelation::full(3).unwrap();
    assert!(llhorn_definable(&full, false).unwrap().clauses().unwrap().clauses.is_empty());
    assert!(ordhorn_definable(&PointRelation::flat(2, [])).unwrap().is_definable());
}

#[test]
fn separation_agrees_with_clause_space_on_every_ternary_relation() {
    let all = enumerate_weak_orders(3).unwrap();
    let (ord, ll, dll) = (all_ord_clauses(3), all_ll_clauses(3, false), all_ll_clauses(3, true));
    for mask in 0u32..1 << all.len() {
        let r = PointRelation::flat(3, all.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, w)| w.clone()));
        for (class, d, syntactic) in [
            (&ord, ordhorn_definable(&r).unwrap(), is_ord_horn as fn(&ClauseSet) -> bool),
            (&ll, llhorn_definable(&r, false).unwrap(), is_ll_horn),
            (&dll, llhorn_definable(&r, true).unwrap(), is_ll_horn),
        ] {
            assert_eq!(d.is_definable(), definable_by(class, &r), "mask {mask:#x}");
            if let Definable::Yes(set) = &d {
                assert!(syntactic(set));
                assert_eq!(brute_models(set, 3), r.flat_models().into_iter().collect());
            }
        }
    }
}

#[test]
fn separation_agrees_with_clause_space_on_random_arity_four() {
    let all = enumerate_weak_orders(4).unwrap();
    let (ord, ll) = (all_ord_clauses(4), all_ll_clauses(4, false));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut seen_definable = 0;
    for i in 0..60 {
        // mix sparse random relations with models of random ORD-Horn sets
        let r = if i % 2 == 0 {
            let p = rng.random_range(0.2..0.95);
            PointRelation::flat(4, all.iter().filter(|_| rng.random_bool(p)).cloned())
        } else {
            let mut set = ClauseSet::with_arity(4);
            for _ in 0..rng.random_range(1..4) {
                set.clauses.push(ord[rng.random_range(0..ord.len())].clone());
            }
            models_of(&set, 4).unwrap()
        };
        let d = ordhorn_definable(&r).unwrap();
        assert_eq!(d.is_definable(), definable_by(&ord, &r));
        let l = llhorn_definable(&r, false).unwrap();
        assert_eq!(l.is_definable(), definable_by(&ll, &r));
        if d.is_definable() {
            seen_definable += 1;
            assert!(l.is_definable());
            assert!(llhorn_definable(&r, true).unwrap().is_definable());
        }
    }
    assert!(seen_definable >= 20);
}

#[test]
fn grouped_relations_decide_per_group() {
    // (x0 < x1) on one group, (y0 <= y1) on the other
    let a = rel(2, |r| r[0] < r[1]).flat_models();
    let b = rel(2, |r| r[0] <= r[1]).flat_models();
    let models = a.iter().flat_map(|x| b.iter().map(move |y| vec![x.clone(), y.clone()]));
    let g = PointRelation::grouped(4, vec![vec![0, 2], vec![1, 3]], models);
    let d = llhorn_definable(&g, false).unwrap();
    let set = d.clauses().unwrap();
    assert!(defines(set, &g));
    assert_eq!(brute_models(set, 4).len(), g.flatten().unwrap().len());
}

#[test]
fn propagation_examples() {
    assert!(!ordhorn_satisfiable(&cs("x = y\nx < y")).unwrap());
    assert!(!ordhorn_satisfiable(&cs("x != y \\/ u = v\nx = y\nu < v")).unwrap());
    assert!(ordhorn_satisfiable(&cs("x != y \\/ u = v")).unwrap());
    assert!(ordhorn_satisfiable(&cs("x <= y\ny <= x\nx != y \\/ u < v")).unwrap());
    assert!(!ordhorn_satisfiable(&cs("x <= y\ny <= x\nx != y")).unwrap());
    assert!(matches!(ordhorn_satisfiable(&cs("-> a < b \\/ c < b")), Err(qcsp::Error::NotOrdHorn(_))));
}

fn random_ord_instance(rng: &mut ChaCha8Rng) -> ClauseSet {
    let k = rng.random_range(2..=8);
    let mut set = ClauseSet::with_arity(k);
    for _ in 0..rng.random_range(1..=2 * k) {
        let mut neq = Vec::new();
        for _ in 0..rng.random_range(0..3) {
            neq.push((rng.random_range(0..k), rng.random_range(0..k)));
        }
        neq.retain(|(a, b)| a != b);
        let (a, b) = (rng.random_range(0..k), rng.random_range(0..k));
        let head = match rng.random_range(0..5) {
            0 if a != b => vec![SeqLit::Lt(a, b)],
            1 => vec![SeqLit::Le(a, b)],
            2 | 3 => vec![SeqLit::Eq(a, b)],
            _ => vec![],
        };
        set.clauses.push(Clause::new(neq, head));
    }
    set
}

#[test]
fn propagation_agrees_with_weak_order_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut sat = 0;
    for _ in 0..300 {
        let set = random_ord_instance(&mut rng);
        let k = set.arity();
        let p = propagate(&set).unwrap();
        let oracle = enumerate_weak_orders(k).unwrap().iter().any(|w| {
            let r = w.ranks();
            set.clauses.iter().all(|c| {
                c.neq.iter().any(|&(a, b)| r[a] != r[b])
                    || c.seq.iter().any(|l| match l {
                        SeqLit::Lt(a, b) => r[*a] < r[*b],
                        SeqLit::Le(a, b) => r[*a] <= r[*b],
                        SeqLit::Eq(a, b) => r[*a] == r[*b],
                        SeqLit::AllEqual(_) => unreachable!(),
                    })
            })
        });
        assert_eq!(p.satisfiable, oracle, "{set}");
        assert_eq!(p.stats.backtracks, 0);
        assert!(p.stats.firings <= set.clauses.len() * k * (k - 1) / 2);
        if let Some(w) = &p.witness {
            assert!(set.holds(WeakOrder::from_ranks(w).ranks()));
            sat += 1;
        }
    }
    assert!(sat > 50 && sat < 250, "{sat}");
}

/// Direct re-check of minimality by model comparison.
fn assert_minimal(set: &ClauseSet, r: &PointRelation) {
    let k = r.arity();
    let target: BTreeSet<WeakOrder> = r.flat_models().into_iter().collect();
    assert_eq!(brute_models(set, k), target);
    for i in 0..set.clauses.len() {
        let mut fewer = set.clone();
        fewer.clauses.remove(i);
        assert_ne!(brute_models(&fewer, k), target, "clause {i} removable");
        for s in shrink_options(&set.clauses[i], set.dual) {
            let mut shrunk = set.clone();
            shrunk.clauses[i] = s;
            assert_ne!(brute_models(&shrunk, k), target, "clause {i} shrinkable");
        }
    }
}

#[test]
fn minimize_examples() {
    let dup = cs("x < y\nx < y");
    let r = models_of(&dup, 2).unwrap();
    assert_eq!(minimize(&dup, &r).unwrap().clauses.len(), 1);

    // X- < X+ makes X+ < Y- imply X- < Y-, so X+ leaves the tail
    let set = ClauseSet::parse_with(ClauseSet::new(&["X-", "X+", "Y-"]), "X- < X+\n-> X- < Y- \\/ X+ < Y-").unwrap();
    let r = models_of(&set, 3).unwrap();
    let min = minimize(&set, &r).unwrap();
    assert_eq!(min.to_string(), "X- < X+\nX- < Y-\n");
    assert_minimal(&min, &r);

    // X- < Y- \/ X- < Y+ under Y- < Y+ collapses to the weaker X- < Y+
    let mut set = ClauseSet::parse_with(
        ClauseSet::new(&["X-", "Y-", "Y+"]),
        "Y- < Y+\nX- < Y- \\/ X- < Y+",
    )
    .unwrap();
    set.dual = true;
    let r = models_of(&set, 3).unwrap();
    let min = minimize(&set, &r).unwrap();
    assert_eq!(min.to_string(), "X- < Y+\nY- < Y+\n");
    assert_minimal(&min, &r);

    assert!(minimize(&cs("x < y"), &PointRelation::full(2).unwrap()).is_err());
}

#[test]
fn minimized_separation_output_is_minimal() {
    let all = enumerate_weak_orders(4).unwrap();
    let ord = all_ord_clauses(4);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for _ in 0..15 {
        let mut set = ClauseSet::with_arity(4);
        for _ in 0..rng.random_range(1..4) {
            set.clauses.push(ord[rng.random_range(0..ord.len())].clone());
        }
        let r = PointRelation::flat(4, all.iter().filter(|w| set.holds(w.ranks())).cloned());
        for dual in [false, true] {
            let d = llhorn_definable(&r, dual).unwrap();
            let found = d.clauses().unwrap();
            let min = minimize(found, &r).unwrap();
            assert!(is_ll_horn(&min));
            assert_minimal(&min, &r);
        }
    }
}

#[test]
fn interval_algebra_has_868_ord_horn_relations() {
    use qcsp::point::relation_of;
    use qcsp::relations::relation::QualRelation;
    let count = (0u32..1 << 13)
        .filter(|mask| {
            let r = QualRelation::from_indices(qcsp::Calculus::Ia, (0..13).filter(|i| mask >> i & 1 == 1));
            ordhorn_definable(&relation_of(&r)).unwrap().is_definable()
        })
        .count();
    assert_eq!(count, 868);
}

#[test]
fn the_empty_relation_is_defined_by_false() {
    let empty = PointRelation::flat(3, vec![]);
    assert!(defines(&cs("false"), &empty));
    assert!(!defines(&cs("x < y"), &empty));
    let d = llhorn_definable(&empty, false).unwrap();
    assert!(defines(d.clauses().unwrap(), &empty));
    assert_eq!(minimize(d.clauses().unwrap(), &empty).unwrap().clauses.len(), 1);
}

#[test]
fn grouped_definitions_agree_with_the_flattened_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let two = enumerate_weak_orders(2).unwrap();
    let ord = all_ord_clauses(2);
    for _ in 0..40 {
        let factor = |rng: &mut ChaCha8Rng| -> Vec<WeakOrder> {
            loop {
                let f: Vec<WeakOrder> = two.iter().filter(|_| rng.random_bool(0.6)).cloned().collect();
                if !f.is_empty() {
                    return f;
                }
            }
        };
        let (a, b) = (factor(&mut rng), factor(&mut rng));
        let models = a.iter().flat_map(|x| b.iter().map(move |y| vec![x.clone(), y.clone()]));
        let g = PointRelation::grouped(4, vec![vec![0, 2], vec![1, 3]], models);
        let flat = g.flatten().unwrap();
        // exact definitions, and perturbed ones with an extra random clause
        let d = ordhorn_definable(&g).unwrap();
        let mut set = d.clauses().unwrap().clone();
        assert!(defines(&set, &g) && defines(&set, &flat));
        let c = ord[rng.random_range(0..ord.len())].map_vars(|v| [0, 2][v]);
        set.clauses.push(c);
        assert_eq!(defines(&set, &g), defines(&set, &flat), "{set}");
        let min = minimize(d.clauses().unwrap(), &g).unwrap();
        assert_eq!(brute_models(&min, 4).len(), flat.len());
    }
}

#[test]
fn a_product_with_a_non_ll_factor_is_not_ll_horn() {
    // z1 < z2 or z3 < z4 has no ll-Horn definition; pair it with a free slot
    let two = rel(4, |r| r[0] < r[1] || r[2] < r[3]).flat_models();
    let one = rel(1, |_| true).flat_models();
    let models = two.iter().flat_map(|x| one.iter().map(move |y| vec![x.clone(), y.clone()]));
    let g = PointRelation::grouped(5, vec![vec![0, 1, 3, 4], vec![2]], models);
    let flat = g.flatten().unwrap();
    for dual in [false, true] {
        let Definable::No { witness } = llhorn_definable(&g, dual).unwrap() else {
            panic!("product of a non-ll factor accepted")
        };
        assert!(!flat.contains(&witness));
        assert!(!llhorn_definable(&flat, dual).unwrap().is_definable());
    }
}
