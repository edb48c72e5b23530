mod common;

use common::*;
use temposum_core::protoforms::*;
use temposum_core::Granularity;

fn summaries(v: &[f64], env: &Env) -> Vec<Summary> {
    let f = frame(&[("Steps", v)]);
    generate_all(&f, &env.ctx(), None).unwrap()
}

fn steady() -> Vec<f64> {
    let mut v = vec![3.0; 7];
    v.extend([1.0, 1.0, 2.0, 2.0, 3.0, 4.0, 5.0]);
    v
}

#[test]
fn identical_users_give_all_of_the_participants() {
    let env = Env::new();
    let one = summaries(&steady(), &env);
    let per_user = vec![one.clone(), one.clone(), one.clone()];
    let group = gen_group(&per_user, Granularity::week(), &env.ctx()).unwrap();
    assert_eq!(group.len(), one.len());
    for s in &group {
        assert!(s.kind.is_group());
        assert_eq!(s.quantifier.as_deref(), Some("all of the"));
        assert_eq!(s.truth, Some(1.0));
        assert_eq!(s.supporting_points, vec![0, 1, 2]);
        assert_eq!(s.support_ratio(), Some(1.0));
        assert!(s.text.to_lowercase().contains("all of the participants"), "{}", s.text);
    }
    let stw = group
        .iter()
        .find(|s| s.group_of == Some(ProtoformType::StandardEvalSTW))
        .unwrap();
    assert!(stw.text.starts_with("All of the participants"), "{}", stw.text);
    assert_eq!(stw.inner_quantifier.as_deref(), Some("some of the"));
}

#[test]
fn one_user_is_not_a_group() {
    let env = Env::new();
    let one = summaries(&steady(), &env);
    assert_eq!(
        gen_group(&[one], Granularity::week(), &env.ctx()),
        Err(GroupError::CohortTooSmall(1))
    );
    assert_eq!(
        gen_group(&[], Granularity::week(), &env.ctx()),
        Err(GroupError::CohortTooSmall(0))
    );
}

#[test]
fn split_cohort_gives_half() {
    let env = Env::new();
    let a = summaries(&steady(), &env);
    let mut high = vec![3.0; 7];
    high.extend([5.0; 7]);
    let b = summaries(&high, &env);
    let group = gen_group(&[a, b], Granularity::week(), &env.ctx()).unwrap();
    let tw: Vec<&Summary> = group
        .iter()
        .filter(|s| s.group_of == Some(ProtoformType::StandardEvalTW))
        .collect();
    assert_eq!(tw.len(), 2);
    for s in tw {
        assert_eq!(s.quantifier.as_deref(), Some("half of the"));
        assert!(s.text.starts_with("Half of the participants"), "{}", s.text);
        assert_eq!(s.r_values, vec![0.5, 0.5]);
        assert_eq!(s.supporting_points.len(), 1);
    }
}
