use focusgen::frontend::load_dsl;
use focusgen::ir::mutate::{mutate, Mutation};
use focusgen::oracle::{lower_all, run_oracle, Exec, OracleConfig};

const ECHO: &str = include_str!("../../../corpus/echo.afm");

#[test]
fn echo_is_faithful_at_horizon_four() {
    let (m, _) = load_dsl(ECHO).unwrap();
    let frames = lower_all(&m);
    let r = run_oracle(&m, m.root, &frames, &OracleConfig::default()).unwrap();
    assert_eq!(r.sequences, 81);
    assert!(r.counterexample.is_none(), "{:?}", r.counterexample.map(|c| c.failure));
}

#[test]
fn mutations_are_caught() {
    let (m, _) = load_dsl(ECHO).unwrap();
    let frames = lower_all(&m);
    let mut caught = 0;
    for mutation in Mutation::ALL {
        let Some(bad) = mutate(&frames[m.root], mutation) else { continue };
        let mut fs = frames.clone();
        fs[m.root] = bad;
        for exec in [Exec::Sequential, Exec::default()] {
            let cfg = OracleConfig { exec, ..OracleConfig::default() };
            let r = run_oracle(&m, m.root, &fs, &cfg).unwrap();
            assert!(r.counterexample.is_some(), "{mutation} survived");
        }
        caught += 1;
    }
    assert!(caught >= 5, "only {caught} mutations applied");
}
