use ukp_core::generate::{generate_instance, Profile};
use ukp_core::io::{parse_instance, parse_machine, render_instance, render_machine};
use ukp_core::{solve, Rational};

#[test]
fn generated_instances_roundtrip() {
    for i in 0..1000u64 {
        let profile = Profile::ALL[(i % 3) as usize];
        let n = 1 + (i as usize) % 40;
        let d = 2 + (i * 11) % 99;
        let inst = generate_instance(n, d, i, profile).unwrap();
        let text = render_instance(&inst);
        assert_eq!(parse_instance(&text).unwrap(), inst, "instance {i}:\n{text}");
    }
}

#[test]
fn machine_output_retotals_exactly() {
    for i in 0..60u64 {
        let profile = Profile::ALL[(i % 3) as usize];
        let inst = generate_instance(1 + (i as usize) % 30, 64, i, profile).unwrap();
        let eps = [Rational::frac(1, 4), Rational::frac(1, 8), Rational::frac(1, 16)][(i % 3) as usize].clone();
        let res = solve(&inst, &eps).unwrap();
        let parsed = parse_machine(&render_machine(&res)).unwrap();
        let retotaled = parsed.retotal(&inst).unwrap();
        assert_eq!(parsed.profit, res.profit);
        assert_eq!(&parsed.size, res.solution.total_size());
        assert_eq!(parsed.branch, res.branch);
        assert_eq!(retotaled, res.solution);
        let counters: Vec<(String, u64)> = res
            .stats
            .entries()
            .iter()
            .map(|(name, value)| (name.to_string(), *value))
            .collect();
        assert_eq!(parsed.counters, counters);
    }
}

#[test]
fn decimal_and_fraction_inputs_agree() {
    let a = parse_instance("c 2\nitem 0.5 0.8\nitem 1/4 .1\n").unwrap();
    let b = parse_instance("c 2/1\nitem 1/2 4/5\nitem 1/4 1/10\n").unwrap();
    assert_eq!(a, b);
}
