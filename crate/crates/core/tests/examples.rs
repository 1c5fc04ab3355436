//! Runs every example program in-process.

macro_rules! example {
    ($name:ident, $file:literal) => {
        #[path = $file]
        mod $name;

        #[test]
        fn $name() {
            $name::main().unwrap();
        }
    };
}

example!(sl2_accessibility, "../examples/sl2_accessibility.rs");
example!(heisenberg_adrank, "../examples/heisenberg_adrank.rs");
example!(aff2_dichotomy, "../examples/aff2_dichotomy.rs");
example!(kalman_rn, "../examples/kalman_rn.rs");
example!(reachable_cloud, "../examples/reachable_cloud.rs");
example!(expression_system, "../examples/expression_system.rs");
example!(control_set_probe, "../examples/control_set_probe.rs");
example!(regular_pairs, "../examples/regular_pairs.rs");
