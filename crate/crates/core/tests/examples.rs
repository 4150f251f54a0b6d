//! Runs every example's entry point.

macro_rules! example {
    ($name:ident, $path:literal) => {
        #[allow(dead_code)]
        #[path = $path]
        mod $name;

        #[test]
        fn $name() {
            $name::run_example().unwrap();
        }
    };
}

example!(pair_space, "../examples/pair_space.rs");
example!(centrality_check, "../examples/centrality_check.rs");
example!(kites, "../examples/kites.rs");
example!(trapezium, "../examples/trapezium.rs");
example!(region_map, "../examples/region_map.rs");
example!(rotation, "../examples/rotation.rs");
example!(collapse, "../examples/collapse.rs");
example!(dziobek, "../examples/dziobek.rs");
example!(config_files, "../examples/config_files.rs");
