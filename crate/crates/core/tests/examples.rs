// Every crate example must run to completion.

macro_rules! example {
    ($module:ident, $test:ident, $file:literal) => {
        #[allow(dead_code)]
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(sign_variation, sign_variation_runs, "sign_variation.rs");
example!(minors_and_compounds, minors_and_compounds_runs, "minors_and_compounds.rs");
example!(classify, classify_runs, "classify.rs");
example!(spectrum, spectrum_runs, "spectrum.rs");
example!(verify_spectral, verify_spectral_runs, "verify_spectral.rs");
example!(compound_perron, compound_perron_runs, "compound_perron.rs");
example!(variation_diminishing, variation_diminishing_runs, "variation_diminishing.rs");
example!(linear_systems, linear_systems_runs, "linear_systems.rs");
example!(entrainment, entrainment_runs, "entrainment.rs");
