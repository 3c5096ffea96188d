// Runs the quick examples so they keep compiling and working.

macro_rules! example {
    ($test:ident, $file:literal) => {
        #[test]
        fn $test() {
            #[allow(dead_code)]
            mod ex {
                include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
            }
            ex::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(phase_shift, "phase_shift.rs");
example!(transform_round_trip, "transform_round_trip.rs");
example!(ode_model_problem, "ode_model_problem.rs");
example!(nonmatching, "nonmatching.rs");
example!(wave1d_correction, "wave1d_correction.rs");
example!(memory_scan, "memory_scan.rs");
example!(cfl, "cfl.rs");
example!(wave_packet, "wave_packet.rs");
example!(lemma_init, "lemma_init.rs");
example!(model_io, "model_io.rs");
example!(batch_apply, "batch_apply.rs");
