//! Every corpus entry against its expectation file.

mod common;

use common::oracles::{self, Oracle, V};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ratt::corpus::{self, Expectation, UnsafeTrace};
use ratt::drivers::{
    parse_value, run_stream, run_stream_typed, run_transducer_typed, stream_init, value_to_string, Driver, Gc, Run,
};
use ratt::machine::{Allocator, DEFAULT_FUEL};
use ratt::surface::pretty::type_to_string;

#[test]
fn declared_types_match_the_sources() {
    for file in corpus::files() {
        let module = file.compile();
        for entry in corpus::entries_of(file) {
            let def = module.get(&entry.name).unwrap();
            assert_eq!(type_to_string(&def.ty), entry.ty, "{}", entry.name);
        }
    }
}

#[test]
fn entries_check_or_are_rejected_as_expected() {
    for file in corpus::files() {
        let module = file.compile();
        for entry in corpus::entries_of(file) {
            let def = module.get(&entry.name).unwrap();
            match &entry.expectation {
                Expectation::Checks | Expectation::Runs { .. } => {
                    assert!(def.is_ok(), "{}: {:?}", entry.name, def.diagnostic())
                }
                Expectation::Rejected { error, .. } => {
                    let d = def.diagnostic().unwrap_or_else(|| panic!("{} type checks", entry.name));
                    assert_eq!(&d.kind, error, "{}", entry.name);
                }
            }
        }
    }
}

#[test]
fn the_leaky_nats_file_has_exactly_one_failure() {
    let module = corpus::file("leaky_nats").unwrap().compile();
    let kinds: Vec<String> = module.diagnostics().into_iter().map(|d| d.kind).collect();
    assert_eq!(kinds, ["UnboxUnderTick"]);
}

#[test]
fn library_files_type_check_completely() {
    for stem in ["basics", "nats", "sum", "frp", "lustre"] {
        let module = corpus::file(stem).unwrap().compile();
        assert!(module.diagnostics().is_empty(), "{stem}: {:?}", module.diagnostics());
    }
}

fn shown(run: &Run, ty: &ratt::Type) -> Vec<String> {
    run.outputs.iter().map(|v| value_to_string(v, ty)).collect()
}

#[test]
fn golden_examples() {
    for p in common::streams() {
        let Expectation::Runs { examples, .. } = &p.entry.expectation else { unreachable!() };
        for ex in examples {
            let run = run_stream_typed(&p.term, ex.outputs.len(), &p.elem, Gc::On);
            assert!(run.error.is_none(), "{}: {:?}", p.entry.name, run.error);
            assert_eq!(shown(&run, &p.elem), ex.outputs, "{}", p.entry.name);
        }
    }
    for p in common::transducers() {
        let Expectation::Runs { examples, .. } = &p.entry.expectation else { unreachable!() };
        assert!(!examples.is_empty(), "{} has no example", p.entry.name);
        for ex in examples {
            let inputs: Vec<_> = ex.inputs.iter().map(|s| parse_value(s).unwrap()).collect();
            let run = run_transducer_typed(&p.term, &inputs, &p.input, &p.output, Gc::On);
            assert!(run.error.is_none(), "{}: {:?}", p.entry.name, run.error);
            assert_eq!(shown(&run, &p.output), ex.outputs, "{}", p.entry.name);
        }
    }
}

#[test]
fn two_hundred_steps_without_error_in_bounded_space() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for p in common::streams() {
        let run = run_stream_typed(&p.term, 200, &p.elem, Gc::On);
        assert!(run.error.is_none(), "{}: {:?}", p.entry.name, run.error);
        let Expectation::Runs { heap_bound, .. } = &p.entry.expectation else { unreachable!() };
        if let Some(c) = heap_bound {
            assert!(run.heap_sizes().iter().all(|n| n == c), "{}: {:?}", p.entry.name, run.heap_sizes());
        }
    }
    for p in common::transducers() {
        let inputs = common::random_inputs(&mut rng, &p.input, 200);
        let run = run_transducer_typed(&p.term, &inputs, &p.input, &p.output, Gc::On);
        assert!(run.error.is_none(), "{}: {:?}", p.entry.name, run.error);
        assert_eq!(run.outputs.len(), 200);
        // No transducer here keeps more than a handful of bindings.
        assert!(run.heap_sizes().iter().all(|&n| n <= 16), "{}: {:?}", p.entry.name, run.heap_sizes());
    }
}

#[test]
fn every_runnable_entry_is_a_stream_or_transducer_with_an_oracle() {
    let runs: Vec<_> = corpus::list_entries().into_iter().filter(common::is_runs).collect();
    let programs = common::streams().len() + common::transducers().len();
    assert_eq!(runs.len(), programs);
    for e in runs {
        let Expectation::Runs { oracle, .. } = &e.expectation else { unreachable!() };
        let (_, ty) = common::runnable(&e);
        match oracles::lookup(oracle) {
            Oracle::Stream(_) => assert!(common::stream_elem(&ty).is_some(), "{}", e.name),
            Oracle::Transducer(_) => assert!(common::transducer_types(&ty).is_some(), "{}", e.name),
        }
    }
}

#[test]
fn oracles_agree_on_a_few_random_inputs() {
    // The full comparison is acceptance criterion 10; this is a quick pass.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in common::transducers() {
        let Expectation::Runs { oracle, .. } = &p.entry.expectation else { unreachable!() };
        let Oracle::Transducer(f) = oracles::lookup(oracle) else { panic!() };
        for _ in 0..5 {
            let inputs = common::random_inputs(&mut rng, &p.input, 20);
            let run = run_transducer_typed(&p.term, &inputs, &p.input, &p.output, Gc::On);
            let vs: Vec<V> = inputs.iter().map(V::from_term).collect();
            let expected: Vec<_> = f(&vs).iter().map(V::to_term).collect();
            assert_eq!(run.outputs, expected, "{} on {:?}", p.entry.name, vs);
        }
    }
}

#[test]
fn sum_equals_scan_with_plus() {
    let (sum, _) = common::def("sum");
    let (scan, _) = common::def("sumScan");
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let inputs = common::random_inputs(&mut rng, &ratt::Type::Nat, 40);
        assert_eq!(ratt::drivers::run_transducer(&sum, &inputs).outputs, ratt::drivers::run_transducer(&scan, &inputs).outputs);
    }
}

#[test]
fn iterated_successor_equals_nats() {
    let (nats, _) = common::def("nats");
    for name in ["iterNats", "iterGeneralNats", "lnats"] {
        let (t, _) = common::def(name);
        assert_eq!(run_stream(&t, 100).outputs, run_stream(&nats, 100).outputs, "{name}");
    }
}

fn unsafe_run(term: &ratt::Term, trace: &UnsafeTrace, steps: usize) -> Run {
    let mut driver = Driver::new(DEFAULT_FUEL, Gc::On);
    if trace.allocator.as_deref() == Some("fresh") {
        driver.machine().allocator = Allocator::Monotonic { next: 0 };
    }
    let mut state = stream_init(term);
    let mut run = Run::default();
    for _ in 0..steps {
        match driver.stream_step(&state) {
            Ok((v, next, stats)) => {
                run.outputs.push(v);
                run.stats.push(stats);
                state = next;
            }
            Err(e) => {
                run.error = Some(e);
                break;
            }
        }
    }
    run
}

#[test]
fn rejected_programs_behave_as_recorded_when_run_anyway() {
    let mut seen = 0;
    for entry in corpus::list_entries() {
        let Expectation::Rejected { unsafe_trace: Some(trace), .. } = &entry.expectation else { continue };
        seen += 1;
        let (term, ty) = common::runnable(&entry);
        let elem = match &ty {
            ratt::Type::Box(inner) => inner.as_stream().unwrap().clone(),
            _ => unreachable!(),
        };
        let steps = trace.outputs.len() + usize::from(trace.stuck.is_some());
        let run = unsafe_run(&term, trace, steps);
        assert_eq!(shown(&run, &elem), trace.outputs, "{}", entry.name);
        assert_eq!(run.heap_sizes(), trace.heap_sizes, "{}", entry.name);
        match (&trace.stuck, &run.error) {
            (Some(s), Some(e)) => {
                assert_eq!((e.step(), e.kind()), (s.step, s.kind.clone()), "{}", entry.name);
            }
            (None, None) => {}
            (s, e) => panic!("{}: expected {s:?}, got {e:?}", entry.name),
        }
    }
    assert_eq!(seen, 3);
}
