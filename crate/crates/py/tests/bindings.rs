use pyo3::prelude::*;
use pyo3::types::PyDict;

fn run(code: &str) {
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(hofix::hofix)(py);
        let globals = PyDict::new(py);
        globals.set_item("hofix", m).unwrap();
        let code = std::ffi::CString::new(code).unwrap();
        py.run(&code, Some(&globals), None).map_err(|e| e.display(py)).unwrap();
    });
}

#[test]
fn poset_round_trip() {
    run(r#"
p = hofix.Poset.discrete(["a", "b"]).lift()
assert len(p) == 3
assert hofix.Poset.from_json(p.to_json()).is_isomorphic(p)
assert not p.is_isomorphic(hofix.Poset.chain(3))
"#);
}

#[test]
fn solve_deterministic_family() {
    run(r#"
s = hofix.solve("(V -!> Id) + W")
assert s.solved and s.level == 1
assert s.param_sizes[0] == 1 and len(s.z) == 1
"#);
}

#[test]
fn errors_become_value_errors() {
    run(r#"
try:
    hofix.Poset.from_json('{"elements": ["a", "a"]}')
except ValueError as e:
    assert str(e).startswith("DuplicateElement"), str(e)
else:
    raise AssertionError("duplicate accepted")
"#);
}
