use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use tncb_ffi::*;

fn fixture(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    CString::new(std::fs::read_to_string(p).unwrap()).unwrap()
}

fn s(p: *const c_char) -> String {
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

struct Handles {
    grammar: *mut TncbGrammar,
    bag: *mut TncbBag,
}

impl Handles {
    fn load(grammar: &str, bag: &str) -> Self {
        let mut h = Handles {
            grammar: ptr::null_mut(),
            bag: ptr::null_mut(),
        };
        unsafe {
            assert_eq!(tncb_grammar_parse(fixture(grammar).as_ptr(), &mut h.grammar), TncbStatus::Ok);
            assert_eq!(tncb_bag_parse_json(fixture(bag).as_ptr(), &mut h.bag), TncbStatus::Ok);
        }
        h
    }

    fn generate(&self, init: u32, seed: u64, brk: Option<&CString>, flags: u32) -> (TncbStatus, *mut TncbResult) {
        let mut r = ptr::null_mut();
        let b = brk.map_or(ptr::null(), |b| b.as_ptr());
        let st = unsafe { tncb_generate(self.grammar, self.bag, init, seed, b, flags, &mut r) };
        (st, r)
    }
}

impl Drop for Handles {
    fn drop(&mut self) {
        unsafe {
            tncb_grammar_free(self.grammar);
            tncb_bag_free(self.bag);
        }
    }
}

#[test]
fn worked_example_through_the_abi() {
    let h = Handles::load("english.grammar", "dog.bag.json");
    assert_eq!(unsafe { tncb_bag_len(h.bag) }, 6);
    let (st, r) = h.generate(TNCB_INIT_RIGHT, 0, None, 0);
    assert_eq!(st, TncbStatus::Ok);
    unsafe {
        assert!(tncb_result_succeeded(r));
        assert_eq!(s(tncb_result_orth(r)), "the big brown dog barked");
        assert_eq!(tncb_result_fragment_count(r), 0);
        assert!(tncb_result_fragment(r, 0).is_null());
        assert!(tncb_result_combine_calls(r) > 0);
        let trace: serde_json::Value = serde_json::from_str(&s(tncb_result_trace_json(r))).unwrap();
        assert_eq!(trace.as_array().unwrap().len(), 4);
        tncb_result_free(r);
    }
}

#[test]
fn mirror_and_random_init() {
    let h = Handles::load("english.grammar", "japanese_en.bag.json");
    let brk = fixture("japanese_en.brk");
    let (st, r) = h.generate(TNCB_INIT_MIRROR, 0, Some(&brk), 0);
    assert_eq!(st, TncbStatus::Ok);
    unsafe {
        assert_eq!(s(tncb_result_orth(r)), "the book is red");
        assert_eq!(tncb_result_rewrites(r), 0);
        tncb_result_free(r);
    }
    let (st, r) = h.generate(TNCB_INIT_RANDOM, 9, None, 0);
    assert_eq!(st, TncbStatus::Ok);
    unsafe {
        assert_eq!(s(tncb_result_orth(r)), "the book is red");
        tncb_result_free(r);
    }
    let (st, r) = h.generate(TNCB_INIT_MIRROR, 0, None, 0);
    assert_eq!(st, TncbStatus::NullArgument);
    assert!(r.is_null());
    let (st, _) = h.generate(7, 0, None, 0);
    assert_eq!(st, TncbStatus::InputError);
    assert!(s(tncb_last_error()).contains("init mode"));
}

#[test]
fn fragments_on_failure() {
    let h = Handles::load("english.grammar", "the_the.bag.json");
    let (st, r) = h.generate(TNCB_INIT_RIGHT, 0, None, 0);
    assert_eq!(st, TncbStatus::Ok);
    unsafe {
        assert!(!tncb_result_succeeded(r));
        assert!(tncb_result_orth(r).is_null());
        assert_eq!(tncb_result_fragment_count(r), 2);
        assert_eq!(s(tncb_result_fragment(r, 1)), "the");
        tncb_result_free(r);
    }
}

#[test]
fn violations_map_to_status_codes() {
    let h = Handles::load("adversarial_precedence.grammar", "adversarial_precedence.bag.json");
    let (st, r) = h.generate(TNCB_INIT_RIGHT, 0, None, 0);
    assert_eq!(st, TncbStatus::AssumptionViolation);
    assert!(r.is_null());
    assert!(s(tncb_last_error()).contains("dog brown"));
    let (st, r) = h.generate(TNCB_INIT_RIGHT, 0, None, TNCB_FLAG_LENIENT);
    assert_eq!(st, TncbStatus::Ok);
    unsafe {
        assert_eq!(s(tncb_result_orth(r)), "brown dog");
        tncb_result_free(r);
    }
    let h = Handles::load("adversarial_dominance.grammar", "adversarial_dominance.bag.json");
    for flags in [0, TNCB_FLAG_UNBOUNDED] {
        assert_eq!(h.generate(TNCB_INIT_RIGHT, 0, None, flags).0, TncbStatus::AssumptionViolation);
    }
}

#[test]
fn realizations_as_json() {
    let h = Handles::load("english.grammar", "dog.bag.json");
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(tncb_realizations_json(h.grammar, h.bag, &mut out), TncbStatus::Ok);
        assert_eq!(s(out), r#"["the big brown dog barked"]"#);
        tncb_string_free(out);
    }
}

#[test]
fn bad_input_is_reported() {
    let mut g = ptr::null_mut();
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(tncb_grammar_parse(c"rule nonsense".as_ptr(), &mut g), TncbStatus::ParseError);
        assert!(g.is_null());
        assert!(!s(tncb_last_error()).is_empty());
        assert_eq!(tncb_bag_parse_json(c"{".as_ptr(), &mut b), TncbStatus::ParseError);
        assert_eq!(tncb_grammar_parse(ptr::null(), &mut g), TncbStatus::NullArgument);
        assert_eq!(tncb_bag_parse_json(c"[]".as_ptr(), ptr::null_mut()), TncbStatus::NullArgument);
        let bad = [0xffu8, 0];
        assert_eq!(tncb_grammar_parse(bad.as_ptr().cast(), &mut g), TncbStatus::InvalidUtf8);
        assert_eq!(tncb_bag_len(ptr::null()), 0);
        assert!(!tncb_result_succeeded(ptr::null()));
        tncb_grammar_free(ptr::null_mut());
        tncb_bag_free(ptr::null_mut());
        tncb_result_free(ptr::null_mut());
        tncb_string_free(ptr::null_mut());
    }
    assert_eq!(s(tncb_version()), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/tncb.h")).unwrap();
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 17);
    for f in exports {
        assert!(header.contains(&format!(" {f}(")) || header.contains(&format!("*{f}(")), "{f}");
    }
    for item in ["typedef struct TncbGrammar TncbGrammar;", "TNCB_STATUS_ASSUMPTION_VIOLATION = 5", "#define TNCB_FLAG_LENIENT 2"] {
        assert!(header.contains(item), "{item}");
    }
}
