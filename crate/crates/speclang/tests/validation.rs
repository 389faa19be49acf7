use gsys_lang::{parse, validate, LangError, ValidationErrorKind as K};

fn validation_error(src: &str) -> gsys_lang::ValidationError {
    let doc = parse(src).unwrap();
    let err = validate(&doc).unwrap_err();
    // every validation error points inside some item
    assert!(
        doc.items.iter().any(|i| i.span.contains(&err.span)),
        "span {:?} outside all items",
        err.span
    );
    err
}

const PRELUDE: &str = "magma Z2 = cyclic(2);\n";

#[test]
fn unknown_system_in_query() {
    let src = format!("{PRELUDE}query q: dep(nothing, {{a}}, {{b}});");
    let e = validation_error(&src);
    assert_eq!(e.kind, K::UnknownName);
    assert_eq!(&src[e.span.start..e.span.end], "nothing");
}

#[test]
fn undeclared_variable_in_rule() {
    let src = format!("{PRELUDE}system s over Z2 vars {{a}} {{ a := a . zz; }}");
    let e = validation_error(&src);
    assert_eq!(e.kind, K::UnboundVariable);
    assert_eq!(&src[e.span.start..e.span.end], "zz");
    assert_eq!(e.span.line, 2);
}

#[test]
fn domain_must_be_closed() {
    let src = format!("{PRELUDE}system s over Z2 vars {{a}} domain {{ (a=0); }} {{ a := a . #1; }}");
    assert_eq!(validation_error(&src).kind, K::DomainNotClosed);
}

#[test]
fn function_arity_is_checked() {
    let src = format!("{PRELUDE}fn f/2 over Z2 = [[0, 1], [1, 0]];\nsystem s over Z2 vars {{a}} {{ a := f(a); }}");
    assert_eq!(validation_error(&src).kind, K::ArityMismatch);
    let src = format!("{PRELUDE}fn f/2 over Z2 = [0, 1];");
    assert_eq!(validation_error(&src).kind, K::ArityMismatch);
}

#[test]
fn query_arguments_are_typed() {
    let src = format!("{PRELUDE}system s over Z2 vars {{a}} {{ a := a; }}\nquery q: dep(s, a, {{a}});");
    assert_eq!(validation_error(&src).kind, K::TypeMismatch);
    let src = format!("{PRELUDE}system s over Z2 vars {{a}} {{ a := a; }}\nquery q: dep(s, {{b}}, {{a}});");
    assert_eq!(validation_error(&src).kind, K::VarSetMismatch);
    let src = format!("{PRELUDE}system s over Z2 vars {{a}} {{ a := a; }}\nquery q: frobnicate(s);");
    assert_eq!(validation_error(&src).kind, K::UnknownName);
}

#[test]
fn duplicates_are_rejected() {
    let src = format!("{PRELUDE}magma Z2 = cyclic(3);");
    assert_eq!(validation_error(&src).kind, K::DuplicateName);
    let src = format!("{PRELUDE}system s over Z2 vars {{a}} {{ a := a; a := a; }}");
    assert_eq!(validation_error(&src).kind, K::DuplicateName);
}

#[test]
fn missing_rule() {
    let src = format!("{PRELUDE}system s over Z2 vars {{a, b}} {{ a := a; }}");
    assert_eq!(validation_error(&src).kind, K::VarSetMismatch);
}

#[test]
fn coupling_over_different_magmas() {
    let src = format!(
        "{PRELUDE}magma Z3 = cyclic(3);\nsystem s over Z2 vars {{a}} {{ a := a; }}\nsystem t over Z3 vars {{a}} {{ a := a; }}\nsystem u = couple(s, t);"
    );
    assert_eq!(validation_error(&src).kind, K::MagmaMismatch);
}

#[test]
fn parse_errors_carry_positions() {
    let err = gsys_lang::load("magma Z2 = cyclic(2)\nsystem").unwrap_err();
    let LangError::Parse(p) = err else { panic!("{err:?}") };
    assert_eq!((p.span.line, p.span.col), (2, 1));
    assert!(p.expected.iter().any(|e| e == "`;`"));
}
