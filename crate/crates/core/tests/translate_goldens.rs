//! Frozen Cypher text for hand-written concrete instances. Set
//! `QLAT_BLESS=1` to rewrite the `.cypher` files after a reviewed change.

use std::path::{Path, PathBuf};

use qlattice::dsl::parse;
use qlattice::instantiate::{build_lattice, LatticeOptions};
use qlattice::translate::translate;

const LIMIT: usize = 25;

fn cases() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/goldens");
    let mut out: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "gq"))
        .collect();
    out.sort();
    out
}

fn render(gq: &Path) -> String {
    let qr = parse(&std::fs::read_to_string(gq).unwrap())
        .unwrap_or_else(|d| panic!("{}: {d:?}", gq.display()))
        .query;
    let l = build_lattice(&qr, &LatticeOptions::default()).unwrap();
    let limit = (!gq.to_string_lossy().contains("01-")).then_some(LIMIT);
    translate(l.instance(&l.fs_final).unwrap(), limit).unwrap().text + "\n"
}

#[test]
fn translations_match_goldens() {
    let bless = std::env::var_os("QLAT_BLESS").is_some();
    let cases = cases();
    assert_eq!(cases.len(), 10);
    for gq in cases {
        let got = render(&gq);
        assert_eq!(got, render(&gq), "{} is not stable", gq.display());
        let golden = gq.with_extension("cypher");
        if bless {
            std::fs::write(&golden, &got).unwrap();
        }
        let want = std::fs::read_to_string(&golden).unwrap_or_else(|_| panic!("missing {}", golden.display()));
        assert_eq!(got, want, "{}", gq.display());
    }
}

#[test]
fn goldens_cover_every_operator() {
    let text: String = cases()
        .iter()
        .map(|g| std::fs::read_to_string(g.with_extension("cypher")).unwrap())
        .collect();
    for op in [" = ", " <> ", " < ", " <= ", " > ", " >= "] {
        assert!(text.contains(op), "no golden uses `{}`", op.trim());
    }
    assert!(text.contains("]->("), "no directed edge");
    assert!(text.contains("]-("), "no undirected edge");
}
