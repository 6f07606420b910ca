use nearbest_harness::config::{ExperimentConfig, ModeSpec, DEFAULT_BRANCH_RADIUS};

const CORNER: &str = "\
[scenario]
name = corner
mode = theorem2
degrees = 16, 32
singular = 1

[lemniscate]
n = 4
r = 1

[piece]
kind = segment
from = 1
to = 0

[piece]
kind = segment
from = 0
to = i

[branch]
expr = 0

[branch]
expr = z
radius = 5

[compact]
intervals = 0:0.5, 1.5:2
";

fn error_line(text: &str) -> (usize, String) {
    let e = ExperimentConfig::parse(text).unwrap_err();
    (e.line, e.message)
}

#[test]
fn parses_the_corner_scenario() {
    let cfg = ExperimentConfig::parse(CORNER).unwrap();
    assert_eq!(cfg.name, "corner");
    assert_eq!(cfg.mode, ModeSpec::Theorem2 { n: 4, r: 1.0 });
    assert_eq!(cfg.degrees, vec![16, 32]);
    assert_eq!(cfg.pieces.len(), 2);
    assert_eq!(cfg.singular, vec![1.0]);
    assert_eq!(cfg.branches[0].radius, DEFAULT_BRANCH_RADIUS);
    assert_eq!(cfg.branches[1].radius, 5.0);
    assert_eq!(cfg.compact[0].name, "E1");
    assert_eq!(cfg.compact[0].intervals, vec![(0.0, 0.5), (1.5, 2.0)]);
    assert!(cfg.compact[0].contains(1.75) && !cfg.compact[0].contains(1.0));
    let f = cfg.function().unwrap();
    assert_eq!(f.orders(), &[Some(0)]);
    assert_eq!(cfg.options().n_max, 32);
}

#[test]
fn comments_and_blank_lines_are_ignored() {
    let text = CORNER.replace("[piece]\nkind = segment\nfrom = 1", "# first leg\n[piece]   ; inline\nkind = segment # trailing\nfrom = 1");
    assert!(ExperimentConfig::parse(&text).is_ok());
}

#[test]
fn degrees_must_ascend() {
    let (line, msg) = error_line(&CORNER.replace("degrees = 16, 32", "degrees = 32, 16"));
    assert_eq!(line, 4);
    assert!(msg.contains("ascending"), "{msg}");
    assert_eq!(error_line(&CORNER.replace("degrees = 16, 32", "degrees = 16, 16")).0, 4);
    assert_eq!(error_line(&CORNER.replace("degrees = 16, 32", "degrees = 16, x")).0, 4);
}

#[test]
fn compact_sets_keep_away_from_singular_points() {
    let (line, msg) = error_line(&CORNER.replace("0:0.5, 1.5:2", "0:0.5, 1:2"));
    assert_eq!(line, 29);
    assert!(msg.contains("margin"), "{msg}");
    assert_eq!(error_line(&CORNER.replace("0:0.5, 1.5:2", "0.5:0.2")).0, 29);
    assert_eq!(error_line(&CORNER.replace("0:0.5, 1.5:2", "0-0.5")).0, 29);
}

#[test]
fn unknown_and_repeated_keys() {
    let (line, msg) = error_line(&CORNER.replace("\nr = 1", "\nr = 1\nradius = 2"));
    assert_eq!(line, 10);
    assert!(msg.contains("unknown key 'radius'"), "{msg}");
    let (line, msg) = error_line(&CORNER.replace("from = 1", "from = 1\nfrom = 2"));
    assert_eq!(line, 14);
    assert!(msg.contains("repeated"), "{msg}");
    let (line, _) = error_line(&CORNER.replace("[lemniscate]", "[lemniscates]"));
    assert_eq!(line, 7);
    assert_eq!(error_line(&format!("{CORNER}[scenario]\nname = again\n")).0, 30);
}

#[test]
fn malformed_lines() {
    assert_eq!(error_line(&CORNER.replace("n = 4", "n 4")).0, 8);
    assert_eq!(error_line(&CORNER.replace("n = 4", "n = 0")).0, 8);
    assert_eq!(error_line(&CORNER.replace("\nr = 1", "\nr =")).0, 9);
    assert_eq!(error_line(&CORNER.replace("[piece]\nkind = segment\nfrom = 1", "[piece\nkind = segment\nfrom = 1")).0, 11);
    assert_eq!(error_line(&format!("x = 1\n{CORNER}")).0, 1);
}

#[test]
fn formulas_are_checked_with_columns() {
    let (line, msg) = error_line(&CORNER.replace("expr = z\n", "expr = z + cos(z)\n"));
    assert_eq!(line, 25);
    assert!(msg.contains("column 5"), "{msg}");
    let (line, _) = error_line(&CORNER.replace("to = i", "to = z"));
    assert_eq!(line, 19);
}

#[test]
fn modes_need_their_parameters() {
    let t1 = CORNER.replace("mode = theorem2", "mode = theorem1");
    let (line, msg) = error_line(&t1);
    assert_eq!(line, 3);
    assert!(msg.contains("sigma"), "{msg}");
    let t1 = t1.replace("singular = 1", "singular = 1\nsigma = 0.5");
    let (line, _) = error_line(&t1);
    assert_eq!(line, 8, "lemniscate section is rejected outside theorem2");
    let (line, _) = error_line(&CORNER.replace("mode = theorem2", "mode = fast"));
    assert_eq!(line, 3);
    let best = CORNER.replace("mode = theorem2", "mode = bestapprox").replace("[lemniscate]\nn = 4\nr = 1\n", "");
    assert_eq!(ExperimentConfig::parse(&best).unwrap().mode, ModeSpec::BestApprox);
}

#[test]
fn branch_count_follows_singular_points() {
    let (line, msg) = error_line(&CORNER.replace("singular = 1", "singular = 0.5, 1"));
    assert_eq!(line, 5);
    assert!(msg.contains("3 [branch]"), "{msg}");
    assert_eq!(error_line(&CORNER.replace("singular = 1", "singular = 2")).0, 5);
}

#[test]
fn file_level_errors_have_line_zero() {
    let e = ExperimentConfig::parse("").unwrap_err();
    assert_eq!(e.line, 0);
    assert!(e.to_string().starts_with("config:"));
    let e = ExperimentConfig::parse("[scenario]\nmode = bestapprox\ndegrees = 4\n[branch]\nexpr = z\n").unwrap_err();
    assert!(e.message.contains("[piece]"));
}
