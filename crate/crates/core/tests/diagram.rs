use wedgesq::combinat::{pairs, quads, Pair, Quad};
use wedgesq::diagram::{build_diagram, elementary_square, path_of, render, Format, Highlights};

#[test]
fn edges_match_brute_force_adjacency() {
    for n in 3..=9 {
        let d = build_diagram(n).unwrap();
        let mut brute = Vec::new();
        for a in pairs(n) {
            for b in pairs(n) {
                // b is a with one element raised by exactly one.
                let raised: Vec<usize> = a
                    .elems()
                    .into_iter()
                    .filter(|&k| !a.contains(k + 1) && b.contains(k + 1) && !b.contains(k))
                    .filter(|&k| a.elems().iter().filter(|&&e| e != k).all(|e| b.contains(*e)))
                    .collect();
                if let [k] = raised[..] {
                    brute.push((a, b, k));
                }
            }
        }
        let mut got: Vec<(Pair, Pair, usize)> = d.edges().iter().map(|e| (e.from, e.to, e.label)).collect();
        got.sort();
        brute.sort();
        assert_eq!(got, brute, "n = {n}");
    }
    assert_eq!(build_diagram(5).unwrap().edges().len(), 12);
}

#[test]
fn paths_meet_in_one_vertex() {
    for n in 3..=8 {
        let d = build_diagram(n).unwrap();
        for i in 1..=n {
            let pi = path_of(&d, i).unwrap();
            assert_eq!(pi.vertices.len(), n - 1);
            let runs = pi.segments(&d);
            let expected_runs = if i == 1 || i == n { 1 } else { 2 };
            assert_eq!(runs.len(), expected_runs, "anchor {i}, n = {n}");
            for j in (1..=n).filter(|&j| j != i) {
                let pj = path_of(&d, j).unwrap();
                let meet: Vec<_> = pi.vertices.iter().filter(|v| pj.vertices.contains(v)).collect();
                assert_eq!(meet, vec![&Pair::oriented(i, j).unwrap().0]);
            }
        }
    }
}

#[test]
fn squares_embed_as_chains() {
    for n in 4..=7 {
        let d = build_diagram(n).unwrap();
        for h in quads(n) {
            let sq = elementary_square(&d, h).unwrap();
            assert_eq!(sq.vertices.len(), 6);
            assert_eq!(sq.edges.len(), 6);
            let signs: Vec<i8> = sq.pairings.iter().map(|p| p.sign).collect();
            assert_eq!(signs, vec![1, -1, 1]);
            for e in &sq.edges {
                let hs = h.elems();
                assert_eq!(e.ambient.len(), hs[e.label] - hs[e.label - 1]);
                assert_eq!(e.ambient.first().unwrap().from, e.from);
                assert_eq!(e.ambient.last().unwrap().to, e.to);
                for step in &e.ambient {
                    assert_eq!(d.edge_label(step.from, step.to), Some(step.label));
                }
            }
        }
    }
}

#[test]
fn square_of_1246_in_rank_seven() {
    let d = build_diagram(7).unwrap();
    let sq = elementary_square(&d, Quad::new([1, 2, 4, 6], 7).unwrap()).unwrap();
    let labels: Vec<String> = sq.vertices.iter().map(|v| v.label(7)).collect();
    assert_eq!(labels, ["12", "14", "16", "24", "26", "46"]);
}

#[test]
fn highlighted_paths_for_vertex_15() {
    let d = build_diagram(7).unwrap();
    let hl = Highlights {
        paths: vec![1, 5],
        ..Default::default()
    };
    let text = render(&d, Format::Ascii, &hl).unwrap();
    assert!(text.contains("path 1: 12 13 14 15 16 17"));
    assert!(text.contains("path 5: 15 25 35 45 56 57"));
    assert_eq!(text.matches('[').count(), 11);
}

#[test]
fn ascii_rows() {
    let d = build_diagram(4).unwrap();
    let text = render(&d, Format::Ascii, &Highlights::default()).unwrap();
    let rows: Vec<usize> = text
        .lines()
        .filter(|l| l.chars().any(|c| c.is_ascii_digit()))
        .map(|l| l.split_whitespace().count())
        .collect();
    assert_eq!(rows, vec![1, 2, 3]);
}

#[test]
fn wide_labels_render() {
    let d = build_diagram(11).unwrap();
    let text = render(&d, Format::Ascii, &Highlights::default()).unwrap();
    assert!(text.contains("1,11"));
    assert_eq!(text.lines().filter(|l| l.contains(',')).count(), 10);
}
