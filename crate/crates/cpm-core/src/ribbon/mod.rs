//! Chordal ribbon graphs: half-edge data, wheels, pitchforks, dualizable graphs.

mod graph;
mod skeleton;

pub use graph::*;
pub use skeleton::*;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wheel_one_one() {
        let g = make_wheel(1, 1).unwrap();
        assert!(validate_chordal(&g).is_empty());
        assert_eq!(g.graph.vertices.len(), 2);
        assert_eq!(g.zero_edges().len(), 2);
        let f = faces(&g).unwrap();
        assert_eq!((f.count, f.genus), (2, 0));
    }

    #[test]
    fn dualizable_counts() {
        let g1 = make_dualizable(&DualizableSpec::new(1, vec![1, 2, 3]).unwrap()).unwrap();
        let f = faces(&g1).unwrap();
        assert_eq!((f.count, f.genus), (6, 1));
        assert!(g1.graph.open_ends().is_empty());
        let g0 = make_dualizable(&DualizableSpec::new(0, vec![1, 2, 3]).unwrap()).unwrap();
        assert_eq!(faces(&g0).unwrap().genus, 0);
    }

    #[test]
    fn skeleton_roundtrip() {
        for (g, w) in [(0u8, vec![1, 2, 3]), (1, vec![1, 2, 3]), (1, vec![4]), (0, vec![2, 2])] {
            let sk = dualizable_skeleton(&DualizableSpec::new(g, w.clone()).unwrap()).unwrap();
            let back = Skeleton::from_graph(&sk.to_graph().unwrap()).unwrap();
            assert_eq!(back, sk);
            assert_eq!(dualizable_weights(&back).unwrap().weights, w);
        }
    }

    #[test]
    fn minimal_pair_detected() {
        let mut g = Skeleton {
            pieces: vec![Piece { circle: true, feet: vec![Foot { id: 0, up: true, down: true }] }],
            families: vec![],
        }
        .to_graph()
        .unwrap();
        assert!(validate_chordal(&g).is_empty());
        // swap so that the two zero-section half-edges become adjacent
        g.graph.cyclic.insert(0, vec![zout(0), zin(0), 2, 3]);
        let d = validate_chordal(&g);
        assert!(d.iter().any(|s| s.contains("minimal pair violation at 0")), "{d:?}");
    }

    #[test]
    fn pitchforks() {
        let p1 = make_pitchfork(1).unwrap();
        let p2 = make_pitchfork(2).unwrap();
        assert!(validate_chordal(&p1).is_empty() && validate_chordal(&p2).is_empty());
        assert!(!isomorphic(&p1, &p2, true));
        assert!(isomorphic(&p1, &p2, false));
        assert!(make_pitchfork(3).is_err());
    }
}
