use polymorse::io::{graph_string, GraphFormat};
use polymorse::mscomplex::Color;
use polymorse::oracle::{compare, oracle_basins, ComplexView, OracleOptions};
use polymorse::poly::{make_cube, make_pex, make_random_hull, make_tetrahedron, PEX_ORIGIN};
use polymorse::{
    analyze, build_ms_complex, find_equilibria, probe_genericity, to_graph, Error,
    NonGenericWitness, Origin, ProbeOptions, Vec3,
};

#[test]
fn fixture_sizes() {
    let pex = make_pex();
    assert_eq!((pex.num_vertices(), pex.num_faces()), (18, 32));
    let cube = make_cube(0.5).triangulated().unwrap();
    assert_eq!((cube.num_vertices(), cube.num_faces()), (8, 12));
    assert_eq!(cube.num_vertices() + cube.num_faces(), cube.num_edges() + 2);
    let a = make_random_hull(50, 7).unwrap();
    let b = make_random_hull(50, 7).unwrap();
    assert_eq!(a.vertices(), b.vertices());
    assert_eq!(a.faces(), b.faces());
}

#[test]
fn tetrahedron_graph() {
    let rp = make_tetrahedron().with_reference(Origin::Centroid).unwrap();
    let g = to_graph(&build_ms_complex(&rp).unwrap(), true);
    assert_eq!((g.vertices.len(), g.edges.len()), (14, 24));
    assert!(g
        .edges
        .iter()
        .all(|e| e.polyline.as_ref().is_some_and(|p| p.len() >= 2)));
    let count = |c| g.vertices.iter().filter(|v| v.color == c).count();
    assert_eq!(
        (count(Color::Green), count(Color::Blue), count(Color::Red)),
        (4, 6, 4)
    );
}

#[test]
fn triangulated_cube() {
    // Face feet land on the diagonals when the reference point is the centre.
    let tris = make_cube(0.5).triangulated().unwrap();
    let centred = tris
        .clone()
        .with_reference(Origin::Given(Vec3::ZERO))
        .unwrap();
    let r = analyze(&centred);
    assert!(
        matches!(
            r,
            Err(Error::NonGeneric(NonGenericWitness::Degenerate { .. }))
        ),
        "{:?}",
        r.map(|a| a.complex.census())
    );

    let off = Origin::Given(Vec3::new(0.011, 0.023, -0.017));
    let quads = make_cube(0.5).with_reference(off).unwrap();
    let tris = tris.with_reference(off).unwrap();
    let a = analyze(&quads).unwrap();
    let b = analyze(&tris).unwrap();
    assert_eq!(a.complex.census(), (6, 12, 8));
    assert_eq!(a.complex.census(), b.complex.census());
    assert!(a.validation.pass && b.validation.pass);
    assert!(!a.complex.warnings.is_empty() && b.complex.warnings.is_empty());
    // Vertex jitter bends the flat diagonals, usually concavely.
    assert!(matches!(
        probe_genericity(&tris, &ProbeOptions::default()),
        Err(Error::ProbeInconclusive(20))
    ));
}

#[test]
fn cube_dot_export_has_color_classes() {
    let rp = make_cube(0.5)
        .with_reference(Origin::Given(Vec3::ZERO))
        .unwrap();
    let dot = graph_string(&build_ms_complex(&rp).unwrap(), GraphFormat::Dot);
    assert_eq!(dot.matches("class=stable").count(), 6);
    assert_eq!(dot.matches("class=saddle").count(), 12);
    assert_eq!(dot.matches("class=unstable").count(), 8);
}

#[test]
fn pex_oracle_is_seed_stable_and_matches_cells() {
    let rp = make_pex()
        .with_reference(Origin::Given(PEX_ORIGIN))
        .unwrap();
    let eq = find_equilibria(&rp).unwrap();
    let msc = build_ms_complex(&rp).unwrap();
    let view = ComplexView::from(&msc);
    let runs: Vec<_> = [1, 2]
        .iter()
        .map(|&seed| {
            oracle_basins(
                &rp,
                &eq,
                &OracleOptions {
                    samples: 10_000,
                    step: None,
                    seed,
                },
            )
            .unwrap()
        })
        .collect();
    for r in &runs {
        assert!(compare(r, &view, 2.0 * r.spacing).agrees());
    }
    for (u, &a) in &runs[0].census {
        let b = runs[1].census[u] as f64;
        assert!(
            (a as f64 - b).abs() <= 0.02 * 10_000.0,
            "basin {u}: {a} vs {b}"
        );
    }
}
