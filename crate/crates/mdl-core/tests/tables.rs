//! Integration tests for the published facet tables: data-file integrity,
//! expression-grammar round trips, verification profiles against exact
//! vertex sets across each table's parameter domain, and completeness via
//! symmetry-orbit expansion against direct facet enumeration.

use mdl_core::facet_tables::{
    builtin, completeness_check, evaluate_rows, evaluate_table, independent_bounds,
    parse_rational_function, parse_table, verify_table, FacetTable, SymbolValues, TableError,
    TableId,
};
use mdl_core::inequalities::relabeling_generators;
use mdl_core::lp::check_inequality;
use mdl_core::polytope::{
    affine_dimension, independent_mdl_vertices, mdl_vertices, ProductMode, SizeLimits, VRep,
};
use mdl_core::ratio::{rat, Rat};
use mdl_core::scenario::{MdlParams, PartyBounds, Scenario};
use sha2::{Digest, Sha256};

fn scenario() -> Scenario {
    Scenario::symmetric(2, 2, 2)
}

fn shared_vertices(l: Rat, h: Rat) -> VRep {
    mdl_vertices(&scenario(), &MdlParams::new(l, h), ProductMode::Dedupe, &SizeLimits::default())
        .unwrap()
}

fn b1_vertices(l: Rat) -> VRep {
    let h = rat(1, 1) - rat(3, 1) * &l;
    shared_vertices(l, h)
}

fn b2_vertices(h: Rat) -> VRep {
    let l = rat(1, 1) - rat(3, 1) * &h;
    shared_vertices(l, h)
}

fn c_vertices(values: &SymbolValues) -> VRep {
    independent_mdl_vertices(
        &scenario(),
        &independent_bounds(values).unwrap(),
        ProductMode::Dedupe,
        &SizeLimits::default(),
    )
    .unwrap()
}

// ---------------------------------------------------------------------------
// Data-file integrity
// ---------------------------------------------------------------------------

/// The table files are a curated transcription; any edit must be deliberate.
#[test]
fn data_files_match_pinned_checksums() {
    let pins = [
        (
            include_str!("../data/b1.tab"),
            "50c8aa917277c83c29c836fc128d87bf15a50c80781916d46247902dbd33f7d5",
        ),
        (
            include_str!("../data/b2.tab"),
            "f3a7dab9a6c44deb9ae9362bf1d41507afd2403fb0dc3511028bc00774b8fb2c",
        ),
        (
            include_str!("../data/c.tab"),
            "ba545570a00dd30bc24504adeb05ba0b0e75e17fb1343a4e837617501fcee082",
        ),
    ];
    for (text, expected) in pins {
        let digest = Sha256::digest(text.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(hex, expected);
    }
}

#[test]
fn builtin_tables_have_published_row_counts() {
    assert_eq!(builtin(TableId::B1).unwrap().rows.len(), 74);
    assert_eq!(builtin(TableId::B2).unwrap().rows.len(), 93);
    assert_eq!(builtin(TableId::C).unwrap().rows.len(), 75);
}

/// Parsing, printing, then re-parsing every cell is the identity on trees.
#[test]
fn print_parse_round_trip_is_identity_on_every_cell() {
    for id in [TableId::B1, TableId::B2, TableId::C] {
        let table = builtin(id).unwrap();
        for (r, row) in table.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                let printed = cell.to_text();
                let reparsed = parse_rational_function(&printed)
                    .unwrap_or_else(|e| panic!("{id:?} row {} col {c}: {e}", r + 1));
                assert_eq!(&reparsed, cell, "{id:?} row {} col {c}: {printed}", r + 1);
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parse errors and domain enforcement
// ---------------------------------------------------------------------------

#[test]
fn truncated_table_text_is_rejected_by_row_count() {
    let full = include_str!("../data/b1.tab");
    let truncated: Vec<&str> = full.lines().take(full.lines().count() - 1).collect();
    let table = parse_table(&truncated.join("\n")).unwrap();
    assert_eq!(table.rows.len(), 73);
}

#[test]
fn evaluate_table_enforces_declared_domains() {
    let b1 = builtin(TableId::B1).unwrap();
    let b2 = builtin(TableId::B2).unwrap();
    let c = builtin(TableId::C).unwrap();
    assert!(matches!(
        evaluate_table(&b1, &SymbolValues::for_l(rat(3, 10))),
        Err(TableError::Domain(_))
    ));
    assert!(matches!(
        evaluate_table(&b2, &SymbolValues::for_h(rat(1, 5))),
        Err(TableError::Domain(_))
    ));
    assert!(matches!(
        evaluate_table(&c, &SymbolValues::for_hx_hy(rat(2, 5), rat(7, 10))),
        Err(TableError::Domain(_))
    ));
    assert_eq!(evaluate_table(&b1, &SymbolValues::for_l(rat(1, 10))).unwrap().len(), 74);
    assert_eq!(evaluate_table(&b2, &SymbolValues::for_h(rat(3, 10))).unwrap().len(), 93);
}

/// Two C rows have an (hx − hy) denominator factor: strict evaluation at a
/// symmetric point aborts with a pole, while per-row evaluation reports the
/// two poles and evaluates the other 73 rows.
#[test]
fn c_table_diagonal_poles_abort_strict_evaluation_only() {
    let c = builtin(TableId::C).unwrap();
    let vals = SymbolValues::for_hx_hy(rat(7, 10), rat(7, 10));
    assert!(matches!(evaluate_table(&c, &vals), Err(TableError::Pole { .. })));
    let rows = evaluate_rows(&c, &vals);
    let poles: Vec<usize> =
        rows.iter().enumerate().filter(|(_, r)| r.is_err()).map(|(i, _)| i + 1).collect();
    assert_eq!(poles, vec![35, 37]);
}

// ---------------------------------------------------------------------------
// Verification profiles across the parameter domains
// ---------------------------------------------------------------------------

/// All 74 rows are valid facets across the domain; exactly one row (74, the
/// positivity row, all coefficients of one sign) needs orientation flipping.
#[test]
fn b1_rows_are_facets_across_the_domain() {
    let b1 = builtin(TableId::B1).unwrap();
    for l in [rat(1, 10), rat(19, 80), rat(3, 16), rat(1, 9)] {
        let verts = b1_vertices(l.clone());
        assert_eq!(verts.vertices.len(), 64);
        let rep = verify_table(&b1, &SymbolValues::for_l(l.clone()), &verts);
        assert_eq!(
            (rep.valid_rows, rep.facet_rows, rep.flipped_rows, rep.failed_rows, rep.pole_rows),
            (74, 74, 1, 0, 0),
            "profile at l = {l}"
        );
        let flipped: Vec<usize> = rep
            .rows
            .iter()
            .filter(|r| r.report.as_ref().is_some_and(|f| f.orientation_flipped))
            .map(|r| r.row)
            .collect();
        assert_eq!(flipped, vec![74], "only the positivity row flips at l = {l}");
    }
}

/// All 93 rows are valid facets across the domain; 83 rows (including the
/// positivity row 93) are stated in the flipped orientation.
#[test]
fn b2_rows_are_facets_across_the_domain() {
    let b2 = builtin(TableId::B2).unwrap();
    for h in [rat(3, 10), rat(27, 100), rat(5, 17), rat(13, 48)] {
        let verts = b2_vertices(h.clone());
        let rep = verify_table(&b2, &SymbolValues::for_h(h.clone()), &verts);
        assert_eq!(
            (rep.valid_rows, rep.facet_rows, rep.flipped_rows, rep.failed_rows, rep.pole_rows),
            (93, 93, 83, 0, 0),
            "profile at h = {h}"
        );
        let row93 = rep.rows[92].report.as_ref().unwrap();
        assert!(row93.orientation_flipped, "positivity row stated all-nonpositive");
    }
}

/// Within 1/1000 of the measurement-independence limit (l = h = 1/4) every
/// row stays valid, and at the limit itself the vertex set collapses to the
/// input-probability-scaled local polytope (16 vertices, dimension 8) on
/// which every row remains a valid inequality.
#[test]
fn b_tables_approach_the_scaled_local_polytope_at_the_limit() {
    let b1 = builtin(TableId::B1).unwrap();
    let b2 = builtin(TableId::B2).unwrap();

    let near1 = verify_table(&b1, &SymbolValues::for_l(rat(249, 1000)), &b1_vertices(rat(249, 1000)));
    assert_eq!((near1.valid_rows, near1.facet_rows, near1.failed_rows), (74, 74, 0));
    let near2 = verify_table(&b2, &SymbolValues::for_h(rat(251, 1000)), &b2_vertices(rat(251, 1000)));
    assert_eq!((near2.valid_rows, near2.facet_rows, near2.failed_rows), (93, 93, 0));

    let limit_verts = shared_vertices(rat(1, 4), rat(1, 4));
    assert_eq!(limit_verts.vertices.len(), 16);
    let dim = affine_dimension(&limit_verts);
    assert_eq!(dim, 8);
    for (table, vals, expect_valid, expect_facet) in [
        (&b1, SymbolValues::for_l(rat(1, 4)), 74, 21),
        (&b2, SymbolValues::for_h(rat(1, 4)), 93, 40),
    ] {
        let mut valid = 0;
        let mut facet = 0;
        for out in evaluate_rows(table, &vals) {
            let ineq = out.expect("no poles at the limit");
            let rep = check_inequality(&ineq.beta, &ineq.bound, &limit_verts.vertices, dim);
            valid += usize::from(rep.valid);
            facet += usize::from(rep.is_facet);
        }
        assert_eq!((valid, facet), (expect_valid, expect_facet));
    }
}

/// On the ordered half of the square (hx ≤ hy) every row is a facet of the
/// independent-source polytope, with the calibrated bound binding.
#[test]
fn c_rows_are_facets_on_the_ordered_half_domain() {
    let c = builtin(TableId::C).unwrap();
    for (hx, hy) in [
        (rat(5, 8), rat(18, 25)),
        (rat(13, 20), rat(4, 5)),
        (rat(5, 7), rat(3, 4)),
    ] {
        let vals = SymbolValues::for_hx_hy(hx.clone(), hy.clone());
        let verts = c_vertices(&vals);
        assert_eq!(verts.vertices.len(), 64);
        assert_eq!(affine_dimension(&verts), 15);
        let rep = verify_table(&c, &vals, &verts);
        assert_eq!(
            (rep.valid_rows, rep.facet_rows, rep.failed_rows, rep.pole_rows),
            (75, 75, 0, 0),
            "profile at ({hx}, {hy})"
        );
    }
    let vals = SymbolValues::for_hx_hy(rat(5, 8), rat(18, 25));
    let rep = verify_table(&c, &vals, &c_vertices(&vals));
    assert_eq!(rep.flipped_rows, 28);
}

/// The rows are representatives stated for hx ≤ hy: on the other half the
/// same eleven rows fail as stated (their valid counterparts are the
/// party-exchange images), and the failures are reported, not errors.
#[test]
fn c_rows_report_failures_on_the_swapped_half_domain() {
    let c = builtin(TableId::C).unwrap();
    for (hx, hy) in [(rat(3, 4), rat(5, 7)), (rat(4, 5), rat(13, 20))] {
        let vals = SymbolValues::for_hx_hy(hx.clone(), hy.clone());
        let rep = verify_table(&c, &vals, &c_vertices(&vals));
        let failing: Vec<usize> = rep
            .rows
            .iter()
            .filter(|r| r.report.as_ref().is_some_and(|f| !f.valid))
            .map(|r| r.row)
            .collect();
        assert_eq!(failing, vec![2, 10, 31, 32, 33, 35, 37, 42, 54, 57, 59]);
        assert_eq!((rep.valid_rows, rep.facet_rows, rep.pole_rows), (64, 64, 0));
    }
}

/// The bound binding is part of the table's meaning: with the naive party
/// order nearly every row fails, so a silent convention change cannot pass.
#[test]
fn c_rows_reject_the_naive_bound_binding() {
    let c = builtin(TableId::C).unwrap();
    let (hx, hy) = (rat(5, 8), rat(18, 25));
    let naive = PartyBounds::binary(vec![hx.clone(), hy.clone()]);
    let verts =
        independent_mdl_vertices(&scenario(), &naive, ProductMode::Dedupe, &SizeLimits::default())
            .unwrap();
    let rep = verify_table(&c, &SymbolValues::for_hx_hy(hx, hy), &verts);
    assert_eq!(rep.failed_rows, 73);
}

/// Symmetric parameters: the diagonal poles rows 35 and 37; the other 73
/// rows are facets. At the measurement-independence corner (1/2, 1/2) the
/// polytope collapses to dimension 8 and ten rows pole; the rest stay valid.
#[test]
fn c_profiles_at_symmetric_and_degenerate_points() {
    let c = builtin(TableId::C).unwrap();

    let vals = SymbolValues::for_hx_hy(rat(7, 10), rat(7, 10));
    let rep = verify_table(&c, &vals, &c_vertices(&vals));
    assert_eq!(
        (rep.valid_rows, rep.facet_rows, rep.failed_rows, rep.pole_rows),
        (73, 73, 0, 2)
    );
    let poles: Vec<usize> =
        rep.rows.iter().filter(|r| r.pole.is_some()).map(|r| r.row).collect();
    assert_eq!(poles, vec![35, 37]);

    let vals = SymbolValues::for_hx_hy(rat(1, 2), rat(1, 2));
    let verts = c_vertices(&vals);
    assert_eq!(verts.vertices.len(), 16);
    assert_eq!(affine_dimension(&verts), 8);
    let rep = verify_table(&c, &vals, &verts);
    assert_eq!((rep.valid_rows, rep.failed_rows, rep.pole_rows), (65, 0, 10));
    let poles: Vec<usize> =
        rep.rows.iter().filter(|r| r.pole.is_some()).map(|r| r.row).collect();
    assert_eq!(poles, vec![1, 2, 4, 5, 6, 11, 12, 35, 37, 46]);
}

// ---------------------------------------------------------------------------
// Completeness: orbit expansion vs direct enumeration
// ---------------------------------------------------------------------------

#[test]
fn b1_table_is_complete_at_l_one_tenth() {
    let b1 = builtin(TableId::B1).unwrap();
    let verts = b1_vertices(rat(1, 10));
    let gens = relabeling_generators(&scenario());
    let rep = completeness_check(
        &b1,
        &SymbolValues::for_l(rat(1, 10)),
        &verts,
        &gens,
        &SizeLimits::default(),
    )
    .unwrap();
    assert_eq!(rep.enumerated_facets, 7268);
    assert_eq!(rep.covered_facets, 7268);
    assert_eq!((rep.missing, rep.extra), (0, 0));
    assert!(rep.rows.iter().all(|r| !r.invalid && r.pole.is_none() && r.covered > 0));
}

#[test]
fn b2_table_is_complete_at_h_three_tenths() {
    let b2 = builtin(TableId::B2).unwrap();
    let verts = b2_vertices(rat(3, 10));
    let gens = relabeling_generators(&scenario());
    let rep = completeness_check(
        &b2,
        &SymbolValues::for_h(rat(3, 10)),
        &verts,
        &gens,
        &SizeLimits::default(),
    )
    .unwrap();
    assert_eq!(rep.enumerated_facets, 8940);
    assert_eq!(rep.covered_facets, 8940);
    assert_eq!((rep.missing, rep.extra), (0, 0));
}

/// Negative control: dropping the positivity row loses exactly its orbit
/// (the 16 outcome-positivity facets).
#[test]
fn truncated_b1_table_reports_missing_facets() {
    let full = builtin(TableId::B1).unwrap();
    let truncated = FacetTable {
        id: full.id,
        domain: full.domain.clone(),
        rows: full.rows[..73].to_vec(),
    };
    let verts = b1_vertices(rat(1, 10));
    let gens = relabeling_generators(&scenario());
    let rep = completeness_check(
        &truncated,
        &SymbolValues::for_l(rat(1, 10)),
        &verts,
        &gens,
        &SizeLimits::default(),
    )
    .unwrap();
    assert_eq!(rep.missing, 16);
    assert_eq!(rep.extra, 0);
}

/// The published conjecture that the C list is complete holds at the tested
/// points: asymmetric under the relabeling group without party exchange,
/// symmetric under the full group (where the two poled rows' classes are
/// recovered by party exchange of other rows).
#[test]
fn c_table_is_complete_at_tested_points() {
    let c = builtin(TableId::C).unwrap();
    let all_gens = relabeling_generators(&scenario());

    let vals = SymbolValues::for_hx_hy(rat(5, 8), rat(18, 25));
    let no_swap: Vec<_> =
        all_gens.iter().filter(|g| g.party_perm == vec![0, 1]).cloned().collect();
    let rep = completeness_check(&c, &vals, &c_vertices(&vals), &no_swap, &SizeLimits::default())
        .unwrap();
    assert_eq!(rep.enumerated_facets, 4356);
    assert_eq!((rep.missing, rep.extra), (0, 0));

    let vals = SymbolValues::for_hx_hy(rat(7, 10), rat(7, 10));
    let rep = completeness_check(&c, &vals, &c_vertices(&vals), &all_gens, &SizeLimits::default())
        .unwrap();
    assert_eq!(rep.enumerated_facets, 3764);
    assert_eq!((rep.missing, rep.extra), (0, 0));
    assert_eq!(rep.rows.iter().filter(|r| r.pole.is_some()).count(), 2);
}

/// The 93rd published row duplicates another row's symmetry class (the data
/// file reconstructs it as the party-exchange image of row 44), so the 93
/// rows fall into 92 distinct classes while still covering every facet.
#[test]
fn b2_rows_44_and_45_share_a_symmetry_class() {
    use mdl_core::inequalities::symmetry_orbit;
    let b2 = builtin(TableId::B2).unwrap();
    let verts = b2_vertices(rat(3, 10));
    let dim = affine_dimension(&verts);
    let rows = evaluate_rows(&b2, &SymbolValues::for_h(rat(3, 10)));
    let orient = |ineq: &mdl_core::inequalities::Inequality| {
        let rep = check_inequality(&ineq.beta, &ineq.bound, &verts.vertices, dim);
        assert!(rep.valid);
        if rep.orientation_flipped {
            mdl_core::inequalities::Inequality {
                scenario: ineq.scenario.clone(),
                space: ineq.space,
                beta: ineq.beta.iter().map(|c| -c.clone()).collect(),
                bound: -ineq.bound.clone(),
            }
        } else {
            ineq.clone()
        }
    };
    let saturation = |ineq: &mdl_core::inequalities::Inequality| -> Vec<usize> {
        verts
            .vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| {
                v.iter().zip(&ineq.beta).map(|(x, c)| x * c).sum::<Rat>() == ineq.bound
            })
            .map(|(i, _)| i)
            .collect()
    };
    let row44 = orient(rows[43].as_ref().unwrap());
    let row45 = orient(rows[44].as_ref().unwrap());
    let gens = relabeling_generators(&scenario());
    let key45 = saturation(&row45);
    let orbit44 = symmetry_orbit(&row44, &gens).unwrap();
    assert!(
        orbit44.iter().any(|member| saturation(member) == key45),
        "row 45 must lie in row 44's symmetry class"
    );
}

/// The orbit expansion assembles the same polytope the vertex set spans:
/// every expanded row is tight somewhere and never cut off a vertex, and the
/// affine hull reduces to the normalization hyperplane.
#[test]
fn expanded_hrep_bounds_the_vertex_set() {
    use mdl_core::facet_tables::expanded_hrep;
    use mdl_core::linalg::dot;

    let b1 = builtin(TableId::B1).unwrap();
    let verts = b1_vertices(rat(1, 10));
    let gens = relabeling_generators(&scenario());
    let hrep =
        expanded_hrep(&b1, &SymbolValues::for_l(rat(1, 10)), &verts, &gens).unwrap();
    assert_eq!(hrep.ineqs.len(), 7268);
    assert_eq!(hrep.eqs.len(), 1);
    for (a, b) in &hrep.ineqs {
        let mut tight = false;
        for v in &verts.vertices {
            let lhs = dot(a, v);
            assert!(lhs <= *b, "expanded row cuts off a vertex");
            tight |= lhs == *b;
        }
        assert!(tight, "expanded row never touches the polytope");
    }
}
