"""Product configurations, lifting, gluing, and codim-one assembly."""

import pytest

from helpers import (c4_product, c4_split, gap_instance, segre_product,
                     two_k4_split, binary_graph_model)
from toricfiber import exact
from toricfiber.complexes import model_matrix, product_cell_map, split
from toricfiber.configs import (Grading, Move, MoveSet, kernel_basis,
                                matrix_configuration, check_homogeneous)
from toricfiber.errors import InputError
from toricfiber.markov import markov_basis, verify_markov
from toricfiber.products import (assemble, codim0_basis, cpp_check, glue_pair,
                                 glue_sets, lift_moves, product_config,
                                 quad_moves, slow_varying_check, tilde_extend)


def book_product():
    """Chordal 4-vertex graph split along the edge 23: codim zero."""
    model = binary_graph_model(range(1, 5), [(1, 2), (1, 3), (2, 3), (2, 4),
                                             (3, 4)])
    sp = split(model, {1, 2, 3}, {2, 3, 4})
    return model, sp, product_config(sp.x_config, sp.y_config, sp.grading)


def same_lattice(vecs_a, vecs_b):
    if not vecs_a or not vecs_b:
        return list(vecs_a) == list(vecs_b)
    return exact.hermite_form(vecs_a) == exact.hermite_form(vecs_b)


def in_kernel(config, move):
    return all(x == 0 for x in config.image(move.vector))


def test_product_shape_and_labels():
    model, sp, pc = c4_product()
    assert pc.product.n == 16
    assert pc.product.variables.sizes == (4, 4, 4, 4)
    assert pc.codim == 1
    assert check_homogeneous(pc.left)
    assert check_homogeneous(pc.right)
    assert check_homogeneous(pc.product)
    for z in range(pc.product.n):
        cls, j, k = pc.label(z)
        assert pc.index(cls, j, k) == z


def test_class_count_mismatch_rejected():
    left = matrix_configuration([[1, 1]], sizes=(2,))
    right = matrix_configuration([[1, 1]], sizes=(1, 1))
    with pytest.raises(InputError):
        product_config(left, right, Grading(((1,), (1,))))


def test_product_kernel_is_model_kernel():
    model, sp, pc = c4_product()
    perm = product_cell_map(sp)
    assert sorted(perm) == list(range(16))
    mk = kernel_basis(model_matrix(model)).vectors()
    pk = kernel_basis(pc.product).vectors()
    relabeled = []
    for vec in pk:
        out = [0] * len(vec)
        for z, e in enumerate(vec):
            out[perm[z]] = e
        relabeled.append(tuple(out))
    assert len(pk) == 7
    assert same_lattice(relabeled, mk)


def test_fine_grading_forces_trivial_kernels():
    # homogeneity for an independent one-column-per-variable grading only
    # leaves injective sides, so both side ideals and the product vanish
    grading = Grading(((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    left = matrix_configuration([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
    right = matrix_configuration([[1, 0, 0], [0, 2, 0], [0, 0, 1]])
    pc = product_config(left, right, grading)
    assert pc.codim == 0
    assert len(kernel_basis(pc.left)) == 0
    assert len(kernel_basis(pc.right)) == 0
    assert len(kernel_basis(pc.product)) == 0
    assert len(quad_moves(pc)) == 0
    assert len(markov_basis(pc.product).basis) == 0


def test_quad_counts():
    assert len(quad_moves(segre_product(2, 2))) == 1
    assert len(quad_moves(segre_product(3, 4))) == 18
    assert len(quad_moves(segre_product(1, 5))) == 0
    _, _, pc = c4_product()
    quads = quad_moves(pc)
    assert quads.degree_histogram() == {2: 4}
    assert all(in_kernel(pc.product, m) for m in quads)


def test_lift_segre():
    pc = segre_product(2, 2)
    f = MoveSet.of([(1, -1)])
    left = lift_moves(f, pc, side="left")
    assert set(left.vectors()) == {(1, 0, -1, 0), (0, 1, 0, -1)}
    right = lift_moves(f, pc, side="right")
    assert set(right.vectors()) == {(1, -1, 0, 0), (0, 0, 1, -1)}
    assert len(lift_moves(MoveSet.of([]), pc)) == 0
    with pytest.raises(InputError):
        lift_moves(f, pc, side="up")


def test_lift_rejects_unbalanced_class_counts():
    # a move that shifts mass between classes has no row pairing
    model, sp, pc = c4_product()
    f = markov_basis(sp.x_config).basis
    assert any(pc.left.class_margin(m.vector) != (0, 0, 0, 0) for m in f)
    with pytest.raises(InputError, match="cannot lift"):
        lift_moves(f, pc, side="left")


def test_lift_tilde_quartic():
    model, sp, pc = c4_product()
    tp = tilde_extend(pc)
    assert tp.product.codim == 0
    fx = markov_basis(tp.tilde_left).basis
    assert fx.degree_histogram() == {4: 1}
    quartic = fx.moves[0]
    assert sorted(abs(x) for x in quartic.vector) == [1] * 8
    lifted = lift_moves(fx, tp.product, side="left")
    assert lifted.degree_histogram() == {4: 16}
    for m in lifted:
        assert pc.project_left(m.vector) in (quartic.vector,
                                             (-quartic).vector)
        assert not any(pc.project_right(m.vector))


def test_tilde_models_gain_separator_simplex():
    model, sp = c4_split()
    tx = sp.tilde_model("x")
    assert tx.complex.facets == ((1, 2), (1, 3), (2, 3))
    hist = markov_basis(model_matrix(tx)).degree_histogram
    assert hist == {4: 1}


def test_codim0_segre_is_markov():
    pc = segre_product(2, 2)
    f = kernel_basis(pc.left)
    g = kernel_basis(pc.right)
    basis = codim0_basis(f, g, pc)
    assert basis.degree_histogram() == {1: 4, 2: 1}
    verdict = verify_markov(pc.product, basis, degree_bound=3)
    assert verdict.status == "verified"


def test_codim0_rejects_dependent_grading():
    _, _, pc = c4_product()
    with pytest.raises(InputError):
        codim0_basis(MoveSet.of([]), MoveSet.of([]), pc)


def test_codim0_book_graph():
    model, sp, pc = book_product()
    assert pc.codim == 0
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    assert f.degree_histogram() == {4: 1}
    assert g.degree_histogram() == {4: 1}
    basis = codim0_basis(f, g, pc)
    assert basis.degree_histogram() == {2: 4, 4: 32}
    assert len(kernel_basis(pc.product)) == 6
    verdict = verify_markov(pc.product, basis, degree_bound=6)
    assert verdict.status == "verified"


def test_glue_pair_zero_margin_segre():
    pc = segre_product(2, 2)
    f = Move.canonical((1, -1))
    glued = glue_pair(f, f, pc)
    assert set(glued.vectors()) == {(1, 0, 0, -1), (0, 1, -1, 0)}


def test_glue_c4_quadrics():
    model, sp, pc = c4_product()
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    assert f.degree_histogram() == {2: 2}
    glued = glue_sets(f, g, pc)
    assert glued.degree_histogram() == {2: 4}
    h = pc.grading.kernel_generator.vector
    for m in glued:
        assert in_kernel(pc.product, m)
        assert pc.product.class_margin(m.vector) in (h, tuple(-x for x in h))


def test_glue_pair_incompatible_margins_empty():
    f, g, pc = gap_instance()
    assert len(glue_pair(f.moves[0], g.moves[0], pc)) == 0
    assert len(glue_sets(f, g, pc)) == 0


def test_slow_varying_c4():
    model, sp, pc = c4_product()
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    verdict = slow_varying_check(f, g, pc)
    assert verdict.slow_varying
    assert verdict.h == (1, -1, -1, 1)
    assert verdict.h_norm == 4
    assert verdict.max_norm == 4
    assert verdict.shortcut


def test_slow_varying_gap_refuted():
    f, g, pc = gap_instance()
    verdict = slow_varying_check(f, g, pc)
    assert not verdict.slow_varying
    assert verdict.witness == ("left", 0, (3, -3))
    assert not verdict.shortcut


def test_slow_varying_needs_codim_one():
    with pytest.raises(InputError):
        slow_varying_check(MoveSet.of([]), MoveSet.of([]), segre_product(2, 2))


def test_slow_varying_k4_sides():
    model, sp = two_k4_split()
    pc = product_config(sp.x_config, sp.y_config, sp.grading)
    assert pc.codim == 1
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    assert f.degree_histogram() == {4: 20, 6: 40}
    assert g.degree_histogram() == {4: 20, 6: 40}
    verdict = slow_varying_check(f, g, pc)
    assert verdict.slow_varying
    assert verdict.h_norm == 8
    assert verdict.max_norm == 12
    assert verdict.shortcut


def test_cpp_c4_holds():
    model, sp, pc = c4_product()
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    verdict = cpp_check(f, g, pc)
    assert verdict.holds
    assert verdict.projection_consistent
    assert verdict.bound == 4
    assert verdict.pairs_checked > 0
    assert verdict.glue_count == 4


def test_cpp_gap_refuted():
    f, g, pc = gap_instance()
    verdict = cpp_check(f, g, pc)
    assert not verdict.holds
    assert verdict.witness[:2] == ((3, 3), (3,))
    assert verdict.glue_count == 0


def test_cpp_codim0_segre():
    pc = segre_product(2, 2)
    f = kernel_basis(pc.left)
    g = kernel_basis(pc.right)
    verdict = cpp_check(f, g, pc)
    assert verdict.holds
    assert verdict.projection_consistent


def test_assemble_c4():
    model, sp, pc = c4_product()
    tp = tilde_extend(pc)
    fx = markov_basis(tp.tilde_left).basis
    gy = markov_basis(tp.tilde_right).basis
    h = codim0_basis(fx, gy, tp.product)
    assert h.degree_histogram() == {2: 4, 4: 32}
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    result = assemble(h, f, g, pc)
    assert result.moves.degree_histogram() == {2: 8, 4: 32}
    assert result.report.claim == "slow-varying-exact"
    counts = {}
    for label in result.provenance:
        key = label.split("(")[0]
        counts[key] = counts.get(key, 0) + 1
    assert counts == {"quad": 4, "lift-left": 16, "lift-right": 16, "glue": 4}
    verdict = verify_markov(pc.product, result.moves, degree_bound=6)
    assert verdict.status == "verified"


def test_assemble_gap_stays_unverified():
    f, g, pc = gap_instance()
    tp = tilde_extend(pc)
    fx = markov_basis(tp.tilde_left).basis
    gy = markov_basis(tp.tilde_right).basis
    assert len(fx) == 0 and len(gy) == 0
    h = codim0_basis(fx, gy, tp.product)
    assert len(h) == 0
    result = assemble(h, f, g, pc)
    assert len(result.moves) == 0
    assert result.report.claim == "unverified"
    assert "disagree" in result.report.note
    verdict = verify_markov(pc.product, result.moves, degree_bound=6)
    assert verdict.status == "refuted"


def test_assembled_projections_stay_in_side_kernels():
    model, sp, pc = c4_product()
    tp = tilde_extend(pc)
    h = codim0_basis(markov_basis(tp.tilde_left).basis,
                     markov_basis(tp.tilde_right).basis, tp.product)
    f = markov_basis(sp.x_config).basis
    g = markov_basis(sp.y_config).basis
    result = assemble(h, f, g, pc)
    for m in result.moves:
        assert all(x == 0 for x in pc.left.image(pc.project_left(m.vector)))
        assert all(x == 0 for x in pc.right.image(pc.project_right(m.vector)))
        assert in_kernel(pc.product, m)


def test_tilde_kernel_matches_original():
    for builder in (lambda: c4_product()[2], lambda: book_product()[2]):
        pc = builder()
        tp = tilde_extend(pc)
        assert tp.product.codim == 0
        original = kernel_basis(pc.product).vectors()
        extended = kernel_basis(tp.product.product).vectors()
        if pc.codim == 0:
            assert same_lattice(original, extended)
        else:
            hnf = exact.hermite_form(original)
            assert all(exact.lattice_member(hnf, v) for v in extended)


def test_augmented_form_has_same_kernel():
    model, sp, pc = c4_product()
    aug = pc.augmented
    assert aug.n == pc.product.n
    assert same_lattice(kernel_basis(aug).vectors(),
                        kernel_basis(pc.product).vectors())
