#include "doctest.h"
#include "oracles.hpp"
#include "smlp/filter.hpp"

using namespace smlp;

namespace {

// published folded N=8 coupling matrix, four decimals
Matrix published_folded8() {
    Matrix m(10, 10);
    m << 0, 1.0428, 0, 0, 0, 0, 0, 0, 0, 0,                             //
        1.0428, 0.0106, -0.8623, 0, 0, 0, 0, 0, 0, -0.0001,               //
        0, -0.8623, 0.0115, -0.5994, 0, 0, 0, 0, -0.0001, 0,              //
        0, 0, -0.5994, 0.0133, -0.5356, 0, 0.0457, 0.1316, 0, 0,          //
        0, 0, 0, -0.5356, 0.0898, -0.3361, 0.5673, 0, 0, 0,               //
        0, 0, 0, 0, -0.3361, -0.8513, -0.3191, 0, 0, 0,                   //
        0, 0, 0, 0.0457, 0.5673, -0.3191, -0.0073, 0.5848, 0, 0,          //
        0, 0, 0, 0.1316, 0, 0, 0.5848, 0.0114, -0.8623, 0,                //
        0, 0, -0.0001, 0, 0, 0, 0, -0.8623, 0.0107, -1.0428,              //
        0, -0.0001, 0, 0, 0, 0, 0, 0, -1.0428, 0;
    return m;
}

}  // namespace

TEST_SUITE("filter") {

TEST_CASE("topology masks") {
    Matrix f8 = topology_mask(Topology::folded, 8);
    Eigen::RowVectorXd first(10);
    first << 1, 1, 0, 0, 0, 0, 0, 0, 0, 1;
    CHECK(f8.row(0) == first);
    CHECK(topology_mask(Topology::extended_box, 8)(0, 0) == 0.0);
    for (auto kind : {Topology::folded, Topology::extended_box})
        for (Eigen::Index order : {8, 10}) {
            Matrix s = topology_mask(kind, order);
            CHECK(s.rows() == order + 2);
            CHECK(s == s.transpose());
            CHECK((s.array() * (1.0 - s.array())).abs().maxCoeff() == 0.0);
        }
    CHECK_THROWS_AS(topology_mask(Topology::folded, 6), DimensionError);
    CHECK_THROWS_AS(transverse_matrix(9), DimensionError);
}

TEST_CASE("transverse matrix has transversal shape") {
    for (Eigen::Index order : {8, 10}) {
        Matrix t = transverse_matrix(order);
        const Eigen::Index n = order + 2;
        CHECK(t == t.transpose());
        Matrix inner = t.block(1, 1, order, order);
        CHECK((inner - Matrix(inner.diagonal().asDiagonal())).norm() == 0.0);
        CHECK(t(0, 0) == 0.0);
        CHECK(t(n - 1, n - 1) == 0.0);
    }
}

TEST_CASE("embedding the inner block") {
    CHECK(embed_inner(Matrix::Identity(4, 4)) == Matrix::Identity(6, 6));
    std::mt19937_64 rng(2);
    for (int t = 0; t < 100; ++t) {
        Matrix x = random_orthogonal(1 + t % 10, rng);
        CHECK(orthogonality_error(embed_inner(x)) <= 1e-12);
        CHECK(extract_inner(embed_inner(x)) == x);
    }
    CHECK_THROWS_AS(embed_inner(Matrix::Ones(2, 3)), DimensionError);
}

TEST_CASE("inner gradient is the inner block of the full gradient") {
    std::mt19937_64 rng(3);
    auto inst = validate_instance(filter_as_siep(make_filter(Topology::folded, 8)));
    Matrix x = random_orthogonal(8, rng);
    auto f = [&](const Matrix& y) { return loss_eval(embed_inner(y), inst).total; };
    Matrix got = extract_inner(loss_grad_q(embed_inner(x), inst));
    CHECK(oracle::rel_err(got, oracle::fd_gradient(f, x)) <= 1e-4);
}

TEST_CASE("filter instance as an SIEP") {
    auto fi = make_filter(Topology::folded, 8);
    auto raw = filter_as_siep(fi);
    CHECK(raw.fixed_border);
    CHECK(raw.kappa1 == 0);
    CHECK(raw.kappa2 == 0);
    CHECK(raw.prescribed.norm() == 0.0);
    auto inst = validate_instance(raw);
    CHECK(inst.free_side() == 8);

    // Q = I leaves T untouched, and T's first row breaks the folded mask
    Matrix gamma = Matrix::Ones(10, 10) - fi.mask_s;
    const double want = 0.5 * gamma.cwiseProduct(fi.t).squaredNorm();
    CHECK(want > 0.0);
    CHECK(loss_eval(Matrix::Identity(10, 10), inst).total == doctest::Approx(want).epsilon(1e-14));

    std::mt19937_64 rng(4);
    for (int t = 0; t < 20; ++t) {
        Matrix q = embed_inner(random_orthogonal(8, rng));
        Matrix a = q * fi.t * q.transpose();
        CHECK(loss_eval(q, inst).total == doctest::Approx(0.5 * (a - fi.mask_s.cwiseProduct(a)).squaredNorm()).epsilon(1e-12));
        // port entries of the similarity are untouched
        CHECK(std::abs(a(0, 0) - fi.t(0, 0)) <= 1e-12);
        CHECK(std::abs(a(9, 9) - fi.t(9, 9)) <= 1e-12);
        auto e = sym_eigen(a);
        CHECK((e.values - raw.spectrum).cwiseAbs().maxCoeff() <= 1e-10);
    }

    auto back = filter_from_siep(raw);
    CHECK(back.order == 8);
    CHECK(back.t == fi.t);
    CHECK_THROWS_AS(filter_from_siep(SiepInstance::from_diagonal("plain", Vector::Ones(3), Matrix::Ones(3, 3), Matrix::Zero(3, 3), 0, 0)), InvalidInstanceError);
}

TEST_CASE("verify_coupling on the published folded result") {
    auto fi = make_filter(Topology::folded, 8);
    auto rep = verify_coupling(published_folded8(), fi, 1e-3);
    CHECK(rep.spectrum_ok);
    CHECK(rep.sparsity_ok);
    CHECK(rep.symmetric_ok);
    CHECK(rep.border_ok);
    CHECK(rep.source_coupling == doctest::Approx(1.0428));
}

TEST_CASE("verify_coupling trivial pass and sparsity failure") {
    auto fi = make_filter(Topology::folded, 8);
    auto open = fi;
    open.mask_s = Matrix::Ones(10, 10);
    CHECK(verify_coupling(fi.t, open, 1e-12).all_ok());

    Matrix m = published_folded8();
    m(0, 4) = m(4, 0) = 0.01;
    auto rep = verify_coupling(m, fi, 1e-4);
    CHECK_FALSE(rep.sparsity_ok);
    CHECK(rep.sparsity_violation == doctest::Approx(0.01));
}

}
