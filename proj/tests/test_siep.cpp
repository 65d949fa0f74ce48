#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "smlp/problems.hpp"
#include "smlp/siep.hpp"

using namespace smlp;

namespace {

SiepInstance free_instance(const Vector& lambda, int k1, int k2) {
    const auto n = lambda.size();
    std::optional<Vector> alpha;
    if (k2) alpha = Vector::Ones(n);
    return SiepInstance::from_diagonal("free", lambda, Matrix::Ones(n, n), Matrix::Zero(n, n), k1, k2, alpha);
}

Matrix rot(double t) {
    Matrix r(2, 2);
    r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    return r;
}

}  // namespace

TEST_SUITE("siep") {

TEST_CASE("validation accepts catalog data and the fully free problem") {
    auto snp = validate_instance(builtin("snpeiep5"));
    CHECK(snp.symmetric());
    CHECK(snp.raw().spectrum.size() == 5);
    CHECK((snp.gamma() + snp.raw().mask_s - Matrix::Ones(5, 5)).norm() == 0.0);
    auto fr = validate_instance(free_instance(Vector::LinSpaced(3, -1, 1), 0, 0));
    CHECK(fr.gamma().norm() == 0.0);
}

TEST_CASE("validation rejections") {
    auto inst = free_instance(Vector::LinSpaced(3, -1, 1), 0, 0);
    auto bad_omega = inst;
    bad_omega.prescribed(0, 1) = 0.5;
    CHECK_THROWS_AS(validate_instance(bad_omega), InvalidInstanceError);
    auto bad_mask = inst;
    bad_mask.mask_s(2, 2) = 0.5;
    CHECK_THROWS_AS(validate_instance(bad_mask), InvalidInstanceError);
    auto no_alpha = inst;
    no_alpha.kappa2 = 1;
    CHECK_THROWS_AS(validate_instance(no_alpha), InvalidInstanceError);
    auto short_alpha = no_alpha;
    short_alpha.row_targets = Vector::Ones(2);
    CHECK_THROWS_AS(validate_instance(short_alpha), InvalidInstanceError);
    auto bad_kappa = inst;
    bad_kappa.kappa1 = 2;
    CHECK_THROWS_AS(validate_instance(bad_kappa), InvalidInstanceError);
    auto shape = inst;
    shape.mask_s = Matrix::Ones(2, 2);
    CHECK_THROWS_AS(validate_instance(shape), InvalidInstanceError);
}

TEST_CASE("candidate examples") {
    Vector lambda(2);
    lambda << 1, -1;
    auto inst = validate_instance(free_instance(lambda, 0, 0));
    CHECK(candidate(Matrix::Identity(2, 2), inst) == Matrix(lambda.asDiagonal()));
    Matrix want(2, 2);
    want << 0, 1, 1, 0;
    CHECK((candidate(rot(std::numbers::pi / 4), inst) - want).norm() < 1e-15);
}

TEST_CASE("diagonal fast path agrees with the general product") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index n = 1 + t % 7;
        Vector lambda = Vector::Random(n);
        auto diag = validate_instance(free_instance(lambda, 0, 0));
        auto general = free_instance(lambda, 0, 0);
        general.diagonal_carrier = false;
        auto g = validate_instance(general);
        Matrix q = random_orthogonal(n, rng);
        CHECK((candidate(q, diag) - candidate(q, g)).norm() <= 1e-14);
        auto e = sym_eigen(candidate(q, diag));
        std::sort(lambda.begin(), lambda.end());
        CHECK((e.values - lambda).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("assemble_target extremes") {
    std::mt19937_64 rng(4);
    Matrix q = random_orthogonal(3, rng);
    auto fr = validate_instance(free_instance(Vector::LinSpaced(3, 0, 2), 0, 0));
    CHECK(assemble_target(q, fr) == candidate(q, fr));

    Matrix omega(3, 3);
    omega << 1, 2, 0, 2, 0, 3, 0, 3, 4;
    auto fixed = validate_instance(
        SiepInstance::from_diagonal("fixed", Vector::LinSpaced(3, 0, 2), Matrix::Zero(3, 3), omega, 0, 0));
    CHECK(assemble_target(q, fixed) == omega);
}

TEST_CASE("single negative entry example") {
    Vector lambda(2);
    lambda << 1, -1;
    auto inst = validate_instance(free_instance(lambda, 1, 0));
    auto l = loss_eval(Matrix::Identity(2, 2), inst);
    CHECK(l.nonneg == doctest::Approx(0.5));
    CHECK(l.spec == 0.0);
    CHECK(l.total == doctest::Approx(0.5));
}

TEST_CASE("exact solution has zero loss and zero gradient") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
        const Eigen::Index n = 2 + t % 5;
        Matrix b = Matrix::Random(n, n);
        Matrix m0 = b + b.transpose();
        auto e = sym_eigen(m0);
        auto shape = oracle::random_instance(n, 0, 0, true, rng);
        Matrix omega = (Matrix::Ones(n, n) - shape.mask_s).cwiseProduct(m0);
        Vector alpha = m0.rowwise().sum();
        auto inst = validate_instance(
            SiepInstance::from_diagonal("exact", e.values, shape.mask_s, omega, 0, 1, alpha));
        auto l = loss_eval(e.vectors, inst);
        CHECK(l.total <= 1e-24);
        CHECK(loss_grad_q(e.vectors, inst).norm() <= 1e-8);
        CHECK((assemble_target(e.vectors, inst) - m0).norm() <= 1e-12);
    }
}

TEST_CASE("loss matches the scalar-loop oracle on random instances") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 100; ++t) {
        const Eigen::Index n = 1 + t % 4;
        const int k1 = t % 2, k2 = (t / 2) % 2;
        auto raw = oracle::random_instance(n, k1, k2, t % 3 != 0, rng);
        auto inst = validate_instance(raw);
        Matrix q = random_orthogonal(n, rng);
        auto got = loss_eval(q, inst);
        auto want = oracle::brute_loss(q, raw);
        const double scale = std::max(std::abs(want.total), 1e-300);
        CHECK(std::abs(got.total - want.total) <= 1e-12 * scale);
        CHECK(got.nonneg == doctest::Approx(want.nonneg).epsilon(1e-12));
        CHECK(got.spec == doctest::Approx(want.spec).epsilon(1e-12));
        CHECK(got.row == doctest::Approx(want.row).epsilon(1e-12));
        CHECK(got.total == k1 * got.nonneg + got.spec + k2 * got.row);
    }
}

TEST_CASE("spec term with kappa1 = 0 and no prescribed values is the filter form") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const Eigen::Index n = 2 + t % 5;
        auto raw = oracle::random_instance(n, 0, 0, false, rng);
        raw.prescribed.setZero();
        auto inst = validate_instance(raw);
        Matrix q = random_orthogonal(n, rng);
        Matrix a = candidate(q, inst);
        const double filter_form = 0.5 * (a - raw.mask_s.cwiseProduct(a)).squaredNorm();
        CHECK(loss_eval(q, inst).spec == doctest::Approx(filter_form).epsilon(1e-12));
    }
}

TEST_CASE("loss gradient matches finite differences") {
    std::mt19937_64 rng(9);
    SUBCASE("3x3 smooth case") {
        for (int t = 0; t < 10; ++t) {
            auto inst = validate_instance(oracle::random_instance(3, 0, 0, t % 2 == 0, rng));
            Matrix q = random_orthogonal(3, rng);
            auto f = [&](const Matrix& x) { return loss_eval(x, inst).total; };
            CHECK(oracle::rel_err(loss_grad_q(q, inst), oracle::fd_gradient(f, q)) <= 1e-4);
        }
    }
    SUBCASE("4x4 with both switches on, away from relu kinks") {
        int done = 0;
        while (done < 10) {
            auto raw = oracle::random_instance(4, 1, 1, done % 2 == 0, rng);
            auto inst = validate_instance(raw);
            Matrix q = random_orthogonal(4, rng);
            if (oracle::min_kink_distance(candidate(q, inst), raw) < 1e-5) continue;
            auto f = [&](const Matrix& x) { return loss_eval(x, inst).total; };
            CHECK(oracle::rel_err(loss_grad_q(q, inst), oracle::fd_gradient(f, q)) <= 1e-4);
            ++done;
        }
    }
}

TEST_CASE("error metric") {
    Vector sigma(3);
    sigma << 2, -1, 0.5;
    CHECK(error_metric(Matrix(sigma.asDiagonal()), sigma) == 0.0);
    std::mt19937_64 rng(10);
    Matrix q = random_orthogonal(3, rng);
    CHECK(error_metric(q * sigma.asDiagonal() * q.transpose(), sigma) <= 1e-10);
    Matrix off = sigma.asDiagonal();
    off(0, 0) += 1e-3;
    CHECK(error_metric(off, sigma) == doctest::Approx(1e-3));
    Matrix asym = sigma.asDiagonal();
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(error_metric(asym, sigma), UnsupportedVerificationError);
}

TEST_CASE("constraint report on a published stochastic result") {
    Matrix m(5, 5);
    m << 0.1916, 0.2688, 0, 0, 0.5396,  //
        0.2688, 0.2339, 0.4972, 0, 0,   //
        0, 0.4972, 0.2319, 0.2709, 0,   //
        0, 0, 0.2709, 0.5253, 0.2038,   //
        0.5396, 0, 0, 0.2038, 0.2566;
    auto inst = validate_instance(builtin("stiep5"));
    auto r = constraint_report(m, inst, 1e-3);
    CHECK(r.nonneg_checked);
    CHECK(r.rows_checked);
    CHECK(r.all_ok());
    CHECK(error_metric(m, inst.raw().spectrum) < 1e-3);
}

TEST_CASE("constraint report failures") {
    Matrix omega(2, 2);
    omega << 1, 0.5, 0.5, 2;
    auto fixed = validate_instance(
        SiepInstance::from_diagonal("f", Vector::Ones(2), Matrix::Zero(2, 2), omega, 0, 0));
    auto ok = constraint_report(omega, fixed, 0.0);
    CHECK(ok.prescribed_ok);
    CHECK(ok.prescribed_violation == 0.0);
    CHECK_FALSE(ok.nonneg_checked);

    auto nn = validate_instance(free_instance(Vector::Ones(2), 1, 0));
    Matrix m = Matrix::Ones(2, 2);
    m(0, 1) = m(1, 0) = -0.01;
    auto r = constraint_report(m, nn, 1e-4);
    CHECK_FALSE(r.nonneg_ok);
    CHECK(r.nonneg_violation == doctest::Approx(0.01));

    Matrix asym = Matrix::Ones(2, 2);
    asym(0, 1) = 2.0;
    CHECK_FALSE(constraint_report(asym, nn, 1e-4).symmetric_ok);
}

}
