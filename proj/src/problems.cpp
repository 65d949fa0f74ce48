#include "smlp/problems.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>

#include "smlp/filter.hpp"

namespace smlp {

namespace {

Matrix symmetric_from_upper(Eigen::Index n, std::initializer_list<std::tuple<int, int, double>> entries) {
    Matrix m = Matrix::Zero(n, n);
    for (const auto& [i, j, v] : entries) m(i, j) = m(j, i) = v;
    return m;
}

// S = 1 everywhere except on the support of omega
Matrix complement_of_support(const Matrix& omega) {
    return (omega.array() != 0.0).select(Matrix::Zero(omega.rows(), omega.cols()),
                                         Matrix::Ones(omega.rows(), omega.cols()));
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Matrix mask_from_rows(std::initializer_list<std::initializer_list<int>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix m(n, n);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (int v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

SiepInstance peiep6() {
    const Vector lambda = vec({2, -0.3408, 0.1046, 0.2438, -0.8483, 0.3211});
    Matrix omega = symmetric_from_upper(6, {{0, 1, 0.2245}, {0, 3, 1.3222}, {1, 3, 0.4471}});
    Matrix s = complement_of_support(omega);
    return SiepInstance::from_diagonal("peiep6", lambda, s, omega, 0, 0);
}

SiepInstance snpeiep5() {
    const Vector lambda = vec({0.9568, 0.2730, 0.0253, -0.1246, -0.2352});
    Matrix omega = symmetric_from_upper(
        5, {{0, 0, 0.0596}, {0, 2, 0.2015}, {1, 1, 0.2833}, {1, 3, 0.2116}, {2, 3, 0.1920}});
    Matrix s = mask_from_rows({
        {0, 1, 0, 1, 1},
        {1, 0, 1, 0, 1},
        {0, 1, 1, 0, 1},
        {1, 0, 0, 1, 1},
        {1, 1, 1, 1, 1},
    });
    return SiepInstance::from_diagonal("snpeiep5", lambda, s, omega, 1, 0);
}

SiepInstance edm7() {
    const Vector lambda = vec({21, -1, -2, -3, -4, -5, -6});
    Matrix s = Matrix::Ones(7, 7) - Matrix::Identity(7, 7);
    return SiepInstance::from_diagonal("edm7", lambda, s, Matrix::Zero(7, 7), 1, 0);
}

SiepInstance stiep5() {
    const Vector lambda = vec({1.0000, -0.2608, 0.5046, 0.6438, -0.4483});
    Matrix s = mask_from_rows({
        {1, 1, 0, 0, 1},
        {1, 1, 1, 0, 0},
        {0, 1, 1, 1, 0},
        {0, 0, 1, 1, 1},
        {1, 0, 0, 1, 1},
    });
    return SiepInstance::from_diagonal("stiep5", lambda, s, Matrix::Zero(5, 5), 1, 1, Vector::Ones(5));
}

SiepInstance gstiep8() {
    const Vector lambda = vec({8, 6, 3, 3, -5, -5, -5, -5});
    Matrix s = Matrix::Ones(8, 8) - Matrix::Identity(8, 8);
    return SiepInstance::from_diagonal("gstiep8", lambda, s, Matrix::Zero(8, 8), 1, 1, Vector::Constant(8, 8.0));
}

SiepInstance graph10() {
    const double r2 = std::numbers::sqrt2;
    const Vector lambda = vec({-3, -2, -2, 0, 0, 0, 0, 2, 2, 3});
    Matrix omega = symmetric_from_upper(10, {{1, 2, r2}, {2, 3, 1.0}, {3, 4, r2}, {3, 7, r2}});
    Matrix s = Matrix::Zero(10, 10);
    for (const auto& [i, j] : graph10_free_positions()) s(i, j) = 1.0;
    return SiepInstance::from_diagonal("graph10", lambda, s, omega, 0, 0);
}

bool parse_jacobi(const std::string& name, Eigen::Index& size, bool& rows) {
    constexpr std::string_view prefix = "jacobi";
    constexpr std::string_view suffix = "_rows";
    if (name.rfind(prefix, 0) != 0) return false;
    std::string_view rest(name);
    rest.remove_prefix(prefix.size());
    rows = rest.size() > suffix.size() && rest.substr(rest.size() - suffix.size()) == suffix;
    if (rows) rest.remove_suffix(suffix.size());
    long long v = 0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec != std::errc{} || ptr != rest.data() + rest.size() || rest.empty()) return false;
    if (v < 4 || v % 2 != 0) return false;
    size = static_cast<Eigen::Index>(v);
    return true;
}

}  // namespace

std::vector<std::pair<Eigen::Index, Eigen::Index>> graph10_free_positions() {
    return {{0, 2}, {2, 0}, {4, 5}, {5, 4}, {4, 6}, {6, 4}, {7, 8}, {8, 7}, {7, 9}, {9, 7}};
}

Matrix jacobi_matrix(Eigen::Index size) {
    Matrix j = 2.0 * Matrix::Identity(size, size);
    for (Eigen::Index i = 0; i + 1 < size; ++i) j(i, i + 1) = j(i + 1, i) = 1.0;
    return j;
}

SiepInstance jacobi_instance(Eigen::Index half_n, bool row_sums) {
    if (half_n < 2) throw InvalidInstanceError("jacobi_instance: half_n must be >= 2");
    const Eigen::Index n = half_n;
    const Eigen::Index size = 2 * n;
    Vector lambda(size);
    for (Eigen::Index i = 1; i <= size; ++i)
        lambda(i - 1) = 2.0 * std::cos(static_cast<double>(i) * std::numbers::pi / static_cast<double>(size + 1)) + 2.0;

    const Matrix full = jacobi_matrix(size);
    Matrix omega = Matrix::Zero(size, size);
    omega.topLeftCorner(n, n) = full.topLeftCorner(n, n);

    // S = [[0, L], [R, C]]: L frees (n-1, n), R frees (n, n-1), C is the
    // tridiagonal band of the trailing block.
    Matrix s = Matrix::Zero(size, size);
    s(n - 1, n) = 1.0;
    s(n, n - 1) = 1.0;
    for (Eigen::Index i = n; i < size; ++i) {
        s(i, i) = 1.0;
        if (i + 1 < size) s(i, i + 1) = s(i + 1, i) = 1.0;
    }

    std::optional<Vector> targets;
    if (row_sums) targets = full.rowwise().sum();
    std::string name = "jacobi" + std::to_string(size) + (row_sums ? "_rows" : "");
    return SiepInstance::from_diagonal(std::move(name), lambda, s, omega, 1, row_sums ? 1 : 0, targets);
}

std::vector<CatalogEntry> catalog() {
    std::vector<CatalogEntry> out = {
        {"edm7", 7, 1, 0, "Euclidean distance matrix, zero diagonal"},
        {"filter_extbox_10", 12, 0, 0, "coupling matrix, extended-box topology, order 10"},
        {"filter_extbox_8", 10, 0, 0, "coupling matrix, extended-box topology, order 8"},
        {"filter_folded_10", 12, 0, 0, "coupling matrix, folded topology, order 10"},
        {"filter_folded_8", 10, 0, 0, "coupling matrix, folded topology, order 8"},
        {"graph10", 10, 0, 0, "symmetric matrix with the pattern of a 10-vertex tree"},
        {"gstiep8", 8, 1, 1, "generalized stochastic, row sums 8"},
        {"jacobi20", 20, 1, 0, "Jacobi extension, 2n = 20"},
        {"jacobi40", 40, 1, 0, "Jacobi extension, 2n = 40"},
        {"jacobi60", 60, 1, 0, "Jacobi extension, 2n = 60"},
        {"peiep6", 6, 0, 0, "prescribed entries"},
        {"snpeiep5", 5, 1, 0, "symmetric nonnegative with prescribed entries"},
        {"stiep5", 5, 1, 1, "stochastic, row sums 1"},
    };
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

SiepInstance builtin(const std::string& name) {
    if (name == "peiep6") return peiep6();
    if (name == "snpeiep5") return snpeiep5();
    if (name == "edm7") return edm7();
    if (name == "stiep5") return stiep5();
    if (name == "gstiep8") return gstiep8();
    if (name == "graph10") return graph10();
    if (name == "filter_folded_8") return filter_as_siep(make_filter(Topology::folded, 8));
    if (name == "filter_extbox_8") return filter_as_siep(make_filter(Topology::extended_box, 8));
    if (name == "filter_folded_10") return filter_as_siep(make_filter(Topology::folded, 10));
    if (name == "filter_extbox_10") return filter_as_siep(make_filter(Topology::extended_box, 10));
    Eigen::Index size = 0;
    bool rows = false;
    if (parse_jacobi(name, size, rows)) return jacobi_instance(size / 2, rows);
    throw UnknownInstanceError("unknown instance '" + name + "'");
}

}  // namespace smlp
