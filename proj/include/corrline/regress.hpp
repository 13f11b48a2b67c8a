#pragma once

// OLS under additive Gaussian label noise: the exact expected-error identity
// E||w_hat - w||^2 = eta^2 sum sigma_i^{-2}(X), and the singular-value check
// that turns it into an (epsilon, delta) statement via Markov's inequality.

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "corrline/errors.hpp"
#include "corrline/rng.hpp"

namespace corrline::regress {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Smallest surviving singular value relative to the largest.
inline constexpr double kSingularTol = 1e-10;
// Default constant in the sigma_min >= c0 sqrt(m) qualification.
inline constexpr double kDefaultC0 = 0.3;

inline Vector singular_values(const Matrix& x) {
    if (x.rows() < x.cols() || x.cols() < 1)
        throw DomainError("design: requires m >= d >= 1");
    Eigen::JacobiSVD<Matrix> svd(x);
    const Vector sv = svd.singularValues();
    if (!(sv(sv.size() - 1) > kSingularTol * sv(0)))
        throw SingularDesign("design: smallest singular value below tolerance");
    return sv;
}

// OLS estimate via a Householder QR solve (never the explicit inverse).
// Verifies the normal-equation residual before returning.
inline Vector ols_fit(const Matrix& x, const Vector& y, double residual_tol = 1e-8) {
    if (y.size() != x.rows()) throw DomainError("ols_fit: y length must match rows of X");
    singular_values(x);  // rejects singular designs
    const Vector w = x.colPivHouseholderQr().solve(y);
    const double residual = (x.transpose() * (x * w - y)).norm();
    const double scale = 1.0 + x.norm() * y.norm();
    if (!(residual <= residual_tol * scale))
        throw SingularDesign("ols_fit: normal-equation residual check failed");
    return w;
}

// eta^2 sum_i sigma_i^{-2}(X)
inline double expected_error(const Matrix& x, double eta) {
    if (!(eta >= 0.0)) throw DomainError("expected_error: eta must be >= 0");
    const Vector sv = singular_values(x);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) sum += 1.0 / (sv(i) * sv(i));
    return eta * eta * sum;
}

struct RegressionResult {
    Vector w_hat;
    double error_sq_expected = 0.0;
    Vector singular_values;  // nonincreasing
};

inline RegressionResult fit(const Matrix& x, const Vector& y, double eta) {
    RegressionResult result;
    result.w_hat = ols_fit(x, y);
    result.singular_values = singular_values(x);
    result.error_sq_expected = expected_error(x, eta);
    return result;
}

struct DesignCheck {
    double epsilon = 0.0;
    double delta = 0.0;
    bool qualifies = false;
    double sigma_min = 0.0;
};

// With E = E||z||^2, the split (epsilon, delta) = (E sqrt(m), 1/sqrt(m))
// satisfies P(||z||^2 > epsilon) <= delta by Markov; the design qualifies
// when sigma_d >= c0 sqrt(m).
inline DesignCheck adversarial_design_check(const Matrix& x, double eta, double c0 = kDefaultC0) {
    const Vector sv = singular_values(x);
    const double m = static_cast<double>(x.rows());
    DesignCheck check;
    check.sigma_min = sv(sv.size() - 1);
    check.qualifies = check.sigma_min >= c0 * std::sqrt(m);
    const double expected = expected_error(x, eta);
    check.epsilon = expected * std::sqrt(m);
    check.delta = 1.0 / std::sqrt(m);
    return check;
}

// CSV with m rows and d numeric columns; a non-numeric first row is treated
// as a header and skipped.
inline Matrix load_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                const double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            if (first) {
                first = false;
                continue;  // header row
            }
            throw ValidationError("csv: non-numeric cell outside header row");
        }
        first = false;
        if (!rows.empty() && row.size() != rows.front().size())
            throw ValidationError("csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("csv: no data rows");
    Matrix x(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j) x(i, j) = rows[i][j];
    return x;
}

inline Matrix load_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("csv: cannot open " + path);
    return load_csv(is);
}

// Deterministic Gaussian design; when cond > 1 the singular spectrum is bent
// to that condition number around sqrt(m).
inline Matrix random_design(std::int64_t m, std::int64_t d, std::uint64_t seed, double cond = 1.0) {
    if (m < d || d < 1) throw DomainError("random_design: requires m >= d >= 1");
    rng::Stream stream(rng::mix64(seed));
    Matrix g(m, d);
    for (std::int64_t i = 0; i < m; ++i)
        for (std::int64_t j = 0; j < d; ++j) g(i, j) = stream.normal();
    if (cond <= 1.0) return g;
    // reshape the spectrum: sigma_i = sqrt(m) * cond^{-i/(d-1)}
    Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv(d);
    for (std::int64_t i = 0; i < d; ++i) {
        const double frac = d > 1 ? static_cast<double>(i) / static_cast<double>(d - 1) : 0.0;
        sv(i) = std::sqrt(static_cast<double>(m)) * std::pow(cond, -frac);
    }
    return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

}  // namespace corrline::regress
