#pragma once

// Negative multinomial model: parameter types, pmf, moments and samplers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nmshrink/error.hpp"
#include "nmshrink/random.hpp"
#include "nmshrink/special.hpp"

namespace nmshrink {

using Count = std::int64_t;

/// Dense m x N matrix of doubles, column index nu, row index i.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t nu) { return data_[nu * rows_ + i]; }
    double operator()(std::size_t i, std::size_t nu) const { return data_[nu * rows_ + i]; }

    /// Column nu as a contiguous span.
    [[nodiscard]] std::span<const double> col(std::size_t nu) const {
        return {data_.data() + nu * rows_, rows_};
    }
    std::span<double> col(std::size_t nu) { return {data_.data() + nu * rows_, rows_}; }

    [[nodiscard]] const std::vector<double>& data() const { return data_; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Point estimate of the m x N probability matrix.
using EstimateMatrix = Matrix;

/// A probability vector p in the open simplex interior, with p0 = 1 - sum(p).
class ProbColumn {
public:
    static constexpr double kMinProb = 1e-300;
    static constexpr double kP0Tolerance = 1e-12;

    explicit ProbColumn(std::vector<double> p) : p_(std::move(p)) {
        long double s = 0.0L;
        for (double v : p_) s += v;
        p0_ = static_cast<double>(1.0L - s);
        validate();
    }

    /// Takes a p0 computed elsewhere (for example from gamma draws); it must
    /// match 1 - sum(p) to within kP0Tolerance.
    ProbColumn(std::vector<double> p, double p0) : p_(std::move(p)), p0_(p0) {
        validate();
        long double s = 0.0L;
        for (double v : p_) s += v;
        const double recomputed = static_cast<double>(1.0L - s);
        if (std::abs(recomputed - p0_) > kP0Tolerance)
            throw InputError("ProbColumn: stored p0 disagrees with 1 - sum(p)");
    }

    [[nodiscard]] std::size_t size() const { return p_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return p_[i]; }
    [[nodiscard]] std::span<const double> p() const { return p_; }
    [[nodiscard]] double p0() const { return p0_; }

private:
    void validate() const {
        if (p_.empty()) throw InputError("ProbColumn: empty probability vector");
        for (double v : p_) {
            if (!std::isfinite(v) || v <= kMinProb)
                throw InputError("ProbColumn: every p_i must exceed 1e-300");
        }
        if (!(p0_ > 0.0) || !(p0_ < 1.0)) throw InputError("ProbColumn: sum(p) must lie in (0, 1)");
    }

    std::vector<double> p_;
    double p0_ = 1.0;
};

/// (r, P): shared r and N probability columns of common dimension m.
class ModelParams {
public:
    ModelParams(double r, std::vector<ProbColumn> columns) : r_(r), columns_(std::move(columns)) {
        require_input(std::isfinite(r_) && r_ > 0.0, "ModelParams: r must be positive");
        require_input(!columns_.empty(), "ModelParams: at least one column required");
        for (const auto& c : columns_)
            require_input(c.size() == columns_.front().size(), "ModelParams: columns differ in dimension");
    }

    [[nodiscard]] double r() const { return r_; }
    [[nodiscard]] std::size_t m() const { return columns_.front().size(); }
    [[nodiscard]] std::size_t n_cols() const { return columns_.size(); }
    [[nodiscard]] const ProbColumn& column(std::size_t nu) const { return columns_[nu]; }
    [[nodiscard]] const std::vector<ProbColumn>& columns() const { return columns_; }
    [[nodiscard]] double p(std::size_t i, std::size_t nu) const { return columns_[nu][i]; }

    [[nodiscard]] Matrix as_matrix() const {
        Matrix out(m(), n_cols());
        for (std::size_t nu = 0; nu < n_cols(); ++nu)
            for (std::size_t i = 0; i < m(); ++i) out(i, nu) = columns_[nu][i];
        return out;
    }

private:
    double r_;
    std::vector<ProbColumn> columns_;
};

/// m x N nonnegative counts with cached column sums and grand sum.
class CountMatrix {
public:
    CountMatrix() = default;

    CountMatrix(std::size_t m, std::size_t n_cols) : m_(m), n_(n_cols), x_(m * n_cols, 0), col_sums_(n_cols, 0) {}

    /// From rows: rows[i][nu].
    static CountMatrix from_rows(const std::vector<std::vector<Count>>& rows) {
        require_input(!rows.empty() && !rows.front().empty(), "CountMatrix: empty input");
        CountMatrix out(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            require_input(rows[i].size() == out.n_,
                          "CountMatrix: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                              " entries, expected " + std::to_string(out.n_));
            for (std::size_t nu = 0; nu < out.n_; ++nu) out.set(i, nu, rows[i][nu]);
        }
        return out;
    }

    [[nodiscard]] std::size_t m() const { return m_; }
    [[nodiscard]] std::size_t n_cols() const { return n_; }
    [[nodiscard]] Count operator()(std::size_t i, std::size_t nu) const { return x_[nu * m_ + i]; }
    [[nodiscard]] std::span<const Count> col(std::size_t nu) const { return {x_.data() + nu * m_, m_}; }
    [[nodiscard]] Count col_sum(std::size_t nu) const { return col_sums_[nu]; }
    [[nodiscard]] const std::vector<Count>& col_sums() const { return col_sums_; }
    [[nodiscard]] Count grand_sum() const { return grand_sum_; }

    void set(std::size_t i, std::size_t nu, Count value) {
        require_input(value >= 0, "CountMatrix: counts must be nonnegative");
        Count& slot = x_[nu * m_ + i];
        col_sums_[nu] += value - slot;
        grand_sum_ += value - slot;
        slot = value;
    }

    friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

private:
    std::size_t m_ = 0;
    std::size_t n_ = 0;
    std::vector<Count> x_;
    std::vector<Count> col_sums_;
    Count grand_sum_ = 0;
};

/// Dirichlet-type density p0^(a0-1) prod p_i^(a_i-1) on the simplex; a0 may be
/// nonpositive when used as an improper prior.
class GeneralizedDirichlet {
public:
    GeneralizedDirichlet(double a0, std::vector<double> a) : a0_(a0), a_(std::move(a)) {
        require_input(std::isfinite(a0_), "GeneralizedDirichlet: a0 must be finite");
        require_input(!a_.empty(), "GeneralizedDirichlet: empty a");
        for (double v : a_) require_input(std::isfinite(v) && v > 0.0, "GeneralizedDirichlet: a_i must be positive");
        a_dot_ = std::accumulate(a_.begin(), a_.end(), 0.0);
    }

    [[nodiscard]] double a0() const { return a0_; }
    [[nodiscard]] const std::vector<double>& a() const { return a_; }
    [[nodiscard]] double a_dot() const { return a_dot_; }
    [[nodiscard]] bool normalizable() const { return a0_ > 0.0; }

    /// log of the normalized density; requires a0 > 0.
    [[nodiscard]] double log_density(const ProbColumn& p) const {
        require_input(normalizable(), "GeneralizedDirichlet: density is improper for a0 <= 0");
        require_input(p.size() == a_.size(), "GeneralizedDirichlet: dimension mismatch");
        double v = special::log_gamma(a0_ + a_dot_) - special::log_gamma(a0_) + (a0_ - 1.0) * std::log(p.p0());
        for (std::size_t i = 0; i < a_.size(); ++i) v += (a_[i] - 1.0) * std::log(p[i]) - special::log_gamma(a_[i]);
        return v;
    }

private:
    double a0_;
    std::vector<double> a_;
    double a_dot_ = 0.0;
};

/// log NM_m(x | r, p).
inline double nm_log_pmf(std::span<const Count> x, double r, const ProbColumn& p) {
    require_input(std::isfinite(r) && r > 0.0, "nm_log_pmf: r must be positive");
    require_input(x.size() == p.size(), "nm_log_pmf: dimension mismatch");
    Count total = 0;
    double v = r * std::log(p.p0());
    for (std::size_t i = 0; i < x.size(); ++i) {
        require_input(x[i] >= 0, "nm_log_pmf: counts must be nonnegative");
        total += x[i];
        if (x[i] > 0) v += static_cast<double>(x[i]) * std::log(p[i]) - special::log_factorial(x[i]);
    }
    return v + special::log_rising_lgamma(r, static_cast<double>(total));
}

/// One NM_m(r, p) draw through the Poisson-gamma mixture.
inline std::vector<Count> nm_sample(double r, const ProbColumn& p, RandomStream& rng) {
    require_input(std::isfinite(r) && r > 0.0, "nm_sample: r must be positive");
    const double v = rng.gamma(r, 1.0);
    std::vector<Count> x(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) x[i] = rng.poisson(p[i] / p.p0() * v);
    return x;
}

/// Independent columns X_nu ~ NM_m(r, p_nu).
inline CountMatrix nm_sample_matrix(const ModelParams& params, RandomStream& rng) {
    CountMatrix X(params.m(), params.n_cols());
    for (std::size_t nu = 0; nu < params.n_cols(); ++nu) {
        const auto x = nm_sample(params.r(), params.column(nu), rng);
        for (std::size_t i = 0; i < x.size(); ++i) X.set(i, nu, x[i]);
    }
    return X;
}

struct Moments {
    std::vector<double> mean;
    Matrix covariance;
};

/// Mean r p / p0 and covariance r diag(p) / p0 + r p p' / p0^2.
inline Moments nm_moments(double r, const ProbColumn& p) {
    require_input(std::isfinite(r) && r > 0.0, "nm_moments: r must be positive");
    const std::size_t m = p.size();
    Moments out{std::vector<double>(m), Matrix(m, m)};
    const double p0 = p.p0();
    for (std::size_t i = 0; i < m; ++i) {
        out.mean[i] = r * p[i] / p0;
        for (std::size_t j = 0; j < m; ++j) {
            out.covariance(i, j) = r * p[i] * p[j] / (p0 * p0) + (i == j ? r * p[i] / p0 : 0.0);
        }
    }
    return out;
}

/// Draws (p0, p_1..p_m) ~ Dir(a0, a_1, ..., a_m) and returns the last m
/// coordinates. Normalization is done in log space.
inline ProbColumn gen_dirichlet_sample(double a0, std::span<const double> a, RandomStream& rng) {
    require_input(std::isfinite(a0) && a0 > 0.0, "gen_dirichlet_sample: a0 must be positive");
    require_input(!a.empty(), "gen_dirichlet_sample: empty a");
    std::vector<double> logs(a.size() + 1);
    logs[0] = rng.log_gamma_variate(a0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        require_input(std::isfinite(a[i]) && a[i] > 0.0, "gen_dirichlet_sample: a_i must be positive");
        logs[i + 1] = rng.log_gamma_variate(a[i]);
    }
    const double lse = special::log_sum_exp(logs);
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = std::exp(logs[i + 1] - lse);
    return ProbColumn(std::move(p), std::exp(logs[0] - lse));
}

}  // namespace nmshrink
