#pragma once

// One-class SVM, nu formulation with an RBF kernel.
//
// Dual:   minimise 1/2 a'Qa   subject to   0 <= a_i <= 1/(nu n),  sum a_i = 1
// with Q_ij = K(x_i, x_j). Solved by SMO on the maximal violating pair.
// Decision: f(x) = sum_i a_i K(sv_i, x) - rho, anomalous iff f(x) < 0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sunblock {

struct OcsvmParams {
    double nu = 0.05;
    double gamma = 0.0;          // 0 selects 1/dim
    double tol = 1e-4;           // KKT violating-pair gap
    std::size_t max_iter = 0;    // 0 selects 10 * n * dim
};

struct OcsvmModel {
    std::vector<std::vector<double>> support_vectors;
    std::vector<double> alphas;
    double rho = 0.0;
    double gamma = 1.0;
    // Training metadata; not part of the persisted layout.
    std::size_t train_count = 0;
    std::size_t iterations = 0;
    bool converged = true;
    std::string warning;

    std::size_t dim() const { return support_vectors.empty() ? 0 : support_vectors.front().size(); }
};

inline double squared_distance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("kernel dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i] - y[i];
        d += t * t;
    }
    return d;
}

inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double gamma) {
    return std::exp(-gamma * squared_distance(x, y));
}

// Gram matrix, fully materialised for moderate n and computed per column
// beyond that.
class KernelMatrix {
public:
    static constexpr std::size_t kDenseLimit = 4096;

    KernelMatrix(std::span<const std::vector<double>> rows, double gamma) : rows_(rows), gamma_(gamma) {
        const std::size_t n = rows.size();
        if (n <= kDenseLimit) {
            dense_.resize(n * n);
            for (std::size_t i = 0; i < n; ++i) {
                dense_[i * n + i] = 1.0;
                for (std::size_t j = i + 1; j < n; ++j)
                    dense_[i * n + j] = dense_[j * n + i] = rbf_kernel(rows[i], rows[j], gamma);
            }
        }
    }

    std::size_t size() const { return rows_.size(); }

    double operator()(std::size_t i, std::size_t j) const {
        if (!dense_.empty()) return dense_[i * rows_.size() + j];
        return i == j ? 1.0 : rbf_kernel(rows_[i], rows_[j], gamma_);
    }

    void column(std::size_t j, std::vector<double>& out) const {
        const std::size_t n = rows_.size();
        out.resize(n);
        if (!dense_.empty()) {
            std::copy_n(dense_.begin() + static_cast<std::ptrdiff_t>(j * n), n, out.begin());
            return;
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = (*this)(i, j);
    }

private:
    std::span<const std::vector<double>> rows_;
    double gamma_;
    std::vector<double> dense_;
};

struct DualSolution {
    std::vector<double> alpha;
    std::vector<double> gradient;  // Q alpha
    double upper = 1.0;            // 1/(nu n)
    double gap = 0.0;              // final violating-pair gap
    std::size_t iterations = 0;
    bool converged = false;

    double objective() const {
        double f = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) f += alpha[i] * gradient[i];
        return 0.5 * f;
    }
};

inline DualSolution solve_one_class_dual(const KernelMatrix& Q, double nu, double tol, std::size_t max_iter) {
    const std::size_t n = Q.size();
    DualSolution s;
    s.upper = 1.0 / (nu * static_cast<double>(n));
    const double C = s.upper;
    s.alpha.assign(n, 0.0);
    double remaining = 1.0;
    for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
        s.alpha[i] = std::min(C, remaining);
        remaining -= s.alpha[i];
    }

    s.gradient.assign(n, 0.0);
    std::vector<double> col_i, col_j;
    for (std::size_t j = 0; j < n; ++j) {
        if (s.alpha[j] == 0.0) continue;
        Q.column(j, col_j);
        for (std::size_t k = 0; k < n; ++k) s.gradient[k] += s.alpha[j] * col_j[k];
    }

    for (;;) {
        // i: may grow, smallest gradient. j: may shrink, largest gradient.
        std::size_t i = n, j = n;
        double g_min = std::numeric_limits<double>::infinity();
        double g_max = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (s.alpha[k] < C && s.gradient[k] < g_min) {
                g_min = s.gradient[k];
                i = k;
            }
            if (s.alpha[k] > 0.0 && s.gradient[k] > g_max) {
                g_max = s.gradient[k];
                j = k;
            }
        }
        s.gap = (i == n || j == n) ? 0.0 : g_max - g_min;
        if (s.gap <= tol) {
            s.converged = true;
            break;
        }
        if (s.iterations >= max_iter) break;
        ++s.iterations;

        double quad = Q(i, i) + Q(j, j) - 2.0 * Q(i, j);
        if (quad <= 0.0) quad = 1e-12;
        double delta = s.gap / quad;
        bool i_at_upper = false;
        bool j_at_zero = false;
        if (delta >= C - s.alpha[i]) {
            delta = C - s.alpha[i];
            i_at_upper = true;
        }
        if (delta >= s.alpha[j]) {
            delta = s.alpha[j];
            j_at_zero = true;
            i_at_upper = delta >= C - s.alpha[i];
        }
        s.alpha[i] = i_at_upper ? C : s.alpha[i] + delta;
        s.alpha[j] = j_at_zero ? 0.0 : s.alpha[j] - delta;

        Q.column(i, col_i);
        Q.column(j, col_j);
        for (std::size_t k = 0; k < n; ++k) s.gradient[k] += delta * (col_i[k] - col_j[k]);
    }
    return s;
}

inline constexpr double kSupportThreshold = 1e-12;

inline OcsvmModel train(std::span<const std::vector<double>> data, const OcsvmParams& params) {
    if (data.empty()) throw std::invalid_argument("one-class SVM needs at least one training vector");
    const std::size_t dim = data.front().size();
    if (dim == 0) throw std::invalid_argument("training vectors must have positive dimension");
    for (const auto& row : data) {
        if (row.size() != dim) throw std::invalid_argument("ragged training data");
        for (double x : row)
            if (!std::isfinite(x)) throw std::invalid_argument("non-finite value in training data");
    }
    if (!(params.nu > 0.0 && params.nu <= 1.0)) throw std::invalid_argument("nu must lie in (0, 1]");
    const double gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(dim);
    const std::size_t n = data.size();
    const std::size_t max_iter = params.max_iter ? params.max_iter : 10 * n * dim;

    const KernelMatrix Q(data, gamma);
    const DualSolution sol = solve_one_class_dual(Q, params.nu, params.tol, max_iter);

    OcsvmModel m;
    m.gamma = gamma;
    m.train_count = n;
    m.iterations = sol.iterations;
    m.converged = sol.converged;
    if (!sol.converged)
        m.warning = "solver stopped after " + std::to_string(sol.iterations) + " iterations with KKT gap " +
                    std::to_string(sol.gap) + " > tol";

    // At the optimum every point below the upper bound has gradient >= rho,
    // with equality on margin vectors. The solver leaves a band of width
    // `tol`; taking its lower edge keeps points with alpha < C out of the
    // outlier set, so only bounded vectors can score below zero.
    double sv_sum = 0.0;
    double below_upper_min = std::numeric_limits<double>::infinity();
    std::size_t sv_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = sol.alpha[i];
        if (a < sol.upper) below_upper_min = std::min(below_upper_min, sol.gradient[i]);
        if (a <= kSupportThreshold) continue;
        m.support_vectors.push_back(data[i]);
        m.alphas.push_back(a);
        sv_sum += sol.gradient[i];
        ++sv_count;
    }
    m.rho = std::isfinite(below_upper_min) ? below_upper_min : sv_sum / static_cast<double>(sv_count);
    return m;
}

inline double decision(const OcsvmModel& m, std::span<const double> x) {
    if (x.size() != m.dim()) throw std::invalid_argument("decision: dimension mismatch");
    double f = 0.0;
    for (std::size_t i = 0; i < m.alphas.size(); ++i) f += m.alphas[i] * rbf_kernel(m.support_vectors[i], x, m.gamma);
    return f - m.rho;
}

inline bool is_anomalous(const OcsvmModel& m, std::span<const double> x) { return decision(m, x) < 0.0; }

}  // namespace sunblock
