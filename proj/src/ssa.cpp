#include "tscast/ssa.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tscast/errors.hpp"

namespace tscast::ssa {

namespace {

void check_embedding(std::size_t n, std::size_t m) {
    if (m < 1) throw EmbeddingTooLarge("embedding dimension must be >= 1");
    if (2 * m > n) {
        throw EmbeddingTooLarge("embedding dimension " + std::to_string(m) +
                                " exceeds n/2 for n = " + std::to_string(n));
    }
}

}  // namespace

std::vector<std::vector<double>> delay_matrix(std::span<const double> x, std::size_t m) {
    check_embedding(x.size(), m);
    const std::size_t k = x.size() - m + 1;
    std::vector<std::vector<double>> mat(m, std::vector<double>(k));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < k; ++c) {
            mat[r][c] = x[r + c];
        }
    }
    return mat;
}

std::vector<std::vector<double>> window_covariance(std::span<const double> x, std::size_t m,
                                                   bool center) {
    check_embedding(x.size(), m);
    const std::size_t n = x.size();
    const std::size_t k = n - m + 1;
    double mean = 0.0;
    if (center) {
        mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    }
    std::vector<std::vector<double>> cov(m, std::vector<double>(m, 0.0));
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = r; c < m; ++c) {
            double acc = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                acc += (x[r + i] - mean) * (x[c + i] - mean);
            }
            cov[r][c] = acc / static_cast<double>(k);
            cov[c][r] = cov[r][c];
        }
    }
    return cov;
}

EigenResult eigen_symmetric(const std::vector<std::vector<double>>& s) {
    const std::size_t m = s.size();
    std::vector<std::vector<double>> a = s;
    std::vector<std::vector<double>> v(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) v[i][i] = 1.0;

    auto off_norm = [&] {
        double acc = 0.0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) acc += a[p][q] * a[p][q];
        return std::sqrt(2.0 * acc);
    };

    double scale = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) scale = std::max(scale, std::abs(a[i][j]));
    const double tol = std::max(scale, 1.0) * 1e-15 * static_cast<double>(m);

    const int max_sweeps = 64;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol; ++sweep) {
        for (std::size_t p = 0; p + 1 < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = a[p][q];
                if (std::abs(apq) <= tol / static_cast<double>(m * m)) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - sn * aiq;
                    a[i][q] = sn * aip + c * aiq;
                }
                for (std::size_t j = 0; j < m; ++j) {
                    const double apj = a[p][j];
                    const double aqj = a[q][j];
                    a[p][j] = c * apj - sn * aqj;
                    a[q][j] = sn * apj + c * aqj;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double vip = v[i][p];
                    const double viq = v[i][q];
                    v[i][p] = c * vip - sn * viq;
                    v[i][q] = sn * vip + c * viq;
                }
            }
        }
    }

    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });

    EigenResult out;
    out.values.resize(m);
    out.vectors.assign(m, std::vector<double>(m));
    for (std::size_t k = 0; k < m; ++k) {
        out.values[k] = a[order[k]][order[k]];
        for (std::size_t j = 0; j < m; ++j) {
            out.vectors[j][k] = v[j][order[k]];
        }
    }
    return out;
}

Decomposition decompose(std::span<const double> x, std::size_t m, bool center) {
    check_embedding(x.size(), m);
    const std::size_t n = x.size();

    Decomposition d;
    d.embedding_dim = m;
    d.original_length = n;
    d.centered = center;
    if (center) {
        d.mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    }

    const auto cov = window_covariance(x, m, center);
    EigenResult eig = eigen_symmetric(cov);
    d.eigenvalues = std::move(eig.values);
    d.eigenvectors = std::move(eig.vectors);

    const double total = std::accumulate(d.eigenvalues.begin(), d.eigenvalues.end(), 0.0);
    d.eigenvalue_shares.assign(m, 0.0);
    const double floor = cov[0][0] * 1e-14 + 1e-300;
    if (total <= floor) {
        d.degenerate = true;
        d.eigenvalue_shares[0] = 1.0;
    } else {
        for (std::size_t k = 0; k < m; ++k) {
            d.eigenvalue_shares[k] = d.eigenvalues[k] / total;
        }
    }

    const std::size_t windows = n - m + 1;
    d.principal_components.assign(windows, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < windows; ++i) {
        for (std::size_t k = 0; k < m; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                acc += (x[i + j] - d.mean) * d.eigenvectors[j][k];
            }
            d.principal_components[i][k] = acc;
        }
    }
    return d;
}

std::vector<double> reconstruct(const Decomposition& d, const std::vector<int>& selected) {
    if (selected.empty()) throw EmptySelection("no components selected");
    std::vector<bool> use(d.embedding_dim, false);
    for (int idx : selected) {
        if (idx < 1 || static_cast<std::size_t>(idx) > d.embedding_dim) {
            throw IndexOutOfRange("component index " + std::to_string(idx) +
                                  " outside [1, " + std::to_string(d.embedding_dim) + "]");
        }
        use[static_cast<std::size_t>(idx) - 1] = true;
    }

    const std::size_t n = d.original_length;
    const std::size_t m = d.embedding_dim;
    const std::size_t windows = n - m + 1;
    std::vector<double> sum(n, 0.0);
    std::vector<double> count(n, 0.0);
    for (std::size_t i = 0; i < windows; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            double est = 0.0;
            for (std::size_t k = 0; k < m; ++k) {
                if (use[k]) est += d.principal_components[i][k] * d.eigenvectors[j][k];
            }
            sum[i + j] += est;
            count[i + j] += 1.0;
        }
    }
    for (std::size_t t = 0; t < n; ++t) {
        sum[t] = sum[t] / count[t] + d.mean;
    }
    return sum;
}

std::vector<int> select_components(const Decomposition& d, double threshold) {
    std::vector<int> out;
    double cum = 0.0;
    for (std::size_t k = 0; k < d.embedding_dim; ++k) {
        out.push_back(static_cast<int>(k) + 1);
        cum += d.eigenvalue_shares[k];
        if (cum >= threshold) break;
    }
    return out;
}

std::vector<double> denoise(std::span<const double> x, std::size_t m, double threshold,
                            bool center) {
    const Decomposition d = decompose(x, m, center);
    return reconstruct(d, select_components(d, threshold));
}

}  // namespace tscast::ssa
