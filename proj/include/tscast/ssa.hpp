#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tscast::ssa {

/// Result of the lag-covariance eigenanalysis. Eigenpairs are sorted by
/// descending eigenvalue; eigenvectors[j][k] is component j of the k-th
/// eigenvector, principal_components[i][k] the k-th component score of
/// window i.
struct Decomposition {
    std::size_t embedding_dim = 0;
    std::vector<double> eigenvalues;
    std::vector<double> eigenvalue_shares;
    std::vector<std::vector<double>> eigenvectors;
    std::vector<std::vector<double>> principal_components;
    std::size_t original_length = 0;
    bool degenerate = false;     // zero-variance input, shares forced to [1, 0, ...]
    bool centered = false;
    double mean = 0.0;           // stored only when centered
};

/// Hankel matrix of sliding windows: m rows, n-m+1 columns, entry (r, c)
/// = x[r + c]. Throws EmbeddingTooLarge unless 1 <= m < n/2.
std::vector<std::vector<double>> delay_matrix(std::span<const double> x, std::size_t m);

/// m x m covariance of the delay matrix, S = X X^T / (n - m + 1), after
/// optional mean removal. Positive semidefinite by construction; entry
/// (r, c) is the window-averaged lag-|r-c| second moment.
std::vector<std::vector<double>> window_covariance(std::span<const double> x, std::size_t m,
                                                   bool center = false);

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// eigenvalues (descending) and the matching orthonormal eigenvectors as
/// columns of the second member.
struct EigenResult {
    std::vector<double> values;
    std::vector<std::vector<double>> vectors;
};
EigenResult eigen_symmetric(const std::vector<std::vector<double>>& s);

/// Full SSA analysis of a series with embedding dimension m. A constant
/// zero-variance series yields a flagged decomposition rather than an
/// error. The series is not mean-centered unless requested.
Decomposition decompose(std::span<const double> x, std::size_t m, bool center = false);

/// Rebuild a series from the selected components (1-based indices) by
/// diagonal averaging of the overlapping window estimates.
std::vector<double> reconstruct(const Decomposition& d, const std::vector<int>& selected);

/// Smallest prefix {1..k} whose cumulative eigenvalue share reaches the
/// threshold.
std::vector<int> select_components(const Decomposition& d, double threshold = 0.9999);

/// decompose + select_components + reconstruct in one call.
std::vector<double> denoise(std::span<const double> x, std::size_t m = 10,
                            double threshold = 0.9999, bool center = false);

}  // namespace tscast::ssa
