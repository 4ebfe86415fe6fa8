#pragma once

#include <cstddef>
#include <vector>

namespace bubbletree {

// Tridiagonal system: lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
// lower[0] and upper[n-1] are ignored. Thomas algorithm, no pivoting.
std::vector<double> solve_tridiagonal(const std::vector<double>& lower,
                                      const std::vector<double>& diag,
                                      const std::vector<double>& upper,
                                      const std::vector<double>& rhs);

// Dense symmetric matrix stored row-major.
class SymMatrix {
  public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}
    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
    std::vector<double>& data() { return a_; }
    const std::vector<double>& data() const { return a_; }

  private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

// All eigenvalues of a symmetric matrix by cyclic Jacobi. Ascending order.
std::vector<double> jacobi_eigenvalues(SymMatrix a, int max_sweeps = 60);

// In-place Cholesky A = L L^T; returns false if a pivot is not positive.
bool cholesky(SymMatrix& a);

// Solve L y = b and L^T x = y for the Cholesky factor stored in lower(a).
std::vector<double> cholesky_solve_lower(const SymMatrix& l, const std::vector<double>& b);
std::vector<double> cholesky_solve_upper(const SymMatrix& l, const std::vector<double>& b);

} // namespace bubbletree
