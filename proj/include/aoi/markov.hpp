#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "aoi/kernels.hpp"

namespace aoi {

// The chain has more than one closed communicating class.
class MultichainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class StationaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Row-stochastic sparse transition matrix.
class SparseChain {
public:
    explicit SparseChain(std::size_t n) : n_(n) { offsets_.push_back(0); }

    // Rows must be appended in order 0..n-1; duplicate columns are allowed.
    void add(std::uint32_t col, double prob) {
        cols_.push_back(col);
        vals_.push_back(prob);
    }
    void end_row() { offsets_.push_back(cols_.size()); }

    std::size_t size() const { return n_; }
    std::size_t row_begin(std::size_t i) const { return offsets_[i]; }
    std::size_t row_end(std::size_t i) const { return offsets_[i + 1]; }
    std::uint32_t col(std::size_t j) const { return cols_[j]; }
    double val(std::size_t j) const { return vals_[j]; }

    // Transposed copy in CSR form, for pi <- pi P.
    kernels::CsrMatrix transpose() const;

private:
    std::size_t n_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> cols_;
    std::vector<double> vals_;
};

// Closed communicating classes (recurrent classes), each sorted ascending.
std::vector<std::vector<std::uint32_t>> closed_classes(const SparseChain& chain);

// ||pi P - pi||_1
double stationary_residual(const SparseChain& chain, std::span<const double> pi);

/*
Stationary distribution of a unichain: sparse LU on the single closed class, zero on
transient states. Throws MultichainError if there is more than one closed class and
StationaryError if the residual exceeds `residual_tol`.
*/
std::vector<double> stationary_distribution(const SparseChain& chain, double residual_tol = 1e-10);

struct PowerIterationResult {
    std::vector<double> pi;
    int iterations = 0;
    double change = 0.0;
    bool converged = false;
};

// Power iteration on the lazy chain (I + P)/2 from `initial`; stops when the L1 change is below tol.
PowerIterationResult stationary_power(const SparseChain& chain, std::span<const double> initial, double tol,
                                      int max_iterations, kernels::Exec exec = kernels::Exec::serial);

}  // namespace aoi
