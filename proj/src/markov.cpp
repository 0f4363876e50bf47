#include "aoi/markov.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <string>

namespace aoi {

kernels::CsrMatrix SparseChain::transpose() const {
    kernels::CsrMatrix t;
    t.n = n_;
    t.offsets.assign(n_ + 1, 0);
    for (auto c : cols_) ++t.offsets[c + 1];
    for (std::size_t i = 0; i < n_; ++i) t.offsets[i + 1] += t.offsets[i];
    t.cols.resize(cols_.size());
    t.vals.resize(vals_.size());
    std::vector<std::size_t> fill(t.offsets.begin(), t.offsets.end() - 1);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = offsets_[i]; j < offsets_[i + 1]; ++j) {
            const std::size_t pos = fill[cols_[j]]++;
            t.cols[pos] = static_cast<std::uint32_t>(i);
            t.vals[pos] = vals_[j];
        }
    }
    return t;
}

std::vector<std::vector<std::uint32_t>> closed_classes(const SparseChain& chain) {
    // Iterative Tarjan SCC over edges with positive probability.
    const std::size_t n = chain.size();
    constexpr std::uint32_t unvisited = 0xffffffffu;
    std::vector<std::uint32_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::size_t>> call;  // (node, next edge)
    std::uint32_t counter = 0, ncomp = 0;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        call.emplace_back(root, chain.row_begin(root));
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!call.empty()) {
            auto& [v, e] = call.back();
            if (e < chain.row_end(v)) {
                const std::size_t j = e++;
                if (chain.val(j) <= 0.0) continue;
                const std::uint32_t w = chain.col(j);
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    call.emplace_back(w, chain.row_begin(w));
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            const std::uint32_t done = v;
            if (low[done] == index[done]) {
                while (true) {
                    const std::uint32_t w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = ncomp;
                    if (w == done) break;
                }
                ++ncomp;
            }
            call.pop_back();
            if (!call.empty()) {
                const std::uint32_t parent = call.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }

    std::vector<char> leaks(ncomp, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = chain.row_begin(i); j < chain.row_end(i); ++j)
            if (chain.val(j) > 0.0 && comp[chain.col(j)] != comp[i]) leaks[comp[i]] = 1;

    std::vector<std::vector<std::uint32_t>> members(ncomp);
    for (std::uint32_t i = 0; i < n; ++i)
        if (!leaks[comp[i]]) members[comp[i]].push_back(i);
    std::vector<std::vector<std::uint32_t>> out;
    for (auto& m : members)
        if (!m.empty()) out.push_back(std::move(m));
    std::sort(out.begin(), out.end());
    return out;
}

double stationary_residual(const SparseChain& chain, std::span<const double> pi) {
    std::vector<double> next(chain.size(), 0.0);
    for (std::size_t i = 0; i < chain.size(); ++i)
        for (std::size_t j = chain.row_begin(i); j < chain.row_end(i); ++j) next[chain.col(j)] += pi[i] * chain.val(j);
    double res = 0.0;
    for (std::size_t i = 0; i < chain.size(); ++i) res += std::abs(next[i] - pi[i]);
    return res;
}

std::vector<double> stationary_distribution(const SparseChain& chain, double residual_tol) {
    const auto classes = closed_classes(chain);
    if (classes.size() != 1)
        throw MultichainError("policy-induced chain has " + std::to_string(classes.size()) +
                              " recurrent classes; long-run averages depend on the initial state");
    const auto& cls = classes.front();
    const std::size_t m = cls.size();
    std::vector<std::int64_t> local(chain.size(), -1);
    for (std::size_t i = 0; i < m; ++i) local[cls[i]] = static_cast<std::int64_t>(i);

    // (P_C^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t i = 0; i < m; ++i) {
        const std::uint32_t s = cls[i];
        for (std::size_t j = chain.row_begin(s); j < chain.row_end(s); ++j) {
            const auto target = local[chain.col(j)];
            if (target < 0 || target == static_cast<std::int64_t>(m - 1)) continue;
            trips.emplace_back(static_cast<int>(target), static_cast<int>(i), chain.val(j));
        }
        if (i != m - 1) trips.emplace_back(static_cast<int>(i), static_cast<int>(i), -1.0);
        trips.emplace_back(static_cast<int>(m - 1), static_cast<int>(i), 1.0);
    }
    Eigen::SparseMatrix<double> a(static_cast<int>(m), static_cast<int>(m));
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw StationaryError("sparse LU factorization of the chain failed");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(m));
    rhs[static_cast<int>(m - 1)] = 1.0;
    Eigen::VectorXd x = lu.solve(rhs);

    std::vector<double> pi(chain.size(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        pi[cls[i]] = std::max(0.0, x[static_cast<int>(i)]);
        total += pi[cls[i]];
    }
    for (double& p : pi) p /= total;
    const double res = stationary_residual(chain, pi);
    if (!(res <= residual_tol))
        throw StationaryError("stationary residual " + std::to_string(res) + " above tolerance");
    return pi;
}

PowerIterationResult stationary_power(const SparseChain& chain, std::span<const double> initial, double tol,
                                      int max_iterations, kernels::Exec exec) {
    const auto pt = chain.transpose();
    PowerIterationResult res;
    res.pi.assign(initial.begin(), initial.end());
    std::vector<double> next(chain.size());
    for (int it = 1; it <= max_iterations; ++it) {
        kernels::spmv(exec, pt, res.pi, next);
        double change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            const double lazy = 0.5 * (res.pi[i] + next[i]);
            change += std::abs(lazy - res.pi[i]);
            res.pi[i] = lazy;
        }
        res.iterations = it;
        res.change = change;
        if (change < tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace aoi
