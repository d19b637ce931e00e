#pragma once

// Constrained maximization sup{ F(v) : G(v) = 1 } on a truncated basis.
// The ratio F/G is 0-homogeneous, so ascent runs on the unconstrained ratio
// with renormalization to G = 1 after every accepted step.  Multi-start:
// +/- every eigenmode of lambda_k inside the truncation, an optional warm
// start, and seeded random unit fields up to n_starts.  Ties are resolved by
// largest ratio, then smallest residual, then lowest start index.

#include <cstdint>
#include <vector>

#include "fucik/shifts.hpp"

namespace fucik {

struct MaximizerConfig {
    int n_starts = 16;
    int max_iters = 5000;
    double tol_ratio = 1e-10;     // relative stall in F/G
    double tol_residual = 1e-8;   // on ||gradF - a_hat gradG||
    double step_init = 0.1;
    double backtrack = 0.5;
    std::uint64_t seed = 12345;
    // Budget for the exploration pass of each start; the best start is then
    // polished with the full max_iters budget.
    int coarse_iters = 300;
    int stall_window = 20;

    void validate() const;
};

struct MaximizerResult {
    double a_hat = 0.0;          // attained supremum of F/G
    SpectralField v0;            // extremizer, G(v0) = 1
    double residual = 0.0;       // ||gradF(v0) - a_hat gradG(v0)||
    bool converged = false;      // some start met tol_residual
    int best_start = -1;
    std::vector<int> iters_per_start;
    std::vector<double> start_values;     // attained ratio per start
    std::vector<double> distinct_ratios;  // distinct converged ratios (1e-6 grouping)
};

MaximizerResult maximize_ratio(const ShiftedOperator& op, double r, const Transform& transform,
                               const MaximizerConfig& mcfg,
                               const SpectralField* warm_start = nullptr);

// Quadrature norm of (L-mu)v - a_hat (v+ - r v-) projected on the truncated
// basis (half of the gradient residual above).
double residual_norm(const SpectralField& v, double a_hat, double r, const ShiftedOperator& op,
                     const Transform& transform);

// Independent oracle: best ratio over >= n_samples random directions on a
// tiny truncation (dimension <= 8), polished by derivative-free shrinking
// random search.  Lower bound on the truncated supremum.
double brute_force_sup(const ShiftedOperator& op, double r, const Transform& tiny_transform,
                       int n_samples, std::uint64_t seed);

}  // namespace fucik
