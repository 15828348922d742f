#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hipmdp/gp/kernel.hpp"

namespace hipmdp::latent {

// Simulated-annealing subset selection. The objective for a candidate subset
// S is the maximum absolute GP reconstruction error, over a fixed held-out
// split and all target dimensions, of a GP trained on S alone (fixed
// hyperparameters, one set per dimension).
struct AnnealConfig {
    int steps{2000};
    double cooling{0.95};
    double holdout_fraction{0.2};
    double initial_temperature{-1.0};  // < 0: start at the initial objective value
    std::uint64_t seed{0};
    std::vector<gp::KernelHyper> hypers;  // one per target dim; empty -> data-driven init
};

struct SelectionResult {
    std::vector<Eigen::Index> indices;     // size m, in original row numbering
    std::vector<double> objective_trace;   // current objective after each proposal
    double final_objective{0.0};
    std::vector<Eigen::Index> holdout_rows;    // rows the objective was measured on
    std::vector<Eigen::Index> candidate_rows;  // rows the subset was drawn from
};

// Max reconstruction error of subset `selected` evaluated at rows `eval_rows`.
double reconstruction_objective(const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                                const std::vector<Eigen::Index>& selected,
                                const std::vector<Eigen::Index>& eval_rows,
                                const std::vector<gp::KernelHyper>& hypers);

// Returns m row indices approximately minimizing the objective above. The
// selected multiset of points is invariant to input row permutation (rows
// are canonicalized before any random choice is made). m = N returns all
// indices. Throws std::invalid_argument when m is out of range.
SelectionResult select_support_points(const Eigen::MatrixXd& inputs,
                                      const Eigen::MatrixXd& targets,
                                      Eigen::Index m, const AnnealConfig& config);

}  // namespace hipmdp::latent
