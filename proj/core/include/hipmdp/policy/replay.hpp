#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "hipmdp/rng.hpp"
#include "hipmdp/types.hpp"

namespace hipmdp::policy {

// Ring buffer with proportional prioritization: index i is sampled with
// probability p_i^alpha / sum_j p_j^alpha (with replacement), importance
// weights (N*P(i))^-beta normalized by the maximum weight over the buffer.
// A segment tree carries (sum of p^alpha, min of p^alpha, max of p) per node
// so sampling and the weight normalizer are O(log n).
class PrioritizedBuffer {
public:
    PrioritizedBuffer(std::size_t capacity, double alpha);

    // New entries receive the maximum current priority (1 when empty).
    std::size_t push(TransitionTuple t);

    struct Sample {
        std::vector<std::size_t> indices;
        Eigen::VectorXd weights;  // in (0, 1], max-normalized
    };

    // Throws std::logic_error on an empty buffer.
    Sample sample(std::size_t batch, double beta, Rng& rng) const;

    // Priorities must stay strictly positive.
    void update_priority(std::size_t index, double priority);
    double priority(std::size_t index) const;

    const TransitionTuple& at(std::size_t index) const { return data_[index]; }
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    double alpha() const { return alpha_; }

    // Drops synthetic tuples, compacting real ones in order and preserving
    // their priorities. Returns the number of removed entries. A no-op on an
    // all-real buffer.
    std::size_t purge_synthetic();

private:
    void tree_assign(std::size_t slot, double raw_priority);
    std::size_t tree_pick(double mass) const;

    std::size_t capacity_;
    double alpha_;
    std::size_t base_;  // number of tree leaves (power of two)
    std::vector<double> sum_, minima_, raw_max_;
    std::vector<TransitionTuple> data_;
    std::vector<double> raw_priority_;
    std::size_t head_{0};
    std::size_t size_{0};
};

}  // namespace hipmdp::policy
