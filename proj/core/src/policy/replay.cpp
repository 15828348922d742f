#include "hipmdp/policy/replay.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hipmdp::policy {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

PrioritizedBuffer::PrioritizedBuffer(std::size_t capacity, double alpha)
    : capacity_(capacity), alpha_(alpha) {
    if (capacity_ == 0) throw std::invalid_argument("PrioritizedBuffer: zero capacity");
    if (alpha_ < 0.0) throw std::invalid_argument("PrioritizedBuffer: alpha must be >= 0");
    base_ = 1;
    while (base_ < capacity_) base_ <<= 1;
    sum_.assign(2 * base_, 0.0);
    minima_.assign(2 * base_, kInf);
    raw_max_.assign(2 * base_, 0.0);
    data_.resize(capacity_);
    raw_priority_.assign(capacity_, 0.0);
}

void PrioritizedBuffer::tree_assign(std::size_t slot, double raw_priority) {
    raw_priority_[slot] = raw_priority;
    std::size_t node = base_ + slot;
    const double pa = std::pow(raw_priority, alpha_);
    sum_[node] = pa;
    minima_[node] = pa;
    raw_max_[node] = raw_priority;
    while (node > 1) {
        node >>= 1;
        sum_[node] = sum_[2 * node] + sum_[2 * node + 1];
        minima_[node] = std::min(minima_[2 * node], minima_[2 * node + 1]);
        raw_max_[node] = std::max(raw_max_[2 * node], raw_max_[2 * node + 1]);
    }
}

std::size_t PrioritizedBuffer::tree_pick(double mass) const {
    std::size_t node = 1;
    while (node < base_) {
        if (mass < sum_[2 * node] || sum_[2 * node + 1] <= 0.0) {
            node = 2 * node;
        } else {
            mass -= sum_[2 * node];
            node = 2 * node + 1;
        }
    }
    std::size_t slot = node - base_;
    if (slot >= size_) slot = size_ - 1;  // numerical edge at the total mass
    return slot;
}

std::size_t PrioritizedBuffer::push(TransitionTuple t) {
    const double p = size_ == 0 ? 1.0 : raw_max_[1];
    const std::size_t slot = head_;
    data_[slot] = std::move(t);
    tree_assign(slot, p);
    head_ = (head_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
    return slot;
}

PrioritizedBuffer::Sample PrioritizedBuffer::sample(std::size_t batch, double beta,
                                                    Rng& rng) const {
    if (size_ == 0) throw std::logic_error("PrioritizedBuffer: sample from empty buffer");
    const double total = sum_[1];
    const double n = static_cast<double>(size_);
    const double min_prob = minima_[1] / total;
    const double max_weight = std::pow(n * min_prob, -beta);

    Sample out;
    out.indices.resize(batch);
    out.weights.resize(static_cast<Eigen::Index>(batch));
    for (std::size_t b = 0; b < batch; ++b) {
        const std::size_t idx = tree_pick(rng.uniform() * total);
        out.indices[b] = idx;
        const double prob = sum_[base_ + idx] / total;
        out.weights(static_cast<Eigen::Index>(b)) = std::pow(n * prob, -beta) / max_weight;
    }
    return out;
}

void PrioritizedBuffer::update_priority(std::size_t index, double priority) {
    if (index >= size_) throw std::invalid_argument("PrioritizedBuffer: index out of range");
    if (!(priority > 0.0)) {
        throw std::invalid_argument("PrioritizedBuffer: priority must be strictly positive");
    }
    tree_assign(index, priority);
}

double PrioritizedBuffer::priority(std::size_t index) const {
    if (index >= size_) throw std::invalid_argument("PrioritizedBuffer: index out of range");
    return raw_priority_[index];
}

std::size_t PrioritizedBuffer::purge_synthetic() {
    std::size_t synthetic = 0;
    for (std::size_t i = 0; i < size_; ++i) {
        if (data_[i].synthetic) ++synthetic;
    }
    if (synthetic == 0) return 0;

    std::vector<TransitionTuple> kept;
    std::vector<double> kept_p;
    kept.reserve(size_ - synthetic);
    for (std::size_t i = 0; i < size_; ++i) {
        if (!data_[i].synthetic) {
            kept.push_back(std::move(data_[i]));
            kept_p.push_back(raw_priority_[i]);
        }
    }
    const std::size_t removed = synthetic;

    sum_.assign(2 * base_, 0.0);
    minima_.assign(2 * base_, kInf);
    raw_max_.assign(2 * base_, 0.0);
    raw_priority_.assign(capacity_, 0.0);
    data_.assign(capacity_, TransitionTuple{});
    size_ = kept.size();
    head_ = size_ % capacity_;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        data_[i] = std::move(kept[i]);
        tree_assign(i, kept_p[i]);
    }
    return removed;
}

}  // namespace hipmdp::policy
