#pragma once

// Uniform experience replay over a fixed-capacity ring buffer.

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "orants/error.hpp"
#include "orants/rng.hpp"

namespace orants {

struct Transition {
    std::vector<double> state;
    int action = 0;
    double reward = 0.0;
    std::vector<double> next_state;
    bool done = false;
};

class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::uint64_t seed)
        : capacity_(capacity), rng_(mix_seed(seed, 0x7265706cull)) {
        if (capacity_ == 0) throw Error(ErrorCategory::Config, "replay capacity must be > 0");
        data_.reserve(capacity_);
    }

    void push(Transition t) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(t));
        } else {
            data_[head_] = std::move(t);
            head_ = (head_ + 1) % capacity_;
        }
    }

    /// Uniform sample without replacement within the batch (Floyd's method).
    std::vector<Transition> sample(std::size_t batch) {
        if (batch == 0 || batch > data_.size())
            throw Error(ErrorCategory::Internal, "replay sample larger than buffer");
        std::unordered_set<std::size_t> chosen;
        std::vector<Transition> out;
        out.reserve(batch);
        for (std::size_t i = data_.size() - batch; i < data_.size(); ++i) {
            std::size_t j = static_cast<std::size_t>(rng_.below(i + 1));
            std::size_t pick = chosen.insert(j).second ? j : i;
            if (pick != j) chosen.insert(pick);
            out.push_back(data_[pick]);
        }
        return out;
    }

    std::size_t size() const { return data_.size(); }
    std::size_t capacity() const { return capacity_; }

private:
    std::size_t capacity_;
    std::size_t head_ = 0;
    std::vector<Transition> data_;
    Rng rng_;
};

} // namespace orants
