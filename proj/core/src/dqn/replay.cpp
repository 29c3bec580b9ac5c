#include "aoinoma/dqn/replay.hpp"

#include <numeric>
#include <utility>

namespace aoinoma::dqn {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity)
{
    expects(capacity >= 1, "replay capacity must be >= 1");
    items_.reserve(capacity);
}

void ReplayMemory::push(Transition t)
{
    const std::size_t slot = pushes_ % capacity_;
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[slot] = std::move(t);
    }
    ++pushes_;
}

std::vector<std::size_t> sample_minibatch(const ReplayMemory& memory, std::size_t batch, Rng& rng)
{
    expects(batch >= 1 && memory.size() >= batch, "replay memory holds fewer records than the batch");
    std::vector<std::size_t> idx(memory.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < batch; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(batch);
    return idx;
}

}  // namespace aoinoma::dqn
