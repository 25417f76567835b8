#include "risiort/learn/replay.hpp"

#include <algorithm>
#include <random>
#include <utility>

#include "risiort/error.hpp"

namespace risiort::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  require(capacity > 0, "ReplayBuffer: capacity must be > 0");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  require(t.state.size() == state_dim_ && t.next_state.size() == state_dim_ &&
              t.action.size() == action_dim_,
          "ReplayBuffer::push: transition dimensions do not match the buffer");
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(Rng& rng, std::size_t n) const {
  require(!data_.empty(), "ReplayBuffer::sample: buffer is empty");
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& slots) const {
  require(!slots.empty(), "ReplayBuffer::gather: empty batch");
  const auto n = static_cast<Eigen::Index>(slots.size());
  Batch b;
  b.states.resize(state_dim_, n);
  b.actions.resize(action_dim_, n);
  b.rewards.resize(n);
  b.next_states.resize(state_dim_, n);
  b.done.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Transition& t = data_.at(slots[static_cast<std::size_t>(j)]);
    b.states.col(j) = t.state;
    b.actions.col(j) = t.action;
    b.rewards(j) = t.reward;
    b.next_states.col(j) = t.next_state;
    b.done(j) = t.done ? 1.0 : 0.0;
  }
  return b;
}

}  // namespace risiort::learn

namespace risiort::learn {

ConditionedBatch unconditioned(const Batch& b) {
  return {b.states, b.states, b.actions, b.rewards, b.done, b.next_states, b.next_states, {}};
}

}  // namespace risiort::learn
