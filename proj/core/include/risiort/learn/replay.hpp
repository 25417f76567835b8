#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "risiort/random.hpp"

namespace risiort::learn {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool done = false;
};

// Column-major batch; done holds 1.0 for terminal transitions.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd done;

  Eigen::Index size() const { return rewards.size(); }
};

class ReplayBuffer {
 public:
  // Every stored transition must match the declared dimensions.
  ReplayBuffer(std::size_t capacity, Eigen::Index state_dim, Eigen::Index action_dim);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t slot) const { return data_.at(slot); }

  // Uniform slot indices over the occupied slots, with replacement.
  std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n) const;
  Batch gather(const std::vector<std::size_t>& slots) const;
  Batch sample(Rng& rng, std::size_t n) const { return gather(sample_indices(rng, n)); }

 private:
  std::size_t capacity_;
  Eigen::Index state_dim_;
  Eigen::Index action_dim_;
  std::vector<Transition> data_;
  std::size_t next_ = 0;
};

}  // namespace risiort::learn

namespace risiort::learn {

// Continuous-control batch with the network inputs already assembled. Actor
// inputs are the state plus any actor conditioning; critic contexts are the
// state plus any critic conditioning. The critic sees [context; action].
struct ConditionedBatch {
  Eigen::MatrixXd actor_in;
  Eigen::MatrixXd critic_ctx;
  Eigen::MatrixXd actions;  // own actions, inside [-1, 1]
  Eigen::VectorXd rewards;
  Eigen::VectorXd done;
  Eigen::MatrixXd next_actor_in;
  Eigen::MatrixXd next_critic_ctx;
  // Critic context for the actor step; empty means critic_ctx. Differs when
  // the conditioning action is re-drawn from a freshly updated policy.
  Eigen::MatrixXd actor_critic_ctx;

  Eigen::Index size() const { return rewards.size(); }
  const Eigen::MatrixXd& actor_ctx() const {
    return actor_critic_ctx.size() > 0 ? actor_critic_ctx : critic_ctx;
  }
};

// No conditioning: actor and critic both see the bare state.
ConditionedBatch unconditioned(const Batch& b);

}  // namespace risiort::learn
