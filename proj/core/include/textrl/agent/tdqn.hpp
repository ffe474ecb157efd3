#pragma once

#include "textrl/agent/agent.hpp"
#include "textrl/agent/inputs.hpp"
#include "textrl/nn/adam.hpp"
#include "textrl/nn/gru.hpp"
#include "textrl/nn/tape.hpp"

namespace textrl::agent {

// Parser-based agent: GRUs encode the state parts and the previous action,
// and three linear heads score templates and the two filler slots. Actions
// are assembled from per-head softmax samples; the Q-value of an assembled
// action is the mean of its present component scores.
class TdqnAgent final : public Agent {
 public:
  static std::unique_ptr<TdqnAgent> create(
      const env::GameSpec& game, const AgentBuild& build,
      std::shared_ptr<const lm::FrozenEncoder> encoder);
  static std::unique_ptr<TdqnAgent> restore(
      const env::GameSpec& game, const AgentBuild& build,
      std::shared_ptr<const lm::FrozenEncoder> encoder,
      nn::ParamContainer params, corpus::Vocab scratch_vocab);

  AgentKind kind() const override { return AgentKind::kTdqn; }
  const env::GameSpec& game() const override { return *game_; }
  std::vector<double> q_values(const StateParts& state,
                               std::span<const env::Action> candidates) const override;
  using Agent::q_values;
  env::Action select_action(const StateParts& state, std::span<const env::Action> valid,
                            double temperature, Rng& rng) const override;
  UpdateStats update(std::span<const Transition> batch, double gamma,
                     double lr) override;
  const nn::ParamContainer& params() const override { return params_; }
  const AgentBuild& build() const override { return build_; }
  void save(const std::string& path,
            const std::map<std::string, std::string>& extra = {}) const override;

  struct Heads {
    nn::Var templates;  // B x |T|
    nn::Var filler1;    // B x |V_fill|
    nn::Var filler2;    // B x |V_fill|
  };

  // Head values for a batch of states.
  Heads q_heads(nn::Tape& tape, const std::vector<StateParts>& states) const;

  // Plain-value convenience for one state.
  struct HeadValues {
    std::vector<double> templates, filler1, filler2;
  };
  HeadValues head_values(const StateParts& state) const;

  std::vector<double> td_targets(std::span<const Transition> batch, double gamma) const;

  // Mean squared TD residual over the batch (frozen-target form for the
  // finite-difference oracle, live targets otherwise).
  nn::Var build_td_loss(nn::Tape& tape, std::span<const Transition> batch, double gamma,
                        const std::vector<double>* frozen_targets = nullptr) const;

  // Mean element-wise binary cross-entropy between sigmoid(head values) and
  // multi-hot valid-action targets, averaged over all elements of all three
  // heads. One row per state.
  nn::Var build_aux_loss(nn::Tape& tape, Heads heads,
                         const std::vector<std::vector<env::Action>>& valid_sets) const;

 private:
  TdqnAgent(const env::GameSpec& game, const AgentBuild& build,
            std::shared_ptr<const lm::FrozenEncoder> encoder,
            nn::ParamContainer params, corpus::Vocab scratch_vocab, bool fresh);

  double composite_q(const HeadValues& heads, const env::Action& action) const;

  const env::GameSpec* game_;
  AgentBuild build_;
  std::shared_ptr<const lm::FrozenEncoder> frozen_;
  nn::ParamContainer params_;
  std::unique_ptr<TokenInputSource> source_;
  nn::GruLayer event_gru_, inv_gru_, look_gru_, prev_gru_;
  int head_t_w_ = -1, head_t_b_ = -1;
  int head_f1_w_ = -1, head_f1_b_ = -1;
  int head_f2_w_ = -1, head_f2_b_ = -1;
  std::unique_ptr<nn::AdamState> opt_;
};

}  // namespace textrl::agent
