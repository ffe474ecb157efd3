#pragma once

#include "textrl/agent/agent.hpp"
#include "textrl/agent/inputs.hpp"
#include "textrl/nn/adam.hpp"
#include "textrl/nn/gru.hpp"
#include "textrl/nn/tape.hpp"

namespace textrl::agent {

// Choice-based agent: three GRUs encode the state parts, a fourth encodes a
// candidate action, and a two-layer head maps the concatenated states to one
// scalar Q-value per candidate.
class DrrnAgent final : public Agent {
 public:
  static std::unique_ptr<DrrnAgent> create(
      const env::GameSpec& game, const AgentBuild& build,
      std::shared_ptr<const lm::FrozenEncoder> encoder);
  static std::unique_ptr<DrrnAgent> restore(
      const env::GameSpec& game, const AgentBuild& build,
      std::shared_ptr<const lm::FrozenEncoder> encoder,
      nn::ParamContainer params, corpus::Vocab scratch_vocab);

  AgentKind kind() const override { return AgentKind::kDrrn; }
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

  // Bootstrap targets r + gamma * max_a' Q(o', a'), 0 bootstrap at done.
  std::vector<double> td_targets(std::span<const Transition> batch, double gamma) const;

  // Mean squared TD residual on the tape. When `frozen_targets` is given the
  // bootstrap side is taken from it instead of being recomputed, which is the
  // form the finite-difference oracle differentiates.
  nn::Var build_td_loss(nn::Tape& tape, std::span<const Transition> batch, double gamma,
                        const std::vector<double>* frozen_targets = nullptr) const;

 private:
  DrrnAgent(const env::GameSpec& game, const AgentBuild& build,
            std::shared_ptr<const lm::FrozenEncoder> encoder,
            nn::ParamContainer params, corpus::Vocab scratch_vocab, bool fresh);

  // Q-values for (state index, action index) pairs over deduplicated states
  // and action texts; returns a P x 1 column.
  nn::Var q_for_pairs(nn::Tape& tape, const std::vector<StateParts>& states,
                      const std::vector<std::string>& action_texts,
                      const std::vector<std::pair<int, int>>& pairs) const;

  const env::GameSpec* game_;
  AgentBuild build_;
  std::shared_ptr<const lm::FrozenEncoder> frozen_;
  nn::ParamContainer params_;
  std::unique_ptr<TokenInputSource> source_;
  nn::GruLayer event_gru_, inv_gru_, look_gru_, act_gru_;
  int q1_w_ = -1, q1_b_ = -1, q2_w_ = -1, q2_b_ = -1;
  std::unique_ptr<nn::AdamState> opt_;
};

}  // namespace textrl::agent
