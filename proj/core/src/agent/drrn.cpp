#include "textrl/agent/drrn.hpp"

#include <algorithm>
#include <unordered_map>

#include "textrl/env/engine.hpp"
#include "textrl/errors.hpp"

namespace textrl::agent {

namespace {

corpus::Vocab game_vocab(const env::GameSpec& game) {
  return corpus::build_vocab_from_texts(env::game_lexicon(game), 4096);
}

std::unique_ptr<TokenInputSource> make_source(
    const AgentBuild& build, const corpus::Vocab& vocab, int embed_param,
    std::shared_ptr<const lm::FrozenEncoder> encoder) {
  switch (build.source.kind) {
    case EncoderSourceSpec::Kind::kScratch:
      return std::make_unique<ScratchEmbeddingSource>(vocab, embed_param,
                                                      build.embed_dim);
    case EncoderSourceSpec::Kind::kBow:
      return std::make_unique<BagOfWordsSource>(vocab);
    case EncoderSourceSpec::Kind::kPretrained:
      if (!encoder)
        throw std::invalid_argument("pretrained source needs an encoder");
      return std::make_unique<FrozenEncoderSource>(std::move(encoder),
                                                   build.source.pooled);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

DrrnAgent::DrrnAgent(const env::GameSpec& game, const AgentBuild& build,
                     std::shared_ptr<const lm::FrozenEncoder> encoder,
                     nn::ParamContainer params, corpus::Vocab scratch_vocab,
                     bool fresh)
    : game_(&game), build_(build), frozen_(encoder), params_(std::move(params)) {
  const bool scratch = build.source.kind == EncoderSourceSpec::Kind::kScratch;
  int input_dim = 0;
  switch (build.source.kind) {
    case EncoderSourceSpec::Kind::kScratch:
      input_dim = build.embed_dim;
      break;
    case EncoderSourceSpec::Kind::kBow:
      input_dim = scratch_vocab.size();
      break;
    case EncoderSourceSpec::Kind::kPretrained:
      input_dim = frozen_->dim();
      break;
  }
  const int h = build.hidden_dim;

  if (fresh) {
    if (scratch) params_.add("drrn.embed", scratch_vocab.size(), build.embed_dim);
    event_gru_ = nn::GruLayer::create(params_, "drrn.event_gru", input_dim, h);
    inv_gru_ = nn::GruLayer::create(params_, "drrn.inv_gru", input_dim, h);
    look_gru_ = nn::GruLayer::create(params_, "drrn.look_gru", input_dim, h);
    act_gru_ = nn::GruLayer::create(params_, "drrn.act_gru", input_dim, h);
    q1_w_ = params_.add("drrn.q1.w", 4 * h, h);
    q1_b_ = params_.add("drrn.q1.b", 1, h, /*bias=*/true);
    q2_w_ = params_.add("drrn.q2.w", h, 1);
    q2_b_ = params_.add("drrn.q2.b", 1, 1, /*bias=*/true);
    params_.init_uniform(build.seed);
  } else {
    event_gru_ = nn::GruLayer::bind(params_, "drrn.event_gru");
    inv_gru_ = nn::GruLayer::bind(params_, "drrn.inv_gru");
    look_gru_ = nn::GruLayer::bind(params_, "drrn.look_gru");
    act_gru_ = nn::GruLayer::bind(params_, "drrn.act_gru");
    q1_w_ = params_.require("drrn.q1.w");
    q1_b_ = params_.require("drrn.q1.b");
    q2_w_ = params_.require("drrn.q2.w");
    q2_b_ = params_.require("drrn.q2.b");
  }

  int embed_param = scratch ? params_.require("drrn.embed") : -1;
  source_ = make_source(build, scratch_vocab, embed_param, frozen_);
  opt_ = std::make_unique<nn::AdamState>(params_);
}

std::unique_ptr<DrrnAgent> DrrnAgent::create(
    const env::GameSpec& game, const AgentBuild& build,
    std::shared_ptr<const lm::FrozenEncoder> encoder) {
  corpus::Vocab vocab;
  if (build.source.kind != EncoderSourceSpec::Kind::kPretrained)
    vocab = game_vocab(game);
  return std::unique_ptr<DrrnAgent>(new DrrnAgent(
      game, build, std::move(encoder), nn::ParamContainer(), std::move(vocab), true));
}

std::unique_ptr<DrrnAgent> DrrnAgent::restore(
    const env::GameSpec& game, const AgentBuild& build,
    std::shared_ptr<const lm::FrozenEncoder> encoder, nn::ParamContainer params,
    corpus::Vocab scratch_vocab) {
  return std::unique_ptr<DrrnAgent>(new DrrnAgent(game, build, std::move(encoder),
                                                  std::move(params),
                                                  std::move(scratch_vocab), false));
}

nn::Var DrrnAgent::q_for_pairs(nn::Tape& tape, const std::vector<StateParts>& states,
                               const std::vector<std::string>& action_texts,
                               const std::vector<std::pair<int, int>>& pairs) const {
  std::vector<std::string> ev, inv, look;
  ev.reserve(states.size());
  inv.reserve(states.size());
  look.reserve(states.size());
  for (const auto& s : states) {
    ev.push_back(s.event);
    inv.push_back(s.inventory);
    look.push_back(s.look);
  }
  nn::Var state_h = tape.concat_cols({
      encode_texts(tape, event_gru_, *source_, ev),
      encode_texts(tape, inv_gru_, *source_, inv),
      encode_texts(tape, look_gru_, *source_, look),
  });
  nn::Var act_h = encode_texts(tape, act_gru_, *source_, action_texts);

  std::vector<int> srows, arows;
  srows.reserve(pairs.size());
  arows.reserve(pairs.size());
  for (const auto& [s, a] : pairs) {
    srows.push_back(s);
    arows.push_back(a);
  }
  nn::Var x = tape.concat_cols(
      {tape.gather_rows(state_h, srows), tape.gather_rows(act_h, arows)});
  nn::Var h1 = tape.relu(
      tape.add_rowvec(tape.matmul(x, tape.param(q1_w_)), tape.param(q1_b_)));
  return tape.add_rowvec(tape.matmul(h1, tape.param(q2_w_)), tape.param(q2_b_));
}

std::vector<double> DrrnAgent::q_values(const StateParts& state,
                                        std::span<const env::Action> candidates) const {
  if (candidates.empty()) throw EmptyCandidates();

  std::vector<std::string> action_texts;
  std::unordered_map<std::string, int> text_index;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(candidates.size());
  for (const auto& a : candidates) {
    auto [it, inserted] =
        text_index.emplace(a.command_text, static_cast<int>(action_texts.size()));
    if (inserted) action_texts.push_back(a.command_text);
    pairs.emplace_back(0, it->second);
  }

  nn::Tape tape(params_);
  nn::Var q = q_for_pairs(tape, {state}, action_texts, pairs);
  const nn::Mat& col = tape.value(q);
  std::vector<double> out(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) out[i] = col(static_cast<Eigen::Index>(i), 0);
  return out;
}

env::Action DrrnAgent::select_action(const StateParts& state,
                                     std::span<const env::Action> valid,
                                     double temperature, Rng& rng) const {
  std::vector<double> q = q_values(state, valid);
  int pick = softmax_sample(q, temperature, rng);
  return valid[static_cast<std::size_t>(pick)];
}

std::vector<double> DrrnAgent::td_targets(std::span<const Transition> batch,
                                          double gamma) const {
  // Deduplicated forward pass over next states and their valid actions; the
  // results enter the loss as constants.
  std::vector<StateParts> states;
  std::unordered_map<std::string, int> state_index;
  std::vector<std::string> action_texts;
  std::unordered_map<std::string, int> text_index;
  std::vector<std::pair<int, int>> pairs;
  // Pair range per transition.
  std::vector<std::pair<std::size_t, std::size_t>> ranges(batch.size(), {0, 0});

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    if (t.done || t.next_valid_actions.empty()) continue;
    auto [sit, s_new] =
        state_index.emplace(t.next_state_text, static_cast<int>(states.size()));
    if (s_new) states.push_back(split_state_text(t.next_state_text));
    std::size_t begin = pairs.size();
    for (const auto& a : t.next_valid_actions) {
      auto [ait, a_new] =
          text_index.emplace(a.command_text, static_cast<int>(action_texts.size()));
      if (a_new) action_texts.push_back(a.command_text);
      pairs.emplace_back(sit->second, ait->second);
    }
    ranges[i] = {begin, pairs.size()};
  }

  std::vector<double> targets(batch.size());
  nn::Mat col;
  if (!pairs.empty()) {
    nn::Tape tape(params_);
    col = tape.value(q_for_pairs(tape, states, action_texts, pairs));
  }
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    double bootstrap = 0.0;
    auto [begin, end] = ranges[i];
    if (!t.done && end > begin) {
      double best = col(static_cast<Eigen::Index>(begin), 0);
      for (std::size_t p = begin + 1; p < end; ++p)
        best = std::max(best, col(static_cast<Eigen::Index>(p), 0));
      bootstrap = gamma * best;
    }
    targets[i] = static_cast<double>(t.reward) + bootstrap;
  }
  return targets;
}

nn::Var DrrnAgent::build_td_loss(nn::Tape& tape, std::span<const Transition> batch,
                                 double gamma,
                                 const std::vector<double>* frozen_targets) const {
  std::vector<double> targets =
      frozen_targets != nullptr ? *frozen_targets : td_targets(batch, gamma);

  std::vector<StateParts> states;
  std::unordered_map<std::string, int> state_index;
  std::vector<std::string> action_texts;
  std::unordered_map<std::string, int> text_index;
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(batch.size());
  for (const Transition& t : batch) {
    auto [sit, s_new] =
        state_index.emplace(t.state_text, static_cast<int>(states.size()));
    if (s_new) states.push_back(split_state_text(t.state_text));
    auto [ait, a_new] = text_index.emplace(t.action.command_text,
                                           static_cast<int>(action_texts.size()));
    if (a_new) action_texts.push_back(t.action.command_text);
    pairs.emplace_back(sit->second, ait->second);
  }

  nn::Var q = q_for_pairs(tape, states, action_texts, pairs);
  nn::Mat target_col(static_cast<Eigen::Index>(targets.size()), 1);
  for (std::size_t i = 0; i < targets.size(); ++i)
    target_col(static_cast<Eigen::Index>(i), 0) = targets[i];
  return tape.squared_diff_mean(q, std::move(target_col));
}

UpdateStats DrrnAgent::update(std::span<const Transition> batch, double gamma,
                              double lr) {
  nn::Tape tape(params_);
  nn::Var loss = build_td_loss(tape, batch, gamma);
  UpdateStats stats;
  stats.td_loss = tape.scalar(loss);
  nn::GradStore grads(params_);
  tape.backward(loss, grads);
  stats.grad_norm = nn::clip_global_norm(grads, build_.grad_clip);
  nn::adam_step(params_, grads, *opt_, lr);
  return stats;
}

}  // namespace textrl::agent
