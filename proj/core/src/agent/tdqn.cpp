#include "textrl/agent/tdqn.hpp"

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

TdqnAgent::TdqnAgent(const env::GameSpec& game, const AgentBuild& build,
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
  const int n_templates = static_cast<int>(game.templates.size());
  const int n_fillers = static_cast<int>(game.filler_vocab.size());

  if (fresh) {
    if (scratch) params_.add("tdqn.embed", scratch_vocab.size(), build.embed_dim);
    event_gru_ = nn::GruLayer::create(params_, "tdqn.event_gru", input_dim, h);
    inv_gru_ = nn::GruLayer::create(params_, "tdqn.inv_gru", input_dim, h);
    look_gru_ = nn::GruLayer::create(params_, "tdqn.look_gru", input_dim, h);
    prev_gru_ = nn::GruLayer::create(params_, "tdqn.prev_gru", input_dim, h);
    head_t_w_ = params_.add("tdqn.head_t.w", 4 * h, n_templates);
    head_t_b_ = params_.add("tdqn.head_t.b", 1, n_templates, /*bias=*/true);
    head_f1_w_ = params_.add("tdqn.head_f1.w", 4 * h, n_fillers);
    head_f1_b_ = params_.add("tdqn.head_f1.b", 1, n_fillers, /*bias=*/true);
    head_f2_w_ = params_.add("tdqn.head_f2.w", 4 * h, n_fillers);
    head_f2_b_ = params_.add("tdqn.head_f2.b", 1, n_fillers, /*bias=*/true);
    params_.init_uniform(build.seed);
  } else {
    event_gru_ = nn::GruLayer::bind(params_, "tdqn.event_gru");
    inv_gru_ = nn::GruLayer::bind(params_, "tdqn.inv_gru");
    look_gru_ = nn::GruLayer::bind(params_, "tdqn.look_gru");
    prev_gru_ = nn::GruLayer::bind(params_, "tdqn.prev_gru");
    head_t_w_ = params_.require("tdqn.head_t.w");
    head_t_b_ = params_.require("tdqn.head_t.b");
    head_f1_w_ = params_.require("tdqn.head_f1.w");
    head_f1_b_ = params_.require("tdqn.head_f1.b");
    head_f2_w_ = params_.require("tdqn.head_f2.w");
    head_f2_b_ = params_.require("tdqn.head_f2.b");
    if (params_.value(head_t_w_).cols() != n_templates ||
        params_.value(head_f1_w_).cols() != n_fillers)
      throw IncompatibleActionSpace(
          "checkpoint head widths do not match the game's templates/fillers");
  }

  int embed_param = scratch ? params_.require("tdqn.embed") : -1;
  source_ = make_source(build, scratch_vocab, embed_param, frozen_);
  opt_ = std::make_unique<nn::AdamState>(params_);
}

std::unique_ptr<TdqnAgent> TdqnAgent::create(
    const env::GameSpec& game, const AgentBuild& build,
    std::shared_ptr<const lm::FrozenEncoder> encoder) {
  corpus::Vocab vocab;
  if (build.source.kind != EncoderSourceSpec::Kind::kPretrained)
    vocab = game_vocab(game);
  return std::unique_ptr<TdqnAgent>(new TdqnAgent(
      game, build, std::move(encoder), nn::ParamContainer(), std::move(vocab), true));
}

std::unique_ptr<TdqnAgent> TdqnAgent::restore(
    const env::GameSpec& game, const AgentBuild& build,
    std::shared_ptr<const lm::FrozenEncoder> encoder, nn::ParamContainer params,
    corpus::Vocab scratch_vocab) {
  return std::unique_ptr<TdqnAgent>(new TdqnAgent(game, build, std::move(encoder),
                                                  std::move(params),
                                                  std::move(scratch_vocab), false));
}

TdqnAgent::Heads TdqnAgent::q_heads(nn::Tape& tape,
                                    const std::vector<StateParts>& states) const {
  std::vector<std::string> ev, inv, look, prev;
  for (const auto& s : states) {
    ev.push_back(s.event);
    inv.push_back(s.inventory);
    look.push_back(s.look);
    prev.push_back(s.prev_action);
  }
  nn::Var state_h = tape.concat_cols({
      encode_texts(tape, event_gru_, *source_, ev),
      encode_texts(tape, inv_gru_, *source_, inv),
      encode_texts(tape, look_gru_, *source_, look),
      encode_texts(tape, prev_gru_, *source_, prev),
  });
  Heads heads;
  heads.templates = tape.add_rowvec(tape.matmul(state_h, tape.param(head_t_w_)),
                                    tape.param(head_t_b_));
  heads.filler1 = tape.add_rowvec(tape.matmul(state_h, tape.param(head_f1_w_)),
                                  tape.param(head_f1_b_));
  heads.filler2 = tape.add_rowvec(tape.matmul(state_h, tape.param(head_f2_w_)),
                                  tape.param(head_f2_b_));
  return heads;
}

TdqnAgent::HeadValues TdqnAgent::head_values(const StateParts& state) const {
  nn::Tape tape(params_);
  Heads heads = q_heads(tape, {state});
  auto row = [&](nn::Var v) {
    const nn::Mat& m = tape.value(v);
    std::vector<double> out(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m(0, c);
    return out;
  };
  return HeadValues{row(heads.templates), row(heads.filler1), row(heads.filler2)};
}

double TdqnAgent::composite_q(const HeadValues& heads, const env::Action& action) const {
  double total = heads.templates.at(static_cast<std::size_t>(action.template_id));
  int parts = 1;
  if (action.filler1) {
    total += heads.filler1.at(static_cast<std::size_t>(*action.filler1));
    parts += 1;
  }
  if (action.filler2) {
    total += heads.filler2.at(static_cast<std::size_t>(*action.filler2));
    parts += 1;
  }
  return total / static_cast<double>(parts);
}

std::vector<double> TdqnAgent::q_values(const StateParts& state,
                                        std::span<const env::Action> candidates) const {
  if (candidates.empty()) throw EmptyCandidates();
  HeadValues heads = head_values(state);
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const auto& a : candidates) out.push_back(composite_q(heads, a));
  return out;
}

env::Action TdqnAgent::select_action(const StateParts& state,
                                     std::span<const env::Action> /*valid*/,
                                     double temperature, Rng& rng) const {
  HeadValues heads = head_values(state);
  int t = softmax_sample(heads.templates, temperature, rng);
  int f1 = softmax_sample(heads.filler1, temperature, rng);
  int f2 = softmax_sample(heads.filler2, temperature, rng);
  return assemble_template_action(*game_, t, f1, f2);
}

std::vector<double> TdqnAgent::td_targets(std::span<const Transition> batch,
                                          double gamma) const {
  std::vector<StateParts> states;
  std::unordered_map<std::string, int> state_index;
  std::vector<int> state_of(batch.size(), -1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    if (t.done || t.next_valid_actions.empty()) continue;
    auto [it, fresh] =
        state_index.emplace(t.next_state_text, static_cast<int>(states.size()));
    if (fresh) states.push_back(split_state_text(t.next_state_text));
    state_of[i] = it->second;
  }

  std::vector<HeadValues> values(states.size());
  if (!states.empty()) {
    nn::Tape tape(params_);
    Heads heads = q_heads(tape, states);
    const nn::Mat& mt = tape.value(heads.templates);
    const nn::Mat& m1 = tape.value(heads.filler1);
    const nn::Mat& m2 = tape.value(heads.filler2);
    for (std::size_t s = 0; s < states.size(); ++s) {
      auto row = [&](const nn::Mat& m) {
        std::vector<double> out(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c)
          out[static_cast<std::size_t>(c)] = m(static_cast<Eigen::Index>(s), c);
        return out;
      };
      values[s] = HeadValues{row(mt), row(m1), row(m2)};
    }
  }

  std::vector<double> targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = batch[i];
    double bootstrap = 0.0;
    if (state_of[i] >= 0) {
      const HeadValues& heads = values[static_cast<std::size_t>(state_of[i])];
      double best = composite_q(heads, t.next_valid_actions.front());
      for (std::size_t a = 1; a < t.next_valid_actions.size(); ++a)
        best = std::max(best, composite_q(heads, t.next_valid_actions[a]));
      bootstrap = gamma * best;
    }
    targets[i] = static_cast<double>(t.reward) + bootstrap;
  }
  return targets;
}

nn::Var TdqnAgent::build_td_loss(nn::Tape& tape, std::span<const Transition> batch,
                                 double gamma,
                                 const std::vector<double>* frozen_targets) const {
  std::vector<double> targets =
      frozen_targets != nullptr ? *frozen_targets : td_targets(batch, gamma);

  std::vector<StateParts> states;
  std::unordered_map<std::string, int> state_index;
  std::vector<int> srows;
  srows.reserve(batch.size());
  for (const Transition& t : batch) {
    auto [it, fresh] =
        state_index.emplace(t.state_text, static_cast<int>(states.size()));
    if (fresh) states.push_back(split_state_text(t.state_text));
    srows.push_back(it->second);
  }

  Heads heads = q_heads(tape, states);
  nn::Var ht = tape.gather_rows(heads.templates, srows);
  nn::Var h1 = tape.gather_rows(heads.filler1, srows);
  nn::Var h2 = tape.gather_rows(heads.filler2, srows);

  const Eigen::Index n = static_cast<Eigen::Index>(batch.size());
  std::vector<int> t_ids, f1_ids, f2_ids;
  nn::Mat m1 = nn::Mat::Zero(n, 1), m2 = nn::Mat::Zero(n, 1), inv_count(n, 1);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const env::Action& a = batch[i].action;
    t_ids.push_back(a.template_id);
    f1_ids.push_back(a.filler1.value_or(0));
    f2_ids.push_back(a.filler2.value_or(0));
    int parts = 1;
    if (a.filler1) {
      m1(static_cast<Eigen::Index>(i), 0) = 1.0;
      parts += 1;
    }
    if (a.filler2) {
      m2(static_cast<Eigen::Index>(i), 0) = 1.0;
      parts += 1;
    }
    inv_count(static_cast<Eigen::Index>(i), 0) = 1.0 / static_cast<double>(parts);
  }

  nn::Var q_sum = tape.add(
      tape.pick_per_row(ht, t_ids),
      tape.add(tape.hadamard(tape.pick_per_row(h1, f1_ids), tape.constant(m1)),
               tape.hadamard(tape.pick_per_row(h2, f2_ids), tape.constant(m2))));
  nn::Var q_sel = tape.hadamard(q_sum, tape.constant(std::move(inv_count)));

  nn::Mat target_col(n, 1);
  for (std::size_t i = 0; i < batch.size(); ++i)
    target_col(static_cast<Eigen::Index>(i), 0) = targets[i];
  return tape.squared_diff_mean(q_sel, std::move(target_col));
}

nn::Var TdqnAgent::build_aux_loss(
    nn::Tape& tape, Heads heads,
    const std::vector<std::vector<env::Action>>& valid_sets) const {
  const Eigen::Index n = static_cast<Eigen::Index>(valid_sets.size());
  const int n_templates = static_cast<int>(game_->templates.size());
  const int n_fillers = static_cast<int>(game_->filler_vocab.size());
  nn::Mat t_target = nn::Mat::Zero(n, n_templates);
  nn::Mat f1_target = nn::Mat::Zero(n, n_fillers);
  nn::Mat f2_target = nn::Mat::Zero(n, n_fillers);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (const env::Action& a : valid_sets[static_cast<std::size_t>(i)]) {
      t_target(i, a.template_id) = 1.0;
      if (a.filler1) f1_target(i, *a.filler1) = 1.0;
      if (a.filler2) f2_target(i, *a.filler2) = 1.0;
    }
  }
  const double total =
      static_cast<double>(n) * static_cast<double>(n_templates + 2 * n_fillers);
  const double wt = static_cast<double>(n * n_templates) / total;
  const double wf = static_cast<double>(n * n_fillers) / total;
  nn::Var loss = tape.scale(
      tape.bce_with_logits_mean(heads.templates, std::move(t_target)), wt);
  loss = tape.add(loss, tape.scale(tape.bce_with_logits_mean(heads.filler1,
                                                             std::move(f1_target)),
                                   wf));
  loss = tape.add(loss, tape.scale(tape.bce_with_logits_mean(heads.filler2,
                                                             std::move(f2_target)),
                                   wf));
  return loss;
}

UpdateStats TdqnAgent::update(std::span<const Transition> batch, double gamma,
                              double lr) {
  nn::Tape tape(params_);
  nn::Var td = build_td_loss(tape, batch, gamma);

  // Valid-action supervision on the stored next states (all-zero targets for
  // finished transitions).
  std::vector<StateParts> next_states;
  std::unordered_map<std::string, int> state_index;
  std::vector<int> srows;
  std::vector<std::vector<env::Action>> valid_sets;
  for (const Transition& t : batch) {
    auto [it, fresh] =
        state_index.emplace(t.next_state_text, static_cast<int>(next_states.size()));
    if (fresh) {
      next_states.push_back(split_state_text(t.next_state_text));
      valid_sets.push_back(t.next_valid_actions);
    }
    srows.push_back(it->second);
  }
  Heads next_heads = q_heads(tape, next_states);
  nn::Var aux = build_aux_loss(tape, next_heads, valid_sets);

  nn::Var loss = tape.add(td, aux);
  UpdateStats stats;
  stats.td_loss = tape.scalar(td);
  stats.aux_loss = tape.scalar(aux);
  nn::GradStore grads(params_);
  tape.backward(loss, grads);
  stats.grad_norm = nn::clip_global_norm(grads, build_.grad_clip);
  nn::adam_step(params_, grads, *opt_, lr);
  return stats;
}

}  // namespace textrl::agent
