#include "textrl/agent/inputs.hpp"

#include <algorithm>

namespace textrl::agent {

std::vector<nn::Var> ScratchEmbeddingSource::batched_steps(
    nn::Tape& tape, std::span<const std::string> texts,
    std::vector<int>& lengths) const {
  std::vector<std::vector<int>> ids;
  ids.reserve(texts.size());
  int max_len = 0;
  lengths.clear();
  for (const auto& text : texts) {
    ids.push_back(corpus::tokenize(text, vocab_).ids);
    lengths.push_back(static_cast<int>(ids.back().size()));
    max_len = std::max(max_len, lengths.back());
  }
  std::vector<nn::Var> steps;
  steps.reserve(static_cast<std::size_t>(max_len));
  nn::Var table = tape.param(embed_param_);
  for (int t = 0; t < max_len; ++t) {
    std::vector<int> column(texts.size(), corpus::Vocab::kPad);
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (t < lengths[i]) column[i] = ids[i][static_cast<std::size_t>(t)];
    }
    steps.push_back(tape.gather_rows(table, std::move(column)));
  }
  return steps;
}

const nn::Mat& FrozenEncoderSource::encoded(const std::string& text) const {
  auto it = cache_.find(text);
  if (it != cache_.end()) return it->second;
  nn::Mat full = encoder_->encode_text(text);
  if (pooled_) full = full.topRows(1).eval();
  return cache_.emplace(text, std::move(full)).first->second;
}

std::vector<nn::Var> FrozenEncoderSource::batched_steps(
    nn::Tape& tape, std::span<const std::string> texts,
    std::vector<int>& lengths) const {
  std::vector<const nn::Mat*> mats;
  mats.reserve(texts.size());
  int max_len = 0;
  lengths.clear();
  for (const auto& text : texts) {
    mats.push_back(&encoded(text));
    lengths.push_back(static_cast<int>(mats.back()->rows()));
    max_len = std::max(max_len, lengths.back());
  }
  std::vector<nn::Var> steps;
  steps.reserve(static_cast<std::size_t>(max_len));
  for (int t = 0; t < max_len; ++t) {
    nn::Mat x = nn::Mat::Zero(static_cast<Eigen::Index>(texts.size()), dim());
    for (std::size_t i = 0; i < mats.size(); ++i) {
      if (t < lengths[i]) x.row(static_cast<Eigen::Index>(i)) = mats[i]->row(t);
    }
    steps.push_back(tape.constant(std::move(x)));
  }
  return steps;
}

std::vector<nn::Var> BagOfWordsSource::batched_steps(
    nn::Tape& tape, std::span<const std::string> texts,
    std::vector<int>& lengths) const {
  nn::Mat counts = nn::Mat::Zero(static_cast<Eigen::Index>(texts.size()), dim());
  lengths.assign(texts.size(), 1);
  for (std::size_t i = 0; i < texts.size(); ++i) {
    for (int id : corpus::tokenize(texts[i], vocab_).ids) {
      counts(static_cast<Eigen::Index>(i), id) += 1.0;
    }
  }
  return {tape.constant(std::move(counts))};
}

nn::Var encode_texts(nn::Tape& tape, const nn::GruLayer& gru,
                     const TokenInputSource& source,
                     std::span<const std::string> texts) {
  const int batch = static_cast<int>(texts.size());
  std::vector<int> lengths;
  std::vector<nn::Var> steps = source.batched_steps(tape, texts, lengths);
  std::vector<nn::Mat> active;
  active.reserve(steps.size());
  for (std::size_t t = 0; t < steps.size(); ++t) {
    nn::Mat keep = nn::Mat::Zero(batch, gru.hidden_dim);
    for (int i = 0; i < batch; ++i) {
      if (static_cast<int>(t) < lengths[static_cast<std::size_t>(i)]) keep.row(i).setOnes();
    }
    active.push_back(std::move(keep));
  }
  return gru.forward_batch(tape, steps, active, batch);
}

}  // namespace textrl::agent
