#pragma once

#include <memory>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "textrl/corpus/vocab.hpp"
#include "textrl/lm/frozen_encoder.hpp"
#include "textrl/nn/gru.hpp"
#include "textrl/nn/tape.hpp"

namespace textrl::agent {

// Where the per-token GRU inputs come from: a trainable embedding table, the
// frozen pretrained encoder, or a bag-of-words count vector.
class TokenInputSource {
 public:
  virtual ~TokenInputSource() = default;
  virtual int dim() const = 0;

  // Per-timestep batched inputs for `texts`, padded to the longest sequence.
  // steps[t] is |texts| x dim; `lengths` receives each text's true length.
  virtual std::vector<nn::Var> batched_steps(nn::Tape& tape,
                                             std::span<const std::string> texts,
                                             std::vector<int>& lengths) const = 0;
};

// Gathers rows of an embedding table registered in the agent's own
// parameters; gradients flow into the table.
class ScratchEmbeddingSource final : public TokenInputSource {
 public:
  ScratchEmbeddingSource(corpus::Vocab vocab, int embed_param, int dim)
      : vocab_(std::move(vocab)), embed_param_(embed_param), dim_(dim) {}

  int dim() const override { return dim_; }
  std::vector<nn::Var> batched_steps(nn::Tape& tape,
                                     std::span<const std::string> texts,
                                     std::vector<int>& lengths) const override;
  const corpus::Vocab& vocab() const { return vocab_; }

 private:
  corpus::Vocab vocab_;
  int embed_param_;
  int dim_;
};

// Per-token representations from the frozen encoder (the [CLS] vector is
// included as the first step). Encodings are memoized per text; the cache
// never touches encoder parameters. With `pooled` set, only the [CLS] row is
// fed, as a one-step sequence.
class FrozenEncoderSource final : public TokenInputSource {
 public:
  FrozenEncoderSource(std::shared_ptr<const lm::FrozenEncoder> encoder, bool pooled)
      : encoder_(std::move(encoder)), pooled_(pooled) {}

  int dim() const override { return encoder_->dim(); }
  std::vector<nn::Var> batched_steps(nn::Tape& tape,
                                     std::span<const std::string> texts,
                                     std::vector<int>& lengths) const override;
  const lm::FrozenEncoder& encoder() const { return *encoder_; }

 private:
  const nn::Mat& encoded(const std::string& text) const;

  std::shared_ptr<const lm::FrozenEncoder> encoder_;
  bool pooled_;
  mutable std::unordered_map<std::string, nn::Mat> cache_;
};

// Token count vector over the vocabulary, fed as a single-step sequence.
class BagOfWordsSource final : public TokenInputSource {
 public:
  explicit BagOfWordsSource(corpus::Vocab vocab) : vocab_(std::move(vocab)) {}

  int dim() const override { return vocab_.size(); }
  std::vector<nn::Var> batched_steps(nn::Tape& tape,
                                     std::span<const std::string> texts,
                                     std::vector<int>& lengths) const override;
  const corpus::Vocab& vocab() const { return vocab_; }

 private:
  corpus::Vocab vocab_;
};

// Runs a batch of texts through `gru` over inputs from `source`; returns the
// B x hidden matrix of final states. Empty texts yield the zero state.
nn::Var encode_texts(nn::Tape& tape, const nn::GruLayer& gru,
                     const TokenInputSource& source,
                     std::span<const std::string> texts);

}  // namespace textrl::agent
