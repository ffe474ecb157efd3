#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "textrl/corpus/corpus.hpp"
#include "textrl/corpus/masking.hpp"
#include "textrl/lm/frozen_encoder.hpp"
#include "textrl/nn/attention.hpp"
#include "textrl/nn/tape.hpp"

namespace textrl::lm {

struct PretrainConfig {
  int epochs = 3;
  int batch_size = 32;
  double mask_rate = 0.15;
  int max_len = 48;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  int vocab_max = 512;
  int layers = 2;
  int d_model = 32;
  int heads = 4;
  int ff_dim = 0;  // 0 -> 2 * d_model
};

struct PretrainResult {
  FrozenEncoder encoder;
  std::vector<double> loss_history;  // one entry per optimizer step
};

// Mean cross-entropy over all masked positions of the batch, on the tape.
// A batch without masked positions contributes a constant 0.
nn::Var mlm_loss(nn::Tape& tape, const nn::AttnEncoder& encoder,
                 const corpus::MaskedBatch& batch);

// First 90% / last 10% of the corpus pairs, in order.
std::pair<corpus::Corpus, corpus::Corpus> heldout_split(const corpus::Corpus& corpus);

// Masked-language-model training on the first 90% of the corpus. Epoch order
// is shuffled with the seeded generator; epochs = 0 returns the seeded
// initialization unchanged.
PretrainResult pretrain(const corpus::Corpus& corpus, const PretrainConfig& config);

// Mean masked cross-entropy over the heldout pairs under a fixed mask seed.
double heldout_masked_ce(const FrozenEncoder& encoder, const corpus::Corpus& heldout,
                         const PretrainConfig& config);

}  // namespace textrl::lm
