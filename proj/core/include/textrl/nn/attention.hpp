#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "textrl/nn/tape.hpp"

namespace textrl::nn {

struct AttnEncoderConfig {
  int vocab_size = 0;
  int d_model = 32;
  int num_heads = 4;
  int num_layers = 2;
  int max_len = 64;
  int ff_dim = 64;  // defaults to 2 * d_model when 0
};

// Small post-norm transformer encoder: token + learned positional embeddings,
// then per layer masked multi-head self-attention and a two-matrix ReLU
// feed-forward, each followed by a residual and layer norm. An output
// projection maps positions back onto the vocabulary for masked-token
// prediction.
struct AttnEncoder {
  AttnEncoderConfig cfg;
  int embed = -1;     // |V| x d
  int pos = -1;       // max_len x d
  int out_proj = -1;  // d x |V|
  struct Layer {
    int wq = -1, wk = -1, wv = -1, wo = -1;
    int ff1 = -1, ff2 = -1;
    int ln1_g = -1, ln1_b = -1, ln2_g = -1, ln2_b = -1;
  };
  std::vector<Layer> layers;

  static AttnEncoder create(ParamContainer& params, const AttnEncoderConfig& cfg,
                            const std::string& prefix = "enc");
  static AttnEncoder bind(const ParamContainer& params, const AttnEncoderConfig& cfg,
                          const std::string& prefix = "enc");

  // Encodes one sequence (length <= max_len, throws SeqTooLong otherwise).
  // pad_mask, when given, marks real tokens with 1; padded positions are
  // excluded from every attention distribution.
  Var encode(Tape& tape, const std::vector<int>& ids,
             const std::vector<std::uint8_t>* pad_mask = nullptr) const;

  // Logits over the vocabulary for the requested positions: P x |V|.
  Var mlm_logits(Tape& tape, Var encoded, const std::vector<int>& positions) const;
};

// -log softmax(logits)[target] with max-subtraction, on plain doubles.
double cross_entropy(const std::vector<double>& logits, int target);

}  // namespace textrl::nn
