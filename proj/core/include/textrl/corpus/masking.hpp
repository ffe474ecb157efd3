#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "textrl/corpus/vocab.hpp"
#include "textrl/rng.hpp"

namespace textrl::corpus {

struct MaskedBatch {
  struct Target {
    int row = 0;
    int position = 0;
    int original_id = 0;
  };

  std::vector<std::vector<int>> input_ids;       // rows padded with [PAD]
  std::vector<std::vector<std::uint8_t>> pad_mask;  // 1 = real token
  std::vector<Target> targets;                   // positions hold [MASK]

  int rows() const { return static_cast<int>(input_ids.size()); }
};

// [CLS] + obs + [SEP] + act, truncated to max_len. Observations lose tokens
// from the left, actions from the right; [CLS]/[SEP] are never dropped and
// the action side keeps its tokens first.
TokenSequence encode_pair(const TokenSequence& obs, const TokenSequence& act,
                          int max_len);

// Masks exactly ceil(rate * maskable) positions of the sequence, where
// maskable excludes [CLS], [SEP] and [PAD]. Throws NoMaskableError when the
// sequence contains only specials.
MaskedBatch mask_sequence(const TokenSequence& seq, double rate, Rng& rng);

// Row-wise masking over several sequences, padded to the longest row.
MaskedBatch make_masked_batch(std::span<const TokenSequence> seqs, double rate,
                              Rng& rng);

}  // namespace textrl::corpus
