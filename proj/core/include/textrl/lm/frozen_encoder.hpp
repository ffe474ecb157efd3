#pragma once

#include <cstdint>
#include <string>

#include "textrl/corpus/vocab.hpp"
#include "textrl/nn/attention.hpp"
#include "textrl/nn/params.hpp"

namespace textrl::lm {

// Immutable snapshot of a pretrained encoder. Agents read representations
// through encode_text; nothing ever writes the parameters back, and the
// fingerprint makes that checkable.
class FrozenEncoder {
 public:
  FrozenEncoder(nn::ParamContainer params, nn::AttnEncoderConfig cfg,
                corpus::Vocab vocab);

  // Tokenizes, prepends [CLS] (keeping it when truncating from the left to
  // max_len) and encodes. Output is (token count + 1) x d.
  nn::Mat encode_text(const std::string& text) const;

  const corpus::Vocab& vocab() const { return vocab_; }
  const nn::ParamContainer& params() const { return params_; }
  const nn::AttnEncoderConfig& config() const { return cfg_; }
  int dim() const { return cfg_.d_model; }

  std::uint64_t fingerprint() const { return fingerprint_; }
  bool verify_fingerprint() const { return params_.fingerprint() == fingerprint_; }

  // Checkpoint plus a vocab file next to it (path + ".vocab").
  void save(const std::string& path) const;
  static FrozenEncoder load(const std::string& path);

 private:
  nn::ParamContainer params_;
  nn::AttnEncoderConfig cfg_;
  nn::AttnEncoder net_;
  corpus::Vocab vocab_;
  std::uint64_t fingerprint_;
};

}  // namespace textrl::lm
