#include "textrl/corpus/masking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "textrl/errors.hpp"

namespace textrl::corpus {

TokenSequence encode_pair(const TokenSequence& obs, const TokenSequence& act,
                          int max_len) {
  if (max_len < 3) throw std::invalid_argument("encode_pair: max_len must be >= 3");
  const int budget = max_len - 2;  // room for [CLS] and [SEP]
  const int act_keep = std::min<int>(static_cast<int>(act.ids.size()), budget);
  const int obs_keep =
      std::min<int>(static_cast<int>(obs.ids.size()), budget - act_keep);

  TokenSequence out;
  out.source_text = obs.source_text + " | " + act.source_text;
  out.ids.reserve(static_cast<std::size_t>(obs_keep + act_keep + 2));
  out.ids.push_back(Vocab::kCls);
  // Keep the tail of the observation.
  out.ids.insert(out.ids.end(), obs.ids.end() - obs_keep, obs.ids.end());
  out.ids.push_back(Vocab::kSep);
  // Keep the head of the action.
  out.ids.insert(out.ids.end(), act.ids.begin(), act.ids.begin() + act_keep);
  return out;
}

MaskedBatch mask_sequence(const TokenSequence& seq, double rate, Rng& rng) {
  if (!(rate > 0.0) || rate > 1.0)
    throw std::invalid_argument("mask rate must be in (0, 1]");

  std::vector<int> maskable;
  for (std::size_t i = 0; i < seq.ids.size(); ++i) {
    int id = seq.ids[i];
    if (id == Vocab::kCls || id == Vocab::kSep || id == Vocab::kPad) continue;
    maskable.push_back(static_cast<int>(i));
  }
  if (maskable.empty()) throw NoMaskableError();

  const int k = static_cast<int>(
      std::ceil(rate * static_cast<double>(maskable.size())));
  std::vector<int> chosen =
      rng.sample_without_replacement(static_cast<int>(maskable.size()), k);

  MaskedBatch batch;
  batch.input_ids.push_back(seq.ids);
  batch.pad_mask.emplace_back(seq.ids.size(), std::uint8_t{1});
  for (int pick : chosen) {
    int pos = maskable[static_cast<std::size_t>(pick)];
    batch.targets.push_back({0, pos, seq.ids[static_cast<std::size_t>(pos)]});
    batch.input_ids[0][static_cast<std::size_t>(pos)] = Vocab::kMask;
  }
  return batch;
}

MaskedBatch make_masked_batch(std::span<const TokenSequence> seqs, double rate,
                              Rng& rng) {
  MaskedBatch batch;
  std::size_t max_len = 0;
  for (const auto& seq : seqs) max_len = std::max(max_len, seq.ids.size());
  for (std::size_t row = 0; row < seqs.size(); ++row) {
    MaskedBatch one = mask_sequence(seqs[row], rate, rng);
    std::vector<int>& ids = one.input_ids[0];
    std::vector<std::uint8_t>& mask = one.pad_mask[0];
    ids.resize(max_len, Vocab::kPad);
    mask.resize(max_len, 0);
    batch.input_ids.push_back(std::move(ids));
    batch.pad_mask.push_back(std::move(mask));
    for (auto target : one.targets) {
      target.row = static_cast<int>(row);
      batch.targets.push_back(target);
    }
  }
  return batch;
}

}  // namespace textrl::corpus
