#include "textrl/lm/pretrain.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "textrl/nn/adam.hpp"
#include "textrl/rng.hpp"

namespace textrl::lm {

namespace {

constexpr std::uint64_t kHeldoutMaskSeed = 0x48454C444F5554ull;

// Trims the pad suffix of a batch row; pads only ever appear as a suffix in
// batches built by make_masked_batch.
std::vector<int> row_without_pads(const corpus::MaskedBatch& batch, int row) {
  const auto& ids = batch.input_ids[static_cast<std::size_t>(row)];
  const auto& mask = batch.pad_mask[static_cast<std::size_t>(row)];
  std::size_t len = ids.size();
  while (len > 0 && mask[len - 1] == 0) --len;
  return std::vector<int>(ids.begin(), ids.begin() + static_cast<long>(len));
}

std::vector<corpus::TokenSequence> encode_batch(
    const corpus::Corpus& corpus, const std::vector<int>& indices,
    const corpus::Vocab& vocab, int max_len) {
  std::vector<corpus::TokenSequence> seqs;
  seqs.reserve(indices.size());
  for (int idx : indices) {
    const auto& [obs, act] = corpus.pairs[static_cast<std::size_t>(idx)];
    seqs.push_back(corpus::encode_pair(corpus::tokenize(obs, vocab),
                                       corpus::tokenize(act, vocab), max_len));
  }
  return seqs;
}

}  // namespace

nn::Var mlm_loss(nn::Tape& tape, const nn::AttnEncoder& encoder,
                 const corpus::MaskedBatch& batch) {
  if (batch.targets.empty()) return tape.zeros(1, 1);

  std::vector<nn::Var> logit_blocks;
  std::vector<int> targets;
  for (int row = 0; row < batch.rows(); ++row) {
    std::vector<int> positions;
    for (const auto& t : batch.targets) {
      if (t.row == row) {
        positions.push_back(t.position);
        targets.push_back(t.original_id);
      }
    }
    if (positions.empty()) continue;
    std::vector<int> ids = row_without_pads(batch, row);
    nn::Var encoded = encoder.encode(tape, ids);
    logit_blocks.push_back(encoder.mlm_logits(tape, encoded, positions));
  }
  nn::Var logits = tape.concat_rows(logit_blocks);
  return tape.cross_entropy_rows(logits, targets);
}

std::pair<corpus::Corpus, corpus::Corpus> heldout_split(const corpus::Corpus& corpus) {
  const std::size_t n = corpus.size();
  const std::size_t heldout = n / 10;
  corpus::Corpus train, held;
  train.pairs.assign(corpus.pairs.begin(), corpus.pairs.end() - static_cast<long>(heldout));
  held.pairs.assign(corpus.pairs.end() - static_cast<long>(heldout), corpus.pairs.end());
  return {std::move(train), std::move(held)};
}

PretrainResult pretrain(const corpus::Corpus& corpus, const PretrainConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("pretrain: empty corpus");

  corpus::Vocab vocab = corpus::build_vocab(corpus, config.vocab_max);
  nn::AttnEncoderConfig enc_cfg;
  enc_cfg.vocab_size = vocab.size();
  enc_cfg.d_model = config.d_model;
  enc_cfg.num_heads = config.heads;
  enc_cfg.num_layers = config.layers;
  enc_cfg.max_len = config.max_len;
  enc_cfg.ff_dim = config.ff_dim;

  nn::ParamContainer params;
  nn::AttnEncoder net = nn::AttnEncoder::create(params, enc_cfg);
  params.init_uniform(config.seed);
  enc_cfg = net.cfg;  // resolved ff_dim

  corpus::Corpus train = heldout_split(corpus).first;
  if (train.empty()) train = corpus;

  Rng rng = Rng(config.seed).child(0xECC0DE);
  nn::AdamState opt(params);
  std::vector<double> history;

  std::vector<int> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t stop = std::min(order.size(),
                                  start + static_cast<std::size_t>(config.batch_size));
      std::vector<int> indices(order.begin() + static_cast<long>(start),
                               order.begin() + static_cast<long>(stop));
      auto seqs = encode_batch(train, indices, vocab, config.max_len);
      corpus::MaskedBatch batch =
          corpus::make_masked_batch(seqs, config.mask_rate, rng);

      nn::Tape tape(params);
      nn::Var loss = mlm_loss(tape, net, batch);
      history.push_back(tape.scalar(loss));
      nn::GradStore grads(params);
      tape.backward(loss, grads);
      nn::adam_step(params, grads, opt, config.lr);
    }
  }

  return PretrainResult{FrozenEncoder(std::move(params), enc_cfg, std::move(vocab)),
                        std::move(history)};
}

double heldout_masked_ce(const FrozenEncoder& encoder, const corpus::Corpus& heldout,
                         const PretrainConfig& config) {
  if (heldout.empty()) throw std::invalid_argument("heldout_masked_ce: empty corpus");
  Rng rng(kHeldoutMaskSeed);
  const nn::AttnEncoder net = nn::AttnEncoder::bind(encoder.params(), encoder.config());

  double total_ce = 0.0;
  long total_positions = 0;
  std::vector<int> indices(heldout.size());
  std::iota(indices.begin(), indices.end(), 0);
  for (std::size_t start = 0; start < indices.size();
       start += static_cast<std::size_t>(config.batch_size)) {
    std::size_t stop = std::min(indices.size(),
                                start + static_cast<std::size_t>(config.batch_size));
    std::vector<int> batch_idx(indices.begin() + static_cast<long>(start),
                               indices.begin() + static_cast<long>(stop));
    auto seqs = encode_batch(heldout, batch_idx, encoder.vocab(), config.max_len);
    corpus::MaskedBatch batch = corpus::make_masked_batch(seqs, config.mask_rate, rng);
    nn::Tape tape(encoder.params());
    double loss = tape.scalar(mlm_loss(tape, net, batch));
    total_ce += loss * static_cast<double>(batch.targets.size());
    total_positions += static_cast<long>(batch.targets.size());
  }
  return total_positions == 0 ? 0.0 : total_ce / static_cast<double>(total_positions);
}

}  // namespace textrl::lm
