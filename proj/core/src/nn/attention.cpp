#include "textrl/nn/attention.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "textrl/errors.hpp"

namespace textrl::nn {

AttnEncoder AttnEncoder::create(ParamContainer& params, const AttnEncoderConfig& cfg_in,
                                const std::string& prefix) {
  AttnEncoderConfig cfg = cfg_in;
  if (cfg.ff_dim <= 0) cfg.ff_dim = 2 * cfg.d_model;
  if (cfg.d_model % cfg.num_heads != 0)
    throw DimMismatch("d_model must be divisible by the head count");

  AttnEncoder enc;
  enc.cfg = cfg;
  enc.embed = params.add(prefix + ".embed", cfg.vocab_size, cfg.d_model);
  enc.pos = params.add(prefix + ".pos", cfg.max_len, cfg.d_model);
  for (int l = 0; l < cfg.num_layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l);
    Layer layer;
    layer.wq = params.add(lp + ".wq", cfg.d_model, cfg.d_model);
    layer.wk = params.add(lp + ".wk", cfg.d_model, cfg.d_model);
    layer.wv = params.add(lp + ".wv", cfg.d_model, cfg.d_model);
    layer.wo = params.add(lp + ".wo", cfg.d_model, cfg.d_model);
    layer.ff1 = params.add(lp + ".ff1", cfg.d_model, cfg.ff_dim);
    layer.ff2 = params.add(lp + ".ff2", cfg.ff_dim, cfg.d_model);
    layer.ln1_g = params.add(lp + ".ln1_g", 1, cfg.d_model, /*bias=*/true);
    layer.ln1_b = params.add(lp + ".ln1_b", 1, cfg.d_model, /*bias=*/true);
    layer.ln2_g = params.add(lp + ".ln2_g", 1, cfg.d_model, /*bias=*/true);
    layer.ln2_b = params.add(lp + ".ln2_b", 1, cfg.d_model, /*bias=*/true);
    enc.layers.push_back(layer);
  }
  enc.out_proj = params.add(prefix + ".out_proj", cfg.d_model, cfg.vocab_size);
  return enc;
}

AttnEncoder AttnEncoder::bind(const ParamContainer& params, const AttnEncoderConfig& cfg_in,
                              const std::string& prefix) {
  AttnEncoderConfig cfg = cfg_in;
  if (cfg.ff_dim <= 0) cfg.ff_dim = 2 * cfg.d_model;
  AttnEncoder enc;
  enc.cfg = cfg;
  enc.embed = params.require(prefix + ".embed");
  enc.pos = params.require(prefix + ".pos");
  for (int l = 0; l < cfg.num_layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l);
    Layer layer;
    layer.wq = params.require(lp + ".wq");
    layer.wk = params.require(lp + ".wk");
    layer.wv = params.require(lp + ".wv");
    layer.wo = params.require(lp + ".wo");
    layer.ff1 = params.require(lp + ".ff1");
    layer.ff2 = params.require(lp + ".ff2");
    layer.ln1_g = params.require(lp + ".ln1_g");
    layer.ln1_b = params.require(lp + ".ln1_b");
    layer.ln2_g = params.require(lp + ".ln2_g");
    layer.ln2_b = params.require(lp + ".ln2_b");
    enc.layers.push_back(layer);
  }
  enc.out_proj = params.require(prefix + ".out_proj");
  return enc;
}

Var AttnEncoder::encode(Tape& tape, const std::vector<int>& ids,
                        const std::vector<std::uint8_t>* pad_mask) const {
  const int length = static_cast<int>(ids.size());
  if (length == 0) throw DimMismatch("attention encoder needs at least one token");
  if (length > cfg.max_len) throw SeqTooLong(length, cfg.max_len);
  if (pad_mask != nullptr && static_cast<int>(pad_mask->size()) != length)
    throw DimMismatch("pad mask length");

  std::vector<int> positions(static_cast<std::size_t>(length));
  std::iota(positions.begin(), positions.end(), 0);

  Var x = tape.add(tape.gather_rows(tape.param(embed), ids),
                   tape.gather_rows(tape.param(pos), positions));

  // Columns of padded keys are dropped from every row's attention.
  Mat keep;
  if (pad_mask != nullptr) {
    keep = Mat::Ones(length, length);
    for (int c = 0; c < length; ++c) {
      if ((*pad_mask)[static_cast<std::size_t>(c)] == 0) keep.col(c).setZero();
    }
  }

  const int head_dim = cfg.d_model / cfg.num_heads;
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  for (const Layer& layer : layers) {
    Var q = tape.matmul(x, tape.param(layer.wq));
    Var k = tape.matmul(x, tape.param(layer.wk));
    Var v = tape.matmul(x, tape.param(layer.wv));
    std::vector<Var> contexts;
    contexts.reserve(static_cast<std::size_t>(cfg.num_heads));
    for (int h = 0; h < cfg.num_heads; ++h) {
      Var qh = tape.slice_cols(q, h * head_dim, head_dim);
      Var kh = tape.slice_cols(k, h * head_dim, head_dim);
      Var vh = tape.slice_cols(v, h * head_dim, head_dim);
      Var scores = tape.scale(tape.matmul_nt(qh, kh), attn_scale);
      Var weights = tape.softmax_rows(scores, keep);
      contexts.push_back(tape.matmul(weights, vh));
    }
    Var attn_out = tape.matmul(tape.concat_cols(contexts), tape.param(layer.wo));
    x = tape.layer_norm(tape.add(x, attn_out), tape.param(layer.ln1_g),
                        tape.param(layer.ln1_b));
    Var ff = tape.matmul(tape.relu(tape.matmul(x, tape.param(layer.ff1))),
                         tape.param(layer.ff2));
    x = tape.layer_norm(tape.add(x, ff), tape.param(layer.ln2_g),
                        tape.param(layer.ln2_b));
  }
  return x;
}

Var AttnEncoder::mlm_logits(Tape& tape, Var encoded,
                            const std::vector<int>& positions) const {
  return tape.matmul(tape.gather_rows(encoded, positions), tape.param(out_proj));
}

double cross_entropy(const std::vector<double>& logits, int target) {
  if (target < 0 || target >= static_cast<int>(logits.size()))
    throw IndexOutOfRange("cross_entropy target " + std::to_string(target));
  double maxv = logits[0];
  for (double v : logits) maxv = std::max(maxv, v);
  double lse = 0.0;
  for (double v : logits) lse += std::exp(v - maxv);
  lse = maxv + std::log(lse);
  return lse - logits[static_cast<std::size_t>(target)];
}

}  // namespace textrl::nn
