#include "textrl/lm/frozen_encoder.hpp"

#include <sstream>

#include "textrl/errors.hpp"
#include "textrl/nn/checkpoint.hpp"
#include "textrl/nn/tape.hpp"

namespace textrl::lm {

namespace {

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << v;
  return out.str();
}

std::string dirname_of(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

std::string basename_of(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

}  // namespace

FrozenEncoder::FrozenEncoder(nn::ParamContainer params, nn::AttnEncoderConfig cfg,
                             corpus::Vocab vocab)
    : params_(std::move(params)),
      cfg_(cfg),
      net_(nn::AttnEncoder::bind(params_, cfg_)),
      vocab_(std::move(vocab)),
      fingerprint_(params_.fingerprint()) {}

nn::Mat FrozenEncoder::encode_text(const std::string& text) const {
  corpus::TokenSequence seq = corpus::tokenize(text, vocab_);
  std::vector<int> ids;
  ids.reserve(seq.ids.size() + 1);
  ids.push_back(corpus::Vocab::kCls);
  const int keep = cfg_.max_len - 1;
  if (static_cast<int>(seq.ids.size()) > keep) {
    ids.insert(ids.end(), seq.ids.end() - keep, seq.ids.end());
  } else {
    ids.insert(ids.end(), seq.ids.begin(), seq.ids.end());
  }
  nn::Tape tape(params_);
  return tape.value(net_.encode(tape, ids));
}

void FrozenEncoder::save(const std::string& path) const {
  std::map<std::string, std::string> meta;
  meta["kind"] = "encoder";
  meta["d_model"] = std::to_string(cfg_.d_model);
  meta["heads"] = std::to_string(cfg_.num_heads);
  meta["layers"] = std::to_string(cfg_.num_layers);
  meta["max_len"] = std::to_string(cfg_.max_len);
  meta["ff_dim"] = std::to_string(cfg_.ff_dim);
  meta["vocab_size"] = std::to_string(cfg_.vocab_size);
  meta["fingerprint"] = hex64(fingerprint_);
  meta["vocab"] = basename_of(path) + ".vocab";
  nn::save_checkpoint(path, params_, meta);
  vocab_.save(path + ".vocab");
}

FrozenEncoder FrozenEncoder::load(const std::string& path) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  auto need = [&](const char* key) -> const std::string& {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end())
      throw IoError("encoder checkpoint missing meta '" + std::string(key) + "'");
    return it->second;
  };
  if (need("kind") != "encoder")
    throw IoError("'" + path + "' is not an encoder checkpoint");
  nn::AttnEncoderConfig cfg;
  cfg.d_model = std::stoi(need("d_model"));
  cfg.num_heads = std::stoi(need("heads"));
  cfg.num_layers = std::stoi(need("layers"));
  cfg.max_len = std::stoi(need("max_len"));
  cfg.ff_dim = std::stoi(need("ff_dim"));
  cfg.vocab_size = std::stoi(need("vocab_size"));

  corpus::Vocab vocab = corpus::Vocab::load(dirname_of(path) + need("vocab"));
  if (vocab.size() != cfg.vocab_size)
    throw IoError("vocab size does not match encoder checkpoint '" + path + "'");

  FrozenEncoder enc(std::move(ckpt.params), cfg, std::move(vocab));
  std::uint64_t stored = std::stoull(need("fingerprint"), nullptr, 16);
  if (stored != enc.fingerprint())
    throw IoError("fingerprint mismatch loading '" + path + "'");
  return enc;
}

}  // namespace textrl::lm
