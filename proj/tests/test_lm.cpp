#include <doctest.h>

#include <cmath>

#include "textrl/harness/corpus_gen.hpp"
#include "textrl/lm/pretrain.hpp"
#include "textrl/nn/gradcheck.hpp"

using namespace textrl;
using nn::Mat;

namespace {

std::string games_dir() { return TEXTRL_GAMES_DIR; }

corpus::Corpus walk_corpus(std::size_t pairs) {
  harness::CorpusGenConfig cfg;
  cfg.game_paths = {games_dir() + "/tworoom.toy", games_dir() + "/treasure_house.toy"};
  cfg.pairs = pairs;
  cfg.seed = 7;
  return corpus::ingest_transcripts(harness::generate_corpus(cfg));
}

// Encoder with all-zero parameters over a vocab of exactly `extra` + specials.
struct ZeroEncoder {
  nn::ParamContainer params;
  nn::AttnEncoderConfig cfg;
  corpus::Vocab vocab;
  nn::AttnEncoder net;

  explicit ZeroEncoder(int extra_tokens) : net(make(extra_tokens)) {}

  nn::AttnEncoder make(int extra_tokens) {
    for (int i = 0; i < extra_tokens; ++i) vocab.add("tok" + std::to_string(i));
    cfg.vocab_size = vocab.size();
    cfg.d_model = 8;
    cfg.num_heads = 2;
    cfg.num_layers = 1;
    cfg.max_len = 16;
    return nn::AttnEncoder::create(params, cfg);
  }
};

}  // namespace

TEST_CASE("mlm loss with uniform logits equals ln of the vocabulary size") {
  ZeroEncoder zero(1);  // vocab size 6
  REQUIRE(zero.vocab.size() == 6);
  corpus::MaskedBatch batch;
  batch.input_ids.push_back({corpus::Vocab::kCls, corpus::Vocab::kMask, 5});
  batch.pad_mask.push_back({1, 1, 1});
  batch.targets.push_back({0, 1, 5});

  nn::Tape tape(zero.params);
  double loss = tape.scalar(lm::mlm_loss(tape, zero.net, batch));
  CHECK(loss == doctest::Approx(std::log(6.0)).epsilon(1e-12));
}

TEST_CASE("mlm loss without masked positions is zero with zero gradients") {
  ZeroEncoder zero(1);
  corpus::MaskedBatch batch;
  batch.input_ids.push_back({corpus::Vocab::kCls, 5});
  batch.pad_mask.push_back({1, 1});

  nn::Tape tape(zero.params);
  nn::Var loss = lm::mlm_loss(tape, zero.net, batch);
  CHECK(tape.scalar(loss) == 0.0);
  nn::GradStore grads(zero.params);
  tape.backward(loss, grads);
  for (int i = 0; i < grads.count(); ++i) CHECK(grads.at(i).isZero(0.0));
}

TEST_CASE("mlm gradients pass the finite-difference oracle on a small encoder") {
  corpus::Vocab vocab;
  for (const char* w : {"you", "see", "a", "lamp", "take", "door"})
    vocab.add(w);
  nn::AttnEncoderConfig cfg;
  cfg.vocab_size = vocab.size();
  cfg.d_model = 8;
  cfg.num_heads = 2;
  cfg.num_layers = 2;
  cfg.max_len = 12;
  cfg.ff_dim = 12;
  nn::ParamContainer params;
  nn::AttnEncoder net = nn::AttnEncoder::create(params, cfg);
  // Check away from the tiny-weight regime, where true gradients sit below
  // the central-difference noise floor and the relative error is vacuous.
  Rng fill(31);
  for (int i = 0; i < params.count(); ++i) {
    nn::Mat& t = params.value(i);
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c)
        t(r, c) = fill.uniform_range(-0.5, 0.5);
  }
  REQUIRE(params.coord_count() <= 5000);

  corpus::TokenSequence obs = corpus::tokenize("you see a lamp", vocab);
  corpus::TokenSequence act = corpus::tokenize("take lamp", vocab);
  corpus::TokenSequence pair = corpus::encode_pair(obs, act, cfg.max_len);
  Rng rng(3);
  corpus::MaskedBatch batch = corpus::mask_sequence(pair, 0.3, rng);

  auto build = [&](nn::Tape& tape) { return lm::mlm_loss(tape, net, batch); };
  CHECK(nn::finite_diff_check(build, params, 1e-5) < 1e-4);
}

TEST_CASE("pretraining with zero epochs returns the seeded initialization") {
  corpus::Corpus corpus = walk_corpus(300);
  lm::PretrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 9;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  lm::PretrainResult result = lm::pretrain(corpus, cfg);
  CHECK(result.loss_history.empty());

  nn::ParamContainer expected;
  nn::AttnEncoderConfig enc_cfg = result.encoder.config();
  nn::AttnEncoder::create(expected, enc_cfg);
  expected.init_uniform(cfg.seed);
  CHECK(result.encoder.params().fingerprint() == expected.fingerprint());
}

TEST_CASE("pretraining is deterministic in corpus and config") {
  corpus::Corpus corpus = walk_corpus(200);
  lm::PretrainConfig cfg;
  cfg.epochs = 1;
  cfg.seed = 5;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  cfg.batch_size = 16;
  lm::PretrainResult a = lm::pretrain(corpus, cfg);
  lm::PretrainResult b = lm::pretrain(corpus, cfg);
  CHECK(a.encoder.fingerprint() == b.encoder.fingerprint());
  REQUIRE(a.loss_history.size() == b.loss_history.size());
  for (std::size_t i = 0; i < a.loss_history.size(); ++i)
    CHECK(a.loss_history[i] == b.loss_history[i]);
}

TEST_CASE("training reduces the masked loss on the bundled walk corpus") {
  corpus::Corpus corpus = walk_corpus(400);
  lm::PretrainConfig cfg;
  cfg.epochs = 3;
  cfg.seed = 1;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  cfg.batch_size = 16;
  lm::PretrainResult result = lm::pretrain(corpus, cfg);
  REQUIRE(result.loss_history.size() > 10);
  CHECK(result.loss_history.back() < result.loss_history.front());
}

TEST_CASE("encode_text produces one vector per token plus the CLS slot") {
  corpus::Corpus corpus = walk_corpus(150);
  lm::PretrainConfig cfg;
  cfg.epochs = 0;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  lm::FrozenEncoder enc = lm::pretrain(corpus, cfg).encoder;

  CHECK(enc.encode_text("").rows() == 1);
  Mat out = enc.encode_text("you are empty handed .");
  CHECK(out.rows() == 6);
  CHECK(out.cols() == 16);

  // Left truncation keeps [CLS] and the tail.
  std::string long_text;
  for (int i = 0; i < 100; ++i) long_text += "go east ";
  CHECK(enc.encode_text(long_text).rows() == cfg.max_len);
}

TEST_CASE("encode_text never perturbs the frozen parameters") {
  corpus::Corpus corpus = walk_corpus(150);
  lm::PretrainConfig cfg;
  cfg.epochs = 1;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  lm::FrozenEncoder enc = lm::pretrain(corpus, cfg).encoder;
  const std::uint64_t before = enc.fingerprint();
  for (int i = 0; i < 500; ++i) {
    (void)enc.encode_text("the door is closed . you see a lamp .");
  }
  CHECK(enc.fingerprint() == before);
  CHECK(enc.verify_fingerprint());
}

TEST_CASE("an untrained encoder scores near the uniform baseline on heldout text") {
  corpus::Corpus corpus = walk_corpus(400);
  lm::PretrainConfig cfg;
  cfg.epochs = 0;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  lm::PretrainResult result = lm::pretrain(corpus, cfg);
  corpus::Corpus heldout = lm::heldout_split(corpus).second;
  const double baseline = std::log(static_cast<double>(result.encoder.vocab().size()));
  double ce = lm::heldout_masked_ce(result.encoder, heldout, cfg);
  CHECK(ce > 0.9 * baseline);
  CHECK(ce < 1.1 * baseline);
  CHECK(ce == lm::heldout_masked_ce(result.encoder, heldout, cfg));
}

TEST_CASE("encoder checkpoints load back with an identical fingerprint") {
  corpus::Corpus corpus = walk_corpus(150);
  lm::PretrainConfig cfg;
  cfg.epochs = 1;
  cfg.d_model = 16;
  cfg.heads = 2;
  cfg.layers = 1;
  cfg.vocab_max = 256;
  lm::FrozenEncoder enc = lm::pretrain(corpus, cfg).encoder;
  enc.save("/tmp/textrl_test_encoder.ckpt");
  lm::FrozenEncoder loaded = lm::FrozenEncoder::load("/tmp/textrl_test_encoder.ckpt");
  CHECK(loaded.fingerprint() == enc.fingerprint());

  Mat a = enc.encode_text("go east");
  Mat b = loaded.encode_text("go east");
  REQUIRE(a.rows() == b.rows());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      CHECK(a(r, c) == b(r, c));
}

TEST_CASE("the heldout split takes the final tenth in order") {
  corpus::Corpus corpus;
  for (int i = 0; i < 20; ++i)
    corpus.pairs.emplace_back("obs " + std::to_string(i), "act");
  auto [train, heldout] = lm::heldout_split(corpus);
  CHECK(train.size() == 18);
  CHECK(heldout.size() == 2);
  CHECK(heldout.pairs[0].first == "obs 18");
  CHECK(heldout.pairs[1].first == "obs 19");
}
