#include <doctest.h>

#include "textrl/corpus/corpus.hpp"
#include "textrl/corpus/masking.hpp"
#include "textrl/corpus/text.hpp"
#include "textrl/corpus/vocab.hpp"
#include "textrl/errors.hpp"
#include "textrl/rng.hpp"

using namespace textrl;
using corpus::Vocab;

namespace {

corpus::Corpus tiny_corpus() {
  return corpus::ingest_transcripts(
      "you see a lamp\ttake lamp\n"
      "the door is closed\topen door\n"
      "a coin lies here\ttake coin\n");
}

}  // namespace

TEST_CASE("ingest keeps well-formed pairs in order") {
  corpus::Corpus c = tiny_corpus();
  REQUIRE(c.size() == 3);
  CHECK(c.pairs[0].first == "you see a lamp");
  CHECK(c.pairs[0].second == "take lamp");
  CHECK(c.pairs[2].second == "take coin");
}

TEST_CASE("ingest rejects lines without a TAB, with the line number") {
  try {
    corpus::ingest_transcripts("a\tb\nno tab here\n");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("ingest rejects empty sides and double TABs") {
  CHECK_THROWS_AS(corpus::ingest_transcripts("\ttake lamp\n"), FormatError);
  CHECK_THROWS_AS(corpus::ingest_transcripts("look\t \n"), FormatError);
  CHECK_THROWS_AS(corpus::ingest_transcripts("a\tb\tc\n"), FormatError);
}

TEST_CASE("ingest normalizes case, whitespace and punctuation") {
  corpus::Corpus c = corpus::ingest_transcripts("A dark Room.\tTake  the LAMP.\n");
  CHECK(c.pairs[0].first == "a dark room .");
  CHECK(c.pairs[0].second == "take the lamp .");
}

TEST_CASE("build_vocab orders specials then tokens by frequency") {
  corpus::Corpus c = corpus::ingest_transcripts("a a\ta\nb\ta\n");
  // counts: a x4, b x1
  Vocab vocab = corpus::build_vocab(c, 10);
  REQUIRE(vocab.size() == 7);
  CHECK(vocab.token(0) == "[PAD]");
  CHECK(vocab.token(1) == "[UNK]");
  CHECK(vocab.token(2) == "[CLS]");
  CHECK(vocab.token(3) == "[SEP]");
  CHECK(vocab.token(4) == "[MASK]");
  CHECK(vocab.token(5) == "a");
  CHECK(vocab.token(6) == "b");
}

TEST_CASE("build_vocab truncates to max_size") {
  corpus::Corpus c = corpus::ingest_transcripts("a a\ta\nb\ta\n");
  Vocab vocab = corpus::build_vocab(c, 6);
  CHECK(vocab.size() == 6);
  CHECK(vocab.lookup("a") == 5);
  CHECK(vocab.lookup("b") == Vocab::kUnk);
}

TEST_CASE("build_vocab breaks frequency ties lexicographically") {
  corpus::Corpus c = corpus::ingest_transcripts("b\ta\n");
  Vocab vocab = corpus::build_vocab(c, 10);
  CHECK(vocab.token(5) == "a");
  CHECK(vocab.token(6) == "b");
}

TEST_CASE("vocab ids are stable across rebuilds") {
  corpus::Corpus c = tiny_corpus();
  Vocab v1 = corpus::build_vocab(c, 64);
  Vocab v2 = corpus::build_vocab(c, 64);
  REQUIRE(v1.size() == v2.size());
  for (int i = 0; i < v1.size(); ++i) CHECK(v1.token(i) == v2.token(i));
}

TEST_CASE("tokenize splits words and punctuation") {
  corpus::Corpus c = tiny_corpus();
  Vocab vocab = corpus::build_vocab(c, 64);
  corpus::TokenSequence seq = corpus::tokenize("Take the lamp.", vocab);
  REQUIRE(seq.ids.size() == 4);
  CHECK(seq.ids[0] == vocab.lookup("take"));
  CHECK(seq.ids[1] == vocab.lookup("the"));
  CHECK(seq.ids[2] == vocab.lookup("lamp"));
  CHECK(seq.ids[3] == vocab.lookup("."));
  CHECK(vocab.lookup("take") != Vocab::kUnk);
}

TEST_CASE("tokenize of empty text is empty") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  CHECK(corpus::tokenize("", vocab).ids.empty());
  CHECK(corpus::tokenize("   ", vocab).ids.empty());
}

TEST_CASE("unknown words map to [UNK]") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  corpus::TokenSequence seq = corpus::tokenize("zzyzx", vocab);
  REQUIRE(seq.ids.size() == 1);
  CHECK(seq.ids[0] == Vocab::kUnk);
}

TEST_CASE("tokenize round trip is a fixed point on ids") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  Rng rng(5);
  const std::vector<std::string> pool = {"you", "see",  "a",    "lamp", "door",
                                         "take", "coin", "zzyzx", ".",    ",",
                                         "(", ")", "!", "open"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    int words = 1 + static_cast<int>(rng.uniform_int(10));
    for (int w = 0; w < words; ++w) {
      if (!text.empty()) text += ' ';
      text += pool[rng.uniform_int(pool.size())];
    }
    corpus::TokenSequence first = corpus::tokenize(text, vocab);
    std::string joined;
    for (int id : first.ids) {
      if (!joined.empty()) joined += ' ';
      joined += vocab.token(id);
    }
    corpus::TokenSequence second = corpus::tokenize(joined, vocab);
    CHECK(first.ids == second.ids);
  }
}

TEST_CASE("encode_pair lays out [CLS] obs [SEP] act") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  corpus::TokenSequence obs = corpus::tokenize("you see a lamp", vocab);
  corpus::TokenSequence act = corpus::tokenize("take lamp", vocab);
  corpus::TokenSequence pair = corpus::encode_pair(obs, act, 32);
  REQUIRE(pair.ids.size() == obs.ids.size() + act.ids.size() + 2);
  CHECK(pair.ids.front() == Vocab::kCls);
  CHECK(pair.ids[obs.ids.size() + 1] == Vocab::kSep);
  for (std::size_t i = 0; i < obs.ids.size(); ++i)
    CHECK(pair.ids[1 + i] == obs.ids[i]);
  for (std::size_t i = 0; i < act.ids.size(); ++i)
    CHECK(pair.ids[obs.ids.size() + 2 + i] == act.ids[i]);
}

TEST_CASE("encode_pair with an empty action ends at [SEP]") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  corpus::TokenSequence obs = corpus::tokenize("you see a lamp", vocab);
  corpus::TokenSequence pair = corpus::encode_pair(obs, corpus::TokenSequence{}, 32);
  CHECK(pair.ids.back() == Vocab::kSep);
}

TEST_CASE("encode_pair truncates the observation from the left") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  corpus::TokenSequence obs = corpus::tokenize("you see a lamp door coin", vocab);
  corpus::TokenSequence act = corpus::tokenize("take", vocab);
  corpus::TokenSequence pair = corpus::encode_pair(obs, act, 5);
  REQUIRE(pair.ids.size() == 5);
  CHECK(pair.ids[0] == Vocab::kCls);
  // Observation keeps only its last two tokens.
  CHECK(pair.ids[1] == obs.ids[obs.ids.size() - 2]);
  CHECK(pair.ids[2] == obs.ids[obs.ids.size() - 1]);
  CHECK(pair.ids[3] == Vocab::kSep);
  CHECK(pair.ids[4] == act.ids[0]);
}

TEST_CASE("encode_pair never exceeds max_len") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  Rng rng(9);
  for (int trial = 0; trial < 100; ++trial) {
    corpus::TokenSequence obs, act;
    obs.ids.assign(rng.uniform_int(20), Vocab::kUnk);
    act.ids.assign(rng.uniform_int(20), Vocab::kUnk);
    int max_len = 3 + static_cast<int>(rng.uniform_int(20));
    corpus::TokenSequence pair = corpus::encode_pair(obs, act, max_len);
    CHECK(pair.ids.size() <= static_cast<std::size_t>(max_len));
    CHECK(pair.ids.front() == Vocab::kCls);
  }
}

TEST_CASE("mask_sequence masks exactly ceil(rate * maskable) positions") {
  corpus::TokenSequence seq;
  seq.ids.push_back(Vocab::kCls);
  for (int i = 0; i < 10; ++i) seq.ids.push_back(5);
  seq.ids.push_back(Vocab::kSep);

  Rng rng(3);
  corpus::MaskedBatch batch = corpus::mask_sequence(seq, 0.15, rng);
  CHECK(batch.targets.size() == 2);  // ceil(0.15 * 10)
  for (const auto& t : batch.targets) {
    CHECK(batch.input_ids[0][static_cast<std::size_t>(t.position)] == Vocab::kMask);
    CHECK(t.original_id == 5);
    CHECK(t.position >= 1);
    CHECK(t.position <= 10);
  }
}

TEST_CASE("mask rate one masks every non-special position") {
  corpus::TokenSequence seq;
  seq.ids = {Vocab::kCls, 7, 8, 9, Vocab::kSep};
  Rng rng(3);
  corpus::MaskedBatch batch = corpus::mask_sequence(seq, 1.0, rng);
  CHECK(batch.targets.size() == 3);
  CHECK(batch.input_ids[0][0] == Vocab::kCls);
  CHECK(batch.input_ids[0][4] == Vocab::kSep);
  for (std::size_t i = 1; i <= 3; ++i) CHECK(batch.input_ids[0][i] == Vocab::kMask);
}

TEST_CASE("masking is deterministic per seed") {
  corpus::TokenSequence seq;
  seq.ids = {Vocab::kCls, 5, 6, 7, 8, 9, 10, Vocab::kSep};
  Rng a(11), b(11);
  corpus::MaskedBatch ba = corpus::mask_sequence(seq, 0.4, a);
  corpus::MaskedBatch bb = corpus::mask_sequence(seq, 0.4, b);
  REQUIRE(ba.targets.size() == bb.targets.size());
  for (std::size_t i = 0; i < ba.targets.size(); ++i)
    CHECK(ba.targets[i].position == bb.targets[i].position);
}

TEST_CASE("masking a specials-only sequence fails") {
  corpus::TokenSequence seq;
  seq.ids = {Vocab::kCls, Vocab::kSep};
  Rng rng(1);
  CHECK_THROWS_AS(corpus::mask_sequence(seq, 0.15, rng), NoMaskableError);
}

TEST_CASE("batched masking pads rows and never masks pads") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  std::vector<corpus::TokenSequence> seqs = {
      corpus::encode_pair(corpus::tokenize("you see a lamp door", vocab),
                          corpus::tokenize("take lamp", vocab), 32),
      corpus::encode_pair(corpus::tokenize("coin", vocab),
                          corpus::tokenize("take coin", vocab), 32),
  };
  Rng rng(2);
  corpus::MaskedBatch batch = corpus::make_masked_batch(seqs, 0.3, rng);
  REQUIRE(batch.rows() == 2);
  CHECK(batch.input_ids[0].size() == batch.input_ids[1].size());
  for (std::size_t row = 0; row < 2; ++row) {
    for (std::size_t i = 0; i < batch.input_ids[0].size(); ++i) {
      if (batch.pad_mask[row][i] == 0) CHECK(batch.input_ids[row][i] == Vocab::kPad);
    }
  }
  for (const auto& t : batch.targets)
    CHECK(batch.pad_mask[static_cast<std::size_t>(t.row)]
                        [static_cast<std::size_t>(t.position)] == 1);
}

TEST_CASE("vocab files round trip") {
  Vocab vocab = corpus::build_vocab(tiny_corpus(), 64);
  std::string text = vocab.to_text();
  Vocab loaded = Vocab::from_text(text);
  REQUIRE(loaded.size() == vocab.size());
  for (int i = 0; i < vocab.size(); ++i) CHECK(loaded.token(i) == vocab.token(i));
}
