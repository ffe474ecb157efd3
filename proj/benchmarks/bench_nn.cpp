#include <benchmark/benchmark.h>

#include "textrl/nn/attention.hpp"
#include "textrl/nn/gru.hpp"
#include "textrl/nn/tape.hpp"

namespace {

using namespace textrl;

void BM_GruForwardBatch(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  const int len = 30, in_dim = 16, hidden = 32;
  nn::ParamContainer params;
  nn::GruLayer gru = nn::GruLayer::create(params, "gru", in_dim, hidden);
  params.init_uniform(1);
  for (auto _ : state) {
    nn::Tape tape(params);
    std::vector<nn::Var> steps;
    std::vector<nn::Mat> active;
    for (int t = 0; t < len; ++t) {
      steps.push_back(tape.constant(nn::Mat::Constant(batch, in_dim, 0.01 * t)));
      active.push_back(nn::Mat::Ones(batch, hidden));
    }
    nn::Var h = gru.forward_batch(tape, steps, active, batch);
    benchmark::DoNotOptimize(tape.value(h).sum());
  }
}
BENCHMARK(BM_GruForwardBatch)->Arg(1)->Arg(8)->Arg(32);

void BM_GruBackward(benchmark::State& state) {
  const int batch = 32, len = 30, in_dim = 16, hidden = 32;
  nn::ParamContainer params;
  nn::GruLayer gru = nn::GruLayer::create(params, "gru", in_dim, hidden);
  params.init_uniform(1);
  for (auto _ : state) {
    nn::Tape tape(params);
    std::vector<nn::Var> steps;
    std::vector<nn::Mat> active;
    for (int t = 0; t < len; ++t) {
      steps.push_back(tape.constant(nn::Mat::Constant(batch, in_dim, 0.01 * t)));
      active.push_back(nn::Mat::Ones(batch, hidden));
    }
    nn::Var h = gru.forward_batch(tape, steps, active, batch);
    nn::Var loss = tape.mean_all(h);
    nn::GradStore grads(params);
    tape.backward(loss, grads);
    benchmark::DoNotOptimize(grads.global_norm());
  }
}
BENCHMARK(BM_GruBackward);

void BM_AttnEncode(benchmark::State& state) {
  nn::AttnEncoderConfig cfg;
  cfg.vocab_size = 128;
  cfg.d_model = 32;
  cfg.num_heads = 4;
  cfg.num_layers = 2;
  cfg.max_len = 64;
  nn::ParamContainer params;
  nn::AttnEncoder enc = nn::AttnEncoder::create(params, cfg);
  params.init_uniform(1);
  std::vector<int> ids;
  for (int i = 0; i < 40; ++i) ids.push_back(5 + (i % 100));
  for (auto _ : state) {
    nn::Tape tape(params);
    nn::Var out = enc.encode(tape, ids);
    benchmark::DoNotOptimize(tape.value(out).sum());
  }
}
BENCHMARK(BM_AttnEncode);

}  // namespace
