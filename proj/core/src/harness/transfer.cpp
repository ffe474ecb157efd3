#include "textrl/harness/transfer.hpp"

namespace textrl::harness {

TransferResult transfer_eval(const agent::Agent& agent, int episodes,
                             double temperature, std::uint64_t seed) {
  const std::uint64_t before = agent.fingerprint();
  Rng rng = Rng(seed).child(7);
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    total += static_cast<double>(
        run_episode(agent.game(), agent, temperature, rng).score);
  }
  TransferResult result;
  result.episodes = episodes;
  result.average_score = episodes > 0 ? total / static_cast<double>(episodes) : 0.0;
  result.fingerprint = agent.fingerprint();
  result.fingerprint_unchanged = result.fingerprint == before;
  return result;
}

TransferResult transfer_eval_checkpoint(const std::string& agent_ckpt,
                                        const env::GameSpec& target_game,
                                        int episodes, double temperature,
                                        std::uint64_t seed) {
  agent::LoadedAgent loaded = agent::load_agent(agent_ckpt, target_game);
  return transfer_eval(*loaded.agent, episodes, temperature, seed);
}

}  // namespace textrl::harness
