#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "textrl/agent/common.hpp"
#include "textrl/agent/replay.hpp"
#include "textrl/env/game.hpp"
#include "textrl/lm/frozen_encoder.hpp"
#include "textrl/nn/params.hpp"
#include "textrl/rng.hpp"

namespace textrl::agent {

struct UpdateStats {
  double td_loss = 0.0;
  double aux_loss = 0.0;
  double grad_norm = 0.0;
};

struct EncoderSourceSpec {
  enum class Kind { kScratch, kBow, kPretrained };
  Kind kind = Kind::kScratch;
  std::string checkpoint;  // pretrained only
  bool pooled = false;     // feed only the [CLS] vector as a 1-step sequence

  // "scratch", "bow", or a checkpoint path.
  static EncoderSourceSpec parse(const std::string& text);
  std::string label() const;
};

struct AgentBuild {
  AgentKind kind = AgentKind::kDrrn;
  EncoderSourceSpec source;
  int embed_dim = 16;
  int hidden_dim = 32;
  double grad_clip = 5.0;
  std::uint64_t seed = 1;
};

class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual const env::GameSpec& game() const = 0;

  // One scalar per candidate, order-aligned. Pure.
  virtual std::vector<double> q_values(const StateParts& state,
                                       std::span<const env::Action> candidates) const = 0;
  std::vector<double> q_values(const env::Observation& obs,
                               std::span<const env::Action> candidates) const {
    return q_values(state_parts(obs, ""), candidates);
  }

  // DRRN softmax-samples over the valid candidates; TDQN samples its three
  // heads independently and assembles the command (ignoring `valid`).
  virtual env::Action select_action(const StateParts& state,
                                    std::span<const env::Action> valid,
                                    double temperature, Rng& rng) const = 0;

  // One gradient step on the sampled batch.
  virtual UpdateStats update(std::span<const Transition> batch, double gamma,
                             double lr) = 0;

  virtual const nn::ParamContainer& params() const = 0;
  std::uint64_t fingerprint() const { return params().fingerprint(); }

  virtual const AgentBuild& build() const = 0;

  // Checkpoint with agent kind, dims, encoder source and any extra entries
  // (config echo). Scratch/bag-of-words agents write their vocab next to the
  // checkpoint.
  virtual void save(const std::string& path,
                    const std::map<std::string, std::string>& extra = {}) const = 0;
};

struct UpdateConfig {
  int batch_size = 32;
  double priority_fraction = 0.5;
  double gamma = 0.9;
  double lr = 1e-4;
};

// replay_sample + loss + backward + adam on the agent's parameters.
UpdateStats agent_update(Agent& agent, const ReplayBuffer& buffer,
                         const UpdateConfig& cfg, Rng& rng);

// Builds a fresh agent. `encoder` is required exactly when the source kind is
// pretrained.
std::unique_ptr<Agent> create_agent(const env::GameSpec& game, const AgentBuild& build,
                                    std::shared_ptr<const lm::FrozenEncoder> encoder);

struct LoadedAgent {
  std::unique_ptr<Agent> agent;
  std::shared_ptr<const lm::FrozenEncoder> encoder;  // null unless pretrained
  std::map<std::string, std::string> meta;
};

// Restores an agent checkpoint against `game` (the game the agent is asked to
// act in; TDQN head widths must match its template/filler counts).
LoadedAgent load_agent(const std::string& path, const env::GameSpec& game);

// Command text for (template, fillers); fillers beyond the template's blank
// count are ignored. Throws IndexOutOfRange for bad indices or missing
// fillers.
env::Action assemble_template_action(const env::GameSpec& game, int template_id,
                                     std::optional<int> filler1,
                                     std::optional<int> filler2);

}  // namespace textrl::agent
