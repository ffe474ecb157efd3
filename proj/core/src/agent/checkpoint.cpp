#include <sstream>

#include "textrl/agent/drrn.hpp"
#include "textrl/agent/tdqn.hpp"
#include "textrl/env/engine.hpp"
#include "textrl/errors.hpp"
#include "textrl/nn/checkpoint.hpp"

namespace textrl::agent {

namespace {

std::string dirname_of(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? std::string() : path.substr(0, slash + 1);
}

std::string basename_of(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

std::map<std::string, std::string> agent_meta(
    const Agent& agent, const std::string& path,
    const std::map<std::string, std::string>& extra) {
  const AgentBuild& build = agent.build();
  std::map<std::string, std::string> meta(extra);
  meta["kind"] = "agent";
  meta["agent"] = to_string(agent.kind());
  meta["embed_dim"] = std::to_string(build.embed_dim);
  meta["hidden_dim"] = std::to_string(build.hidden_dim);
  meta["grad_clip"] = std::to_string(build.grad_clip);
  meta["seed"] = std::to_string(build.seed);
  meta["game_id"] = agent.game().game_id;
  meta["templates"] = std::to_string(agent.game().templates.size());
  meta["fillers"] = std::to_string(agent.game().filler_vocab.size());
  switch (build.source.kind) {
    case EncoderSourceSpec::Kind::kScratch:
      meta["source"] = "scratch";
      meta["vocab"] = basename_of(path) + ".vocab";
      break;
    case EncoderSourceSpec::Kind::kBow:
      meta["source"] = "bow";
      meta["vocab"] = basename_of(path) + ".vocab";
      break;
    case EncoderSourceSpec::Kind::kPretrained:
      // The encoder snapshot is re-saved next to the agent checkpoint so the
      // pair is self-contained.
      meta["source"] = "pretrained";
      meta["encoder"] = basename_of(path) + ".encoder";
      meta["pooled"] = build.source.pooled ? "1" : "0";
      break;
  }
  return meta;
}

corpus::Vocab rebuilt_game_vocab(const env::GameSpec& game) {
  return corpus::build_vocab_from_texts(env::game_lexicon(game), 4096);
}

}  // namespace

EncoderSourceSpec EncoderSourceSpec::parse(const std::string& text) {
  EncoderSourceSpec spec;
  if (text == "scratch" || text.empty()) {
    spec.kind = Kind::kScratch;
  } else if (text == "bow") {
    spec.kind = Kind::kBow;
  } else {
    spec.kind = Kind::kPretrained;
    spec.checkpoint = text;
  }
  return spec;
}

std::string EncoderSourceSpec::label() const {
  switch (kind) {
    case Kind::kScratch: return "scratch";
    case Kind::kBow: return "bow";
    case Kind::kPretrained: return checkpoint;
  }
  return "scratch";
}

std::unique_ptr<Agent> create_agent(const env::GameSpec& game, const AgentBuild& build,
                                    std::shared_ptr<const lm::FrozenEncoder> encoder) {
  if (build.kind == AgentKind::kDrrn)
    return DrrnAgent::create(game, build, std::move(encoder));
  return TdqnAgent::create(game, build, std::move(encoder));
}

namespace {

void save_agent_files(const Agent& agent, const TokenInputSource* source,
                      const lm::FrozenEncoder* frozen,
                      const nn::ParamContainer& params, const std::string& path,
                      const std::map<std::string, std::string>& extra) {
  nn::save_checkpoint(path, params, agent_meta(agent, path, extra));
  if (agent.build().source.kind == EncoderSourceSpec::Kind::kPretrained) {
    frozen->save(path + ".encoder");
    return;
  }
  if (auto* s = dynamic_cast<const ScratchEmbeddingSource*>(source))
    s->vocab().save(path + ".vocab");
  else if (auto* b = dynamic_cast<const BagOfWordsSource*>(source))
    b->vocab().save(path + ".vocab");
}

}  // namespace

void DrrnAgent::save(const std::string& path,
                     const std::map<std::string, std::string>& extra) const {
  save_agent_files(*this, source_.get(), frozen_.get(), params_, path, extra);
}

void TdqnAgent::save(const std::string& path,
                     const std::map<std::string, std::string>& extra) const {
  save_agent_files(*this, source_.get(), frozen_.get(), params_, path, extra);
}

LoadedAgent load_agent(const std::string& path, const env::GameSpec& game) {
  nn::Checkpoint ckpt = nn::load_checkpoint(path);
  auto need = [&](const char* key) -> const std::string& {
    auto it = ckpt.meta.find(key);
    if (it == ckpt.meta.end())
      throw IoError("agent checkpoint missing meta '" + std::string(key) + "'");
    return it->second;
  };
  if (need("kind") != "agent")
    throw IoError("'" + path + "' is not an agent checkpoint");

  AgentBuild build;
  build.kind = agent_kind_from_string(need("agent"));
  build.embed_dim = std::stoi(need("embed_dim"));
  build.hidden_dim = std::stoi(need("hidden_dim"));
  build.grad_clip = std::stod(need("grad_clip"));
  build.seed = std::stoull(need("seed"));

  LoadedAgent out;
  corpus::Vocab vocab;
  const std::string source = need("source");
  if (source == "scratch") {
    build.source.kind = EncoderSourceSpec::Kind::kScratch;
    vocab = corpus::Vocab::load(dirname_of(path) + need("vocab"));
  } else if (source == "bow") {
    build.source.kind = EncoderSourceSpec::Kind::kBow;
    vocab = corpus::Vocab::load(dirname_of(path) + need("vocab"));
  } else if (source == "pretrained") {
    build.source.kind = EncoderSourceSpec::Kind::kPretrained;
    build.source.checkpoint = dirname_of(path) + need("encoder");
    build.source.pooled = need("pooled") == "1";
    out.encoder = std::make_shared<lm::FrozenEncoder>(
        lm::FrozenEncoder::load(build.source.checkpoint));
  } else {
    throw IoError("unknown encoder source '" + source + "' in '" + path + "'");
  }

  if (build.kind == AgentKind::kTdqn) {
    // Head widths are fixed by the training game; acting in a game with a
    // different action space is a hard error.
    if (std::stoul(need("templates")) != game.templates.size() ||
        std::stoul(need("fillers")) != game.filler_vocab.size())
      throw IncompatibleActionSpace("checkpoint trained with " + need("templates") +
                                    " templates / " + need("fillers") +
                                    " fillers, game has " +
                                    std::to_string(game.templates.size()) + " / " +
                                    std::to_string(game.filler_vocab.size()));
  }

  if (build.kind == AgentKind::kDrrn) {
    out.agent = DrrnAgent::restore(game, build, out.encoder, std::move(ckpt.params),
                                   std::move(vocab));
  } else {
    out.agent = TdqnAgent::restore(game, build, out.encoder, std::move(ckpt.params),
                                   std::move(vocab));
  }
  out.meta = std::move(ckpt.meta);
  return out;
}

UpdateStats agent_update(Agent& agent, const ReplayBuffer& buffer,
                         const UpdateConfig& cfg, Rng& rng) {
  std::vector<Transition> batch =
      buffer.sample(cfg.batch_size, cfg.priority_fraction, rng);
  return agent.update(batch, cfg.gamma, cfg.lr);
}

env::Action assemble_template_action(const env::GameSpec& game, int template_id,
                                     std::optional<int> filler1,
                                     std::optional<int> filler2) {
  if (template_id < 0 || template_id >= static_cast<int>(game.templates.size()))
    throw IndexOutOfRange("template id " + std::to_string(template_id));
  const env::ActionTemplate& tmpl =
      game.templates[static_cast<std::size_t>(template_id)];

  auto checked = [&](std::optional<int> f, const char* slot) -> int {
    if (!f) throw IndexOutOfRange(std::string("missing ") + slot + " filler");
    if (*f < 0 || *f >= static_cast<int>(game.filler_vocab.size()))
      throw IndexOutOfRange(std::string(slot) + " filler " + std::to_string(*f));
    return *f;
  };

  env::Action action;
  action.template_id = template_id;
  std::string text = tmpl.surface;
  if (tmpl.blank_count >= 1) {
    int f1 = checked(filler1, "first");
    action.filler1 = f1;
    std::size_t pos = text.find("OBJ1");
    text.replace(pos, 4, game.filler_vocab[static_cast<std::size_t>(f1)]);
  }
  if (tmpl.blank_count >= 2) {
    int f2 = checked(filler2, "second");
    action.filler2 = f2;
    std::size_t pos = text.find("OBJ2");
    text.replace(pos, 4, game.filler_vocab[static_cast<std::size_t>(f2)]);
  }
  action.command_text = std::move(text);
  return action;
}

}  // namespace textrl::agent
