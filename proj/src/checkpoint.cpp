#include "uavswarm/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace uavswarm {

using nlohmann::json;

namespace {

json network_to_json(const Mlp& net) {
  const auto p = net.params();
  return {{"sizes", net.sizes()}, {"params", std::vector<double>(p.begin(), p.end())}};
}

Mlp network_from_json(const json& j) {
  Mlp net(j.at("sizes").get<std::vector<int>>());
  const auto values = j.at("params").get<std::vector<double>>();
  if (values.size() != net.param_count()) {
    throw std::runtime_error("checkpoint parameter count does not match its layer sizes");
  }
  std::copy(values.begin(), values.end(), net.params().begin());
  return net;
}

}  // namespace

std::string checkpoint_to_string(const PolicyParams& params) {
  const json j = {{"format_version", kCheckpointFormatVersion},
                  {"actor", network_to_json(params.actor)},
                  {"critic", network_to_json(params.critic)}};
  return j.dump();
}

PolicyParams checkpoint_from_string(const std::string& text) {
  const json j = json::parse(text);
  const int version = j.at("format_version").get<int>();
  if (version != kCheckpointFormatVersion) {
    throw std::runtime_error("unsupported checkpoint format version " + std::to_string(version));
  }
  PolicyParams p{network_from_json(j.at("actor")), network_from_json(j.at("critic")), {}, {}};
  p.refresh_stale();
  return p;
}

void save_checkpoint(const std::string& path, const PolicyParams& params) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << checkpoint_to_string(params) << '\n';
}

PolicyParams load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return checkpoint_from_string(buffer.str());
}

}  // namespace uavswarm
