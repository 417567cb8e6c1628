#include "stabreg/simulation.hpp"

#include <unordered_set>

namespace stabreg {

std::size_t link_index(std::size_t n, ProcessorId from, ProcessorId to, Channel channel) {
  if (from >= n || to >= n || from == to) throw InvalidInput("bad link endpoints");
  const std::size_t slot = to < from ? to : to - 1;
  return (from * (n - 1) + slot) * 2 + static_cast<std::size_t>(channel);
}

LinkEnds link_ends(std::size_t n, std::size_t index) {
  if (index >= link_count(n)) throw InvalidInput("link index out of range");
  LinkEnds ends;
  ends.channel = static_cast<Channel>(index % 2);
  const std::size_t pair = index / 2;
  ends.from = static_cast<ProcessorId>(pair / (n - 1));
  const auto slot = static_cast<ProcessorId>(pair % (n - 1));
  ends.to = slot < ends.from ? slot : slot + 1;
  return ends;
}

std::uint64_t potential(const Configuration<OracleNode>& config) {
  const std::uint64_t floor = config.nodes[0].max_seq();
  std::vector<std::uint64_t> seen;
  for (const auto& node : config.nodes) node.collect_sequence_numbers(seen);
  for (const auto& link : config.links) {
    for (const auto& m : link) {
      if (m.snapshot) seen.push_back(*m.snapshot);
      if (m.stamp) seen.push_back(*m.stamp);
    }
  }
  std::unordered_set<std::uint64_t> above;
  for (auto s : seen) {
    if (s > floor) above.insert(s);
  }
  return above.size();
}

std::string stamp_text(const Timestamp& ts) { return to_string(ts); }
std::string stamp_text(std::uint64_t seq) { return std::to_string(seq); }

template class Simulation<RegisterNode>;
template class Simulation<OracleNode>;

Trace run_scenario(const Scenario& scenario) {
  scenario.validate();
  std::seed_seq seq{scenario.seed, std::uint64_t{0xc0de}};
  std::mt19937_64 rng(seq);
  if (scenario.protocol == ProtocolKind::kOracle) {
    Simulation<OracleNode> sim(scenario, make_oracle_configuration(scenario, rng));
    return sim.run();
  }
  auto params = std::make_shared<const ProtocolParams>(
      ProtocolParams::derive(scenario.n, scenario.c, scenario.r, scenario.k_override));
  Simulation<RegisterNode> sim(scenario, make_initial_configuration(scenario, params, rng));
  return sim.run();
}

}  // namespace stabreg
