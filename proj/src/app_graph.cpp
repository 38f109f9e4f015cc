#include "edgesim/app_graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace edgesim {

namespace {

std::string mel_name(MelId id) { return "MEL " + std::to_string(id.value); }

using Adjacency = std::map<MelId, std::vector<MelId>>;

// Builds the successor relation from both link directions. Unknown
// references are skipped here and reported by the caller.
Adjacency successors_of(const std::vector<Mel>& mels, const std::set<MelId>& known) {
  Adjacency adj;
  for (const auto& m : mels) adj[m.id];
  for (const auto& m : mels) {
    for (auto d : m.downlinks) {
      if (known.count(d)) adj[m.id].push_back(d);
    }
    for (auto u : m.uplinks) {
      if (known.count(u)) adj[u].push_back(m.id);
    }
  }
  for (auto& [id, next] : adj) {
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
  }
  return adj;
}

std::optional<std::vector<MelId>> find_cycle(const std::vector<Mel>& mels,
                                             const Adjacency& adj) {
  enum class Color { White, Grey, Black };
  std::map<MelId, Color> color;
  for (const auto& m : mels) color[m.id] = Color::White;

  for (const auto& root : mels) {
    if (color[root.id] != Color::White) continue;
    // Iterative DFS; `path` mirrors the grey nodes on the stack.
    std::vector<std::pair<MelId, std::size_t>> stack{{root.id, 0}};
    std::vector<MelId> path{root.id};
    color[root.id] = Color::Grey;
    while (!stack.empty()) {
      auto& [node, next_index] = stack.back();
      const auto& next = adj.at(node);
      if (next_index == next.size()) {
        color[node] = Color::Black;
        stack.pop_back();
        path.pop_back();
        continue;
      }
      const MelId child = next[next_index++];
      if (color[child] == Color::Grey) {
        auto start = std::find(path.begin(), path.end(), child);
        return std::vector<MelId>(start, path.end());
      }
      if (color[child] == Color::White) {
        color[child] = Color::Grey;
        stack.emplace_back(child, 0);
        path.push_back(child);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<GraphError> validate_graph(const std::vector<Mel>& mels,
                                         const std::vector<MelId>& entry_mels) {
  std::set<MelId> known;
  for (const auto& m : mels) {
    if (!known.insert(m.id).second) {
      return GraphError{GraphErrorKind::DuplicateId, {m.id},
                        mel_name(m.id) + " declared more than once"};
    }
  }
  for (const auto& m : mels) {
    for (const auto* links : {&m.uplinks, &m.downlinks}) {
      for (auto other : *links) {
        if (!known.count(other)) {
          return GraphError{GraphErrorKind::DanglingLink, {m.id, other},
                            mel_name(m.id) + " links to unknown " + mel_name(other)};
        }
      }
    }
  }
  for (auto e : entry_mels) {
    if (!known.count(e)) {
      return GraphError{GraphErrorKind::DanglingLink, {e},
                        "entry " + mel_name(e) + " is not declared"};
    }
  }

  const auto adj = successors_of(mels, known);
  if (auto cycle = find_cycle(mels, adj)) {
    std::string text;
    for (auto id : *cycle) text += std::to_string(id.value) + " -> ";
    text += std::to_string(cycle->front().value);
    return GraphError{GraphErrorKind::Cycle, *cycle, "cycle among MELs: " + text};
  }

  if (!entry_mels.empty()) {
    std::set<MelId> seen(entry_mels.begin(), entry_mels.end());
    std::vector<MelId> frontier(seen.begin(), seen.end());
    while (!frontier.empty()) {
      auto id = frontier.back();
      frontier.pop_back();
      for (auto next : adj.at(id)) {
        if (seen.insert(next).second) frontier.push_back(next);
      }
    }
    std::vector<MelId> orphans;
    for (const auto& m : mels) {
      if (!seen.count(m.id)) orphans.push_back(m.id);
    }
    if (!orphans.empty()) {
      return GraphError{GraphErrorKind::Unreachable, orphans,
                        mel_name(orphans.front()) + " is unreachable from every entry MEL"};
    }
  }
  return std::nullopt;
}

std::optional<GraphError> validate_graph(const ApplicationGraph& graph) {
  return validate_graph(graph.mels(), graph.entry_mels());
}

ApplicationGraph::ApplicationGraph(std::vector<Mel> mels, std::vector<MelId> entry_mels)
    : mels_(std::move(mels)), entries_(std::move(entry_mels)) {
  std::sort(entries_.begin(), entries_.end());
  entries_.erase(std::unique(entries_.begin(), entries_.end()), entries_.end());
  for (std::size_t i = 0; i < mels_.size(); ++i) {
    if (!index_.emplace(mels_[i].id, i).second) {
      throw std::invalid_argument(mel_name(mels_[i].id) + " declared more than once");
    }
  }
  std::set<MelId> known;
  for (const auto& m : mels_) known.insert(m.id);
  for (const auto& m : mels_) {
    for (const auto* links : {&m.uplinks, &m.downlinks}) {
      for (auto other : *links) {
        if (!known.count(other)) {
          throw std::invalid_argument(mel_name(m.id) + " links to unknown " + mel_name(other));
        }
      }
    }
  }
  const auto adj = successors_of(mels_, known);
  for (auto& m : mels_) {
    m.downlinks = adj.at(m.id);
    m.uplinks.clear();
  }
  for (const auto& [tail, heads] : adj) {
    for (auto head : heads) mels_[index_.at(head)].uplinks.push_back(tail);
  }
  for (auto& m : mels_) std::sort(m.uplinks.begin(), m.uplinks.end());
}

const Mel* ApplicationGraph::find(MelId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &mels_[it->second];
}

const Mel& ApplicationGraph::mel(MelId id) const {
  if (const auto* m = find(id)) return *m;
  throw std::out_of_range("unknown " + mel_name(id));
}

bool ApplicationGraph::is_entry(MelId id) const {
  return std::binary_search(entries_.begin(), entries_.end(), id);
}

std::vector<MelId> ApplicationGraph::exit_mels() const {
  std::vector<MelId> out;
  for (const auto& m : mels_) {
    if (m.downlinks.empty()) out.push_back(m.id);
  }
  return out;
}

double data_to_instructions(double data_mb, double instructions_per_mb) {
  if (data_mb < 0.0 || instructions_per_mb < 0.0) {
    throw std::invalid_argument("data size and instruction coefficient must be non-negative");
  }
  return instructions_per_mb * data_mb;
}

double mel_processing_time(double data_mb, const Mel& mel, double mips) {
  if (!(mips > 0.0)) throw std::invalid_argument("MIPS must be positive");
  if (mel.shrink_factor < 0.0 || mel.shrink_factor > 1.0) {
    throw std::invalid_argument("shrink factor must lie in [0, 1]");
  }
  const double proc = data_to_instructions(data_mb, mel.instructions_per_mb) / mips;
  const double shrink =
      data_to_instructions(mel.shrink_factor * data_mb, mel.shrink_instructions_per_mb) / mips;
  return std::max(shrink, proc);
}

ForwardResult shrink_and_forward(const EdgeLet& input, const Mel& mel, std::uint64_t& next_id) {
  ForwardResult out;
  EdgeLet shrunk = input;
  shrunk.payload_mb = mel.shrink_factor * input.payload_mb;
  shrunk.hops = input.hops + 1;
  if (mel.downlinks.empty()) {
    shrunk.id = next_id++;
    out.final_result = shrunk;
    return out;
  }
  out.forwarded.reserve(mel.downlinks.size());
  for (auto next : mel.downlinks) {
    EdgeLet copy = shrunk;
    copy.id = next_id++;
    copy.destination_mel = next;
    out.forwarded.push_back(copy);
  }
  return out;
}

}  // namespace edgesim
