#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edgesim/kernel.hpp"

namespace edgesim {

/// Identifier of a MicroElement as declared in the scenario file.
struct MelId {
  std::int64_t value = 0;

  friend constexpr auto operator<=>(MelId, MelId) = default;
};

/// One processing stage of an IoT application.
struct Mel {
  MelId id;
  std::vector<EntityId> host_edges;  // preference order
  double shrink_factor = 1.0;        // fraction of the input forwarded
  double instructions_per_mb = 0.0;
  double shrink_instructions_per_mb = 0.0;
  std::vector<MelId> uplinks;
  std::vector<MelId> downlinks;
};

class ApplicationGraph {
 public:
  ApplicationGraph() = default;
  /// Link lists are normalized so that every edge appears in both the
  /// downlinks of its tail and the uplinks of its head. Throws
  /// std::invalid_argument on duplicate ids or links to unknown MELs.
  ApplicationGraph(std::vector<Mel> mels, std::vector<MelId> entry_mels);

  [[nodiscard]] const Mel& mel(MelId id) const;
  [[nodiscard]] const Mel* find(MelId id) const;
  [[nodiscard]] const std::vector<Mel>& mels() const { return mels_; }
  [[nodiscard]] const std::vector<MelId>& entry_mels() const { return entries_; }
  [[nodiscard]] bool is_entry(MelId id) const;

  /// MELs with no downstream stage; their output goes back to the broker.
  [[nodiscard]] std::vector<MelId> exit_mels() const;

 private:
  std::vector<Mel> mels_;
  std::map<MelId, std::size_t> index_;
  std::vector<MelId> entries_;
};

enum class GraphErrorKind { DanglingLink, DuplicateId, Cycle, Unreachable };

struct GraphError {
  GraphErrorKind kind;
  std::vector<MelId> mels;  // the cycle in traversal order, or the offending MEL(s)
  std::string message;
};

/// Checks references, acyclicity and reachability from the entry MELs.
/// Returns nullopt when the graph is well formed.
std::optional<GraphError> validate_graph(const ApplicationGraph& graph);

/// A MEL graph as a bare adjacency relation, for graphs not yet indexed.
std::optional<GraphError> validate_graph(const std::vector<Mel>& mels,
                                         const std::vector<MelId>& entry_mels);

/// Unit of data moving between IoT devices and MELs.
struct EdgeLet {
  std::uint64_t id = 0;
  std::uint64_t lineage = 0;  // id of the EdgeLet the IoT device generated
  double payload_mb = 0.0;
  EntityId source_iot;
  MelId destination_mel;
  SimTime created_at = 0.0;
  std::uint32_t hops = 0;
};

/// MI = instructions_per_mb * DS.
double data_to_instructions(double data_mb, double instructions_per_mb);

/// max(Time_shrink, Time_proc) for one EdgeLet on a host with `mips` capacity.
double mel_processing_time(double data_mb, const Mel& mel, double mips);

struct ForwardResult {
  std::vector<EdgeLet> forwarded;      // one per downstream MEL
  std::optional<EdgeLet> final_result;  // set when the MEL has no successor
};

/**
 * Applies the MEL's shrinking factor to `input`. Each successor gets a full
 * copy of the shrunk payload. `next_id` supplies ids for the new EdgeLets and
 * is advanced.
 */
ForwardResult shrink_and_forward(const EdgeLet& input, const Mel& mel,
                                 std::uint64_t& next_id);

}  // namespace edgesim
