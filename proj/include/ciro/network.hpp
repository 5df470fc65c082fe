#pragma once

// Thermodynamical material networks: compartments as labeled elements of a
// compartmental digraph. Nodes store, transform or use material; arcs move it.

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ciro/error.hpp"

namespace ciro {

using CompartmentId = unsigned;

enum class CompartmentKind { Node, Arc };

enum class Role { Reservoir, Disassembler, Incinerator, Transport, Use, Other };

constexpr std::string_view to_string(CompartmentKind kind) {
  return kind == CompartmentKind::Node ? "node" : "arc";
}

constexpr std::string_view to_string(Role role) {
  switch (role) {
    case Role::Reservoir: return "reservoir";
    case Role::Disassembler: return "disassembler";
    case Role::Incinerator: return "incinerator";
    case Role::Transport: return "transport";
    case Role::Use: return "use";
    case Role::Other: return "other";
  }
  return "other";
}

inline std::optional<CompartmentKind> parse_kind(std::string_view text) {
  if (text == "node") return CompartmentKind::Node;
  if (text == "arc") return CompartmentKind::Arc;
  return std::nullopt;
}

inline std::optional<Role> parse_role(std::string_view text) {
  for (Role r : {Role::Reservoir, Role::Disassembler, Role::Incinerator, Role::Transport,
                 Role::Use, Role::Other}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

/// Compartment c^k_{i,j}: element `id` moving material from node `source`
/// to node `sink`. A node has source == sink == id.
struct Compartment {
  CompartmentId id = 0;
  CompartmentId source = 0;
  CompartmentId sink = 0;
  CompartmentKind kind = CompartmentKind::Node;
  Role role = Role::Other;
  std::string label;

  static Compartment node(CompartmentId k, Role role, std::string label = {}) {
    return {k, k, k, CompartmentKind::Node, role, std::move(label)};
  }
  static Compartment arc(CompartmentId k, CompartmentId from, CompartmentId to,
                         Role role = Role::Transport, std::string label = {}) {
    return {k, from, to, CompartmentKind::Arc, role, std::move(label)};
  }

  friend bool operator==(const Compartment&, const Compartment&) = default;
};

/// Outgoing arc entry of the compartmental digraph.
struct OutArc {
  CompartmentId arc = 0;
  CompartmentId sink = 0;
  friend bool operator==(const OutArc&, const OutArc&) = default;
};

using Adjacency = std::map<CompartmentId, std::vector<OutArc>>;

/// Validated network. Compartments are stored sorted by id, so two networks
/// built from permutations of the same input compare equal.
class TMNetwork {
 public:
  const std::vector<Compartment>& compartments() const noexcept { return compartments_; }
  std::size_t node_count() const noexcept { return nodes_; }
  std::size_t arc_count() const noexcept { return arcs_; }
  std::size_t compartment_count() const noexcept { return compartments_.size(); }

  const Compartment& at(CompartmentId id) const { return compartments_.at(id - 1); }

  friend bool operator==(const TMNetwork&, const TMNetwork&) = default;

 private:
  friend TMNetwork build_network(std::vector<Compartment> compartments);

  std::vector<Compartment> compartments_;
  std::size_t nodes_ = 0;
  std::size_t arcs_ = 0;
};

inline TMNetwork build_network(std::vector<Compartment> compartments) {
  if (compartments.empty()) throw Error(ErrorCode::EmptyNetwork, "network has no compartments");

  std::sort(compartments.begin(), compartments.end(),
            [](const Compartment& a, const Compartment& b) { return a.id < b.id; });

  std::set<CompartmentId> node_ids;
  for (std::size_t n = 0; n < compartments.size(); ++n) {
    const Compartment& c = compartments[n];
    if (n > 0 && compartments[n - 1].id == c.id) {
      throw Error(ErrorCode::DuplicateId, "compartment id " + std::to_string(c.id) + " repeated");
    }
    if (c.kind == CompartmentKind::Node) {
      if (c.source != c.id || c.sink != c.id) {
        throw Error(ErrorCode::NodeIndexMismatch,
                    "node c" + std::to_string(c.id) + " declared with (" + std::to_string(c.source) +
                        "," + std::to_string(c.sink) + ")");
      }
      node_ids.insert(c.id);
    } else if (c.source == c.sink) {
      throw Error(ErrorCode::ArcSelfLoop, "arc c" + std::to_string(c.id) + " has i = j");
    }
  }

  // ids must be exactly 1..n_c
  for (std::size_t n = 0; n < compartments.size(); ++n) {
    if (compartments[n].id != n + 1) {
      throw Error(ErrorCode::CountMismatch, "ids do not form 1.." + std::to_string(compartments.size()) +
                                                " (missing id " + std::to_string(n + 1) + ")");
    }
  }

  TMNetwork net;
  for (const Compartment& c : compartments) {
    if (c.kind == CompartmentKind::Arc) {
      for (CompartmentId end : {c.source, c.sink}) {
        if (!node_ids.contains(end)) {
          throw Error(ErrorCode::DanglingArc, "arc c" + std::to_string(c.id) + " references missing node " +
                                                  std::to_string(end));
        }
      }
      ++net.arcs_;
    } else {
      ++net.nodes_;
    }
  }
  net.compartments_ = std::move(compartments);
  if (net.nodes_ + net.arcs_ != net.compartments_.size()) {
    throw Error(ErrorCode::CountMismatch, "n_c != n_v + n_a");
  }
  return net;
}

/// Node id -> outgoing arcs (arc id, sink node), arcs in id order.
inline Adjacency compartmental_digraph(const TMNetwork& net) {
  Adjacency adj;
  for (const Compartment& c : net.compartments()) {
    if (c.kind == CompartmentKind::Node) adj.try_emplace(c.id);
  }
  for (const Compartment& c : net.compartments()) {
    if (c.kind == CompartmentKind::Arc) adj[c.source].push_back({c.id, c.sink});
  }
  return adj;
}

struct TopologyCheck {
  bool ok = false;
  std::vector<std::string> reasons;
  explicit operator bool() const noexcept { return ok; }
};

/// Checks that `net` is the solids network: a reservoir node feeding a
/// disassembler node through one arc, and the disassembler feeding an
/// incinerator node through exactly two parallel arcs. Matching is by role,
/// so scenarios may number compartments freely.
inline TopologyCheck validate_solids_topology(const TMNetwork& net) {
  TopologyCheck result;
  auto& reasons = result.reasons;

  auto nodes_with = [&](Role role) {
    std::vector<CompartmentId> ids;
    for (const Compartment& c : net.compartments()) {
      if (c.kind == CompartmentKind::Node && c.role == role) ids.push_back(c.id);
    }
    return ids;
  };
  const auto reservoirs = nodes_with(Role::Reservoir);
  const auto disassemblers = nodes_with(Role::Disassembler);
  const auto incinerators = nodes_with(Role::Incinerator);

  if (net.node_count() != 3) reasons.push_back("expected 3 nodes, found " + std::to_string(net.node_count()));
  if (net.arc_count() != 3) reasons.push_back("expected 3 arcs, found " + std::to_string(net.arc_count()));
  if (reservoirs.size() != 1) reasons.push_back("expected exactly 1 reservoir node");
  if (disassemblers.size() != 1) reasons.push_back("expected exactly 1 disassembler node");
  if (incinerators.size() != 1) reasons.push_back("expected exactly 1 incinerator node");

  if (reservoirs.size() == 1 && disassemblers.size() == 1 && incinerators.size() == 1) {
    const CompartmentId res = reservoirs.front();
    const CompartmentId dis = disassemblers.front();
    const CompartmentId inc = incinerators.front();
    std::size_t supply = 0, outflow = 0, other = 0;
    for (const Compartment& c : net.compartments()) {
      if (c.kind != CompartmentKind::Arc) continue;
      if (c.source == res && c.sink == dis) {
        ++supply;
      } else if (c.source == dis && c.sink == inc) {
        ++outflow;
      } else {
        ++other;
      }
    }
    if (supply != 1) {
      reasons.push_back("expected 1 reservoir->disassembler arc, found " + std::to_string(supply));
    }
    if (outflow != 2) {
      reasons.push_back("expected 2 parallel arcs disassembler->incinerator, found " + std::to_string(outflow));
    }
    if (other != 0) reasons.push_back(std::to_string(other) + " arc(s) outside the solids chain");
  }
  result.ok = reasons.empty();
  return result;
}

/// The six-compartment solids network with its conventional numbering.
inline TMNetwork solids_network() {
  return build_network({
      Compartment::node(1, Role::Reservoir, "non-renewable reservoir"),
      Compartment::node(2, Role::Disassembler, "disassembler"),
      Compartment::node(3, Role::Incinerator, "incinerator"),
      Compartment::arc(4, 1, 2, Role::Transport, "supply"),
      Compartment::arc(5, 2, 3, Role::Transport, "not disassembled"),
      Compartment::arc(6, 2, 3, Role::Use, "reuse"),
  });
}

}  // namespace ciro
