#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace netkrig {

// One directed link.  `metric` is the routing weight used by shortest-path
// computation; it is symmetric per direction pair in the bundled preset.
struct Link {
    int id = 0;  // 1-based, stable across file round-trips
    std::string source;
    std::string destination;
    double capacity_bps = 0;
    double metric = 1.0;
};

struct Topology {
    std::vector<std::string> nodes;  // unique labels, alphabetical
    std::vector<Link> links;

    int node_index(const std::string& label) const;       // throws std::invalid_argument
    const Link& link_by_id(int id) const;                 // throws std::invalid_argument
};

// The Internet2/Abilene backbone: 9 nodes, 13 bidirectional circuits stored
// as 26 directed links (odd id = forward, odd+1 = reverse).  Metrics are the
// bundled routing weights that reproduce the deployed paths.
Topology internet2_topology();

// Routing matrix over all ordered node pairs.  Flows are enumerated from the
// alphabetical list of unordered pairs {a,b} with a<b: flow 2k-1 carries a->b
// and flow 2k carries b->a (1-based).  Each column marks the links on that
// flow's unique shortest path; ties are broken toward the lexicographically
// smallest node sequence, so the matrix is a pure function of the topology.
struct RoutingMatrix {
    Eigen::MatrixXd A;                      // links x flows, entries 0/1
    std::vector<int> link_ids;              // row -> link id
    std::vector<std::string> flow_labels;   // "src->dst"
};

RoutingMatrix build_routing_matrix(const Topology& topo);

// Rows of A for the given link ids, in the order requested.
Eigen::MatrixXd rows_for_links(const RoutingMatrix& routing, const std::vector<int>& link_ids);

// Which links are measured and which are to be predicted.  The two sets must
// be disjoint and non-empty; they need not cover all links.
struct ObservationScenario {
    std::vector<int> observed;
    std::vector<int> unobserved;
};

// The twelve bundled prediction scenarios (1..12).  1-4 predict link 7 from
// progressively larger observation sets, 5-9 predict link 13, 10-12 predict
// link 19.  Throws std::invalid_argument outside 1..12.
ObservationScenario preset_scenario(int k);

void validate_scenario(const ObservationScenario& s, const RoutingMatrix& routing);

// Topology files hold one link per line:
//   link_id,source,destination,capacity_bps
// The writer emits exactly those four fields; the reader also accepts an
// optional fifth field with the routing metric (default 1.0) and skips a
// leading header line if present.  Link ids must be contiguous from 1.
void write_topology(const Topology& topo, const std::string& path);
Topology read_topology(const std::string& path);

// Routing matrix files are tab-separated: a header row of flow labels
// ("src->dst"), then one row per link of 0/1 entries, rows in link-id order.
void write_routing_matrix(const RoutingMatrix& routing, const std::string& path);
RoutingMatrix read_routing_matrix(const std::string& path);

}  // namespace netkrig
