#include "netkrig/graph.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include "netkrig/common.hpp"
#include "netkrig/errors.hpp"

namespace netkrig {

int Topology::node_index(const std::string& label) const {
    auto it = std::find(nodes.begin(), nodes.end(), label);
    if (it == nodes.end()) throw std::invalid_argument("unknown node '" + label + "'");
    return static_cast<int>(it - nodes.begin());
}

const Link& Topology::link_by_id(int id) const {
    for (const auto& l : links)
        if (l.id == id) return l;
    throw std::invalid_argument("unknown link id " + std::to_string(id));
}

namespace {

struct Circuit {
    const char* a;
    const char* b;
    double capacity;
    double metric;
};

// 13 circuits; forward link id = 2k-1 (a->b), reverse id = 2k (b->a).
constexpr Circuit kInternet2Circuits[] = {
    {"Los Angeles", "Seattle", 10e9, 24},
    {"Seattle", "Salt Lake City", 10e9, 20},
    {"Los Angeles", "Salt Lake City", 10e9, 30},
    {"Los Angeles", "Houston", 10e9, 25},
    {"Salt Lake City", "Kansas City", 10e9, 24},
    {"Kansas City", "Houston", 10e9, 16},
    {"Kansas City", "Chicago", 20e9, 10},
    {"Houston", "Atlanta", 10e9, 22},
    {"Chicago", "Atlanta", 10e9, 15},
    {"Chicago", "New York", 10e9, 18},
    {"Chicago", "Washington", 10e9, 16},
    {"Atlanta", "Washington", 10e9, 14},
    {"Washington", "New York", 20e9, 5},
};

std::vector<std::string> collect_nodes(const std::vector<Link>& links) {
    std::set<std::string> labels;
    for (const auto& l : links) {
        labels.insert(l.source);
        labels.insert(l.destination);
    }
    return {labels.begin(), labels.end()};
}

}  // namespace

Topology internet2_topology() {
    Topology topo;
    int id = 1;
    for (const auto& c : kInternet2Circuits) {
        topo.links.push_back({id++, c.a, c.b, c.capacity, c.metric});
        topo.links.push_back({id++, c.b, c.a, c.capacity, c.metric});
    }
    topo.nodes = collect_nodes(topo.links);
    return topo;
}

namespace {

// Shortest path from src to every node; among equal-cost paths the
// lexicographically smallest node-index sequence wins.  Returns per-node
// (cost, node sequence); unreachable nodes keep cost = inf.
struct PathEntry {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<int> path;
};

std::vector<PathEntry> shortest_paths(const Topology& topo,
                                      const std::vector<std::vector<std::pair<int, double>>>& adj,
                                      int src) {
    const int n = static_cast<int>(topo.nodes.size());
    std::vector<PathEntry> best(n);
    using Item = std::pair<double, std::vector<int>>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    best[src] = {0.0, {src}};
    heap.push({0.0, {src}});
    while (!heap.empty()) {
        auto [cost, path] = heap.top();
        heap.pop();
        int node = path.back();
        if (cost != best[node].cost || path != best[node].path) continue;
        for (auto [next, w] : adj[node]) {
            Item cand{cost + w, path};
            cand.second.push_back(next);
            if (cand.first < best[next].cost ||
                (cand.first == best[next].cost && cand.second < best[next].path)) {
                best[next] = {cand.first, cand.second};
                heap.push(std::move(cand));
            }
        }
    }
    return best;
}

}  // namespace

namespace {

// link ids must be exactly 1..L; row r of every routing matrix is link r+1
void require_contiguous_ids(const std::vector<Link>& links) {
    std::set<int> ids;
    for (const auto& l : links) ids.insert(l.id);
    if (ids.size() != links.size() || *ids.begin() != 1 ||
        *ids.rbegin() != static_cast<int>(links.size()))
        throw std::invalid_argument("link ids must be contiguous from 1 to " +
                                    std::to_string(links.size()));
}

}  // namespace

RoutingMatrix build_routing_matrix(const Topology& topo) {
    const int n = static_cast<int>(topo.nodes.size());
    if (n < 2) throw std::invalid_argument("routing requires at least two nodes");
    require_contiguous_ids(topo.links);

    // adjacency by node index; parallel edges keep the cheapest, and the
    // link id lookup below resolves the directed link actually traversed
    std::vector<std::vector<std::pair<int, double>>> adj(n);
    std::map<std::pair<int, int>, int> link_id_of;  // (from,to) -> id of cheapest link
    std::map<std::pair<int, int>, double> metric_of;
    for (const auto& l : topo.links) {
        if (l.metric <= 0)
            throw std::invalid_argument("link " + std::to_string(l.id) +
                                        ": routing metric must be positive");
        int a = topo.node_index(l.source);
        int b = topo.node_index(l.destination);
        auto key = std::make_pair(a, b);
        if (!metric_of.count(key) || l.metric < metric_of[key]) {
            metric_of[key] = l.metric;
            link_id_of[key] = l.id;
        }
    }
    for (const auto& [key, w] : metric_of) adj[key.first].push_back({key.second, w});

    std::vector<std::vector<PathEntry>> all(n);
    for (int s = 0; s < n; ++s) all[s] = shortest_paths(topo, adj, s);

    for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t)
            if (s != t && !std::isfinite(all[s][t].cost))
                throw std::invalid_argument("routing requires a connected topology: no path " +
                                            topo.nodes[s] + " -> " + topo.nodes[t]);

    const int L = static_cast<int>(topo.links.size());
    const int J = n * (n - 1);
    RoutingMatrix routing;
    routing.A = Eigen::MatrixXd::Zero(L, J);
    routing.link_ids.resize(L);
    for (int r = 0; r < L; ++r) routing.link_ids[r] = r + 1;  // row r <-> link id r+1

    int j = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            for (auto [s, t] : {std::make_pair(a, b), std::make_pair(b, a)}) {
                routing.flow_labels.push_back(topo.nodes[s] + "->" + topo.nodes[t]);
                const auto& path = all[s][t].path;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    int id = link_id_of.at({path[i], path[i + 1]});
                    routing.A(id - 1, j) = 1.0;
                }
                ++j;
            }
        }
    }
    return routing;
}

Eigen::MatrixXd rows_for_links(const RoutingMatrix& routing, const std::vector<int>& link_ids) {
    Eigen::MatrixXd out(link_ids.size(), routing.A.cols());
    for (std::size_t i = 0; i < link_ids.size(); ++i) {
        auto it = std::find(routing.link_ids.begin(), routing.link_ids.end(), link_ids[i]);
        if (it == routing.link_ids.end())
            throw std::invalid_argument("link id " + std::to_string(link_ids[i]) +
                                        " not present in routing matrix");
        out.row(i) = routing.A.row(it - routing.link_ids.begin());
    }
    return out;
}

ObservationScenario preset_scenario(int k) {
    switch (k) {
        case 1: return {{2, 12}, {7}};
        case 2: return {{2, 12, 13, 15}, {7}};
        case 3: return {{2, 12, 13, 15, 23, 25}, {7}};
        case 4: return {{2, 3, 9, 12, 15, 21, 23, 25}, {7}};
        case 5: return {{3, 7}, {13}};
        case 6: return {{3, 9}, {13}};
        case 7: return {{3, 9, 12}, {13}};
        case 8: return {{3, 7, 9, 12, 17, 19, 21}, {13}};
        case 9: return {{2, 3, 9, 12, 15, 21, 23, 25}, {13}};
        case 10: return {{3, 9}, {19}};
        case 11: return {{3, 9, 13}, {19}};
        case 12: return {{2, 3, 9, 12, 15, 21, 23, 25}, {19}};
        default:
            throw std::invalid_argument("scenario index must be in 1..12, got " +
                                        std::to_string(k));
    }
}

void validate_scenario(const ObservationScenario& s, const RoutingMatrix& routing) {
    if (s.observed.empty()) throw std::invalid_argument("scenario has no observed links");
    if (s.unobserved.empty()) throw std::invalid_argument("scenario has no unobserved links");
    std::set<int> seen;
    for (int id : s.observed)
        if (!seen.insert(id).second)
            throw std::invalid_argument("duplicate observed link " + std::to_string(id));
    for (int id : s.unobserved)
        if (!seen.insert(id).second)
            throw std::invalid_argument("link " + std::to_string(id) +
                                        " appears in both observed and unobserved sets");
    rows_for_links(routing, s.observed);
    rows_for_links(routing, s.unobserved);
}

void write_topology(const Topology& topo, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    for (const auto& l : topo.links)
        out << l.id << ',' << l.source << ',' << l.destination << ','
            << format_double(l.capacity_bps) << '\n';
    if (!out) throw config_error("failed writing '" + path + "'");
}

Topology read_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open topology file '" + path + "'");
    Topology topo;
    std::set<int> ids;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (lineno == 1 && trim(fields[0]) == "link_id") continue;  // optional header
        if (fields.size() != 4 && fields.size() != 5)
            throw config_error(path + ":" + std::to_string(lineno) +
                               ": expected 4 or 5 comma-separated fields");
        Link l;
        try {
            l.id = std::stoi(trim(fields[0]));
            l.capacity_bps = std::stod(trim(fields[3]));
            l.metric = fields.size() == 5 ? std::stod(trim(fields[4])) : 1.0;
        } catch (const std::exception&) {
            throw config_error(path + ":" + std::to_string(lineno) + ": malformed number");
        }
        l.source = trim(fields[1]);
        l.destination = trim(fields[2]);
        if (l.source.empty() || l.destination.empty() || l.source == l.destination)
            throw config_error(path + ":" + std::to_string(lineno) + ": bad endpoints");
        if (l.capacity_bps <= 0)
            throw config_error(path + ":" + std::to_string(lineno) +
                               ": capacity must be positive");
        if (l.metric <= 0)
            throw config_error(path + ":" + std::to_string(lineno) +
                               ": routing metric must be positive");
        if (!ids.insert(l.id).second)
            throw config_error(path + ":" + std::to_string(lineno) + ": duplicate link id " +
                               std::to_string(l.id));
        topo.links.push_back(std::move(l));
    }
    if (topo.links.empty()) throw config_error(path + ": no links");
    std::sort(topo.links.begin(), topo.links.end(),
              [](const Link& a, const Link& b) { return a.id < b.id; });
    try {
        require_contiguous_ids(topo.links);
    } catch (const std::invalid_argument& e) {
        throw config_error(path + ": " + e.what());
    }
    topo.nodes = collect_nodes(topo.links);
    return topo;
}

void write_routing_matrix(const RoutingMatrix& routing, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot open '" + path + "' for writing");
    for (std::size_t i = 0; i < routing.flow_labels.size(); ++i)
        out << (i ? "\t" : "") << routing.flow_labels[i];
    out << '\n';
    for (Eigen::Index r = 0; r < routing.A.rows(); ++r) {
        for (Eigen::Index c = 0; c < routing.A.cols(); ++c)
            out << (c ? "\t" : "") << (routing.A(r, c) != 0.0 ? 1 : 0);
        out << '\n';
    }
    if (!out) throw config_error("failed writing '" + path + "'");
}

RoutingMatrix read_routing_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open routing matrix file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw config_error(path + ": empty file");
    RoutingMatrix routing;
    for (const auto& field : split(line, '\t')) {
        std::string label = trim(field);
        if (label.find("->") == std::string::npos)
            throw config_error(path + ": flow label '" + label + "' lacks '->'");
        routing.flow_labels.push_back(std::move(label));
    }
    const std::size_t J = routing.flow_labels.size();
    std::vector<std::vector<double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split(line, '\t');
        if (fields.size() != J)
            throw config_error(path + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(J) + " fields, got " +
                               std::to_string(fields.size()));
        std::vector<double> row;
        for (const auto& field : fields) {
            std::string f = trim(field);
            if (f == "0")
                row.push_back(0.0);
            else if (f == "1")
                row.push_back(1.0);
            else
                throw config_error(path + ":" + std::to_string(lineno) +
                                   ": routing entries must be 0 or 1, got '" + f + "'");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw config_error(path + ": no link rows");
    routing.A.resize(rows.size(), J);
    routing.link_ids.resize(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        routing.link_ids[r] = static_cast<int>(r) + 1;
        for (std::size_t c = 0; c < J; ++c) routing.A(r, c) = rows[r][c];
    }
    for (std::size_t c = 0; c < J; ++c)
        if (routing.A.col(c).sum() == 0.0)
            throw config_error(path + ": flow '" + routing.flow_labels[c] +
                               "' uses no links");
    return routing;
}

}  // namespace netkrig
