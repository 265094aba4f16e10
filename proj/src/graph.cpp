#include "qwalk/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qwalk {

BitString::BitString(unsigned value, int length) : value_(value), length_(length) {
    if (length < 1 || length > 31) throw std::invalid_argument("BitString: length must be in [1, 31]");
    if (length < 31 && value >= (1u << length))
        throw std::invalid_argument("BitString: value does not fit in length bits");
}

BitString BitString::from_string(std::string_view s) {
    if (s.empty()) throw std::invalid_argument("BitString: empty string");
    unsigned v = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("BitString: characters must be 0/1");
        v = (v << 1) | static_cast<unsigned>(c - '0');
    }
    return BitString(v, static_cast<int>(s.size()));
}

int BitString::n_up() const { return std::popcount(value_); }

std::string BitString::str() const {
    std::string s(length_, '0');
    for (int k = 0; k < length_; ++k)
        if (up(k)) s[length_ - 1 - k] = '1';
    return s;
}

int hamming_distance(const BitString& a, const BitString& b) {
    if (a.length() != b.length())
        throw std::invalid_argument("hamming_distance: length mismatch");
    return std::popcount(a.value() ^ b.value());
}

int hamming_distance(unsigned a, unsigned b) { return std::popcount(a ^ b); }

int Graph::origin_index() const {
    if (label_kind == NodeLabelKind::lattice) return (num_nodes - 1) / 2;
    return 0;
}

int Graph::far_corner_index() const {
    if (label_kind != NodeLabelKind::bits)
        throw std::invalid_argument("far_corner_index: graph is not a hypercube");
    return num_nodes - 1;
}

void Graph::validate() const {
    if (num_nodes < 1) throw std::invalid_argument("Graph: num_nodes must be >= 1");
    if (static_cast<int>(onsite.size()) != num_nodes)
        throw std::invalid_argument("Graph: onsite size mismatch");
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
        if (e.i < 0 || e.i >= num_nodes || e.j < 0 || e.j >= num_nodes)
            throw std::invalid_argument("Graph: edge index out of range");
        if (e.i == e.j) throw std::invalid_argument("Graph: self-loop edge");
        auto key = std::minmax(e.i, e.j);
        if (!seen.insert(key).second)
            throw std::invalid_argument("Graph: duplicate undirected edge");
    }
    if (label_kind == NodeLabelKind::bits && static_cast<int>(bit_labels.size()) != num_nodes)
        throw std::invalid_argument("Graph: bit label count mismatch");
    if (label_kind == NodeLabelKind::lattice && static_cast<int>(lattice_labels.size()) != num_nodes)
        throw std::invalid_argument("Graph: lattice label count mismatch");
}

nlohmann::json Graph::to_json() const {
    nlohmann::json j;
    j["num_nodes"] = num_nodes;
    auto edges_j = nlohmann::json::array();
    for (const auto& e : edges) edges_j.push_back({e.i, e.j, e.hop});
    j["edges"] = std::move(edges_j);
    j["onsite"] = onsite;
    switch (label_kind) {
        case NodeLabelKind::none:
            j["labels"] = nullptr;
            break;
        case NodeLabelKind::bits:
            j["labels"] = bit_labels;
            j["qubits"] = qubit_count;
            break;
        case NodeLabelKind::lattice:
            j["labels"] = lattice_labels;
            j["lattice_dim"] = lattice_dim;
            j["lattice_halfwidth"] = lattice_halfwidth;
            break;
    }
    return j;
}

Graph Graph::from_json(const nlohmann::json& j) {
    Graph g;
    g.num_nodes = j.at("num_nodes").get<int>();
    for (const auto& e : j.at("edges"))
        g.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    g.onsite = j.at("onsite").get<std::vector<double>>();
    const auto& labels = j.at("labels");
    if (labels.is_null()) {
        g.label_kind = NodeLabelKind::none;
    } else if (!labels.empty() && labels.front().is_string()) {
        g.label_kind = NodeLabelKind::bits;
        g.bit_labels = labels.get<std::vector<std::string>>();
        g.qubit_count = j.value("qubits", 0);
    } else {
        g.label_kind = NodeLabelKind::lattice;
        g.lattice_labels = labels.get<std::vector<std::vector<int>>>();
        g.lattice_dim = j.value("lattice_dim", 0);
        g.lattice_halfwidth = j.value("lattice_halfwidth", 0);
    }
    g.validate();
    return g;
}

Graph build_hypercube(const HypercubeSpec& spec, int node_budget) {
    if (spec.dim < 1) throw std::invalid_argument("build_hypercube: D must be >= 1");
    if (spec.dim > 30 || (1LL << spec.dim) > node_budget)
        throw std::runtime_error("build_hypercube: 2^D exceeds the node budget (" +
                                 std::to_string(node_budget) + ")");
    int n = 1 << spec.dim;
    Graph g;
    g.num_nodes = n;
    g.onsite.assign(n, 0.0);
    g.label_kind = NodeLabelKind::bits;
    g.qubit_count = spec.dim;
    g.bit_labels.reserve(n);
    for (int m = 0; m < n; ++m) g.bit_labels.push_back(BitString(m, spec.dim).str());
    // one edge per single-bit flip, recorded once with i < j
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < spec.dim; ++k) {
            int other = m ^ (1 << k);
            if (other > m) g.edges.push_back({m, other, spec.hop});
        }
    g.validate();
    return g;
}

Graph build_hyperlattice(const HyperlatticeSpec& spec, int node_budget) {
    if (spec.dim < 1) throw std::invalid_argument("build_hyperlattice: d must be >= 1");
    if (spec.halfwidth < 1) throw std::invalid_argument("build_hyperlattice: L must be >= 1");
    long long side = 2LL * spec.halfwidth + 1;
    long long n = 1;
    for (int mu = 0; mu < spec.dim; ++mu) {
        n *= side;
        if (n > node_budget)
            throw std::runtime_error("build_hyperlattice: (2L+1)^d exceeds the node budget (" +
                                     std::to_string(node_budget) + ")");
    }
    Graph g;
    g.num_nodes = static_cast<int>(n);
    g.onsite.assign(g.num_nodes, 0.0);
    g.label_kind = NodeLabelKind::lattice;
    g.lattice_dim = spec.dim;
    g.lattice_halfwidth = spec.halfwidth;
    g.lattice_labels.reserve(g.num_nodes);
    std::vector<int> coord(spec.dim, -spec.halfwidth);
    for (int idx = 0; idx < g.num_nodes; ++idx) {
        g.lattice_labels.push_back(coord);
        for (int mu = 0; mu < spec.dim; ++mu) {
            if (coord[mu] < spec.halfwidth) {
                ++coord[mu];
                break;
            }
            coord[mu] = -spec.halfwidth;
        }
    }
    // open boundaries: +1 neighbour along each axis when inside the wall
    long long stride = 1;
    for (int mu = 0; mu < spec.dim; ++mu) {
        for (int idx = 0; idx < g.num_nodes; ++idx) {
            if (g.lattice_labels[idx][mu] < spec.halfwidth)
                g.edges.push_back({idx, idx + static_cast<int>(stride), spec.hop});
        }
        stride *= side;
    }
    g.validate();
    return g;
}

Eigen::MatrixXcd hamiltonian_matrix(const Graph& g) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(g.num_nodes, g.num_nodes);
    for (const auto& e : g.edges) {
        h(e.i, e.j) -= e.hop;
        h(e.j, e.i) -= e.hop;
    }
    for (int j = 0; j < g.num_nodes; ++j) h(j, j) = g.onsite[j];
    return h;
}

Eigen::SparseMatrix<std::complex<double>> hamiltonian_sparse(const Graph& g) {
    using T = Eigen::Triplet<std::complex<double>>;
    std::vector<T> trip;
    trip.reserve(2 * g.edges.size() + g.num_nodes);
    for (const auto& e : g.edges) {
        trip.emplace_back(e.i, e.j, std::complex<double>(-e.hop, 0.0));
        trip.emplace_back(e.j, e.i, std::complex<double>(-e.hop, 0.0));
    }
    for (int j = 0; j < g.num_nodes; ++j)
        if (g.onsite[j] != 0.0) trip.emplace_back(j, j, std::complex<double>(g.onsite[j], 0.0));
    Eigen::SparseMatrix<std::complex<double>> h(g.num_nodes, g.num_nodes);
    h.setFromTriplets(trip.begin(), trip.end());
    return h;
}

double band_energy(std::span<const double> p, double hop) {
    double s = 0.0;
    for (double pm : p) s += std::cos(pm);
    return 2.0 * hop * s;
}

}  // namespace qwalk
