#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace qwalk {

// Multi-qubit basis label: one character per qubit, '0' = down, '1' = up.
// Qubit k maps to bit k of the node index; the printed form is MSB-first.
class BitString {
  public:
    BitString(unsigned value, int length);
    static BitString from_string(std::string_view s);

    int length() const { return length_; }
    unsigned value() const { return value_; }
    int n_up() const;
    int n_down() const { return length_ - n_up(); }
    bool up(int qubit) const { return (value_ >> qubit) & 1u; }
    std::string str() const;

    friend bool operator==(const BitString&, const BitString&) = default;

  private:
    unsigned value_;
    int length_;
};

int hamming_distance(const BitString& a, const BitString& b);
int hamming_distance(unsigned a, unsigned b);  // index form

struct GraphEdge {
    int i;
    int j;
    double hop;
};

enum class NodeLabelKind { none, bits, lattice };

// Undirected weighted walk graph. Immutable after construction by the
// builders below; safe to share across threads.
struct Graph {
    int num_nodes = 0;
    std::vector<GraphEdge> edges;
    std::vector<double> onsite;

    NodeLabelKind label_kind = NodeLabelKind::none;
    std::vector<std::string> bit_labels;
    std::vector<std::vector<int>> lattice_labels;
    int qubit_count = 0;       // set for hypercubes
    int lattice_dim = 0;       // set for hyperlattices
    int lattice_halfwidth = 0;

    // Walker start node: all-down corner for hypercubes, lattice center for
    // hyperlattices, node 0 otherwise.
    int origin_index() const;
    int far_corner_index() const;  // hypercube only

    void validate() const;
    nlohmann::json to_json() const;
    static Graph from_json(const nlohmann::json& j);
};

struct HypercubeSpec {
    int dim;     // number of qubits D
    double hop;  // uniform hop amplitude
};

struct HyperlatticeSpec {
    int dim;        // spatial dimension d
    double hop;     // nearest-neighbour hop amplitude
    int halfwidth;  // truncation L, sites per axis = 2L+1, open boundaries
};

inline constexpr int kDefaultNodeBudget = 1 << 12;

Graph build_hypercube(const HypercubeSpec& spec, int node_budget = kDefaultNodeBudget);
Graph build_hyperlattice(const HyperlatticeSpec& spec, int node_budget = kDefaultNodeBudget);

// H[i][j] = -hop for every edge (both orders), H[j][j] = onsite[j].
Eigen::MatrixXcd hamiltonian_matrix(const Graph& g);
Eigen::SparseMatrix<std::complex<double>> hamiltonian_sparse(const Graph& g);

// Tight-binding dispersion 2*hop*sum_mu cos(p_mu), lattice spacing 1.
double band_energy(std::span<const double> p, double hop);

}  // namespace qwalk
