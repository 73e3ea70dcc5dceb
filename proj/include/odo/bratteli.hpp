#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odo/dynamics.hpp"

namespace odo {

/// An edge from source vertex s in V_k to range vertex r in V_{k+1}, with its
/// rank in the linear order of the in-edges of r.
struct BratteliEdge {
    digit_t source = 0;
    digit_t range = 0;
    digit_t rank = 0;
    bool operator==(const BratteliEdge&) const = default;
};

/// Finite-depth ordered Bratteli diagram: vertex counts per level (|V_0| = 1)
/// and the edge sets E_0, ..., E_{depth-1}.
class BratteliDiagram {
  public:
    BratteliDiagram(std::vector<digit_t> vertex_counts,
                    std::vector<std::vector<BratteliEdge>> edges);

    std::size_t depth() const { return edges_.size(); }
    digit_t vertices(std::size_t level) const { return vertex_counts_.at(level); }
    const std::vector<BratteliEdge>& edges(std::size_t level) const { return edges_.at(level); }

    /// In-degree of a range vertex at the given edge level.
    digit_t in_degree(std::size_t level, digit_t range) const;

    /// The unique in-edge of `range` with this rank.
    const BratteliEdge& edge_by_rank(std::size_t level, digit_t range, digit_t rank) const;

    bool operator==(const BratteliDiagram& o) const {
        return vertex_counts_ == o.vertex_counts_ && edges_ == o.edges_;
    }

  private:
    void validate() const;
    std::vector<digit_t> vertex_counts_;
    std::vector<std::vector<BratteliEdge>> edges_;
    // per level: index of edges by (range, rank)
    std::vector<std::vector<std::vector<std::size_t>>> by_range_rank_;
};

enum class RankTail { Min, Max, Unspecified };

/// A finite edge-path prefix (adjacent levels agree) plus a rank policy for
/// the unseen tail.
struct PathPoint {
    std::vector<BratteliEdge> edges;
    RankTail tail = RankTail::Unspecified;

    static PathPoint max_path() { return {{}, RankTail::Max}; }
    static PathPoint min_path() { return {{}, RankTail::Min}; }
};

void validate_path(const BratteliDiagram& d, const PathPoint& p);

/// The diagram of the odomutant: level-k vertex v^{(k)}_i is the i-th tower,
/// with a simple edge from v^{(k)}_m to v^{(k+1)}_i of rank sigma^{(k-1)}_i(m).
BratteliDiagram from_odomutant(const OdomutantSystem& sys, std::size_t depth);

/// The classic odometer diagram: one vertex per level and q_k parallel edges
/// with ranks 0..q_k-1 (rank = digit dictionary).
BratteliDiagram odometer_diagram(const BaseSequence& space, std::size_t depth);

/// Vershik successor: bump the first non-maximal rank and prepend the minimal
/// path. The max path maps to the min path when the diagram is properly
/// ordered.
PathPoint vershik_apply(const BratteliDiagram& d, const PathPoint& p);

/// Unique-min/max-path probe at this depth: the backward chains from every
/// deepest vertex must agree on the early levels.
bool properly_ordered(const BratteliDiagram& d, std::size_t agree_levels);

/// Prefix of the unique all-min-rank (or all-max-rank) path, when the chains
/// agree far enough to pin it down.
PathPoint extremal_path_prefix(const BratteliDiagram& d, std::size_t length, bool max);

/// The explicit conjugation between the odomutant and its Bratteli-Vershik
/// system: level-k edge (v^{(k)}_{x_{k-1}}, v^{(k+1)}_{x_k}, sigma^{(k-1)}_{x_k}(x_{k-1})).
PathPoint conjugation_psi(const OdomutantSystem& sys, const Point& p, std::size_t depth);

/// Exact incidence matrices M_k[i][j] = #edges from v^{(k)}_j to v^{(k+1)}_i.
std::vector<std::vector<std::vector<BigInt>>> incidence_matrices(const BratteliDiagram& d,
                                                                 std::size_t up_to);

/// Boyle-Handelman vertex splitting: each vertex of V_k splits into n_k
/// copies (n_k = the uniform multiplicity of E_k); the result is simple-edge
/// with a rank-preserving bijection of path spaces.
BratteliDiagram split_multiplicities(const BratteliDiagram& d,
                                     const std::vector<digit_t>& multiplicities);

/// The path bijection under splitting: a length-L prefix maps to a length
/// L-1 prefix (the last copy index needs the next edge); merging drops the
/// copy indices.
PathPoint split_path(const BratteliDiagram& d, const std::vector<digit_t>& multiplicities,
                     const PathPoint& p);
PathPoint merge_path(const BratteliDiagram& d, const std::vector<digit_t>& multiplicities,
                     const PathPoint& p);

std::string to_dot(const BratteliDiagram& d);
std::string to_json(const BratteliDiagram& d);
BratteliDiagram from_json(const std::string& text);

}  // namespace odo
