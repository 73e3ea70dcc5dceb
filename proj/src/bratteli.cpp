#include "odo/bratteli.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

#include <json.hpp>

namespace odo {

BratteliDiagram::BratteliDiagram(std::vector<digit_t> vertex_counts,
                                 std::vector<std::vector<BratteliEdge>> edges)
    : vertex_counts_(std::move(vertex_counts)), edges_(std::move(edges)) {
    // canonical edge order per level, so equality and exports are stable
    for (auto& level : edges_)
        std::sort(level.begin(), level.end(), [](const auto& a, const auto& b) {
            return std::tie(a.range, a.rank, a.source) < std::tie(b.range, b.rank, b.source);
        });
    validate();
    by_range_rank_.resize(edges_.size());
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        std::vector<digit_t> indeg(static_cast<std::size_t>(vertex_counts_[k + 1]), 0);
        for (const auto& e : edges_[k]) indeg[static_cast<std::size_t>(e.range)]++;
        by_range_rank_[k].resize(static_cast<std::size_t>(vertex_counts_[k + 1]));
        for (digit_t r = 0; r < vertex_counts_[k + 1]; ++r)
            by_range_rank_[k][static_cast<std::size_t>(r)].assign(
                static_cast<std::size_t>(indeg[static_cast<std::size_t>(r)]), 0);
        for (std::size_t idx = 0; idx < edges_[k].size(); ++idx) {
            const auto& e = edges_[k][idx];
            by_range_rank_[k][static_cast<std::size_t>(e.range)]
                           [static_cast<std::size_t>(e.rank)] = idx;
        }
    }
}

void BratteliDiagram::validate() const {
    if (vertex_counts_.size() != edges_.size() + 1)
        throw ValidationError("diagram needs one more vertex level than edge levels");
    if (vertex_counts_.empty() || vertex_counts_[0] != 1)
        throw ValidationError("V_0 must be the single root");
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        digit_t src_count = vertex_counts_[k];
        digit_t rng_count = vertex_counts_[k + 1];
        std::vector<char> has_out(static_cast<std::size_t>(src_count), 0);
        std::vector<digit_t> indeg(static_cast<std::size_t>(rng_count), 0);
        for (const auto& e : edges_[k]) {
            if (e.source < 0 || e.source >= src_count || e.range < 0 || e.range >= rng_count)
                throw ValidationError("edge endpoint outside the level at E_" +
                                      std::to_string(k));
            has_out[static_cast<std::size_t>(e.source)] = 1;
            indeg[static_cast<std::size_t>(e.range)]++;
        }
        std::vector<std::vector<char>> seen(static_cast<std::size_t>(rng_count));
        for (digit_t r = 0; r < rng_count; ++r) {
            if (indeg[static_cast<std::size_t>(r)] == 0)
                throw ValidationError("range vertex without in-edges at level " +
                                      std::to_string(k + 1));
            seen[static_cast<std::size_t>(r)].assign(
                static_cast<std::size_t>(indeg[static_cast<std::size_t>(r)]), 0);
        }
        for (const auto& e : edges_[k]) {
            auto& s = seen[static_cast<std::size_t>(e.range)];
            if (e.rank < 0 || e.rank >= static_cast<digit_t>(s.size()) ||
                s[static_cast<std::size_t>(e.rank)])
                throw ValidationError("ranks at a range vertex must be exactly 0..indeg-1 (E_" +
                                      std::to_string(k) + ")");
            s[static_cast<std::size_t>(e.rank)] = 1;
        }
        for (digit_t v = 0; v < src_count; ++v)
            if (!has_out[static_cast<std::size_t>(v)])
                throw ValidationError("source vertex without out-edges at level " +
                                      std::to_string(k));
    }
}

digit_t BratteliDiagram::in_degree(std::size_t level, digit_t range) const {
    return static_cast<digit_t>(
        by_range_rank_.at(level).at(static_cast<std::size_t>(range)).size());
}

const BratteliEdge& BratteliDiagram::edge_by_rank(std::size_t level, digit_t range,
                                                  digit_t rank) const {
    const auto& bucket = by_range_rank_.at(level).at(static_cast<std::size_t>(range));
    if (rank < 0 || rank >= static_cast<digit_t>(bucket.size()))
        throw DomainError("no edge of that rank");
    return edges_[level][bucket[static_cast<std::size_t>(rank)]];
}

void validate_path(const BratteliDiagram& d, const PathPoint& p) {
    if (p.edges.size() > d.depth()) throw ValidationError("path longer than the diagram");
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
        const auto& e = p.edges[k];
        const auto& found = d.edge_by_rank(k, e.range, e.rank);
        if (!(found == e)) throw ValidationError("path edge not in the diagram");
        if (k > 0 && p.edges[k - 1].range != e.source)
            throw ValidationError("path adjacency broken at level " + std::to_string(k));
        if (k == 0 && e.source != 0) throw ValidationError("path must start at the root");
    }
}

BratteliDiagram from_odomutant(const OdomutantSystem& sys, std::size_t depth) {
    const BaseSequence& space = sys.space();
    std::vector<digit_t> counts{1};
    for (std::size_t k = 1; k <= depth; ++k) counts.push_back(space.q(k - 1));

    std::vector<std::vector<BratteliEdge>> edges;
    for (std::size_t k = 0; k < depth; ++k) {
        std::vector<BratteliEdge> level;
        if (k == 0) {
            for (digit_t i = 0; i < space.q(0); ++i) level.push_back({0, i, 0});
        } else {
            for (digit_t i = 0; i < space.q(k); ++i)
                for (digit_t m = 0; m < space.q(k - 1); ++m)
                    level.push_back({m, i, sys.family().sigma(k - 1, i, m)});
        }
        edges.push_back(std::move(level));
    }
    return BratteliDiagram(std::move(counts), std::move(edges));
}

BratteliDiagram odometer_diagram(const BaseSequence& space, std::size_t depth) {
    std::vector<digit_t> counts(depth + 1, 1);
    std::vector<std::vector<BratteliEdge>> edges;
    for (std::size_t k = 0; k < depth; ++k) {
        std::vector<BratteliEdge> level;
        for (digit_t r = 0; r < space.q(k); ++r) level.push_back({0, 0, r});
        edges.push_back(std::move(level));
    }
    return BratteliDiagram(std::move(counts), std::move(edges));
}

namespace {

// Backward extremal chains from every deepest vertex; chains[v][k] is the
// level-k vertex of the all-min (or all-max) chain ending at v.
std::vector<std::vector<digit_t>> extremal_chains(const BratteliDiagram& d, bool max) {
    std::size_t D = d.depth();
    std::vector<std::vector<digit_t>> chains;
    for (digit_t v = 0; v < d.vertices(D); ++v) {
        std::vector<digit_t> chain(D + 1);
        chain[D] = v;
        for (std::size_t k = D; k-- > 0;) {
            digit_t rank = max ? d.in_degree(k, chain[k + 1]) - 1 : 0;
            chain[k] = d.edge_by_rank(k, chain[k + 1], rank).source;
        }
        chains.push_back(std::move(chain));
    }
    return chains;
}

}  // namespace

bool properly_ordered(const BratteliDiagram& d, std::size_t agree_levels) {
    if (d.depth() == 0) return true;
    std::size_t upto = std::min(agree_levels, d.depth() - 1);
    for (bool max : {false, true}) {
        auto chains = extremal_chains(d, max);
        for (std::size_t k = 0; k <= upto; ++k)
            for (std::size_t i = 1; i < chains.size(); ++i)
                if (chains[i][k] != chains[0][k]) return false;
    }
    return true;
}

PathPoint extremal_path_prefix(const BratteliDiagram& d, std::size_t length, bool max) {
    if (length >= d.depth()) throw DomainError("extremal path prefix needs length < depth");
    auto chains = extremal_chains(d, max);
    for (std::size_t k = 0; k <= length; ++k)
        for (std::size_t i = 1; i < chains.size(); ++i)
            if (chains[i][k] != chains[0][k])
                throw UndeterminedError("extremal chains disagree at this depth", d.depth() + 1);
    PathPoint p;
    p.tail = max ? RankTail::Max : RankTail::Min;
    for (std::size_t k = 0; k < length; ++k) {
        digit_t range = chains[0][k + 1];
        digit_t rank = max ? d.in_degree(k, range) - 1 : 0;
        p.edges.push_back(d.edge_by_rank(k, range, rank));
    }
    return p;
}

PathPoint vershik_apply(const BratteliDiagram& d, const PathPoint& p) {
    validate_path(d, p);
    std::size_t L = p.edges.size();
    std::optional<std::size_t> N;
    for (std::size_t k = 0; k < L; ++k) {
        if (p.edges[k].rank < d.in_degree(k, p.edges[k].range) - 1) {
            N = k;
            break;
        }
    }
    if (!N) {
        if (p.tail == RankTail::Max) {
            // the maximal path rolls to the minimal one
            if (!properly_ordered(d, L)) throw DomainError("diagram is not properly ordered");
            return extremal_path_prefix(d, L, false);
        }
        throw UndeterminedError("successor needs the edge past the prefix", L + 1);
    }
    PathPoint out = p;
    const auto& f = d.edge_by_rank(*N, p.edges[*N].range, p.edges[*N].rank + 1);
    out.edges[*N] = f;
    // minimal path from the root to the source of f, built backwards
    digit_t v = f.source;
    for (std::size_t k = *N; k-- > 0;) {
        // sources of rank-0 edges: exactly one per range vertex
        const BratteliEdge* found = nullptr;
        for (const auto& e : d.edges(k))
            if (e.range == v && e.rank == 0) {
                found = &e;
                break;
            }
        if (!found) throw InternalError("missing rank-0 in-edge");
        out.edges[k] = *found;
        v = found->source;
    }
    return out;
}

PathPoint conjugation_psi(const OdomutantSystem& sys, const Point& p, std::size_t depth) {
    const BaseSequence& space = sys.space();
    PathPoint out;
    out.tail = RankTail::Unspecified;
    if (p.tail == Tail::Min && sys.family().fixes_zero()) out.tail = RankTail::Min;
    if (p.tail == Tail::Max && sys.family().fixes_max()) out.tail = RankTail::Max;
    for (std::size_t k = 0; k < depth; ++k) {
        if (k == 0) {
            out.edges.push_back({0, digit_at(space, p, 0), 0});
        } else {
            digit_t xk1 = digit_at(space, p, k - 1);
            digit_t xk = digit_at(space, p, k);
            out.edges.push_back({xk1, xk, sys.family().sigma(k - 1, xk, xk1)});
        }
    }
    return out;
}

std::vector<std::vector<std::vector<BigInt>>> incidence_matrices(const BratteliDiagram& d,
                                                                 std::size_t up_to) {
    std::vector<std::vector<std::vector<BigInt>>> out;
    up_to = std::min(up_to, d.depth());
    for (std::size_t k = 0; k < up_to; ++k) {
        std::vector<std::vector<BigInt>> M(
            static_cast<std::size_t>(d.vertices(k + 1)),
            std::vector<BigInt>(static_cast<std::size_t>(d.vertices(k)), BigInt(0)));
        for (const auto& e : d.edges(k))
            M[static_cast<std::size_t>(e.range)][static_cast<std::size_t>(e.source)] += 1;
        out.push_back(std::move(M));
    }
    return out;
}

namespace {

// parallel index of an edge among the same (source, range) group, by rank
digit_t parallel_index(const BratteliDiagram& d, std::size_t level, const BratteliEdge& e) {
    digit_t idx = 0;
    for (const auto& o : d.edges(level))
        if (o.source == e.source && o.range == e.range && o.rank < e.rank) ++idx;
    return idx;
}

void check_uniform_multiplicity(const BratteliDiagram& d,
                                const std::vector<digit_t>& multiplicities) {
    if (multiplicities.size() != d.depth())
        throw ValidationError("need one multiplicity per edge level (index 0 must be 1)");
    if (multiplicities[0] != 1)
        throw ValidationError("level-0 multiplicity must be 1 (the root does not split)");
    for (std::size_t k = 0; k < d.depth(); ++k) {
        std::map<std::pair<digit_t, digit_t>, digit_t> counts;
        for (const auto& e : d.edges(k)) counts[{e.source, e.range}]++;
        for (auto& [pair, c] : counts)
            if (c != multiplicities[k])
                throw ValidationError("edge multiplicity at E_" + std::to_string(k) + " is " +
                                      std::to_string(c) + ", declared " +
                                      std::to_string(multiplicities[k]));
    }
}

}  // namespace

BratteliDiagram split_multiplicities(const BratteliDiagram& d,
                                     const std::vector<digit_t>& multiplicities) {
    check_uniform_multiplicity(d, multiplicities);
    std::size_t D = d.depth();
    // split factor of V_level = the multiplicity of its out-edge level; the
    // deepest vertices carry no out-edges here and keep one copy
    auto n_of = [&](std::size_t level) -> digit_t {
        if (level == 0 || level >= D) return 1;
        return multiplicities[level];
    };
    std::vector<digit_t> counts;
    for (std::size_t k = 0; k <= D; ++k) counts.push_back(d.vertices(k) * n_of(k));

    std::vector<std::vector<BratteliEdge>> edges(D);
    for (std::size_t k = 0; k < D; ++k) {
        digit_t n_rng = n_of(k + 1);
        for (const auto& e : d.edges(k)) {
            digit_t m = parallel_index(d, k, e);  // which source copy owns it
            digit_t src_copy = (k == 0) ? 0 : e.source * n_of(k) + m;
            for (digit_t m2 = 0; m2 < n_rng; ++m2)
                edges[k].push_back({src_copy, e.range * n_rng + m2, e.rank});
        }
    }
    return BratteliDiagram(std::move(counts), std::move(edges));
}

PathPoint split_path(const BratteliDiagram& d, const std::vector<digit_t>& multiplicities,
                     const PathPoint& p) {
    check_uniform_multiplicity(d, multiplicities);
    validate_path(d, p);
    std::size_t D = d.depth();
    auto n_of = [&](std::size_t level) -> digit_t {
        if (level == 0 || level >= D) return 1;
        return multiplicities[level];
    };
    PathPoint out;
    out.tail = RankTail::Unspecified;
    if (p.edges.empty()) return out;
    // the range copy of edge k is the source copy of edge k+1, so the image
    // prefix is one edge shorter
    for (std::size_t k = 0; k + 1 < p.edges.size(); ++k) {
        const auto& e = p.edges[k];
        const auto& next = p.edges[k + 1];
        digit_t m = parallel_index(d, k, e);
        digit_t m_next = parallel_index(d, k + 1, next);
        digit_t src_copy = (k == 0) ? 0 : e.source * n_of(k) + m;
        (void)m;
        out.edges.push_back({src_copy, e.range * n_of(k + 1) + m_next, e.rank});
    }
    return out;
}

PathPoint merge_path(const BratteliDiagram& d, const std::vector<digit_t>& multiplicities,
                     const PathPoint& p) {
    check_uniform_multiplicity(d, multiplicities);
    std::size_t D = d.depth();
    auto n_of = [&](std::size_t level) -> digit_t {
        if (level == 0 || level >= D) return 1;
        return multiplicities[level];
    };
    PathPoint out;
    out.tail = RankTail::Unspecified;
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
        const auto& e = p.edges[k];
        out.edges.push_back({(k == 0) ? 0 : e.source / n_of(k), e.range / n_of(k + 1), e.rank});
    }
    return out;
}

std::string to_dot(const BratteliDiagram& d) {
    std::ostringstream os;
    os << "digraph bratteli {\n  rankdir=TB;\n  node [shape=circle];\n";
    for (std::size_t k = 0; k <= d.depth(); ++k) {
        os << "  { rank=same;";
        for (digit_t v = 0; v < d.vertices(k); ++v) os << " v_" << k << "_" << v << ";";
        os << " }\n";
    }
    for (std::size_t k = 0; k < d.depth(); ++k)
        for (const auto& e : d.edges(k))
            os << "  v_" << k << "_" << e.source << " -> v_" << (k + 1) << "_" << e.range
               << " [label=\"" << e.rank << "\"];\n";
    os << "}\n";
    return os.str();
}

std::string to_json(const BratteliDiagram& d) {
    nlohmann::ordered_json j;
    j["levels"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k <= d.depth(); ++k) j["levels"].push_back(d.vertices(k));
    j["edges"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < d.depth(); ++k)
        for (const auto& e : d.edges(k)) j["edges"].push_back({k, e.source, e.range, e.rank});
    return j.dump(2) + "\n";
}

BratteliDiagram from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<digit_t> counts = j.at("levels").get<std::vector<digit_t>>();
    if (counts.empty()) throw ConfigError("diagram JSON needs levels");
    std::vector<std::vector<BratteliEdge>> edges(counts.size() - 1);
    for (const auto& row : j.at("edges")) {
        if (!row.is_array() || row.size() != 4)
            throw ConfigError("edge rows must be [level, source, range, rank]");
        std::size_t k = row[0].get<std::size_t>();
        if (k >= edges.size()) throw ConfigError("edge level out of range");
        edges[k].push_back(
            {row[1].get<digit_t>(), row[2].get<digit_t>(), row[3].get<digit_t>()});
    }
    return BratteliDiagram(std::move(counts), std::move(edges));
}

}  // namespace odo
