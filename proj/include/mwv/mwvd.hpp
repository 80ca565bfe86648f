#ifndef MWV_MWVD_HPP
#define MWV_MWVD_HPP

/**
 * @file
 * Multiplicative weighted Voronoi diagram: exhaustive nearest-site queries,
 * a brute-force vertex oracle over all triples, the candidate-set
 * construction over the overlay decomposition, and point location.
 */

#include "geometry.hpp"
#include "overlay.hpp"
#include "prefix_cells.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mwv
{

struct QueryResult
{
    std::size_t rank = 0;
    double value = 0.0;
    CandidateSet candidates; ///< consulted set (point location only)
};

/// Exhaustive argmin of the weighted distance; exact ties go to the lower
/// rank.
inline QueryResult nearest_weighted_site(Point x, const Ordering& ord)
{
    if(ord.empty())
        throw Error("nearest_weighted_site: empty ordering");
    std::size_t best = 0;
    double best2 = weighted_distance2(ord[0], x);
    for(std::size_t k = 1; k < ord.size(); ++k)
    {
        const double d2 = weighted_distance2(ord[k], x);
        if(d2 < best2)
        {
            best2 = d2;
            best = k;
        }
    }
    return {best + 1, weighted_distance(ord[best], x), {}};
}

struct DiagramVertex
{
    Point p;
    std::array<std::size_t, 3> triple{}; ///< ranks, increasing
    double value = 0.0;  ///< common weighted distance
    double margin = 0.0; ///< (next-nearest weighted distance - value) / value
};

struct DiagramCounts
{
    std::size_t V = 0;
    std::optional<std::size_t> E; ///< derived; only when all weights differ
    std::optional<std::size_t> F;
};

enum class Provenance
{
    Oracle,
    Fast
};

struct MWVDiagram
{
    std::vector<DiagramVertex> vertices; ///< sorted by (triple, x, y)
    std::vector<bool> cell_nonempty;     ///< by rank - 1
    DiagramCounts counts;
    Provenance provenance = Provenance::Oracle;
    /// Vertices whose margin is under ten times the predicate tolerance.
    std::size_t near_degenerate = 0;
};

namespace detail
{

/// Outcome of testing a triple point against a set of competitors.
struct VertexCheck
{
    bool valid = false;
    double margin = std::numeric_limits<double>::infinity();
};

/// `x` is a diagram vertex of the triple iff no competitor is strictly
/// nearer (beyond the relative tolerance). Competitors in the triple are
/// skipped.
inline VertexCheck check_vertex(
    Point x,
    const std::array<std::size_t, 3>& triple,
    const Ordering& ord,
    std::span<const std::size_t> competitors,
    double eps)
{
    double f = 0.0;
    for(std::size_t r : triple)
        f = std::max(f, weighted_distance(ord[r - 1], x));
    VertexCheck out;
    double nearest = std::numeric_limits<double>::infinity();
    for(std::size_t r : competitors)
    {
        if(r == triple[0] || r == triple[1] || r == triple[2])
            continue;
        const double g = weighted_distance(ord[r - 1], x);
        if(g < f * (1.0 - eps))
            return out;
        nearest = std::min(nearest, g);
    }
    out.valid = true;
    out.margin = f > 0.0 ? (nearest - f) / f : std::numeric_limits<double>::infinity();
    return out;
}

inline bool vertex_less(const DiagramVertex& a, const DiagramVertex& b)
{
    if(a.triple != b.triple)
        return a.triple < b.triple;
    return a.p.x < b.p.x || (a.p.x == b.p.x && a.p.y < b.p.y);
}

/// Sort and drop vertices with the same triple closer than `merge`.
inline void canonicalize(std::vector<DiagramVertex>& vs, double merge)
{
    std::sort(vs.begin(), vs.end(), vertex_less);
    std::vector<DiagramVertex> out;
    out.reserve(vs.size());
    for(const DiagramVertex& v : vs)
    {
        bool dup = false;
        for(auto it = out.rbegin(); it != out.rend() && it->triple == v.triple; ++it)
            if(distance(it->p, v.p) <= merge)
            {
                dup = true;
                break;
            }
        if(!dup)
            out.push_back(v);
    }
    vs = std::move(out);
}

inline void finish_diagram(MWVDiagram& d, const Ordering& ord, const Tolerance& tol)
{
    canonicalize(d.vertices, tol.merge());
    d.counts.V = d.vertices.size();
    if(ord.all_weights_distinct())
    {
        // Degree-3 vertices and bounded arcs: 2E = 3V, and Euler gives F.
        d.counts.E = 3 * d.counts.V / 2;
        d.counts.F = d.counts.V / 2 + 2;
    }
    d.near_degenerate = 0;
    for(const DiagramVertex& v : d.vertices)
        if(v.margin <= 10.0 * tol.eps)
            ++d.near_degenerate;
    d.cell_nonempty.assign(ord.size(), false);
    for(std::size_t k = 0; k < ord.size(); ++k)
        d.cell_nonempty[k] = nearest_weighted_site(ord[k].location, ord).rank == k + 1;
}

/// Triple points keyed by the rank triple, computed once.
class TriplePoints
{
public:
    TriplePoints(const Ordering& ord, const Tolerance& tol) : ord_(ord), tol_(tol) {}

    const std::vector<Point>& get(const std::array<std::size_t, 3>& t)
    {
        auto it = cache_.find(t);
        if(it == cache_.end())
            it = cache_.emplace(t, triple_equidistant_points(ord_[t[0] - 1], ord_[t[1] - 1], ord_[t[2] - 1], tol_)).first;
        return it->second;
    }

private:
    const Ordering& ord_;
    Tolerance tol_;
    std::map<std::array<std::size_t, 3>, std::vector<Point>> cache_;
};

} // namespace detail

/// Oracle: every triple, every equidistant point, validated against all
/// other sites.
inline MWVDiagram brute_force_diagram(const Ordering& ord, const Tolerance* tolerance = nullptr)
{
    const Tolerance tol = tolerance ? *tolerance : Tolerance{ord.scale()};
    MWVDiagram d;
    d.provenance = Provenance::Oracle;
    const std::size_t n = ord.size();
    std::vector<std::size_t> all(n);
    for(std::size_t k = 0; k < n; ++k)
        all[k] = k + 1;
    for(std::size_t i = 0; i < n; ++i)
        for(std::size_t j = i + 1; j < n; ++j)
            for(std::size_t k = j + 1; k < n; ++k)
            {
                const std::array<std::size_t, 3> t{i + 1, j + 1, k + 1};
                for(const Point& p : triple_equidistant_points(ord[i], ord[j], ord[k], tol))
                {
                    const auto c = detail::check_vertex(p, t, ord, all, tol.eps);
                    if(c.valid)
                        d.vertices.push_back({p, t, weighted_distance(ord[i], p), c.margin});
                }
            }
    detail::finish_diagram(d, ord, tol);
    return d;
}

/// Candidate-set construction: within every decomposition cell only the
/// cell's candidate set can own weighted-diagram area, so triples are
/// enumerated within that set and validated against it.
///
/// Triple points are accepted in the closed cell. A vertex of equal-weight
/// sites sits on an unweighted bisector, i.e. on an overlay edge, and only
/// the face on one side may hold all of its sites. A site strictly nearer
/// than the triple lies in the open prefix cell, so it is a candidate of
/// every face touching the point and the validation stays sound.
inline MWVDiagram fast_diagram(const Ordering& ord, const OverlayArrangement& A, const Tolerance* tolerance = nullptr)
{
    const Tolerance tol = tolerance ? *tolerance : Tolerance{ord.scale()};
    MWVDiagram d;
    d.provenance = Provenance::Fast;
    detail::TriplePoints points(ord, tol);
    for(const DecomposedCell& cell : A.cells)
    {
        const auto& C = cell.candidates.ranks;
        for(std::size_t a = 0; a < C.size(); ++a)
            for(std::size_t b = a + 1; b < C.size(); ++b)
                for(std::size_t c = b + 1; c < C.size(); ++c)
                {
                    const std::array<std::size_t, 3> t{C[a], C[b], C[c]};
                    for(const Point& p : points.get(t))
                    {
                        if(!cell.near(p, tol.predicate()))
                            continue;
                        const auto chk = detail::check_vertex(p, t, ord, C, tol.eps);
                        if(chk.valid)
                            d.vertices.push_back({p, t, weighted_distance(ord[t[0] - 1], p), chk.margin});
                    }
                }
    }
    detail::finish_diagram(d, ord, tol);
    return d;
}

/// Full pipeline: world box, prefix cells, overlay, decomposition, per-cell
/// sub-diagrams.
inline MWVDiagram fast_diagram(const Ordering& ord, double box_factor = 2.0)
{
    WorldBoxOptions opts;
    opts.factor = box_factor;
    opts.diagram_features = true;
    const Box box = compute_world_box(ord, opts);
    const OverlayArrangement A = build_overlay(all_prefix_cells(ord, box));
    return fast_diagram(ord, A);
}

/// Weighted nearest site found by scanning only the candidate set of the
/// face containing `x`. Throws BoundaryError when `x` lies on an overlay
/// edge (within tolerance) and Error when it lies outside the box.
inline QueryResult locate(Point x, const OverlayArrangement& A, const Ordering& ord, const Tolerance* tolerance = nullptr)
{
    const Tolerance tol = tolerance ? *tolerance : Tolerance{ord.scale()};
    const auto k = find_cell(A, x);
    if(!k)
        throw Error("locate: query point outside the world box");
    const DecomposedCell& c = A.cells[*k];
    if(x.y - c.bottom(x.x) <= tol.predicate() || c.top(x.x) - x.y <= tol.predicate())
        throw BoundaryError("boundary query");
    // Vertical face edges sit on the sides of decomposition cells.
    for(const double dx : {-2.0 * tol.predicate(), 2.0 * tol.predicate()})
    {
        const auto side = find_cell(A, {x.x + dx, x.y});
        if(side && A.cells[*side].face != c.face)
            throw BoundaryError("boundary query");
    }
    QueryResult r;
    r.candidates = c.candidates;
    double best2 = std::numeric_limits<double>::infinity();
    for(std::size_t rank : c.candidates.ranks)
    {
        const double d2 = weighted_distance2(ord[rank - 1], x);
        if(d2 < best2)
        {
            best2 = d2;
            r.rank = rank;
        }
    }
    r.value = weighted_distance(ord[r.rank - 1], x);
    return r;
}

} // namespace mwv

#endif // MWV_MWVD_HPP
