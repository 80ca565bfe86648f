#ifndef MWV_OVERLAY_HPP
#define MWV_OVERLAY_HPP

/**
 * @file
 * Overlay arrangement of all prefix cells, with the candidate set of every
 * face and a vertical decomposition of the faces into trapezoids.
 *
 * Every overlay vertex is identified combinatorially by the lines through
 * it (two bisectors, a bisector and a frame side, or two frame sides), so
 * incidences are decided by key equality. Floating point is only used to
 * order points along a segment and around a vertex.
 */

#include "geometry.hpp"
#include "prefix_cells.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mwv
{

/// Raised when a query point sits on a boundary where the answer is not
/// unique.
class BoundaryError : public Error
{
public:
    using Error::Error;
};

//------------------------------------------------------------------------------
// Candidate sets
//------------------------------------------------------------------------------

/// Ranks (1-based, increasing) of the sites that are strictly nearer to a
/// point than every earlier site in the ordering.
struct CandidateSet
{
    std::vector<std::size_t> ranks;

    std::size_t size() const { return ranks.size(); }
    bool contains(std::size_t rank) const
    {
        return std::binary_search(ranks.begin(), ranks.end(), rank);
    }
    friend bool operator==(const CandidateSet&, const CandidateSet&) = default;
};

/// Sign of |x-a|^2 - |x-b|^2 (negative when x is nearer to a), or 0 when
/// the difference is below its floating-point error bound.
inline int closer_sign(Point x, Point a, Point b)
{
    // v = (b - a) . (2x - (a + b)). Rounding of each factor is relative to
    // |a + b| and |s|, not to |a| and |b|, which keeps the bound tight for
    // mirrored pairs far from x.
    const Point d = b - a;
    const Point m = a + b;
    const Point s = 2.0 * x - m;
    const double v = dot(d, s);
    const double mag = std::abs(d.x) * (std::abs(s.x) + std::abs(m.x)) +
                       std::abs(d.y) * (std::abs(s.y) + std::abs(m.y));
    if(std::abs(v) <= 8.0 * std::numeric_limits<double>::epsilon() * mag)
        return 0;
    return v < 0.0 ? -1 : 1;
}

/// Prefix minima of the distance sequence from `x` to `sites` (in ordering
/// order). Throws BoundaryError if `x` is equidistant to a prefix minimum
/// and a later site.
inline CandidateSet candidate_set_of_point(Point x, const std::vector<Point>& sites)
{
    CandidateSet out;
    if(sites.empty())
        return out;
    std::size_t best = 0;
    out.ranks.push_back(1);
    for(std::size_t i = 1; i < sites.size(); ++i)
    {
        const int s = closer_sign(x, sites[i], sites[best]);
        if(s == 0)
            throw BoundaryError("ambiguous candidate set at boundary point");
        if(s < 0)
        {
            out.ranks.push_back(i + 1);
            best = i;
        }
    }
    return out;
}

inline CandidateSet candidate_set_of_point(Point x, const Ordering& ord)
{
    return candidate_set_of_point(x, ord.locations());
}

//------------------------------------------------------------------------------
// Combinatorial vertex keys
//------------------------------------------------------------------------------

/// Line supporting an overlay edge: the bisector of sites a < b, or a frame
/// side when a < 0.
struct Support
{
    int a = -1;
    int b = -1;

    static Support bisector(std::size_t i, std::size_t j)
    {
        return {static_cast<int>(std::min(i, j)), static_cast<int>(std::max(i, j))};
    }
    static Support frame(Side s) { return {frame_support(s), -1}; }

    bool is_frame() const { return a < 0; }
    Side side() const { return support_side(a); }
    friend auto operator<=>(const Support&, const Support&) = default;
};

enum class VertexKind : std::uint8_t
{
    Corner,       ///< a = corner index (counterclockwise from (xmin, ymin))
    FrameHit,     ///< bisector (a, b) meets frame side c
    Circumcenter, ///< equidistant to sites a < b < c
    Crossing      ///< bisectors (a, b) and (c, d), four distinct sites
};

struct VertexKey
{
    VertexKind kind = VertexKind::Corner;
    int a = -1;
    int b = -1;
    int c = -1;
    int d = -1;

    bool on_frame() const { return kind == VertexKind::Corner || kind == VertexKind::FrameHit; }
    friend auto operator<=>(const VertexKey&, const VertexKey&) = default;
};

/// Key of the intersection point of two supporting lines, or nullopt when
/// the lines are parallel or identical.
inline std::optional<VertexKey> key_of(Support s, Support t)
{
    if(s.is_frame() && t.is_frame())
    {
        const int p = static_cast<int>(s.side()), q = static_cast<int>(t.side());
        if((p + 1) % 4 == q)
            return VertexKey{VertexKind::Corner, q};
        if((q + 1) % 4 == p)
            return VertexKey{VertexKind::Corner, p};
        return std::nullopt;
    }
    if(s.is_frame())
        std::swap(s, t);
    if(t.is_frame())
        return VertexKey{VertexKind::FrameHit, s.a, s.b, static_cast<int>(t.side())};
    if(s == t)
        return std::nullopt;
    std::array<int, 4> ids{s.a, s.b, t.a, t.b};
    std::sort(ids.begin(), ids.end());
    const auto last = std::unique(ids.begin(), ids.end());
    if(last - ids.begin() == 3)
        return VertexKey{VertexKind::Circumcenter, ids[0], ids[1], ids[2]};
    if(t < s)
        std::swap(s, t);
    return VertexKey{VertexKind::Crossing, s.a, s.b, t.a, t.b};
}

inline ClipLine bisector_line(const std::vector<Point>& sites, int a, int b)
{
    return nearer_halfplane(sites[static_cast<std::size_t>(a)], sites[static_cast<std::size_t>(b)]);
}

namespace detail
{

inline std::optional<Point> frame_hit(const ClipLine& l, const Box& box, Side side)
{
    // normal . (p - origin) = 0 with one coordinate pinned to the frame.
    switch(side)
    {
    case Side::Bottom:
    case Side::Top:
    {
        if(l.normal.x == 0.0)
            return std::nullopt;
        const double y = side == Side::Bottom ? box.ymin : box.ymax;
        return Point{l.origin.x - l.normal.y * (y - l.origin.y) / l.normal.x, y};
    }
    case Side::Left:
    case Side::Right:
    default:
    {
        if(l.normal.y == 0.0)
            return std::nullopt;
        const double x = side == Side::Left ? box.xmin : box.xmax;
        return Point{x, l.origin.y - l.normal.x * (x - l.origin.x) / l.normal.y};
    }
    }
}

} // namespace detail

/// Coordinates of a keyed vertex. Deterministic in the key, so every
/// occurrence of a vertex gets bitwise-identical coordinates.
inline std::optional<Point> key_point(const VertexKey& k, const std::vector<Point>& sites, const Box& box)
{
    switch(k.kind)
    {
    case VertexKind::Corner:
        return box.corners()[static_cast<std::size_t>(k.a)];
    case VertexKind::FrameHit:
        return detail::frame_hit(bisector_line(sites, k.a, k.b), box, static_cast<Side>(k.c));
    case VertexKind::Circumcenter:
        return line_intersection(bisector_line(sites, k.a, k.b), bisector_line(sites, k.a, k.c));
    case VertexKind::Crossing:
    default:
        return line_intersection(bisector_line(sites, k.a, k.b), bisector_line(sites, k.c, k.d));
    }
}

//------------------------------------------------------------------------------
// Arrangement
//------------------------------------------------------------------------------

struct OverlayVertex
{
    Point p;
    VertexKey key;
    bool frame() const { return key.on_frame(); }
};

struct OverlayEdge
{
    std::size_t u = 0;
    std::size_t v = 0;
    Support support;
    bool frame() const { return support.is_frame(); }
};

struct OverlayFace
{
    std::vector<std::size_t> boundary; ///< vertex ids, counterclockwise
    Point representative;
    CandidateSet candidates;
};

/// Counts of intrinsic features: frame vertices, frame edges and the outer
/// face are excluded.
struct OverlayComplexity
{
    std::size_t V = 0;
    std::size_t E = 0;
    std::size_t F = 0;
    std::size_t total = 0;
    friend bool operator==(const OverlayComplexity&, const OverlayComplexity&) = default;
};

/// Vertical trapezoid (or triangle) of the decomposition. The region is
/// xl <= x < xr, bottom(x) < y <= top(x); the half-open form makes the
/// cells an exact partition of the box interior.
struct DecomposedCell
{
    std::vector<Point> polygon; ///< counterclockwise, 3 or 4 vertices
    std::size_t face = 0;
    CandidateSet candidates;
    double xl = 0.0;
    double xr = 0.0;
    Point bottom_left, bottom_right; ///< endpoints of the bottom edge
    Point top_left, top_right;       ///< endpoints of the top edge
    std::size_t bottom_edge = 0;
    std::size_t top_edge = 0;

    static double edge_y(Point l, Point r, double x)
    {
        if(x <= l.x)
            return l.y;
        if(x >= r.x)
            return r.y;
        return l.y + (r.y - l.y) * ((x - l.x) / (r.x - l.x));
    }
    double bottom(double x) const { return edge_y(bottom_left, bottom_right, x); }
    double top(double x) const { return edge_y(top_left, top_right, x); }

    bool contains(Point p) const
    {
        return p.x >= xl && p.x < xr && p.y > bottom(p.x) && p.y <= top(p.x);
    }
    /// Closed containment, widened by `slack` measured perpendicular to
    /// each side.
    bool near(Point p, double slack) const
    {
        if(p.x < xl - slack || p.x > xr + slack)
            return false;
        const auto widen = [&](Point l, Point r) {
            const double dx = r.x - l.x;
            return dx > 0.0 ? slack * std::hypot(1.0, (r.y - l.y) / dx) : slack;
        };
        return p.y >= bottom(p.x) - widen(bottom_left, bottom_right) &&
               p.y <= top(p.x) + widen(top_left, top_right);
    }
    double area() const
    {
        return 0.5 * (xr - xl) * ((top(xl) - bottom(xl)) + (top(xr) - bottom(xr)));
    }
    /// A point strictly inside the cell.
    Point interior_point() const
    {
        const double xm = 0.5 * (xl + xr);
        return {xm, 0.5 * (bottom(xm) + top(xm))};
    }
};

struct OverlayArrangement
{
    std::vector<Point> sites; ///< in ordering order
    Box box;
    std::vector<OverlayVertex> vertices;
    std::vector<OverlayEdge> edges;
    std::vector<OverlayFace> faces; ///< bounded faces only
    std::vector<DecomposedCell> cells;
    OverlayComplexity complexity;
    /// Euler characteristic V - E + F over all features including the
    /// frame and the outer face.
    long euler = 0;

    std::size_t max_candidate_size() const
    {
        std::size_t m = 0;
        for(const OverlayFace& f : faces)
            m = std::max(m, f.candidates.size());
        return m;
    }
};

namespace detail
{

struct OverlaySegment
{
    Support support;
    VertexKey k0, k1;
    Point p0, p1;
    Point dir; ///< direction of the supporting line, oriented p0 -> p1
    std::vector<std::pair<double, VertexKey>> inner;
    double xmin, xmax, ymin, ymax;
};

inline Point support_direction(Support s, const std::vector<Point>& sites)
{
    if(s.is_frame())
    {
        switch(s.side())
        {
        case Side::Bottom:
            return {1.0, 0.0};
        case Side::Right:
            return {0.0, 1.0};
        case Side::Top:
            return {-1.0, 0.0};
        case Side::Left:
        default:
            return {0.0, -1.0};
        }
    }
    return perp(sites[static_cast<std::size_t>(s.b)] - sites[static_cast<std::size_t>(s.a)]);
}

inline bool lex_less(Point a, Point b)
{
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

inline std::string describe(const VertexKey& k)
{
    std::string s = "sites";
    for(int id : {k.a, k.b, k.c, k.d})
        if(id >= 0)
            s += " " + std::to_string(id + 1);
    return s;
}

[[noreturn]] inline void degeneracy(const std::string& what, const VertexKey& k)
{
    throw DegeneracyError(
        "overlay degeneracy (" + what + ") near " + describe(k) +
        "; jitter the site locations and retry");
}

class OverlayBuilder
{
public:
    OverlayBuilder(const PrefixCellSet& cells) : cells_(cells), sites_(cells.sites), box_(cells.box) {}

    OverlayArrangement build()
    {
        collect_segments();
        intersect_segments();
        assemble_graph();
        walk_faces();
        decompose();
        finish_faces();
        return std::move(out_);
    }

private:
    std::optional<Point> try_point(const VertexKey& k)
    {
        auto it = coords_.find(k);
        if(it != coords_.end())
            return it->second;
        const auto p = key_point(k, sites_, box_);
        if(!p || !std::isfinite(p->x) || !std::isfinite(p->y))
            return std::nullopt;
        coords_.emplace(k, *p);
        return *p;
    }

    // A bisector through a frame corner meets two sides at one point; both
    // hits must be the corner vertex or the frame never closes there.
    VertexKey canonical(const VertexKey& k)
    {
        if(k.kind != VertexKind::FrameHit)
            return k;
        const auto p = try_point(k);
        if(!p)
            return k;
        const auto corners = box_.corners();
        for(int c = 0; c < 4; ++c)
            if(corners[static_cast<std::size_t>(c)] == *p)
                return VertexKey{VertexKind::Corner, c};
        return k;
    }

    Point point_of(const VertexKey& k)
    {
        const auto p = try_point(k);
        if(!p)
            degeneracy("parallel supporting lines", k);
        return *p;
    }

    Support cell_support(std::size_t cell, int id) const
    {
        if(is_frame_support(id))
            return Support::frame(support_side(id));
        return Support::bisector(cell, static_cast<std::size_t>(id));
    }

    void add_segment(Support s, const VertexKey& k0, const VertexKey& k1)
    {
        OverlaySegment seg{s, k0, k1, point_of(k0), point_of(k1), {}, {}, 0, 0, 0, 0};
        Point dir = support_direction(s, sites_);
        if(dot(dir, seg.p1 - seg.p0) < 0.0)
            dir = -1.0 * dir;
        seg.dir = dir;
        seg.xmin = std::min(seg.p0.x, seg.p1.x);
        seg.xmax = std::max(seg.p0.x, seg.p1.x);
        seg.ymin = std::min(seg.p0.y, seg.p1.y);
        seg.ymax = std::max(seg.p0.y, seg.p1.y);
        if(seg.p0 == seg.p1)
            degeneracy("zero-length edge", k0);
        segments_.push_back(std::move(seg));
    }

    void collect_segments()
    {
        for(std::size_t i = 0; i < cells_.cells.size(); ++i)
        {
            const ConvexRegion& cell = cells_.cells[i];
            const std::size_t m = cell.size();
            if(m < 3)
                throw DegeneracyError("prefix cell " + std::to_string(i + 1) + " is empty");
            std::vector<VertexKey> keys(m);
            for(std::size_t k = 0; k < m; ++k)
            {
                const Support before = cell_support(i, cell.edge_support[(k + m - 1) % m]);
                const Support after = cell_support(i, cell.edge_support[k]);
                const auto key = key_of(before, after);
                if(!key)
                    throw DegeneracyError(
                        "prefix cell " + std::to_string(i + 1) +
                        " has consecutive parallel edges; jitter the site locations and retry");
                keys[k] = canonical(*key);
            }
            for(std::size_t k = 0; k < m; ++k)
            {
                const int id = cell.edge_support[k];
                if(is_frame_support(id))
                    continue;
                add_segment(cell_support(i, id), keys[k], keys[(k + 1) % m]);
            }
        }
        for(int s = 0; s < 4; ++s)
            add_segment(
                Support::frame(static_cast<Side>(s)),
                VertexKey{VertexKind::Corner, s},
                VertexKey{VertexKind::Corner, (s + 1) % 4});
    }

    static bool is_endpoint(const OverlaySegment& s, const VertexKey& k)
    {
        return s.k0 == k || s.k1 == k;
    }

    /// Position of `p` along `s` as a signed coordinate on the segment's
    /// dominant axis. Coordinates are compared directly: a parameter
    /// relative to a far endpoint cannot separate crossings that are close
    /// together on a long edge.
    static double param(const OverlaySegment& s, Point p)
    {
        const Point d = s.p1 - s.p0;
        if(std::abs(d.x) >= std::abs(d.y))
            return d.x > 0.0 ? p.x : -p.x;
        return d.y > 0.0 ? p.y : -p.y;
    }

    void intersect_segments()
    {
        std::vector<std::size_t> order(segments_.size());
        for(std::size_t k = 0; k < order.size(); ++k)
            order[k] = k;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return segments_[a].xmin < segments_[b].xmin;
        });
        const double slack = 1e-12 * std::max(box_.width(), box_.height());
        for(std::size_t x = 0; x < order.size(); ++x)
        {
            OverlaySegment& A = segments_[order[x]];
            for(std::size_t y = x + 1; y < order.size(); ++y)
            {
                OverlaySegment& B = segments_[order[y]];
                if(B.xmin > A.xmax + slack)
                    break;
                if(B.ymin > A.ymax + slack || B.ymax < A.ymin - slack)
                    continue;
                auto key = key_of(A.support, B.support);
                if(!key)
                    continue;
                key = canonical(*key);
                const bool endA = is_endpoint(A, *key), endB = is_endpoint(B, *key);
                if(endA && endB)
                    continue;
                const auto hit = try_point(*key);
                if(!hit)
                {
                    if(orient(A.p0, A.p1, B.p0) == 0.0 && orient(A.p0, A.p1, B.p1) == 0.0)
                        degeneracy("overlapping edges", *key);
                    continue;
                }
                const Point p = *hit;
                double ta = 0.0, tb = 0.0;
                if(!endA)
                {
                    ta = param(A, p);
                    if(!(ta > param(A, A.p0) && ta < param(A, A.p1)))
                        continue;
                }
                if(!endB)
                {
                    tb = param(B, p);
                    if(!(tb > param(B, B.p0) && tb < param(B, B.p1)))
                        continue;
                }
                if(!endA)
                    A.inner.emplace_back(ta, *key);
                if(!endB)
                    B.inner.emplace_back(tb, *key);
            }
        }
    }

    std::size_t vertex_id(const VertexKey& k)
    {
        auto [it, inserted] = vertex_ids_.try_emplace(k, out_.vertices.size());
        if(inserted)
            out_.vertices.push_back({point_of(k), k});
        return it->second;
    }

    void assemble_graph()
    {
        out_.sites = sites_;
        out_.box = box_;
        for(OverlaySegment& s : segments_)
        {
            auto& in = s.inner;
            std::sort(in.begin(), in.end(), [](const auto& a, const auto& b) {
                return a.second < b.second;
            });
            in.erase(
                std::unique(in.begin(), in.end(), [](const auto& a, const auto& b) {
                    return a.second == b.second;
                }),
                in.end());
            std::sort(in.begin(), in.end(), [](const auto& a, const auto& b) {
                return a.first < b.first;
            });
            std::vector<VertexKey> chain;
            chain.reserve(in.size() + 2);
            chain.push_back(s.k0);
            for(std::size_t k = 0; k < in.size(); ++k)
            {
                if(k > 0 && !(in[k - 1].first < in[k].first))
                    degeneracy("coincident crossings", in[k].second);
                chain.push_back(in[k].second);
            }
            chain.push_back(s.k1);
            for(std::size_t k = 0; k + 1 < chain.size(); ++k)
            {
                const std::size_t u = vertex_id(chain[k]), v = vertex_id(chain[k + 1]);
                out_.edges.push_back({u, v, s.support});
                edge_dir_.push_back(s.dir);
            }
        }
    }

    // Half-edge 2e runs u -> v of edge e, 2e + 1 runs v -> u. The face of a
    // half-edge lies to its left.
    std::size_t origin(std::size_t h) const
    {
        const OverlayEdge& e = out_.edges[h / 2];
        return h % 2 == 0 ? e.u : e.v;
    }
    Point direction(std::size_t h) const
    {
        const Point d = edge_dir_[h / 2];
        return h % 2 == 0 ? d : -1.0 * d;
    }

    void walk_faces()
    {
        const std::size_t nv = out_.vertices.size();
        const std::size_t nh = 2 * out_.edges.size();
        std::vector<std::vector<std::size_t>> around(nv);
        for(std::size_t h = 0; h < nh; ++h)
            around[origin(h)].push_back(h);
        std::vector<std::size_t> pos(nh);
        for(auto& list : around)
        {
            std::vector<double> ang(list.size());
            for(std::size_t k = 0; k < list.size(); ++k)
            {
                const Point d = direction(list[k]);
                ang[k] = std::atan2(d.y, d.x);
            }
            std::vector<std::size_t> idx(list.size());
            for(std::size_t k = 0; k < idx.size(); ++k)
                idx[k] = k;
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
                return ang[a] < ang[b];
            });
            std::vector<std::size_t> sorted(list.size());
            for(std::size_t k = 0; k < idx.size(); ++k)
                sorted[k] = list[idx[k]];
            list = std::move(sorted);
            for(std::size_t k = 0; k < list.size(); ++k)
                pos[list[k]] = k;
        }
        next_.assign(nh, 0);
        for(std::size_t h = 0; h < nh; ++h)
        {
            const std::size_t twin = h ^ 1u;
            const auto& list = around[origin(twin)];
            next_[h] = list[(pos[twin] + list.size() - 1) % list.size()];
        }
        face_of_.assign(nh, std::numeric_limits<std::size_t>::max());
        std::size_t nf = 0;
        for(std::size_t h = 0; h < nh; ++h)
        {
            if(face_of_[h] != std::numeric_limits<std::size_t>::max())
                continue;
            std::vector<std::size_t> cycle;
            for(std::size_t g = h; face_of_[g] == std::numeric_limits<std::size_t>::max(); g = next_[g])
            {
                face_of_[g] = nf;
                cycle.push_back(origin(g));
            }
            cycles_.push_back(std::move(cycle));
            ++nf;
        }

        // The half-edge leaving corner 0 upward along the left side has the
        // outer face on its left.
        const std::size_t c0 = vertex_ids_.at(VertexKey{VertexKind::Corner, 0});
        outer_ = std::numeric_limits<std::size_t>::max();
        for(std::size_t h : around[c0])
        {
            const OverlayEdge& e = out_.edges[h / 2];
            if(e.support == Support::frame(Side::Left))
                outer_ = face_of_[h];
        }
        if(outer_ == std::numeric_limits<std::size_t>::max())
            throw DegeneracyError("overlay frame is broken at corner 0");

        out_.euler = static_cast<long>(nv) - static_cast<long>(out_.edges.size()) + static_cast<long>(nf);
        if(out_.euler != 2)
            throw DegeneracyError(
                "overlay degeneracy (Euler characteristic " + std::to_string(out_.euler) +
                "); jitter the site locations and retry");

        face_index_.assign(nf, std::numeric_limits<std::size_t>::max());
        for(std::size_t f = 0; f < nf; ++f)
        {
            if(f == outer_)
                continue;
            face_index_[f] = out_.faces.size();
            out_.faces.push_back({cycles_[f], {}, {}});
        }
    }

    void decompose()
    {
        const auto& V = out_.vertices;
        const std::size_t nv = V.size();
        std::vector<std::size_t> events(nv);
        for(std::size_t k = 0; k < nv; ++k)
            events[k] = k;
        std::sort(events.begin(), events.end(), [&](std::size_t a, std::size_t b) {
            return lex_less(V[a].p, V[b].p);
        });

        // Per edge: lexicographically smaller endpoint first.
        const std::size_t ne = out_.edges.size();
        std::vector<std::size_t> left(ne), right(ne);
        std::vector<std::vector<std::size_t>> ending(nv), starting(nv);
        for(std::size_t e = 0; e < ne; ++e)
        {
            const OverlayEdge& E = out_.edges[e];
            const bool forward = lex_less(V[E.u].p, V[E.v].p);
            left[e] = forward ? E.u : E.v;
            right[e] = forward ? E.v : E.u;
            ending[right[e]].push_back(e);
            starting[left[e]].push_back(e);
        }
        const auto upper_face = [&](std::size_t e) {
            const bool forward = out_.edges[e].u == left[e];
            return face_of_[2 * e + (forward ? 0 : 1)];
        };
        const auto lower_face = [&](std::size_t e) {
            const bool forward = out_.edges[e].u == left[e];
            return face_of_[2 * e + (forward ? 1 : 0)];
        };

        std::vector<std::size_t> status;
        std::vector<double> open_x{-std::numeric_limits<double>::infinity()};
        for(std::size_t v : events)
        {
            const Point p = V[v].p;
            std::size_t lo = 0, hi = 0;
            if(!ending[v].empty())
            {
                lo = status.size();
                hi = 0;
                for(std::size_t e : ending[v])
                {
                    const auto it = std::find(status.begin(), status.end(), e);
                    if(it == status.end())
                        degeneracy("sweep lost an edge", V[v].key);
                    const std::size_t k = static_cast<std::size_t>(it - status.begin());
                    lo = std::min(lo, k);
                    hi = std::max(hi, k + 1);
                }
                if(hi - lo != ending[v].size())
                    degeneracy("edges ending at a vertex are not adjacent", V[v].key);
            }
            else
            {
                std::size_t a = 0, b = status.size();
                while(a < b)
                {
                    const std::size_t mid = (a + b) / 2;
                    const std::size_t e = status[mid];
                    const double o = orient(V[left[e]].p, V[right[e]].p, p);
                    if(o == 0.0)
                        degeneracy("vertex on an edge", V[v].key);
                    if(o > 0.0)
                        a = mid + 1;
                    else
                        b = mid;
                }
                lo = hi = a;
            }
            for(std::size_t g = lo; g <= hi; ++g)
            {
                if(g == 0 || g == status.size())
                    continue;
                emit(status[g - 1], status[g], open_x[g], p.x, left, right, upper_face, lower_face);
            }
            status.erase(status.begin() + static_cast<long>(lo), status.begin() + static_cast<long>(hi));
            open_x.erase(open_x.begin() + static_cast<long>(lo), open_x.begin() + static_cast<long>(hi) + 1);

            std::vector<std::size_t> outgoing = starting[v];
            std::sort(outgoing.begin(), outgoing.end(), [&](std::size_t a, std::size_t b) {
                const Point da = V[right[a]].p - p, db = V[right[b]].p - p;
                return cross(da, db) > 0.0;
            });
            status.insert(status.begin() + static_cast<long>(lo), outgoing.begin(), outgoing.end());
            open_x.insert(open_x.begin() + static_cast<long>(lo), outgoing.size() + 1, p.x);
        }
    }

    template <typename UpperFace, typename LowerFace>
    void emit(
        std::size_t bottom,
        std::size_t top,
        double xl,
        double xr,
        const std::vector<std::size_t>& left,
        const std::vector<std::size_t>& right,
        UpperFace&& upper_face,
        LowerFace&& lower_face)
    {
        if(!(xr > xl))
            return;
        const std::size_t face = upper_face(bottom);
        if(face != lower_face(top))
            degeneracy("inconsistent trapezoid faces", out_.vertices[left[bottom]].key);
        if(face == outer_)
            return;
        const auto& V = out_.vertices;
        DecomposedCell c;
        c.face = face_index_[face];
        c.xl = xl;
        c.xr = xr;
        c.bottom_edge = bottom;
        c.top_edge = top;
        c.bottom_left = V[left[bottom]].p;
        c.bottom_right = V[right[bottom]].p;
        c.top_left = V[left[top]].p;
        c.top_right = V[right[top]].p;
        const Point corners[4] = {
            {xl, c.bottom(xl)}, {xr, c.bottom(xr)}, {xr, c.top(xr)}, {xl, c.top(xl)}};
        for(const Point& q : corners)
            if(c.polygon.empty() || !(c.polygon.back() == q))
                c.polygon.push_back(q);
        if(c.polygon.size() > 1 && c.polygon.front() == c.polygon.back())
            c.polygon.pop_back();
        out_.cells.push_back(std::move(c));
    }

    void finish_faces()
    {
        std::vector<double> best(out_.faces.size(), -1.0);
        for(const DecomposedCell& c : out_.cells)
        {
            const double a = c.area();
            if(a > best[c.face])
            {
                best[c.face] = a;
                out_.faces[c.face].representative = c.interior_point();
            }
        }
        for(std::size_t f = 0; f < out_.faces.size(); ++f)
        {
            if(best[f] < 0.0)
                degeneracy("face without decomposition cells", out_.vertices[out_.faces[f].boundary[0]].key);
            try
            {
                out_.faces[f].candidates = candidate_set_of_point(out_.faces[f].representative, sites_);
            }
            catch(const BoundaryError&)
            {
                degeneracy("face representative on a prefix-cell boundary", out_.vertices[out_.faces[f].boundary[0]].key);
            }
        }
        for(DecomposedCell& c : out_.cells)
            c.candidates = out_.faces[c.face].candidates;

        OverlayComplexity& cx = out_.complexity;
        for(const OverlayVertex& v : out_.vertices)
            cx.V += v.frame() ? 0 : 1;
        for(const OverlayEdge& e : out_.edges)
            cx.E += e.frame() ? 0 : 1;
        cx.F = out_.faces.size();
        cx.total = cx.V + cx.E + cx.F;
    }

    const PrefixCellSet& cells_;
    const std::vector<Point>& sites_;
    Box box_;
    std::vector<OverlaySegment> segments_;
    std::map<VertexKey, Point> coords_;
    std::map<VertexKey, std::size_t> vertex_ids_;
    std::vector<Point> edge_dir_;
    std::vector<std::size_t> next_;
    std::vector<std::size_t> face_of_;
    std::vector<std::vector<std::size_t>> cycles_;
    std::vector<std::size_t> face_index_;
    std::size_t outer_ = 0;
    OverlayArrangement out_;
};

} // namespace detail

/// Planar subdivision induced by all prefix-cell boundaries, with candidate
/// sets evaluated at one interior representative per face. Throws
/// DegeneracyError when the input is not in general position.
inline OverlayArrangement build_overlay(const PrefixCellSet& cells)
{
    if(cells.cells.empty())
        throw Error("build_overlay: no cells");
    return detail::OverlayBuilder(cells).build();
}

/// Candidate set of every bounded face, evaluated at its representative.
inline std::vector<CandidateSet> face_candidate_sets(const OverlayArrangement& A, const Ordering& ord)
{
    const std::vector<Point> sites = ord.locations();
    std::vector<CandidateSet> out;
    out.reserve(A.faces.size());
    for(const OverlayFace& f : A.faces)
        out.push_back(candidate_set_of_point(f.representative, sites));
    return out;
}

/// Vertical decomposition of the bounded faces.
inline const std::vector<DecomposedCell>& decompose(const OverlayArrangement& A)
{
    return A.cells;
}

inline OverlayComplexity overlay_complexity(const OverlayArrangement& A)
{
    return A.complexity;
}

/// Index of the decomposition cell containing `x`, if any.
inline std::optional<std::size_t> find_cell(const OverlayArrangement& A, Point x)
{
    for(std::size_t k = 0; k < A.cells.size(); ++k)
        if(A.cells[k].contains(x))
            return k;
    return std::nullopt;
}

} // namespace mwv

#endif // MWV_OVERLAY_HPP
