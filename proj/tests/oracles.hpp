// Independent reference computations for the unit and acceptance tests.
// They share no code with the library beyond the basic value types.

#ifndef MWV_TESTS_ORACLES_HPP
#define MWV_TESTS_ORACLES_HPP

#include "mwv/mwv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle
{

using mwv::Point;

/// Random instance in the unit square with i.i.d. uniform[1,2] weights.
inline mwv::Ordering random_ordering(std::size_t n, std::uint64_t seed)
{
    mwv::Rng rng(seed);
    auto pts = mwv::uniform_points(n, {0.0, 0.0, 1.0, 1.0}, rng);
    return mwv::sample_ordering(std::move(pts), mwv::IidModel{mwv::UniformWeights{1.0, 2.0}}, rng);
}

/// Overlay of an ordering in its default world box.
inline mwv::OverlayArrangement overlay_of(const mwv::Ordering& ord, double factor = 2.0, bool diagram = false)
{
    mwv::WorldBoxOptions opts;
    opts.factor = factor;
    opts.diagram_features = diagram;
    return mwv::build_overlay(mwv::all_prefix_cells(ord, mwv::compute_world_box(ord, opts)));
}

/// Index (0-based) of the site nearest to x among sites[0..last], or
/// nothing when the two nearest are within `band` of a tie.
inline std::optional<std::size_t> prefix_nearest(Point x, const std::vector<Point>& sites, std::size_t last, double band)
{
    std::size_t best = 0;
    double d1 = std::hypot(x.x - sites[0].x, x.y - sites[0].y), d2 = INFINITY;
    for(std::size_t j = 1; j <= last; ++j)
    {
        const double d = std::hypot(x.x - sites[j].x, x.y - sites[j].y);
        if(d < d1)
        {
            d2 = d1;
            d1 = d;
            best = j;
        }
        else
            d2 = std::min(d2, d);
    }
    if(d2 - d1 <= band)
        return std::nullopt;
    return best;
}

/// Candidate set by definition: ranks whose distance beats every earlier
/// one. Nothing when some comparison is within `band`.
inline std::optional<std::vector<std::size_t>> candidate_ranks(Point x, const std::vector<Point>& sites, double band)
{
    std::vector<std::size_t> out{1};
    double best = std::hypot(x.x - sites[0].x, x.y - sites[0].y);
    for(std::size_t i = 1; i < sites.size(); ++i)
    {
        const double d = std::hypot(x.x - sites[i].x, x.y - sites[i].y);
        if(std::abs(d - best) <= band)
            return std::nullopt;
        if(d < best)
        {
            out.push_back(i + 1);
            best = d;
        }
    }
    return out;
}

//------------------------------------------------------------------------------
// Naive arrangement: all-pairs segment intersection, metric vertex merging,
// and a face walk over the resulting planar graph.
//------------------------------------------------------------------------------

struct NaiveCounts
{
    std::size_t V = 0, E = 0, F = 0; ///< interior vertices, interior edges, bounded faces
    std::size_t V_all = 0, E_all = 0, F_all = 0;
};

inline NaiveCounts naive_arrangement(const mwv::PrefixCellSet& P)
{
    struct Seg
    {
        Point a, b;
        bool frame;
    };
    std::vector<Seg> segs;
    for(const auto& cell : P.cells)
        for(std::size_t k = 0; k < cell.size(); ++k)
            if(cell.edge_support[k] >= 0)
                segs.push_back({cell.vertices[k], cell.vertices[(k + 1) % cell.size()], false});
    const auto c = P.box.corners();
    for(int s = 0; s < 4; ++s)
        segs.push_back({c[s], c[(s + 1) % 4], true});

    const double size = std::max(P.box.width(), P.box.height());
    const double tol = 1e-9 * size;

    std::vector<Point> pts;
    const auto add_point = [&](Point p) {
        for(std::size_t k = 0; k < pts.size(); ++k)
            if(std::hypot(pts[k].x - p.x, pts[k].y - p.y) <= tol)
                return k;
        pts.push_back(p);
        return pts.size() - 1;
    };
    for(const Seg& s : segs)
    {
        add_point(s.a);
        add_point(s.b);
    }
    for(std::size_t i = 0; i < segs.size(); ++i)
        for(std::size_t j = i + 1; j < segs.size(); ++j)
        {
            const Point p = segs[i].a, r = {segs[i].b.x - p.x, segs[i].b.y - p.y};
            const Point q = segs[j].a, s = {segs[j].b.x - q.x, segs[j].b.y - q.y};
            const double den = r.x * s.y - r.y * s.x;
            if(den == 0.0)
                continue;
            const Point qp = {q.x - p.x, q.y - p.y};
            const double t = (qp.x * s.y - qp.y * s.x) / den;
            const double u = (qp.x * r.y - qp.y * r.x) / den;
            const double et = tol / std::hypot(r.x, r.y), eu = tol / std::hypot(s.x, s.y);
            if(t < -et || t > 1 + et || u < -eu || u > 1 + eu)
                continue;
            add_point({p.x + t * r.x, p.y + t * r.y});
        }

    // Split every segment at the points lying on it.
    std::set<std::pair<std::size_t, std::size_t>> edges;
    std::set<std::pair<std::size_t, std::size_t>> interior_edges;
    for(const Seg& s : segs)
    {
        const Point d = {s.b.x - s.a.x, s.b.y - s.a.y};
        const double len = std::hypot(d.x, d.y);
        std::vector<std::pair<double, std::size_t>> on;
        for(std::size_t k = 0; k < pts.size(); ++k)
        {
            const Point w = {pts[k].x - s.a.x, pts[k].y - s.a.y};
            const double dist = std::abs(d.x * w.y - d.y * w.x) / len;
            const double t = (d.x * w.x + d.y * w.y) / (len * len);
            if(dist <= tol && t >= -tol / len && t <= 1 + tol / len)
                on.emplace_back(t, k);
        }
        std::sort(on.begin(), on.end());
        for(std::size_t k = 0; k + 1 < on.size(); ++k)
        {
            const auto e = std::minmax(on[k].second, on[k + 1].second);
            edges.insert(e);
            if(!s.frame)
                interior_edges.insert(e);
        }
    }

    // Face walk.
    std::vector<std::vector<std::size_t>> adj(pts.size());
    for(const auto& [u, v] : edges)
    {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    for(std::size_t u = 0; u < pts.size(); ++u)
        std::sort(adj[u].begin(), adj[u].end(), [&](std::size_t a, std::size_t b) {
            return std::atan2(pts[a].y - pts[u].y, pts[a].x - pts[u].x) <
                   std::atan2(pts[b].y - pts[u].y, pts[b].x - pts[u].x);
        });
    std::set<std::pair<std::size_t, std::size_t>> used;
    std::size_t faces = 0;
    for(std::size_t u = 0; u < pts.size(); ++u)
        for(std::size_t v : adj[u])
        {
            if(used.count({u, v}))
                continue;
            ++faces;
            std::size_t a = u, b = v;
            while(!used.count({a, b}))
            {
                used.insert({a, b});
                // next: at b, the neighbour just before a in angular order
                const auto& nb = adj[b];
                const std::size_t pos = static_cast<std::size_t>(std::find(nb.begin(), nb.end(), a) - nb.begin());
                const std::size_t nxt = nb[(pos + nb.size() - 1) % nb.size()];
                a = b;
                b = nxt;
            }
        }

    NaiveCounts out;
    out.V_all = pts.size();
    out.E_all = edges.size();
    out.F_all = faces;
    const mwv::Box& B = P.box;
    for(const Point& p : pts)
        if(std::abs(p.x - B.xmin) > tol && std::abs(p.x - B.xmax) > tol && std::abs(p.y - B.ymin) > tol &&
           std::abs(p.y - B.ymax) > tol)
            ++out.V;
    out.E = interior_edges.size();
    out.F = faces - 1;
    return out;
}

//------------------------------------------------------------------------------
// Weighted diagram by grid labelling: junctions of three labels.
//------------------------------------------------------------------------------

inline std::set<std::array<std::size_t, 3>> grid_label_triples(const mwv::Ordering& ord, const mwv::Box& region, double step)
{
    const std::size_t nx = static_cast<std::size_t>(std::ceil(region.width() / step)) + 1;
    const std::size_t ny = static_cast<std::size_t>(std::ceil(region.height() / step)) + 1;
    const auto label = [&](std::size_t i, std::size_t j) {
        const Point x{region.xmin + step * static_cast<double>(i), region.ymin + step * static_cast<double>(j)};
        std::size_t best = 0;
        double bd = INFINITY;
        for(std::size_t k = 0; k < ord.size(); ++k)
        {
            const double d = ord[k].weight * std::hypot(x.x - ord[k].location.x, x.y - ord[k].location.y);
            if(d < bd)
            {
                bd = d;
                best = k + 1;
            }
        }
        return best;
    };
    std::vector<std::size_t> prev(ny), cur(ny);
    for(std::size_t j = 0; j < ny; ++j)
        prev[j] = label(0, j);
    std::set<std::array<std::size_t, 3>> out;
    for(std::size_t i = 1; i < nx; ++i)
    {
        for(std::size_t j = 0; j < ny; ++j)
            cur[j] = label(i, j);
        for(std::size_t j = 0; j + 1 < ny; ++j)
        {
            std::set<std::size_t> ls{prev[j], prev[j + 1], cur[j], cur[j + 1]};
            if(ls.size() == 3)
            {
                auto it = ls.begin();
                std::array<std::size_t, 3> t{};
                for(auto& v : t)
                    v = *it++;
                out.insert(t);
            }
        }
        std::swap(prev, cur);
    }
    return out;
}

//------------------------------------------------------------------------------
// Lower envelope of lines by brute force.
//------------------------------------------------------------------------------

/// Pairs (a < b) whose crossing lies on the lower envelope of `active`,
/// strictly inside (lo, hi).
inline std::vector<std::pair<std::size_t, std::size_t>> envelope_vertices(
    const std::vector<mwv::AffineFunction>& f, const std::vector<std::size_t>& active, double lo, double hi)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for(std::size_t x = 0; x < active.size(); ++x)
        for(std::size_t y = x + 1; y < active.size(); ++y)
        {
            const std::size_t a = active[x], b = active[y];
            if(f[a].slope == f[b].slope)
                continue;
            const double t = (f[b].intercept - f[a].intercept) / (f[a].slope - f[b].slope);
            if(!(t > lo && t < hi))
                continue;
            const double v = f[a](t);
            bool lowest = true;
            for(std::size_t c : active)
                if(c != a && c != b && f[c](t) < v - 1e-12 * std::max(1.0, std::abs(v)))
                {
                    lowest = false;
                    break;
                }
            if(lowest)
                out.emplace_back(std::min(a, b), std::max(a, b));
        }
    std::sort(out.begin(), out.end());
    return out;
}

/// New envelope vertices at each insertion step.
inline std::vector<std::size_t> envelope_steps(
    const std::vector<mwv::AffineFunction>& f, const std::vector<std::size_t>& perm, double lo = -INFINITY, double hi = INFINITY)
{
    std::vector<std::size_t> active, steps;
    std::vector<std::pair<std::size_t, std::size_t>> prev;
    for(std::size_t id : perm)
    {
        active.push_back(id);
        auto cur = envelope_vertices(f, active, lo, hi);
        std::size_t fresh = 0;
        for(const auto& v : cur)
            fresh += !std::binary_search(prev.begin(), prev.end(), v);
        steps.push_back(fresh);
        prev = std::move(cur);
    }
    return steps;
}

} // namespace oracle

#endif // MWV_TESTS_ORACLES_HPP
