#ifndef MWV_PREFIX_CELLS_HPP
#define MWV_PREFIX_CELLS_HPP

/**
 * @file
 * Weight orderings and prefix Voronoi cells: cell i is the unweighted
 * Voronoi cell of the i-th site among the first i sites of the ordering,
 * clipped to a world box.
 */

#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace mwv
{

/// Sites sorted by (weight, tiebreak) ascending; sites[k].rank == k + 1.
class Ordering
{
public:
    Ordering() = default;

    /// Sorts `sites` lexicographically by (weight, tiebreak) and assigns
    /// ranks. Throws on nonpositive weights, duplicate (weight, tiebreak)
    /// pairs or coincident locations.
    static Ordering from_sites(std::vector<Site> sites)
    {
        for(const Site& s : sites)
        {
            if(!(s.weight > 0.0) || !std::isfinite(s.weight))
                throw Error("site weight must be positive and finite");
            if(!std::isfinite(s.location.x) || !std::isfinite(s.location.y))
                throw Error("site coordinates must be finite");
        }
        std::stable_sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
            return a.weight < b.weight || (a.weight == b.weight && a.tiebreak < b.tiebreak);
        });
        for(std::size_t k = 0; k < sites.size(); ++k)
        {
            sites[k].rank = k + 1;
            if(k > 0 && sites[k].weight == sites[k - 1].weight &&
               sites[k].tiebreak == sites[k - 1].tiebreak)
                throw Error("duplicate (weight, tiebreak) pair");
        }
        Ordering ord;
        ord.sites_ = std::move(sites);
        ord.check_locations();
        return ord;
    }

    std::size_t size() const { return sites_.size(); }
    bool empty() const { return sites_.empty(); }
    const std::vector<Site>& sites() const { return sites_; }
    /// 0-based access; site(k).rank == k + 1.
    const Site& site(std::size_t k) const { return sites_[k]; }
    const Site& operator[](std::size_t k) const { return sites_[k]; }

    std::vector<Point> locations() const
    {
        std::vector<Point> out;
        out.reserve(sites_.size());
        for(const Site& s : sites_)
            out.push_back(s.location);
        return out;
    }

    double scale() const { return instance_scale(sites_); }

    bool all_weights_distinct() const
    {
        for(std::size_t k = 1; k < sites_.size(); ++k)
            if(sites_[k].weight == sites_[k - 1].weight)
                return false;
        return true;
    }

private:
    void check_locations() const
    {
        std::vector<Point> pts = locations();
        std::sort(pts.begin(), pts.end(), [](Point a, Point b) {
            return a.x < b.x || (a.x == b.x && a.y < b.y);
        });
        for(std::size_t k = 1; k < pts.size(); ++k)
            if(pts[k] == pts[k - 1])
                throw Error("coincident site locations");
    }

    std::vector<Site> sites_;
};

/// Clip line keeping the points at least as close to `self` as to `other`.
inline ClipLine nearer_halfplane(Point self, Point other)
{
    return {midpoint(self, other), other - self};
}

/// Prefix cells of an ordering, all clipped to the same box.
struct PrefixCellSet
{
    std::vector<Point> sites; ///< locations in ordering order
    std::vector<ConvexRegion> cells; ///< cells[k] is the cell of rank k + 1
    Box box;
    std::size_t total_vertices = 0;
    double scale = 1.0;
};

namespace detail
{

/// Cell of sites[i] among sites[0..i], clipped to `box`. Edge supports are
/// neighbour indices or frame sides. Neighbours are visited nearest first;
/// once a neighbour is farther than twice the cell radius no later one can
/// cut the cell.
inline ConvexRegion prefix_cell_impl(const std::vector<Point>& sites, std::size_t i, const Box& box)
{
    const Point self = sites[i];
    std::vector<std::size_t> order(i);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> d2(i);
    for(std::size_t j = 0; j < i; ++j)
        d2[j] = norm2(sites[j] - self);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
    });

    const auto edge_line = [&](int id) {
        return is_frame_support(id)
                   ? frame_line(box, support_side(id))
                   : nearer_halfplane(self, sites[static_cast<std::size_t>(id)]);
    };
    const auto radius2 = [&](const ConvexRegion& r) {
        double m = 0.0;
        for(const Point& v : r.vertices)
            m = std::max(m, norm2(v - self));
        return m;
    };

    ConvexRegion cell = box_region(box);
    double r2 = radius2(cell);
    for(std::size_t j : order)
    {
        if(d2[j] > 4.0 * r2)
            break;
        cell = clip(cell, nearer_halfplane(self, sites[j]), static_cast<int>(j), edge_line);
        if(cell.empty())
            break;
        r2 = radius2(cell);
    }
    return cell;
}

} // namespace detail

/// Prefix cell of rank `i` (1-based): the points of `box` whose nearest
/// site among ranks 1..i is rank i.
inline ConvexRegion prefix_cell(std::size_t i, const Ordering& ord, const Box& box)
{
    if(i < 1 || i > ord.size())
        throw Error("prefix_cell: rank out of range");
    if(box.empty())
        throw Error("world box is empty");
    return detail::prefix_cell_impl(ord.locations(), i - 1, box);
}

inline PrefixCellSet all_prefix_cells(const std::vector<Point>& sites, const Box& box)
{
    if(sites.empty())
        throw Error("all_prefix_cells: empty ordering");
    if(box.empty())
        throw Error("world box is empty");
    PrefixCellSet out;
    out.sites = sites;
    out.box = box;
    out.scale = instance_scale(sites);
    out.cells.reserve(sites.size());
    for(std::size_t i = 0; i < sites.size(); ++i)
    {
        out.cells.push_back(detail::prefix_cell_impl(sites, i, box));
        out.total_vertices += out.cells.back().size();
    }
    return out;
}

inline PrefixCellSet all_prefix_cells(const Ordering& ord, const Box& box)
{
    return all_prefix_cells(ord.locations(), box);
}

//------------------------------------------------------------------------------
// World box
//------------------------------------------------------------------------------

struct WorldBoxOptions
{
    /// Inflation of the feature bounding box about its center.
    double factor = 2.0;
    /// Also enclose every feature of the weighted diagram (Apollonius
    /// circles and circumcenters of equal-weight triples).
    bool diagram_features = false;
    /// Size of the provisional box used to discover prefix-cell vertices,
    /// as a multiple of the feature extent.
    double probe_factor = 1e3;
};

namespace detail
{

struct Extent
{
    double xmin = std::numeric_limits<double>::infinity();
    double ymin = std::numeric_limits<double>::infinity();
    double xmax = -std::numeric_limits<double>::infinity();
    double ymax = -std::numeric_limits<double>::infinity();

    void add(Point p)
    {
        if(!std::isfinite(p.x) || !std::isfinite(p.y))
            return;
        xmin = std::min(xmin, p.x);
        ymin = std::min(ymin, p.y);
        xmax = std::max(xmax, p.x);
        ymax = std::max(ymax, p.y);
    }

    /// Box with half extents at least `min_half` on each axis.
    Box box(double min_half) const
    {
        const Point c{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
        const double hw = std::max(0.5 * (xmax - xmin), min_half);
        const double hh = std::max(0.5 * (ymax - ymin), min_half);
        return {c.x - hw, c.y - hh, c.x + hw, c.y + hh};
    }
};

inline void add_circumcenter(Extent& ext, Point a, Point b, Point c)
{
    const auto p = line_intersection(nearer_halfplane(a, b), nearer_halfplane(a, c));
    if(p)
        ext.add(*p);
}

} // namespace detail

/// Box containing every bounded combinatorial feature of the instance:
/// site locations, vertices of all prefix cells and, optionally, the
/// features of the weighted diagram. The feature bounding box is inflated
/// by `opts.factor` about its center.
inline Box compute_world_box(const Ordering& ord, const WorldBoxOptions& opts = {})
{
    if(ord.empty())
        throw Error("compute_world_box: empty ordering");
    const double scale = ord.scale();
    const std::vector<Point> pts = ord.locations();
    detail::Extent ext;
    for(const Point& p : pts)
        ext.add(p);

    if(opts.diagram_features)
    {
        const auto& s = ord.sites();
        for(std::size_t a = 0; a < s.size(); ++a)
            for(std::size_t b = a + 1; b < s.size(); ++b)
            {
                if(s[a].weight == s[b].weight)
                    continue;
                const auto c = std::get<Circle>(apollonius_bisector(s[a], s[b]));
                ext.add({c.center.x - c.radius, c.center.y - c.radius});
                ext.add({c.center.x + c.radius, c.center.y + c.radius});
            }
        // Vertices of all-equal-weight triples lie on no circle.
        for(std::size_t lo = 0; lo < s.size();)
        {
            std::size_t hi = lo;
            while(hi < s.size() && s[hi].weight == s[lo].weight)
                ++hi;
            for(std::size_t a = lo; a < hi; ++a)
                for(std::size_t b = a + 1; b < hi; ++b)
                    for(std::size_t c = b + 1; c < hi; ++c)
                        detail::add_circumcenter(ext, pts[a], pts[b], pts[c]);
            lo = hi;
        }
    }

    const Box base = ext.box(0.5 * scale);
    const double half = std::max(base.width(), base.height()) * 0.5 * opts.probe_factor;
    const Point c = base.center();
    const Box probe{c.x - half, c.y - half, c.x + half, c.y + half};
    const PrefixCellSet cells = all_prefix_cells(pts, probe);
    for(const ConvexRegion& cell : cells.cells)
    {
        const std::size_t m = cell.size();
        for(std::size_t k = 0; k < m; ++k)
        {
            const int before = cell.edge_support[(k + m - 1) % m];
            const int after = cell.edge_support[k];
            if(!is_frame_support(before) && !is_frame_support(after))
                ext.add(cell.vertices[k]);
        }
    }
    // Edges running out to the probe frame can cross each other beyond every
    // cell vertex. Only crossings inside the probe are seen.
    struct Ray
    {
        Point p, q;
        std::size_t cell;
        int other;
    };
    std::vector<Ray> rays;
    for(std::size_t i = 0; i < cells.cells.size(); ++i)
    {
        const ConvexRegion& cell = cells.cells[i];
        const std::size_t m = cell.size();
        for(std::size_t k = 0; k < m; ++k)
        {
            const int id = cell.edge_support[k];
            if(is_frame_support(id))
                continue;
            if(is_frame_support(cell.edge_support[(k + m - 1) % m]) || is_frame_support(cell.edge_support[(k + 1) % m]))
                rays.push_back({cell.vertices[k], cell.vertices[(k + 1) % m], i, id});
        }
    }
    for(std::size_t a = 0; a < rays.size(); ++a)
        for(std::size_t b = a + 1; b < rays.size(); ++b)
        {
            const Ray& r = rays[a];
            const Ray& t = rays[b];
            if(r.cell == t.cell)
                continue;
            const double o1 = orient(r.p, r.q, t.p), o2 = orient(r.p, r.q, t.q);
            const double o3 = orient(t.p, t.q, r.p), o4 = orient(t.p, t.q, r.q);
            if(!(((o1 < 0.0 && o2 > 0.0) || (o1 > 0.0 && o2 < 0.0)) && ((o3 < 0.0 && o4 > 0.0) || (o3 > 0.0 && o4 < 0.0))))
                continue;
            const auto x = line_intersection(
                nearer_halfplane(pts[r.cell], pts[static_cast<std::size_t>(r.other)]),
                nearer_halfplane(pts[t.cell], pts[static_cast<std::size_t>(t.other)]));
            if(x && probe.contains(*x))
                ext.add(*x);
        }
    // Snap outward to a dyadic grid. Extremes often come in pairs on one
    // bisector, which would otherwise put a box corner exactly on that line.
    const Box b = ext.box(0.5 * scale).scaled(opts.factor);
    const double g = std::exp2(std::floor(std::log2(std::max(b.width(), b.height()))) - 6);
    return {std::floor(b.xmin / g) * g - g,
            std::floor(b.ymin / g) * g - g,
            std::ceil(b.xmax / g) * g + g,
            std::ceil(b.ymax / g) * g + g};
}

} // namespace mwv

#endif // MWV_PREFIX_CELLS_HPP
