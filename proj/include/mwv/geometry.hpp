#ifndef MWV_GEOMETRY_HPP
#define MWV_GEOMETRY_HPP

/**
 * @file
 * Planar primitives: weighted distance, Apollonius bisectors, curve
 * intersections, triple-equidistant points and half-plane intersection.
 *
 * Predicates compare squared forms where possible. Tolerances are relative
 * to an instance scale (the diameter of the site bounding box).
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

namespace mwv
{

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Input is not in general position; callers are expected to jitter.
class DegeneracyError : public Error
{
public:
    using Error::Error;
};

struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend constexpr Point operator*(Point a, double s) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Point a, Point b) = default;
};

constexpr double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
constexpr double norm2(Point a) { return dot(a, a); }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }
constexpr Point perp(Point a) { return {-a.y, a.x}; }
constexpr Point midpoint(Point a, Point b) { return {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}; }

/// Twice the signed area of (a, b, c); positive for a counterclockwise turn.
constexpr double orient(Point a, Point b, Point c) { return cross(b - a, c - a); }

/// A weighted point site. `rank` is the 1-based position in the
/// (weight, tiebreak) ordering; 0 until an ordering is assigned.
struct Site
{
    Point location;
    double weight = 1.0;
    std::size_t rank = 0;
    double tiebreak = 0.0;
};

/// Numeric tolerances, relative to the instance scale.
struct Tolerance
{
    double scale = 1.0;
    double eps = 1e-9;
    double dedup = 1e-7;

    double predicate() const { return eps * scale; }
    double merge() const { return dedup * scale; }
};

/// Diameter of the bounding box of a point set (1 for fewer than two
/// distinct points).
inline double instance_scale(const std::vector<Point>& pts)
{
    if(pts.empty())
        return 1.0;
    double xmin = pts[0].x, xmax = pts[0].x, ymin = pts[0].y, ymax = pts[0].y;
    for(const Point& p : pts)
    {
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const double d = std::hypot(xmax - xmin, ymax - ymin);
    return d > 0.0 ? d : 1.0;
}

inline double instance_scale(const std::vector<Site>& sites)
{
    std::vector<Point> pts;
    pts.reserve(sites.size());
    for(const Site& s : sites)
        pts.push_back(s.location);
    return instance_scale(pts);
}

inline double weighted_distance(const Site& s, Point x)
{
    return s.weight * distance(x, s.location);
}

/// Squared weighted distance; used for comparisons.
inline double weighted_distance2(const Site& s, Point x)
{
    return s.weight * s.weight * norm2(x - s.location);
}

//------------------------------------------------------------------------------
// Bisector curves
//------------------------------------------------------------------------------

/// A line through `origin` with unit `direction`.
struct Line
{
    Point origin;
    Point direction;
};

struct Circle
{
    Point center;
    double radius = 0.0;
};

/// Weighted bisector of two point sites: a line for equal weights, an
/// Apollonius circle otherwise.
using BisectorCurve = std::variant<Line, Circle>;

inline bool is_line(const BisectorCurve& c) { return std::holds_alternative<Line>(c); }

/// Locus {x : w_s |x - p_s| = w_r |x - p_r|}.
inline BisectorCurve apollonius_bisector(const Site& s, const Site& r)
{
    const Point ps = s.location, pr = r.location;
    if(ps == pr)
        throw Error("degenerate site pair");
    const double ws2 = s.weight * s.weight;
    const double wr2 = r.weight * r.weight;
    if(ws2 == wr2)
    {
        const Point d = pr - ps;
        const Point dir = perp(d) * (1.0 / norm(d));
        return Line{midpoint(ps, pr), dir};
    }
    const double denom = ws2 - wr2;
    // Expanding w_s^2 |x-p_s|^2 = w_r^2 |x-p_r|^2 gives a circle centred at
    // (w_s^2 p_s - w_r^2 p_r) / (w_s^2 - w_r^2).
    const Point center = (ws2 * ps - wr2 * pr) * (1.0 / denom);
    const double radius = s.weight * r.weight * distance(ps, pr) / std::abs(denom);
    return Circle{center, radius};
}

/// Result of intersecting two bisector curves: up to two points, or the
/// marker that both describe the same curve.
struct CurveIntersection
{
    std::vector<Point> points;
    bool identical = false;
};

namespace detail
{

inline double curve_size(const BisectorCurve& c)
{
    if(const auto* circ = std::get_if<Circle>(&c))
        return norm(circ->center) + circ->radius;
    const auto& l = std::get<Line>(c);
    return norm(l.origin);
}

inline CurveIntersection intersect(const Line& a, const Line& b, double tol)
{
    CurveIntersection out;
    const double den = cross(a.direction, b.direction);
    const Point w = b.origin - a.origin;
    if(std::abs(den) <= 1e-15)
    {
        if(std::abs(cross(a.direction, w)) <= tol)
            out.identical = true;
        return out;
    }
    const double t = cross(w, b.direction) / den;
    out.points.push_back(a.origin + t * a.direction);
    return out;
}

inline CurveIntersection intersect(const Line& l, const Circle& c, double tol)
{
    CurveIntersection out;
    const double t0 = dot(c.center - l.origin, l.direction);
    const Point foot = l.origin + t0 * l.direction;
    const double h = distance(foot, c.center);
    if(h > c.radius + tol)
        return out;
    const double half2 = (c.radius - h) * (c.radius + h);
    if(half2 <= tol * tol || h >= c.radius)
    {
        out.points.push_back(foot);
        return out;
    }
    const double half = std::sqrt(half2);
    out.points.push_back(foot - half * l.direction);
    out.points.push_back(foot + half * l.direction);
    return out;
}

inline CurveIntersection intersect(const Circle& a, const Circle& b, double tol)
{
    CurveIntersection out;
    const Point dv = b.center - a.center;
    const double d = norm(dv);
    if(d <= tol)
    {
        if(std::abs(a.radius - b.radius) <= tol)
            out.identical = true;
        return out;
    }
    if(d > a.radius + b.radius + tol || d < std::abs(a.radius - b.radius) - tol)
        return out;
    const double along = (d * d + a.radius * a.radius - b.radius * b.radius) / (2.0 * d);
    const Point u = dv * (1.0 / d);
    const Point base = a.center + along * u;
    const double half2 = (a.radius - along) * (a.radius + along);
    if(half2 <= tol * tol)
    {
        out.points.push_back(base);
        return out;
    }
    const double half = std::sqrt(half2);
    out.points.push_back(base - half * perp(u));
    out.points.push_back(base + half * perp(u));
    return out;
}

} // namespace detail

/// Intersect two bisector curves. Tangency yields one point; coincident
/// curves set `identical` and return no points.
inline CurveIntersection curve_intersection(
    const BisectorCurve& b1,
    const BisectorCurve& b2,
    double eps = 1e-9)
{
    const double tol = eps * std::max({1.0, detail::curve_size(b1), detail::curve_size(b2)});
    return std::visit(
        [tol](const auto& x, const auto& y) -> CurveIntersection {
            using X = std::decay_t<decltype(x)>;
            using Y = std::decay_t<decltype(y)>;
            if constexpr(std::is_same_v<X, Circle> && std::is_same_v<Y, Line>)
                return detail::intersect(y, x, tol);
            else
                return detail::intersect(x, y, tol);
        },
        b1,
        b2);
}

/// Residual |f_a(x) - f_b(x)| relative to the larger of the two values.
inline double relative_gap(const Site& a, const Site& b, Point x)
{
    const double fa = weighted_distance(a, x);
    const double fb = weighted_distance(b, x);
    const double m = std::max(fa, fb);
    return m > 0.0 ? std::abs(fa - fb) / m : 0.0;
}

/// Points weighted-equidistant to three sites, found as the intersection of
/// two pairwise bisectors and revalidated against the third pair. Output is
/// sorted lexicographically.
inline std::vector<Point> triple_equidistant_points(
    const Site& si,
    const Site& sj,
    const Site& sk,
    const Tolerance& tol = {})
{
    const CurveIntersection hits =
        curve_intersection(apollonius_bisector(si, sj), apollonius_bisector(si, sk), tol.eps);
    std::vector<Point> out;
    if(hits.identical)
        return out;
    for(const Point& p : hits.points)
    {
        if(!std::isfinite(p.x) || !std::isfinite(p.y))
            continue;
        if(relative_gap(sj, sk, p) <= tol.dedup && relative_gap(si, sj, p) <= tol.dedup)
            out.push_back(p);
    }
    std::sort(out.begin(), out.end(), [](Point a, Point b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    return out;
}

//------------------------------------------------------------------------------
// Half-planes and convex regions
//------------------------------------------------------------------------------

/// {(x, y) : a x + b y <= c}
struct HalfPlane
{
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool contains(Point p) const { return a * p.x + b * p.y <= c; }
};

/// Axis-aligned rectangle.
struct Box
{
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 0.0;
    double ymax = 0.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    Point center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
    bool empty() const { return !(xmax > xmin && ymax > ymin); }
    bool contains(Point p) const
    {
        return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
    }
    /// Corners counterclockwise from (xmin, ymin).
    std::array<Point, 4> corners() const
    {
        return {Point{xmin, ymin}, Point{xmax, ymin}, Point{xmax, ymax}, Point{xmin, ymax}};
    }
    /// Same center, half extents multiplied by `factor`.
    Box scaled(double factor) const
    {
        const Point c = center();
        const double hw = 0.5 * width() * factor, hh = 0.5 * height() * factor;
        return {c.x - hw, c.y - hh, c.x + hw, c.y + hh};
    }
};

/// Frame sides of a box, in counterclockwise order starting at the bottom.
enum class Side : int
{
    Bottom = 0,
    Right = 1,
    Top = 2,
    Left = 3
};

/// Support id of a frame edge in a ConvexRegion.
constexpr int frame_support(Side s) { return -1 - static_cast<int>(s); }
constexpr bool is_frame_support(int id) { return id < 0; }
constexpr Side support_side(int id) { return static_cast<Side>(-1 - id); }

/// Convex polygon, counterclockwise. Edge k runs from vertices[k] to
/// vertices[k+1] and lies on the line identified by edge_support[k]: a
/// non-negative caller id, or a frame side (negative).
struct ConvexRegion
{
    std::vector<Point> vertices;
    std::vector<int> edge_support;

    bool empty() const { return vertices.size() < 3; }
    std::size_t size() const { return vertices.size(); }
    bool touches_frame() const
    {
        return std::any_of(edge_support.begin(), edge_support.end(), is_frame_support);
    }
    double area() const
    {
        double a = 0.0;
        for(std::size_t k = 0; k < vertices.size(); ++k)
            a += cross(vertices[k], vertices[(k + 1) % vertices.size()]);
        return 0.5 * a;
    }
    /// Closed containment with an absolute slack.
    bool contains(Point p, double slack = 0.0) const
    {
        if(empty())
            return false;
        for(std::size_t k = 0; k < vertices.size(); ++k)
        {
            const Point a = vertices[k], b = vertices[(k + 1) % vertices.size()];
            const double len = distance(a, b);
            if(len == 0.0)
                continue;
            if(orient(a, b, p) < -slack * len)
                return false;
        }
        return true;
    }
};

/// Oriented line used by the clipper; the kept side is
/// normal . (p - origin) <= 0.
struct ClipLine
{
    Point origin;
    Point normal;

    double side(Point p) const { return dot(normal, p - origin); }
};

inline ClipLine clip_line(const HalfPlane& h)
{
    const double n2 = h.a * h.a + h.b * h.b;
    return {Point{h.a * h.c / n2, h.b * h.c / n2}, Point{h.a, h.b}};
}

inline ClipLine frame_line(const Box& box, Side s)
{
    switch(s)
    {
    case Side::Bottom:
        return {{box.xmin, box.ymin}, {0.0, -1.0}};
    case Side::Right:
        return {{box.xmax, box.ymin}, {1.0, 0.0}};
    case Side::Top:
        return {{box.xmax, box.ymax}, {0.0, 1.0}};
    case Side::Left:
    default:
        return {{box.xmin, box.ymax}, {-1.0, 0.0}};
    }
}

/// Intersection of the boundary lines of two clip lines, if not parallel.
inline std::optional<Point> line_intersection(const ClipLine& a, const ClipLine& b)
{
    const Point da = perp(a.normal);
    const double den = dot(b.normal, da);
    if(den == 0.0)
        return std::nullopt;
    const double t = dot(b.normal, b.origin - a.origin) / den;
    Point p = a.origin + t * da;
    // One correction step from the residuals at p. The first estimate can
    // carry the rounding of a distant origin; the residuals do not.
    const double det = cross(a.normal, b.normal);
    const double ra = dot(a.normal, p - a.origin);
    const double rb = dot(b.normal, p - b.origin);
    p.x += (rb * a.normal.y - ra * b.normal.y) / det;
    p.y += (ra * b.normal.x - rb * a.normal.x) / det;
    return p;
}

/// The box as a ConvexRegion with all edges on the frame.
inline ConvexRegion box_region(const Box& box)
{
    ConvexRegion r;
    const auto c = box.corners();
    r.vertices.assign(c.begin(), c.end());
    r.edge_support = {
        frame_support(Side::Bottom),
        frame_support(Side::Right),
        frame_support(Side::Top),
        frame_support(Side::Left)};
    return r;
}

/// Clip a convex region by one oriented line. `edge_line` maps an edge
/// support id to its line so new vertices are computed as line-line
/// intersections rather than by interpolation.
template <typename EdgeLineFn>
ConvexRegion clip(const ConvexRegion& poly, const ClipLine& line, int support, EdgeLineFn&& edge_line)
{
    const std::size_t m = poly.vertices.size();
    if(m == 0)
        return poly;
    std::vector<double> side(m);
    bool any_out = false, any_in = false;
    for(std::size_t k = 0; k < m; ++k)
    {
        side[k] = line.side(poly.vertices[k]);
        any_out |= side[k] > 0.0;
        any_in |= side[k] < 0.0;
    }
    if(!any_out)
        return poly;
    if(!any_in)
        return {};

    ConvexRegion out;
    out.vertices.reserve(m + 1);
    out.edge_support.reserve(m + 1);
    for(std::size_t k = 0; k < m; ++k)
    {
        const std::size_t n = (k + 1) % m;
        const Point a = poly.vertices[k], b = poly.vertices[n];
        const double sa = side[k], sb = side[n];
        if(sa <= 0.0)
        {
            out.vertices.push_back(a);
            out.edge_support.push_back(sa == 0.0 && sb > 0.0 ? support : poly.edge_support[k]);
        }
        if((sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0))
        {
            const double t = sa / (sa - sb);
            Point p = a + t * (b - a);
            if(const auto q = line_intersection(edge_line(poly.edge_support[k]), line))
            {
                const double lo_x = std::min(a.x, b.x), hi_x = std::max(a.x, b.x);
                const double lo_y = std::min(a.y, b.y), hi_y = std::max(a.y, b.y);
                if(q->x >= lo_x && q->x <= hi_x && q->y >= lo_y && q->y <= hi_y)
                    p = *q;
            }
            out.vertices.push_back(p);
            // Leaving the kept side: the new vertex starts an edge on the
            // clip line. Entering: it continues the original edge.
            out.edge_support.push_back(sa < 0.0 ? support : poly.edge_support[k]);
        }
    }
    // Drop consecutive duplicates produced by vertices lying on the line.
    ConvexRegion clean;
    for(std::size_t k = 0; k < out.vertices.size(); ++k)
    {
        if(!clean.vertices.empty() && clean.vertices.back() == out.vertices[k])
        {
            clean.edge_support.back() = out.edge_support[k];
            continue;
        }
        clean.vertices.push_back(out.vertices[k]);
        clean.edge_support.push_back(out.edge_support[k]);
    }
    while(clean.vertices.size() > 1 && clean.vertices.front() == clean.vertices.back())
    {
        clean.vertices.pop_back();
        clean.edge_support.pop_back();
    }
    if(clean.vertices.size() < 3)
        return {};
    return clean;
}

/// Intersection of half-planes clipped to `box`. Edge supports are indices
/// into `hs` or frame sides.
inline ConvexRegion halfplane_intersection(const std::vector<HalfPlane>& hs, const Box& box)
{
    if(box.empty())
        throw Error("world box is empty");
    std::vector<ClipLine> lines;
    lines.reserve(hs.size());
    for(const HalfPlane& h : hs)
    {
        if(h.a == 0.0 && h.b == 0.0)
            throw Error("half-plane with zero normal");
        lines.push_back(clip_line(h));
    }
    const auto edge_line = [&](int id) {
        return is_frame_support(id) ? frame_line(box, support_side(id))
                                    : lines[static_cast<std::size_t>(id)];
    };
    ConvexRegion region = box_region(box);
    for(std::size_t k = 0; k < lines.size() && !region.empty(); ++k)
        region = clip(region, lines[k], static_cast<int>(k), edge_line);
    return region;
}

} // namespace mwv

#endif // MWV_GEOMETRY_HPP
