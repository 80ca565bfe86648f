#ifndef MWV_MODELS_HPP
#define MWV_MODELS_HPP

/**
 * @file
 * Random weight models and orderings, the two-row lower-bound instance,
 * prefix-minima statistics, and lower-envelope instrumentation of a
 * randomized incremental construction over lines.
 */

#include "geometry.hpp"
#include "overlay.hpp"
#include "prefix_cells.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mwv
{

//------------------------------------------------------------------------------
// Random numbers
//------------------------------------------------------------------------------

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seeded generator. All randomness in the library flows through this type
/// so identical seeds reproduce identical outputs.
class Rng
{
public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

    /// Seed of trial `index` under `master`; independent of execution order.
    static std::uint64_t derive(std::uint64_t master, std::uint64_t index)
    {
        return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// Uniform in (0, 1).
    double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
    double exponential(double lambda) { return -std::log(uniform_open()) / lambda; }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        if(n == 0)
            throw Error("Rng::below: empty range");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do
            x = next();
        while(x >= limit);
        return x % n;
    }

    template <typename T>
    void shuffle(std::vector<T>& v)
    {
        for(std::size_t k = v.size(); k > 1; --k)
            std::swap(v[k - 1], v[below(k)]);
    }

    std::vector<std::size_t> permutation(std::size_t n)
    {
        std::vector<std::size_t> p(n);
        for(std::size_t k = 0; k < n; ++k)
            p[k] = k;
        shuffle(p);
        return p;
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

//------------------------------------------------------------------------------
// Weight models
//------------------------------------------------------------------------------

struct UniformWeights
{
    double a = 1.0;
    double b = 2.0;
};

struct ExponentialWeights
{
    double lambda = 1.0;
};

struct DiscreteWeights
{
    std::vector<double> values;
};

using WeightDistribution = std::variant<UniformWeights, ExponentialWeights, DiscreteWeights>;

/// Independent weights from one distribution.
struct IidModel
{
    WeightDistribution distribution;
};

/// A fixed multiset of weights assigned by a uniform random permutation.
struct PermutedMultiset
{
    std::vector<double> weights;
};

/// Fixed weights; the locations are sampled uniformly from `region`.
struct FixedWeightsSampledLocations
{
    std::vector<double> weights;
    Box region{0.0, 0.0, 1.0, 1.0};
};

using WeightModel = std::variant<IidModel, PermutedMultiset, FixedWeightsSampledLocations>;

inline double draw_weight(const WeightDistribution& d, Rng& rng)
{
    if(const auto* u = std::get_if<UniformWeights>(&d))
        return rng.uniform(u->a, u->b);
    if(const auto* e = std::get_if<ExponentialWeights>(&d))
        return rng.exponential(e->lambda);
    const auto& v = std::get<DiscreteWeights>(d).values;
    if(v.empty())
        throw Error("discrete weight distribution has no values");
    return v[rng.below(v.size())];
}

inline std::vector<Point> uniform_points(std::size_t n, const Box& region, Rng& rng)
{
    std::vector<Point> pts(n);
    for(Point& p : pts)
    {
        p.x = rng.uniform(region.xmin, region.xmax);
        p.y = rng.uniform(region.ymin, region.ymax);
    }
    return pts;
}

/// Draw weights per `model`, give every site an independent uniform
/// secondary tiebreak in [0, 1), and sort lexicographically by
/// (weight, tiebreak).
inline Ordering sample_ordering(std::vector<Point> locations, const WeightModel& model, Rng& rng)
{
    std::vector<double> weights;
    if(const auto* iid = std::get_if<IidModel>(&model))
    {
        weights.resize(locations.size());
        for(double& w : weights)
            w = draw_weight(iid->distribution, rng);
    }
    else if(const auto* pm = std::get_if<PermutedMultiset>(&model))
    {
        if(pm->weights.size() != locations.size())
            throw Error("permuted multiset size does not match the site count");
        weights = pm->weights;
        rng.shuffle(weights);
    }
    else
    {
        const auto& fx = std::get<FixedWeightsSampledLocations>(model);
        weights = fx.weights;
        locations = uniform_points(weights.size(), fx.region, rng);
    }
    for(double w : weights)
        if(!(w > 0.0) || !std::isfinite(w))
            throw Error("nonpositive weight in weight model");

    std::vector<Site> sites(locations.size());
    for(std::size_t k = 0; k < sites.size(); ++k)
    {
        sites[k].location = locations[k];
        sites[k].weight = weights[k];
    }
    for(Site& s : sites)
        s.tiebreak = rng.uniform();
    return Ordering::from_sites(std::move(sites));
}

//------------------------------------------------------------------------------
// Instances
//------------------------------------------------------------------------------

/// Two rows of n points: (i, -D) and (i, +D) for i = 1..n with D = 10 n^3.
inline std::vector<Point> two_row_instance(std::size_t n)
{
    if(n < 1)
        throw Error("two_row_instance: n must be positive");
    const double nd = static_cast<double>(n);
    const double delta = 10.0 * nd * nd * nd;
    std::vector<Point> pts;
    pts.reserve(2 * n);
    for(std::size_t i = 1; i <= n; ++i)
        pts.push_back({static_cast<double>(i), -delta});
    for(std::size_t i = 1; i <= n; ++i)
        pts.push_back({static_cast<double>(i), delta});
    return pts;
}

struct JitterResult
{
    std::vector<Point> points;
    double magnitude = 0.0; ///< magnitude actually applied
    std::uint64_t seed = 0;
};

/// Smallest admissible jitter, relative to the instance scale.
constexpr double min_relative_jitter = 1e-9;

/// Independent uniform perturbation in [-m, m]^2 per point. Magnitudes
/// below 1e-9 times the instance scale are raised to that floor.
inline JitterResult jitter(const std::vector<Point>& locations, double magnitude, Rng& rng)
{
    if(!(magnitude > 0.0))
        throw Error("jitter magnitude must be positive");
    JitterResult out;
    out.seed = rng.seed();
    out.magnitude = std::max(magnitude, min_relative_jitter * instance_scale(locations));
    out.points = locations;
    for(Point& p : out.points)
    {
        p.x += rng.uniform(-out.magnitude, out.magnitude);
        p.y += rng.uniform(-out.magnitude, out.magnitude);
    }
    return out;
}

//------------------------------------------------------------------------------
// Prefix minima
//------------------------------------------------------------------------------

/// Number of strict prefix minima of `values`.
inline std::size_t prefix_minima_count(std::span<const double> values)
{
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    if(std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw Error("prefix_minima_count: values must be distinct");
    std::size_t z = 0;
    double best = std::numeric_limits<double>::infinity();
    for(double v : values)
        if(v < best)
        {
            best = v;
            ++z;
        }
    return z;
}

inline double harmonic(std::size_t n)
{
    double h = 0.0;
    for(std::size_t i = n; i >= 1; --i)
        h += 1.0 / static_cast<double>(i);
    return h;
}

//------------------------------------------------------------------------------
// Lower envelopes of lines
//------------------------------------------------------------------------------

struct AffineFunction
{
    double slope = 0.0;
    double intercept = 0.0;

    double operator()(double t) const { return slope * t + intercept; }
};

/// Per-step record of an incremental lower-envelope construction.
struct EnvelopeTrace
{
    std::vector<std::size_t> new_vertices;  ///< m_i
    std::vector<std::size_t> cumulative;    ///< sum of m_1..m_i
    std::vector<std::size_t> envelope_size; ///< vertices on the envelope after step i

    std::size_t total() const { return cumulative.empty() ? 0 : cumulative.back(); }
};

namespace detail
{

/// Breakpoints of the lower envelope of `active` (indices into `fns`, sorted
/// by slope descending) inside (lo, hi), as sorted id pairs.
inline std::vector<std::pair<std::size_t, std::size_t>> envelope_vertices(
    std::span<const AffineFunction> fns,
    const std::vector<std::size_t>& active,
    double lo,
    double hi)
{
    const auto cross_at = [&](std::size_t a, std::size_t b) {
        return (fns[b].intercept - fns[a].intercept) / (fns[a].slope - fns[b].slope);
    };
    std::vector<std::size_t> hull;
    for(std::size_t id : active)
    {
        if(!hull.empty() && fns[hull.back()].slope == fns[id].slope)
            continue; // sorted by intercept within equal slopes
        while(hull.size() >= 2)
        {
            const double x1 = cross_at(hull[hull.size() - 2], hull.back());
            const double x2 = cross_at(hull.back(), id);
            const double scale = std::max({1.0, std::abs(x1), std::abs(x2)});
            if(std::abs(x1 - x2) <= 1e-12 * scale)
                throw DegeneracyError("three lines meet at one point; jitter the functions");
            if(x1 > x2)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(id);
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for(std::size_t k = 0; k + 1 < hull.size(); ++k)
    {
        const double x = cross_at(hull[k], hull[k + 1]);
        if(x > lo && x < hi)
            out.emplace_back(std::min(hull[k], hull[k + 1]), std::max(hull[k], hull[k + 1]));
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace detail

/// Insert `fns` in the order `perm` and record, at each step, the number of
/// lower-envelope vertices (restricted to (lo, hi)) that were not present
/// after the previous step.
inline EnvelopeTrace ric_envelope_overlay(
    std::span<const AffineFunction> fns,
    std::span<const std::size_t> perm,
    double lo = -std::numeric_limits<double>::infinity(),
    double hi = std::numeric_limits<double>::infinity())
{
    std::vector<std::size_t> by_slope(fns.size());
    for(std::size_t k = 0; k < by_slope.size(); ++k)
        by_slope[k] = k;
    std::sort(by_slope.begin(), by_slope.end(), [&](std::size_t a, std::size_t b) {
        return fns[a].slope > fns[b].slope ||
               (fns[a].slope == fns[b].slope && fns[a].intercept < fns[b].intercept);
    });
    std::vector<char> inserted(fns.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> previous;
    EnvelopeTrace trace;
    std::size_t sum = 0;
    for(std::size_t id : perm)
    {
        if(id >= fns.size() || inserted[id])
            throw Error("ric_envelope_overlay: invalid permutation");
        inserted[id] = 1;
        std::vector<std::size_t> active;
        for(std::size_t k : by_slope)
            if(inserted[k])
                active.push_back(k);
        auto current = detail::envelope_vertices(fns, active, lo, hi);
        std::vector<std::pair<std::size_t, std::size_t>> fresh;
        std::set_difference(
            current.begin(), current.end(), previous.begin(), previous.end(), std::back_inserter(fresh));
        sum += fresh.size();
        trace.new_vertices.push_back(fresh.size());
        trace.cumulative.push_back(sum);
        trace.envelope_size.push_back(current.size());
        previous = std::move(current);
    }
    return trace;
}

//------------------------------------------------------------------------------
// Crossings of a fixed bisector with later prefix cells
//------------------------------------------------------------------------------

/// Number of crossings of the bisector of ranks 1 and 2 with the non-frame
/// boundary edges of the prefix cells of ranks 3..n.
inline std::size_t bisector_crossing_count(const PrefixCellSet& cells)
{
    if(cells.sites.size() < 3)
        return 0;
    const Point m = midpoint(cells.sites[0], cells.sites[1]);
    const Point u = perp(cells.sites[1] - cells.sites[0]);
    std::size_t count = 0;
    for(std::size_t i = 2; i < cells.cells.size(); ++i)
    {
        // Clip m + t u against the cell. Each end of the surviving interval
        // is either a crossing of a bisector or the frame. Testing edge
        // endpoints instead would miss crossings through cell vertices,
        // which happen whenever the circumcenter of ranks 1, 2, i is a vertex.
        const ConvexRegion& c = cells.cells[i];
        const std::size_t nv = c.size();
        double t0 = -std::numeric_limits<double>::infinity(), t1 = std::numeric_limits<double>::infinity();
        bool f0 = true, f1 = true, empty = false;
        for(std::size_t k = 0; k < nv && !empty; ++k)
        {
            const Point a = c.vertices[k], e = c.vertices[(k + 1) % nv] - a;
            const double c0 = cross(e, m - a), c1 = cross(e, u);
            const bool frame = is_frame_support(c.edge_support[k]);
            if(c1 == 0.0)
            {
                empty = c0 < 0.0;
                continue;
            }
            const double t = -c0 / c1;
            // ties go to the frame: a crossing exactly on the frame is not interior
            if(c1 > 0.0 && (t > t0 || (t == t0 && frame)))
            {
                t0 = t;
                f0 = frame;
            }
            else if(c1 < 0.0 && (t < t1 || (t == t1 && frame)))
            {
                t1 = t;
                f1 = frame;
            }
        }
        if(empty || !(t0 < t1))
            continue;
        count += (f0 ? 0 : 1) + (f1 ? 0 : 1);
    }
    return count;
}

inline std::size_t bisector_crossing_count(const Ordering& ord, const Box& box)
{
    return bisector_crossing_count(all_prefix_cells(ord, box));
}

/// The same quantity as a one-dimensional envelope problem: along the
/// bisector of ranks 1 and 2, squared distance to each site minus t^2 is
/// affine in t. Function 0 stands for ranks 1 and 2 (equal along the line),
/// function k >= 1 for rank k + 2; [lo, hi] is the part inside the box.
struct BisectorFunctions
{
    std::vector<AffineFunction> functions;
    double lo = 0.0;
    double hi = 0.0;
};

inline BisectorFunctions bisector_distance_functions(const std::vector<Point>& sites, const Box& box)
{
    if(sites.size() < 2)
        throw Error("bisector_distance_functions: need at least two sites");
    const Point m = midpoint(sites[0], sites[1]);
    const Point d = perp(sites[1] - sites[0]);
    const Point u = d * (1.0 / norm(d));
    BisectorFunctions out;
    const auto push = [&](Point s) {
        const Point w = m - s;
        out.functions.push_back({2.0 * dot(u, w), norm2(w)});
    };
    push(sites[0]);
    for(std::size_t k = 2; k < sites.size(); ++k)
        push(sites[k]);

    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    const auto slab = [&](double o, double dir, double mn, double mx) {
        if(dir == 0.0)
            return;
        double a = (mn - o) / dir, b = (mx - o) / dir;
        if(a > b)
            std::swap(a, b);
        lo = std::max(lo, a);
        hi = std::min(hi, b);
    };
    slab(m.x, u.x, box.xmin, box.xmax);
    slab(m.y, u.y, box.ymin, box.ymax);
    out.lo = lo;
    out.hi = hi;
    return out;
}

} // namespace mwv

#endif // MWV_MODELS_HPP
