#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mwv;

namespace
{

Ordering equal_weight_triangle()
{
    return Ordering::from_sites({{{0, 0}, 1.0, 0, 0.1}, {{4, 0}, 1.0, 0, 0.2}, {{0, 4}, 1.0, 0, 0.3}});
}

// Greedy matching on (triple, location).
bool same_vertices(const MWVDiagram& a, const MWVDiagram& b, double tol)
{
    if(a.vertices.size() != b.vertices.size())
        return false;
    std::vector<bool> used(b.vertices.size(), false);
    for(const DiagramVertex& v : a.vertices)
    {
        bool found = false;
        for(std::size_t k = 0; k < b.vertices.size() && !found; ++k)
            if(!used[k] && b.vertices[k].triple == v.triple && distance(b.vertices[k].p, v.p) <= tol)
                used[k] = found = true;
        if(!found)
            return false;
    }
    return true;
}

} // namespace

TEST(NearestWeightedSite, Examples)
{
    const Ordering ord = Ordering::from_sites({{{0, 0}, 1.0, 0, 0.0}, {{2, 0}, 3.0, 0, 0.0}});
    const QueryResult r = nearest_weighted_site({1, 0}, ord);
    EXPECT_EQ(r.rank, 1u);
    EXPECT_DOUBLE_EQ(r.value, 1.0);

    const QueryResult at = nearest_weighted_site({2, 0}, ord);
    EXPECT_EQ(at.rank, 2u);
    EXPECT_DOUBLE_EQ(at.value, 0.0);

    const Ordering tie = Ordering::from_sites({{{0, 0}, 1.0, 0, 0.1}, {{2, 0}, 1.0, 0, 0.2}});
    EXPECT_EQ(nearest_weighted_site({1, 0}, tie).rank, 1u);
    EXPECT_THROW(nearest_weighted_site({0, 0}, Ordering{}), Error);
}

TEST(BruteForceDiagram, Examples)
{
    const MWVDiagram d = brute_force_diagram(equal_weight_triangle());
    ASSERT_EQ(d.counts.V, 1u);
    EXPECT_LE(distance(d.vertices[0].p, {2, 2}), 1e-9);
    EXPECT_EQ(d.vertices[0].triple, (std::array<std::size_t, 3>{1, 2, 3}));
    EXPECT_FALSE(d.counts.E.has_value());

    const Ordering two = Ordering::from_sites({{{0, 0}, 1.0, 0, 0.0}, {{1, 0}, 2.0, 0, 0.0}});
    EXPECT_EQ(brute_force_diagram(two).counts.V, 0u);
}

TEST(BruteForceDiagram, DerivedCountsForDistinctWeights)
{
    const MWVDiagram d = brute_force_diagram(oracle::random_ordering(12, 3));
    ASSERT_TRUE(d.counts.E.has_value());
    EXPECT_EQ(2 * *d.counts.E, 3 * d.counts.V);
    EXPECT_EQ(*d.counts.F, d.counts.V / 2 + 2);
}

TEST(BruteForceDiagram, VerticesAreValid)
{
    const Ordering ord = oracle::random_ordering(15, 21);
    const MWVDiagram d = brute_force_diagram(ord);
    const double scale = ord.scale();
    for(const DiagramVertex& v : d.vertices)
    {
        const double f = weighted_distance(ord[v.triple[0] - 1], v.p);
        for(std::size_t r : v.triple)
            EXPECT_NEAR(weighted_distance(ord[r - 1], v.p), f, 1e-7 * std::max(f, scale));
        for(std::size_t k = 0; k < ord.size(); ++k)
            EXPECT_GE(weighted_distance(ord[k], v.p), f * (1 - 1e-9));
    }
}

TEST(BruteForceDiagram, MatchesGridLabelling)
{
    // Pinned instance whose vertices all lie near the sites, so a fine grid
    // over them stays affordable.
    const Ordering ord = oracle::random_ordering(5, 2);
    const MWVDiagram d = brute_force_diagram(ord);
    ASSERT_GT(d.counts.V, 0u);
    const double scale = ord.scale();
    std::vector<Point> pts = ord.locations();
    for(const DiagramVertex& v : d.vertices)
        pts.push_back(v.p);
    Box region{pts[0].x, pts[0].y, pts[0].x, pts[0].y};
    for(const Point& p : pts)
        region = {std::min(region.xmin, p.x), std::min(region.ymin, p.y), std::max(region.xmax, p.x), std::max(region.ymax, p.y)};
    const double pad = 0.2 * scale;
    region = {region.xmin - pad, region.ymin - pad, region.xmax + pad, region.ymax + pad};
    ASSERT_LE(std::max(region.width(), region.height()), 4 * scale) << "re-pin the instance";
    const auto grid = oracle::grid_label_triples(ord, region, 1e-3 * scale);
    std::set<std::array<std::size_t, 3>> found;
    for(const DiagramVertex& v : d.vertices)
        found.insert(v.triple);
    EXPECT_EQ(found, grid);
}

TEST(FastDiagram, SmallExamples)
{
    const MWVDiagram tri = fast_diagram(equal_weight_triangle());
    ASSERT_EQ(tri.counts.V, 1u);
    EXPECT_LE(distance(tri.vertices[0].p, {2, 2}), 1e-9);
    EXPECT_EQ(tri.provenance, Provenance::Fast);

    const Ordering two = Ordering::from_sites({{{0, 0}, 1.0, 0, 0.0}, {{2, 0}, 2.0, 0, 0.0}});
    EXPECT_EQ(fast_diagram(two).counts.V, 0u);
    const OverlayArrangement A = oracle::overlay_of(two, 2.0, true);
    ASSERT_EQ(A.faces.size(), 2u);
    std::set<std::vector<std::size_t>> sets;
    for(const OverlayFace& f : A.faces)
        sets.insert(f.candidates.ranks);
    EXPECT_EQ(sets, (std::set<std::vector<std::size_t>>{{1}, {1, 2}}));
}

TEST(FastDiagram, MatchesBruteForce)
{
    Rng pick(99);
    for(std::uint64_t seed = 1; seed <= 40; ++seed)
    {
        const std::size_t n = 5 + pick.below(21);
        Ordering ord;
        if(seed % 4 == 0)
        {
            // repeated weights exercise equal-weight vertices on overlay edges
            Rng rng(seed);
            ord = sample_ordering(uniform_points(n, {0, 0, 1, 1}, rng), IidModel{DiscreteWeights{{1, 2, 3}}}, rng);
        }
        else
            ord = oracle::random_ordering(n, seed);
        const MWVDiagram brute = brute_force_diagram(ord);
        const MWVDiagram fast = fast_diagram(ord);
        EXPECT_TRUE(same_vertices(brute, fast, 1e-6 * ord.scale()))
            << "seed " << seed << " n " << n << ": brute " << brute.counts.V << " fast " << fast.counts.V;
        EXPECT_EQ(brute.cell_nonempty, fast.cell_nonempty);
    }
}

TEST(Locate, TwoSiteExamples)
{
    const Ordering ord = Ordering::from_sites({{{0, 0}, 1.0, 0, 0.0}, {{2, 0}, 2.0, 0, 0.0}});
    WorldBoxOptions o;
    o.factor = 8.0;
    const OverlayArrangement A = build_overlay(all_prefix_cells(ord, compute_world_box(ord, o)));
    const QueryResult right = locate({8, 0}, A, ord);
    EXPECT_EQ(right.rank, nearest_weighted_site({8, 0}, ord).rank);
    EXPECT_EQ(right.candidates.ranks, (std::vector<std::size_t>{1, 2}));
    const QueryResult left = locate({-1, 0.5}, A, ord);
    EXPECT_EQ(left.rank, 1u);
    EXPECT_EQ(left.candidates.ranks, (std::vector<std::size_t>{1}));
    EXPECT_THROW(locate({1, 0.3}, A, ord), BoundaryError);
    EXPECT_THROW(locate({1e9, 0}, A, ord), Error);
}

TEST(Locate, AgreesWithExhaustiveSearch)
{
    const Ordering ord = oracle::random_ordering(300, 17);
    const OverlayArrangement A = oracle::overlay_of(ord);
    Rng rng(18);
    int boundary = 0;
    for(int s = 0; s < 20000; ++s)
    {
        const Point x{rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5)};
        try
        {
            ASSERT_EQ(locate(x, A, ord).rank, nearest_weighted_site(x, ord).rank);
        }
        catch(const BoundaryError&)
        {
            ++boundary;
        }
    }
    EXPECT_LT(boundary, 5);
}

TEST(Diagram, EveryCellIsNonempty)
{
    const Ordering ord = oracle::random_ordering(50, 4);
    for(std::size_t k = 0; k < ord.size(); ++k)
        EXPECT_EQ(nearest_weighted_site(ord[k].location, ord).rank, k + 1);
    const MWVDiagram d = brute_force_diagram(ord);
    EXPECT_TRUE(std::all_of(d.cell_nonempty.begin(), d.cell_nonempty.end(), [](bool b) { return b; }));
}

TEST(Diagram, WinnerIsInvariantUnderWeightScaling)
{
    const Ordering ord = oracle::random_ordering(40, 6);
    std::vector<Site> scaled = ord.sites();
    for(Site& s : scaled)
        s.weight *= 3.7;
    const Ordering ord2 = Ordering::from_sites(scaled);
    Rng rng(7);
    for(int s = 0; s < 5000; ++s)
    {
        const Point x{rng.uniform(-1, 2), rng.uniform(-1, 2)};
        const QueryResult a = nearest_weighted_site(x, ord), b = nearest_weighted_site(x, ord2);
        EXPECT_EQ(a.rank, b.rank);
        EXPECT_NEAR(b.value, 3.7 * a.value, 1e-12 * b.value);
    }
}

TEST(Diagram, WinnerIsACandidateOnSamples)
{
    for(std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        const Ordering ord = oracle::random_ordering(200, seed);
        const auto pts = ord.locations();
        Rng rng(seed + 50);
        for(int s = 0; s < 20000; ++s)
        {
            const Point x{rng.uniform(-1, 2), rng.uniform(-1, 2)};
            const auto c = oracle::candidate_ranks(x, pts, 0.0);
            if(!c)
                continue;
            ASSERT_TRUE(std::binary_search(c->begin(), c->end(), nearest_weighted_site(x, ord).rank));
        }
    }
}
