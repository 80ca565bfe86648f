#include "oracles.hpp"

#include <gtest/gtest.h>

using namespace mwv;

namespace
{

Ordering ordering_of(std::vector<Point> pts)
{
    std::vector<Site> sites;
    for(std::size_t k = 0; k < pts.size(); ++k)
        sites.push_back({pts[k], 1.0 + static_cast<double>(k), 0, 0.0});
    return Ordering::from_sites(std::move(sites));
}

// Every sampled point is in cell i iff rank i is nearest among 1..i.
void check_against_sampling(const Ordering& ord, const Box& box, std::uint64_t seed, int samples = 10000)
{
    const auto pts = ord.locations();
    const double band = 1e-6 * ord.scale();
    const PrefixCellSet P = all_prefix_cells(ord, box);
    Rng rng(seed);
    int checked = 0;
    for(int s = 0; s < samples; ++s)
    {
        const Point x{rng.uniform(box.xmin, box.xmax), rng.uniform(box.ymin, box.ymax)};
        for(std::size_t i = 0; i < pts.size(); ++i)
        {
            const auto nearest = oracle::prefix_nearest(x, pts, i, band);
            if(!nearest)
                continue;
            ++checked;
            ASSERT_EQ(P.cells[i].contains(x), *nearest == i) << "rank " << i + 1 << " at " << x.x << "," << x.y;
        }
    }
    EXPECT_GT(checked, samples);
}

} // namespace

TEST(Ordering, SortsByWeightThenTiebreak)
{
    const Ordering ord = Ordering::from_sites({{{0, 0}, 2.0, 0, 0.1}, {{1, 0}, 1.0, 0, 0.9}, {{2, 0}, 2.0, 0, 0.05}});
    EXPECT_EQ(ord[0].location, (Point{1, 0}));
    EXPECT_EQ(ord[1].location, (Point{2, 0}));
    EXPECT_EQ(ord[2].location, (Point{0, 0}));
    for(std::size_t k = 0; k < 3; ++k)
        EXPECT_EQ(ord[k].rank, k + 1);
}

TEST(Ordering, RejectsBadInput)
{
    EXPECT_THROW(Ordering::from_sites({{{0, 0}, 0.0, 0, 0.0}}), Error);
    EXPECT_THROW(Ordering::from_sites({{{0, 0}, 1.0, 0, 0.5}, {{1, 0}, 1.0, 0, 0.5}}), Error);
    EXPECT_THROW(Ordering::from_sites({{{0, 0}, 1.0, 0, 0.1}, {{0, 0}, 2.0, 0, 0.5}}), Error);
}

TEST(PrefixCell, FirstCellIsTheBox)
{
    const Ordering ord = oracle::random_ordering(6, 1);
    const Box box{-3, -3, 4, 4};
    const ConvexRegion c = prefix_cell(1, ord, box);
    EXPECT_DOUBLE_EQ(c.area(), box.area());
    EXPECT_EQ(c.size(), 4u);
    EXPECT_THROW(prefix_cell(0, ord, box), Error);
    EXPECT_THROW(prefix_cell(7, ord, box), Error);
}

TEST(PrefixCell, TwoSitesGiveAHalfPlane)
{
    const Ordering ord = ordering_of({{0, 0}, {2, 0}});
    const Box box{-10, -10, 10, 10};
    const PrefixCellSet P = all_prefix_cells(ord, box);
    ASSERT_EQ(P.cells.size(), 2u);
    EXPECT_DOUBLE_EQ(P.cells[0].area(), 400.0);
    EXPECT_NEAR(P.cells[1].area(), 9.0 * 20.0, 1e-9);
    for(const Point& v : P.cells[1].vertices)
        EXPECT_GE(v.x, 1.0 - 1e-12);
    EXPECT_TRUE(P.cells[1].contains({1.0, 5.0}));
    EXPECT_FALSE(P.cells[1].contains({0.99, 5.0}));
}

TEST(PrefixCell, ThreeSiteExample)
{
    const Ordering ord = ordering_of({{0, 0}, {4, 0}, {0, 4}});
    const Box box{-10, -10, 10, 10};
    const ConvexRegion c = prefix_cell(3, ord, box);
    // y >= 2 and y >= x
    Rng rng(9);
    for(int s = 0; s < 10000; ++s)
    {
        const Point x{rng.uniform(-10, 10), rng.uniform(-10, 10)};
        if(std::abs(x.y - 2) < 1e-6 || std::abs(x.y - x.x) < 1e-6)
            continue;
        EXPECT_EQ(c.contains(x), x.y >= 2 && x.y >= x.x);
    }
    check_against_sampling(ord, box, 10);
}

TEST(PrefixCell, FourRandomSitesMatchSampling)
{
    for(std::uint64_t seed = 1; seed <= 5; ++seed)
    {
        const Ordering ord = oracle::random_ordering(4, seed);
        check_against_sampling(ord, compute_world_box(ord), seed + 100);
    }
}

TEST(PrefixCell, CoverageOnLargerInstances)
{
    const Ordering ord = oracle::random_ordering(40, 77);
    check_against_sampling(ord, compute_world_box(ord), 78, 2000);
}

TEST(PrefixCell, ContainsItsSiteAndIsConvex)
{
    for(std::uint64_t seed = 1; seed <= 10; ++seed)
    {
        const Ordering ord = oracle::random_ordering(60, seed);
        const PrefixCellSet P = all_prefix_cells(ord, compute_world_box(ord));
        std::size_t total = 0;
        for(std::size_t i = 0; i < P.cells.size(); ++i)
        {
            const ConvexRegion& c = P.cells[i];
            ASSERT_FALSE(c.empty());
            EXPECT_TRUE(c.contains(P.sites[i]));
            for(std::size_t k = 0; k < c.size(); ++k)
                EXPECT_GT(orient(c.vertices[k], c.vertices[(k + 1) % c.size()], c.vertices[(k + 2) % c.size()]), 0.0);
            total += c.size();
        }
        EXPECT_EQ(total, P.total_vertices);
    }
}

TEST(WorldBox, ContainsSitesAndGrowsWithTheFactor)
{
    const Ordering ord = oracle::random_ordering(30, 4);
    const Box b2 = compute_world_box(ord);
    WorldBoxOptions o;
    o.factor = 4.0;
    const Box b4 = compute_world_box(ord, o);
    for(const Point& p : ord.locations())
    {
        EXPECT_TRUE(b2.contains(p));
        EXPECT_TRUE(b4.contains(p));
    }
    EXPECT_GT(b4.width(), 1.9 * b2.width() - 1e-9);
    EXPECT_THROW(compute_world_box(Ordering{}), Error);
}

TEST(WorldBox, EnclosesEveryInteriorPrefixCellVertex)
{
    // Cell vertices not on the frame must sit well inside the box.
    const Ordering ord = oracle::random_ordering(50, 8);
    const Box box = compute_world_box(ord);
    const PrefixCellSet P = all_prefix_cells(ord, box);
    const double margin = 0.2 * std::min(box.width(), box.height());
    for(const ConvexRegion& c : P.cells)
    {
        const std::size_t m = c.size();
        for(std::size_t k = 0; k < m; ++k)
            if(!is_frame_support(c.edge_support[k]) && !is_frame_support(c.edge_support[(k + m - 1) % m]))
            {
                EXPECT_GT(c.vertices[k].x, box.xmin + margin);
                EXPECT_LT(c.vertices[k].x, box.xmax - margin);
                EXPECT_GT(c.vertices[k].y, box.ymin + margin);
                EXPECT_LT(c.vertices[k].y, box.ymax - margin);
            }
    }
}
