#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "clusrank/ranksum_ds.hpp"
#include "clusrank/simulator.hpp"
#include "helpers.hpp"

using namespace clusrank;
namespace th = testing_helpers;

TEST(DsRankSum, SingletonStatistic) {
    const auto s = th::unpaired({1, 2, 3, 4}, th::singleton_ids(4), {"A", "A", "B", "B"});
    const auto r = ds_ranksum(s);
    EXPECT_DOUBLE_EQ(r.observed, 3.0 / 5);
    EXPECT_DOUBLE_EQ(r.null_mean, 1.0);
    EXPECT_LT(r.z, 0.0);
    EXPECT_GT(r.variance, 0.0);
}

TEST(DsRankSum, MatchesResamplingOracle) {
    std::mt19937_64 rng(41);
    for (int rep = 0; rep < 120; ++rep) {
        th::InstanceShape shape;
        shape.min_clusters = 3;
        shape.max_clusters = 7;
        shape.cluster_level = rep % 2 == 0;
        shape.integer_values = rep % 3 == 0;
        const auto s = th::random_unpaired(rng, shape);
        const double oracle = th::resampled_rank_sum(s);
        try {
            EXPECT_NEAR(ds_ranksum(s).observed, oracle, 1e-12);
        } catch (const Error&) {
        }
    }
}

TEST(DsRankSum, NullMeanEqualsOracleExpectationWithoutShift) {
    // identical values: every pseudo-sample ranks all ties at (N+1)/2
    const auto s = th::unpaired({5, 5, 5, 5, 5}, {"a", "a", "b", "c", "c"}, {"A", "B", "A", "B", "B"});
    const auto oracle = th::resampled_rank_sum(s);
    double shares = 0;
    for (std::size_t i = 0; i < s.cluster_count(); ++i) {
        double in = 0;
        for (auto k = s.cluster_begin(i); k < s.cluster_end(i); ++k) {
            in += s.group_codes()[k] == 0;
        }
        shares += in / static_cast<double>(s.cluster_size(i));
    }
    EXPECT_NEAR(oracle, 0.5 * shares, 1e-12);
    EXPECT_THROW(ds_ranksum(s), Error);
}

TEST(DsRankSum, InvarianceAndSymmetry) {
    std::mt19937_64 rng(5);
    for (int rep = 0; rep < 40; ++rep) {
        th::InstanceShape shape;
        shape.min_clusters = 6;
        shape.max_clusters = 14;
        shape.cluster_level = rep % 2 == 1;
        shape.integer_values = rep % 4 == 0;
        const auto s = th::random_unpaired(rng, shape);
        TestResult base;
        try {
            base = ds_ranksum(s);
        } catch (const Error&) {
            continue;
        }
        EXPECT_NEAR(ds_ranksum(th::transformed(s, [](double x) { return std::cbrt(x) + 10; })).z, base.z, 1e-10);
        EXPECT_NEAR(ds_ranksum(th::transformed(s, [](double x) { return -x; })).z, -base.z, 1e-10);
        const auto swapped = ds_ranksum(th::swap_groups(s));
        EXPECT_NEAR(swapped.z, -base.z, 1e-10);
        EXPECT_NEAR(swapped.p_value, base.p_value, 1e-10);
    }
}

TEST(DsRankSum, ClusterDuplicationInvariantStatistic) {
    // repeating every record of a cluster leaves its ECDF and weights unchanged
    const auto s = th::unpaired({0.1, 0.7, 1.3, -0.2, 2.0, 0.5}, {"a", "a", "b", "c", "c", "d"},
                                {"A", "B", "A", "B", "A", "B"});
    auto rows = s.records();
    const auto copy = rows;
    rows.insert(rows.end(), copy.begin(), copy.end());
    const auto doubled = ClusteredSample::ingest(rows, false);
    EXPECT_NEAR(ds_ranksum(doubled).observed, ds_ranksum(s).observed, 1e-12);
    EXPECT_NEAR(ds_ranksum(doubled).z, ds_ranksum(s).z, 1e-10);
}

TEST(DsRankSum, RejectsContralateral) {
    const auto s = th::unpaired({1, 2, 3, 4, 5, 6}, {"a", "a", "b", "b", "c", "c"}, {"A", "B", "A", "B", "B", "A"});
    EXPECT_THROW(ds_ranksum(s), Error);
    const auto mixed = th::unpaired({1, 2, 3, 4, 5, 6}, {"a", "a", "b", "b", "c", "c"}, {"A", "B", "A", "B", "B", "B"});
    EXPECT_NO_THROW(ds_ranksum(mixed));
}

TEST(DsRankSum, MuShift) {
    const auto s = th::unpaired({1.5, 2.5, 0.2, 3.0, 4.0, 2.9}, {"a", "a", "b", "c", "d", "d"},
                                {"A", "A", "A", "B", "B", "B"});
    const auto shifted = th::unpaired({2.5, 3.5, 1.2, 3.0, 4.0, 2.9}, {"a", "a", "b", "c", "d", "d"},
                                      {"A", "A", "A", "B", "B", "B"});
    EXPECT_NEAR(ds_ranksum(shifted, Alternative::two_sided, 1.0).z, ds_ranksum(s).z, 1e-12);
}

namespace {

// Kruskal-Wallis H on singleton data, from mid-ranks.
double kruskal_wallis(const std::vector<double>& x, const std::vector<int>& g, int m) {
    const auto r = th::brute_midranks(x);
    const double n = static_cast<double>(x.size());
    std::vector<double> sum(static_cast<std::size_t>(m), 0), count(static_cast<std::size_t>(m), 0);
    for (std::size_t k = 0; k < x.size(); ++k) {
        sum[static_cast<std::size_t>(g[k])] += r[k];
        count[static_cast<std::size_t>(g[k])] += 1;
    }
    double h = 0;
    for (int k = 0; k < m; ++k) {
        h += sum[static_cast<std::size_t>(k)] * sum[static_cast<std::size_t>(k)] / count[static_cast<std::size_t>(k)];
    }
    return 12.0 / (n * (n + 1)) * h - 3 * (n + 1);
}

} // namespace

TEST(DsMultigroup, TracksKruskalWallisOnSingletons) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> value;
    std::vector<double> ds, kw;
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<double> x;
        std::vector<int> g;
        std::vector<std::string> labels;
        for (int k = 0; k < 45; ++k) {
            g.push_back(k % 3);
            x.push_back(value(rng) + 0.3 * (k % 3));
            labels.push_back(std::string(1, static_cast<char>('A' + k % 3)));
        }
        const auto s = th::unpaired(x, th::singleton_ids(45), labels);
        const auto r = ds_ranksum_multigroup(s);
        ds.push_back(r.statistic);
        kw.push_back(kruskal_wallis(x, g, 3));
    }
    double ma = 0, mb = 0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        ma += ds[k];
        mb += kw[k];
    }
    ma /= static_cast<double>(ds.size());
    mb /= static_cast<double>(kw.size());
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t k = 0; k < ds.size(); ++k) {
        sab += (ds[k] - ma) * (kw[k] - mb);
        saa += (ds[k] - ma) * (ds[k] - ma);
        sbb += (kw[k] - mb) * (kw[k] - mb);
    }
    EXPECT_GT(sab / std::sqrt(saa * sbb), 0.99);
}

TEST(DsMultigroup, ReferenceGroupDoesNotMatter) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> value;
    std::vector<double> x;
    std::vector<std::string> cid, grp;
    for (int i = 0; i < 18; ++i) {
        for (int j = 0; j <= i % 3; ++j) {
            x.push_back(value(rng) + (i % 3 == 2 ? 0.8 : 0.0));
            cid.push_back("k" + std::to_string(i));
            grp.push_back(std::string(1, static_cast<char>('A' + (i + j) % 3)));
        }
    }
    const auto a = ds_ranksum_multigroup(th::unpaired(x, cid, grp));
    // relabel so a different group sorts last and is left out of the contrasts
    std::vector<std::string> rotated;
    for (const auto& g : grp) {
        rotated.push_back(g == "A" ? "C" : (g == "B" ? "A" : "B"));
    }
    const auto b = ds_ranksum_multigroup(th::unpaired(x, cid, rotated));
    EXPECT_NEAR(a.statistic, b.statistic, 1e-8 * std::max(1.0, a.statistic));
    EXPECT_EQ(a.df, 2);
    EXPECT_EQ(a.statistic_name, "chi-square");
    EXPECT_NEAR(a.p_value, chi_square_sf(a.statistic, 2), 1e-15);
}

TEST(DsMultigroup, Errors) {
    const auto two = th::unpaired({1, 2, 3, 4}, th::singleton_ids(4), {"A", "A", "B", "B"});
    EXPECT_THROW(ds_ranksum_multigroup(two), Error);
    // every value tied: no residual variation
    const auto flat = th::unpaired({1, 1, 1, 1, 1, 1}, th::singleton_ids(6), {"A", "A", "B", "B", "C", "C"});
    EXPECT_THROW(ds_ranksum_multigroup(flat), Error);
}

TEST(DsRankSum, NullSizeNearNominalWithSubunitGrouping) {
    Scenario sc;
    sc.nclus = 20;
    sc.maxclsize = 5;
    sc.rho0 = sc.rho1 = 0.5;
    sc.clusgrp = false;
    sc.seed = 123;
    int rejections = 0;
    const int reps = 3000;
    for (int rep = 0; rep < reps; ++rep) {
        rejections += ds_ranksum(generate_replicate(sc, static_cast<std::size_t>(rep))).p_value < 0.05;
    }
    EXPECT_NEAR(rejections / double(reps), 0.05, 0.012);
}
