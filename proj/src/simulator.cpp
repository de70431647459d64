#include "clusrank/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <thread>

#include "clusrank/ranksum_ds.hpp"
#include "clusrank/ranksum_rgl.hpp"
#include "clusrank/signedrank_ds.hpp"
#include "clusrank/signedrank_rgl.hpp"

namespace clusrank {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Indices of rows kept after dropping floor(misrate · rows) uniformly
// without replacement.
std::vector<bool> keep_mask(const Scenario& s, std::size_t rows, RngStream& rng) {
    std::vector<bool> keep(rows, true);
    const std::size_t drop = s.dropped_rows();
    if (drop == 0) {
        return keep;
    }
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < drop; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(rows - i));
        std::swap(idx[i], idx[j]);
        keep[idx[i]] = false;
    }
    return keep;
}

} // namespace

void Scenario::validate() const {
    if (nclus < 1) {
        throw Error("nclus must be positive");
    }
    if (maxclsize < 1) {
        throw Error("maxclsize must be positive");
    }
    if (!(misrate >= 0.0 && misrate < 1.0)) {
        throw Error("misrate must lie in [0, 1)");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw Error("level must lie in (0, 1)");
    }
    if (!std::isfinite(delta)) {
        throw Error("delta must be finite");
    }
    if (nrep < 1) {
        throw Error("nrep must be positive");
    }
    build_correlation({structure, rho0, maxclsize});
    if (!paired) {
        build_correlation({structure, rho1, maxclsize});
    }
}

std::size_t Scenario::dropped_rows() const {
    const auto rows = static_cast<double>(nclus) * maxclsize * (paired ? 1 : 2);
    return static_cast<std::size_t>(std::floor(misrate * rows + 1e-9));
}

ClusteredSample datgen_sum(const Scenario& s, RngStream& rng) {
    if (s.paired) {
        throw Error("datgen_sum needs an unpaired scenario");
    }
    const MvnSampler first(build_correlation({s.structure, s.rho0, s.maxclsize}));
    const MvnSampler second(build_correlation({s.structure, s.rho1, s.maxclsize}));
    const auto per_group = static_cast<std::size_t>(s.nclus) * static_cast<std::size_t>(s.maxclsize);
    const std::size_t rows = 2 * per_group;

    std::vector<double> z;
    z.reserve(rows);
    for (int i = 0; i < s.nclus; ++i) {
        first.draw(0.0, rng, z);
    }
    for (int i = 0; i < s.nclus; ++i) {
        second.draw(0.0, rng, z);
    }
    std::vector<int> group(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        group[k] = k < per_group ? 0 : 1;
    }
    if (!s.clusgrp) {
        std::shuffle(group.begin(), group.end(), rng.engine());
    }
    const auto keep = keep_mask(s, rows, rng);

    std::vector<Record> records;
    records.reserve(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        if (!keep[k]) {
            continue;
        }
        Record r;
        r.value = std::exp(z[k]) + s.delta * group[k];
        r.cluster = std::to_string(k / static_cast<std::size_t>(s.maxclsize) + 1);
        r.group = std::to_string(group[k]);
        records.push_back(std::move(r));
    }
    return ClusteredSample::ingest(std::move(records), false);
}

ClusteredSample datgen_sgn(const Scenario& s, RngStream& rng) {
    if (!s.paired) {
        throw Error("datgen_sgn needs a paired scenario");
    }
    const MvnSampler sampler(build_correlation({s.structure, s.rho0, s.maxclsize}));
    const std::size_t rows = static_cast<std::size_t>(s.nclus) * static_cast<std::size_t>(s.maxclsize);
    std::vector<double> z;
    z.reserve(rows);
    for (int i = 0; i < s.nclus; ++i) {
        sampler.draw(s.delta, rng, z);
    }
    const auto keep = keep_mask(s, rows, rng);
    std::vector<Record> records;
    records.reserve(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        if (!keep[k]) {
            continue;
        }
        Record r;
        r.value = (z[k] > 0.0 ? 1.0 : (z[k] < 0.0 ? -1.0 : 0.0)) * std::exp(std::fabs(z[k]));
        r.cluster = std::to_string(k / static_cast<std::size_t>(s.maxclsize) + 1);
        records.push_back(std::move(r));
    }
    return ClusteredSample::ingest(std::move(records), true);
}

ClusteredSample generate_replicate(const Scenario& scenario, std::size_t rep) {
    RngStream rng(scenario.seed, rep);
    return scenario.paired ? datgen_sgn(scenario, rng) : datgen_sum(scenario, rng);
}

unsigned default_threads() {
    if (const char* env = std::getenv("CLUSRANK_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) {
            return static_cast<unsigned>(v);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

PowerReport simpower(const Scenario& scenario, unsigned threads) {
    scenario.validate();
    if (threads == 0) {
        threads = default_threads();
    }
    // 0 = accept, 1 = reject, 2 = failure; one slot per replicate and method.
    std::vector<std::uint8_t> rgl(scenario.nrep), ds(scenario.nrep);
    std::atomic<std::size_t> next{0};

    auto classify = [&](auto&& test) -> std::uint8_t {
        try {
            return test() < scenario.level ? 1 : 0;
        } catch (const Error&) {
            return 2;
        }
    };
    auto worker = [&] {
        for (std::size_t rep = next++; rep < scenario.nrep; rep = next++) {
            const auto sample = generate_replicate(scenario, rep);
            if (scenario.paired) {
                rgl[rep] = classify([&] { return rgl_signedrank(sample).p_value; });
                ds[rep] = classify([&] { return ds_signedrank(sample).p_value; });
            } else {
                rgl[rep] = classify([&] {
                    return scenario.clusgrp ? rgl_ranksum(sample).p_value : rgl_ranksum_subunit(sample).p_value;
                });
                ds[rep] = classify([&] { return ds_ranksum(sample).p_value; });
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        const auto n_threads = std::min<std::size_t>(threads, scenario.nrep);
        for (std::size_t t = 1; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
        worker();
    }

    auto summarize = [&](const std::vector<std::uint8_t>& flags, std::string name) {
        MethodRate m;
        m.method = std::move(name);
        for (auto f : flags) {
            m.rejections += f == 1;
            m.failures += f == 2;
        }
        const auto ok = static_cast<double>(flags.size() - m.failures);
        if (ok > 0) {
            m.rate = static_cast<double>(m.rejections) / ok;
            m.se = std::sqrt(m.rate * (1.0 - m.rate) / ok);
        }
        return m;
    };
    PowerReport out;
    out.scenario = scenario;
    out.rgl = summarize(rgl, "rgl");
    out.ds = summarize(ds, "ds");
    return out;
}

TableId parse_table(std::string_view text) {
    if (text == "rsex") return TableId::rsex;
    if (text == "rsar") return TableId::rsar;
    if (text == "srex") return TableId::srex;
    if (text == "srar") return TableId::srar;
    throw Error("unknown table '" + std::string(text) + "' (expected rsex, rsar, srex or srar)");
}

std::string_view to_string(TableId id) {
    switch (id) {
    case TableId::rsex: return "rsex";
    case TableId::rsar: return "rsar";
    case TableId::srex: return "srex";
    case TableId::srar: return "srar";
    }
    return "rsex";
}

namespace {

// Published percentages, row order as in table_grid():
// RGL δ=0, DS δ=0, RGL δ=0.2, DS δ=0.2, RGL δ=0.5, DS δ=0.5.
constexpr double rsex_ref[36][6] = {
    {4.3, 4.5, 16.3, 17.0, 64.1, 65.2},   {4.7, 4.8, 36.5, 37.0, 96.4, 96.5},
    {5.2, 5.5, 14.7, 15.1, 52.5, 53.7},   {5.0, 5.0, 29.8, 29.9, 89.6, 89.6},
    {5.3, 5.5, 14.6, 15.3, 59.2, 60.2},   {4.8, 4.9, 30.6, 30.9, 95.0, 95.1},
    {4.8, 5.0, 28.9, 30.0, 91.7, 92.1},   {5.0, 5.1, 64.1, 64.4, 99.9, 99.9},
    {5.0, 5.5, 16.6, 17.4, 64.0, 64.8},   {4.7, 4.8, 36.6, 37.1, 95.6, 95.7},
    {5.3, 5.5, 18.2, 18.9, 79.7, 80.6},   {4.8, 4.8, 42.0, 42.4, 99.6, 99.7},
    {5.7, 6.0, 24.6, 28.2, 84.3, 89.5},   {4.7, 4.8, 58.4, 59.1, 100.0, 99.9},
    {4.7, 5.0, 13.6, 16.9, 53.0, 62.6},   {4.7, 5.2, 29.7, 33.4, 92.4, 94.9},
    {4.8, 4.5, 14.1, 16.9, 67.5, 77.2},   {4.9, 4.8, 36.5, 41.2, 99.4, 99.5},
    {5.7, 5.8, 18.3, 18.5, 69.7, 68.6},   {4.7, 4.7, 41.2, 41.4, 97.6, 97.5},
    {4.5, 4.5, 19.0, 18.9, 68.7, 67.3},   {4.7, 4.8, 41.5, 41.2, 97.5, 97.2},
    {4.6, 4.9, 19.6, 19.2, 70.5, 68.2},   {4.6, 4.7, 41.3, 40.5, 97.5, 97.1},
    {4.7, 4.6, 40.2, 38.6, 97.5, 96.8},   {4.9, 5.0, 77.2, 76.9, 100.0, 100.0},
    {5.0, 5.0, 43.3, 40.5, 97.1, 95.7},   {5.3, 5.5, 77.4, 75.7, 100.0, 100.0},
    {5.2, 4.8, 43.4, 40.1, 96.6, 95.0},   {5.0, 5.1, 78.4, 76.5, 100.0, 100.0},
    {4.9, 5.0, 38.3, 35.8, 96.5, 94.5},   {4.7, 4.3, 76.4, 71.5, 100.0, 100.0},
    {4.5, 4.7, 42.8, 35.2, 97.1, 93.1},   {3.6, 4.4, 78.2, 70.3, 100.0, 100.0},
    {4.5, 4.8, 44.9, 34.8, 97.4, 92.6},   {4.8, 4.7, 79.8, 70.4, 100.0, 99.9},
};

constexpr double rsar_ref[36][6] = {
    {5.0, 5.3, 19.3, 20.0, 63.8, 64.8},   {4.8, 4.9, 35.9, 36.5, 96.2, 96.2},
    {5.6, 5.9, 14.0, 14.5, 52.6, 53.9},   {5.2, 5.3, 28.1, 28.3, 90.1, 90.2},
    {4.5, 4.9, 13.7, 14.4, 58.9, 60.3},   {4.6, 4.8, 31.9, 32.1, 94.2, 94.5},
    {5.0, 5.3, 34.3, 35.4, 93.6, 93.8},   {4.5, 4.7, 69.5, 69.9, 100.0, 100.0},
    {4.3, 4.9, 20.3, 21.1, 75.0, 75.9},   {5.1, 5.2, 46.4, 46.9, 98.9, 98.9},
    {5.1, 5.3, 19.3, 20.0, 78.6, 79.5},   {5.1, 5.2, 42.2, 42.7, 99.6, 99.6},
    {4.8, 5.0, 30.6, 34.4, 91.6, 93.6},   {4.8, 5.0, 70.7, 68.7, 100.0, 100.0},
    {4.2, 4.8, 20.6, 24.1, 76.2, 83.7},   {5.8, 5.6, 49.2, 52.5, 99.7, 99.8},
    {5.3, 5.2, 15.9, 19.3, 70.0, 79.3},   {5.0, 5.1, 40.0, 43.7, 99.2, 99.6},
    {4.8, 5.3, 19.3, 19.3, 69.3, 68.0},   {5.0, 5.0, 40.4, 40.4, 97.2, 96.9},
    {4.8, 4.9, 19.5, 18.9, 69.1, 67.5},   {5.0, 4.9, 40.9, 40.1, 98.1, 97.7},
    {4.4, 4.5, 19.1, 18.3, 70.0, 67.8},   {5.0, 5.0, 40.4, 39.1, 97.1, 96.9},
    {5.1, 4.9, 39.5, 37.8, 97.6, 97.0},   {4.8, 4.8, 77.5, 77.1, 100.0, 100.0},
    {4.8, 4.9, 42.3, 38.6, 97.0, 95.8},   {4.7, 4.7, 78.1, 76.9, 100.0, 100.0},
    {5.0, 4.6, 41.1, 37.0, 97.2, 95.8},   {4.7, 4.8, 77.8, 76.0, 100.0, 100.0},
    {5.2, 5.5, 38.5, 35.8, 96.5, 94.3},   {5.5, 4.9, 76.5, 69.8, 100.0, 100.0},
    {5.2, 5.3, 43.2, 34.8, 97.2, 93.5},   {5.3, 5.6, 78.8, 71.3, 100.0, 100.0},
    {4.8, 4.0, 46.5, 35.4, 97.7, 93.0},   {5.5, 5.4, 81.6, 72.0, 100.0, 100.0},
};

constexpr double srex_ref[24][6] = {
    {5.4, 5.6, 19.7, 20.4, 78.8, 79.0},   {5.0, 5.1, 44.2, 44.4, 99.6, 99.6},
    {5.0, 5.3, 15.4, 15.8, 68.1, 69.0},   {5.1, 5.2, 34.6, 34.9, 97.6, 97.7},
    {5.1, 5.4, 13.7, 14.1, 56.5, 57.4},   {4.2, 4.2, 29.4, 29.8, 93.7, 93.8},
    {4.4, 4.5, 47.2, 47.5, 99.6, 99.6},   {4.6, 4.7, 88.0, 88.0, 100.0, 100.0},
    {5.0, 5.2, 19.7, 20.2, 81.4, 81.9},   {4.8, 4.9, 45.2, 45.5, 99.6, 99.6},
    {5.0, 5.3, 13.6, 14.3, 58.9, 59.9},   {5.1, 5.1, 29.4, 30.0, 95.0, 95.1},
    {4.4, 4.8, 21.4, 20.2, 82.7, 78.3},   {5.2, 5.0, 50.6, 45.3, 99.8, 99.5},
    {4.6, 5.2, 15.6, 15.7, 67.2, 67.1},   {4.7, 4.8, 36.0, 35.2, 97.9, 97.5},
    {4.9, 5.2, 14.3, 14.8, 58.1, 59.3},   {4.5, 4.7, 27.9, 28.1, 93.6, 93.7},
    {5.2, 5.1, 33.1, 31.9, 96.9, 96.5},   {5.1, 5.0, 72.3, 69.7, 100.0, 100.0},
    {4.3, 4.5, 17.7, 18.0, 77.7, 77.7},   {5.1, 5.2, 41.3, 41.1, 99.3, 99.3},
    {4.5, 4.8, 13.1, 13.7, 58.1, 59.2},   {5.1, 5.2, 30.0, 30.2, 93.9, 93.9},
};

constexpr double srar_ref[24][6] = {
    {4.35, 4.60, 21.12, 21.25, 78.22, 78.60},   {5.00, 5.10, 44.50, 44.75, 99.47, 99.47},
    {4.25, 4.42, 15.38, 15.85, 68.03, 68.80},   {5.35, 5.40, 35.70, 36.10, 97.45, 97.53},
    {5.10, 5.40, 13.38, 13.90, 56.58, 57.33},   {4.08, 4.20, 29.70, 30.05, 93.62, 93.90},
    {4.17, 4.33, 65.37, 65.05, 100.00, 100.00}, {4.60, 4.58, 97.65, 97.53, 100.00, 100.00},
    {4.90, 5.03, 36.23, 36.73, 98.47, 98.53},   {4.60, 4.60, 77.10, 77.17, 100.00, 100.00},
    {4.72, 4.95, 15.75, 16.25, 68.92, 69.78},   {4.62, 4.70, 35.85, 35.98, 98.03, 98.10},
    {4.10, 4.55, 22.48, 20.30, 87.40, 82.22},   {5.17, 5.40, 55.65, 49.65, 99.92, 99.72},
    {5.50, 5.58, 17.15, 17.20, 75.60, 73.72},   {4.88, 4.85, 41.40, 39.88, 98.80, 98.47},
    {5.15, 5.67, 13.72, 14.30, 59.70, 60.40},   {4.67, 4.95, 28.50, 28.93, 93.95, 93.92},
    {4.75, 4.67, 40.77, 37.70, 99.15, 98.28},   {5.00, 4.90, 82.33, 78.75, 100.00, 100.00},
    {4.95, 5.17, 29.07, 28.60, 93.65, 93.05},   {4.97, 4.78, 62.55, 61.65, 100.00, 100.00},
    {4.75, 4.97, 16.40, 17.25, 67.03, 67.08},   {4.60, 4.70, 34.50, 34.38, 97.40, 97.42},
};

ReferenceRates reference_of(const double (&row)[6]) {
    return {{row[0], row[2], row[4]}, {row[1], row[3], row[5]}};
}

} // namespace

std::vector<TableRow> table_grid(TableId id) {
    std::vector<TableRow> rows;
    const bool paired = id == TableId::srex || id == TableId::srar;
    const auto structure =
        (id == TableId::rsar || id == TableId::srar) ? CorrelationStructure::ar1 : CorrelationStructure::exchangeable;

    if (!paired) {
        const auto& ref = id == TableId::rsex ? rsex_ref : rsar_ref;
        const std::pair<double, int> shapes[] = {{0.0, 2}, {0.0, 5}, {0.5, 10}};
        const std::pair<double, double> rhos[] = {{0.1, 0.1}, {0.5, 0.5}, {-0.1, 0.9}};
        for (bool clusgrp : {true, false}) {
            for (const auto& [misrate, g] : shapes) {
                for (const auto& [r0, r1] : rhos) {
                    for (int nclus : {20, 50}) {
                        Scenario s;
                        s.paired = false;
                        s.clusgrp = clusgrp;
                        s.misrate = misrate;
                        s.maxclsize = g;
                        s.rho0 = r0;
                        s.rho1 = r1;
                        s.nclus = nclus;
                        s.structure = structure;
                        rows.push_back({s, reference_of(ref[rows.size()])});
                    }
                }
            }
        }
        return rows;
    }

    const auto& ref = id == TableId::srex ? srex_ref : srar_ref;
    const std::pair<double, int> shapes[] = {{0.0, 2}, {0.0, 10}, {0.5, 5}, {0.5, 10}};
    for (const auto& [misrate, g] : shapes) {
        for (double rho : {0.1, 0.5, 0.9}) {
            for (int nclus : {20, 50}) {
                Scenario s;
                s.paired = true;
                s.misrate = misrate;
                s.maxclsize = g;
                s.rho0 = rho;
                s.rho1 = rho;
                s.nclus = nclus;
                s.structure = structure;
                rows.push_back({s, reference_of(ref[rows.size()])});
            }
        }
    }
    return rows;
}

std::uint64_t cell_seed(std::uint64_t seed, std::size_t row, int delta_index) {
    return splitmix64(splitmix64(seed) ^ (static_cast<std::uint64_t>(row) * 4 + static_cast<std::uint64_t>(delta_index)));
}

TableReport run_table(TableId id, std::size_t nrep, std::uint64_t seed, unsigned threads) {
    TableReport out;
    out.id = id;
    out.rows = table_grid(id);
    for (std::size_t r = 0; r < out.rows.size(); ++r) {
        for (int d = 0; d < 3; ++d) {
            Scenario s = out.rows[r].scenario;
            s.delta = table_deltas[d];
            s.nrep = nrep;
            s.seed = cell_seed(seed, r, d);
            out.cells.push_back({r, d, simpower(s, threads)});
        }
    }
    return out;
}

} // namespace clusrank
