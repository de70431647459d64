#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "clusrank/distributions.hpp"
#include "clusrank/sample.hpp"

namespace clusrank {

/// One simulation configuration.
///
/// Rank-sum scenarios generate `nclus` clusters per group; paired scenarios
/// generate `nclus` clusters in total. `rho1` is only used by rank-sum
/// scenarios (the second group's correlation).
struct Scenario {
    bool paired = false;
    int nclus = 20;
    int maxclsize = 2;
    double delta = 0.0;
    double rho0 = 0.1;
    double rho1 = 0.1;
    CorrelationStructure structure = CorrelationStructure::exchangeable;
    double misrate = 0.0;
    bool clusgrp = true;
    double level = 0.05;
    std::size_t nrep = 1000;
    std::uint64_t seed = 1;

    /// Throws clusrank::Error on invalid parameters, including correlation
    /// matrices that are not positive definite at dimension `maxclsize`.
    void validate() const;
    /// Number of rows dropped: floor(misrate · rows).
    std::size_t dropped_rows() const;
};

/// Rank-sum data: values exp(Z) + delta·group with group labels "0"/"1" and
/// cluster ids "1".."2·nclus". Group "0" is the unshifted group.
ClusteredSample datgen_sum(const Scenario& scenario, RngStream& rng);

/// Paired differences sign(Z)·exp(|Z|) with Z ~ MVN(delta, corr(rho0)).
ClusteredSample datgen_sgn(const Scenario& scenario, RngStream& rng);

/// Generates replicate `rep` of `scenario` on its own substream.
ClusteredSample generate_replicate(const Scenario& scenario, std::size_t rep);

struct MethodRate {
    std::string method; // "rgl" or "ds"
    std::size_t rejections = 0;
    std::size_t failures = 0;
    double rate = 0.0; // rejections / successful replicates
    double se = 0.0;   // sqrt(rate (1 - rate) / successful replicates)
};

struct PowerReport {
    Scenario scenario;
    MethodRate rgl;
    MethodRate ds;
};

/// Thread count from CLUSRANK_THREADS, else hardware concurrency.
unsigned default_threads();

/// Runs `scenario.nrep` replicates, applying the RGL and DS tests to each
/// and recording two-sided p < level. The result depends only on the
/// scenario (including its seed), not on `threads`.
PowerReport simpower(const Scenario& scenario, unsigned threads = 0);

enum class TableId { rsex, rsar, srex, srar };

TableId parse_table(std::string_view text);
std::string_view to_string(TableId id);

/// Published rejection percentages for one grid row: {RGL, DS} at δ = 0, 0.2, 0.5.
struct ReferenceRates {
    double rgl[3];
    double ds[3];
};

struct TableRow {
    Scenario scenario; // delta unset; filled per cell
    ReferenceRates reference;
};

inline constexpr double table_deltas[3] = {0.0, 0.2, 0.5};

/// Full scenario grid of a table, in published row order.
std::vector<TableRow> table_grid(TableId id);

struct TableCell {
    std::size_t row = 0;
    int delta_index = 0;
    PowerReport report;
};

struct TableReport {
    TableId id = TableId::rsex;
    std::vector<TableRow> rows;
    std::vector<TableCell> cells; // row-major, three deltas per row
};

/// Runs every (row, δ) cell of a table with `nrep` replicates. Cell seeds are
/// derived from `seed` and the cell position.
TableReport run_table(TableId id, std::size_t nrep, std::uint64_t seed, unsigned threads = 0);

/// Seed for cell (row, delta index) of a table run.
std::uint64_t cell_seed(std::uint64_t seed, std::size_t row, int delta_index);

} // namespace clusrank
