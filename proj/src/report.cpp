#include "clusrank/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "clusrank/csv.hpp"
#include "clusrank/ranksum_ds.hpp"
#include "clusrank/ranksum_rgl.hpp"
#include "clusrank/signedrank_ds.hpp"
#include "clusrank/signedrank_rgl.hpp"

namespace clusrank {

namespace {

std::string sig6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string data_line(const TestRequest& req) {
    std::string s = "data:  " + req.value_column;
    if (!req.paired && req.group_column) {
        s += "; group: " + *req.group_column;
    }
    s += "; cluster: " + req.cluster_column;
    if (req.stratum_column) {
        s += "; stratum: " + *req.stratum_column;
    }
    if (!req.input.empty()) {
        s += "; (from " + req.input + ")";
    }
    return s;
}

std::string alternative_line(const TestRequest& req) {
    std::string s = req.paired ? "alternative hypothesis: true shift in location is "
                               : "alternative hypothesis: true difference in locations is ";
    switch (req.alternative) {
    case Alternative::two_sided:
        s += "not equal to ";
        break;
    case Alternative::less:
        s += "less than ";
        break;
    case Alternative::greater:
        s += "greater than ";
        break;
    }
    return s + sig6(req.mu);
}

} // namespace

Method parse_method(std::string_view text) {
    if (text == "rgl") return Method::rgl;
    if (text == "ds") return Method::ds;
    throw Error("unknown method '" + std::string(text) + "' (expected rgl or ds)");
}

std::string_view to_string(Method m) {
    return m == Method::rgl ? "rgl" : "ds";
}

void TestRequest::validate() const {
    if (!paired && !group_column) {
        throw Error("--group is required unless --paired is given");
    }
    if (paired && group_column) {
        throw Error("--group does not apply to paired data");
    }
    if (stratum_column && (paired || method != Method::rgl)) {
        throw Error("--stratum is only supported for the rgl rank-sum test");
    }
    if (exact && method == Method::ds) {
        throw Error("exact mode unsupported for ds");
    }
    if (!std::isfinite(mu)) {
        throw Error("mu must be finite");
    }
}

TestResult dispatch(const TestRequest& req, const ClusteredSample& sample) {
    req.validate();
    if (req.paired) {
        if (req.method == Method::ds) {
            return ds_signedrank(sample, req.alternative, req.mu);
        }
        return req.exact ? rgl_signedrank_exact(sample, req.alternative, req.mu, req.draws, req.seed)
                         : rgl_signedrank(sample, req.alternative, req.mu);
    }
    if (req.method == Method::ds) {
        if (sample.group_count() >= 3) {
            if (req.mu != 0.0 || req.alternative != Alternative::two_sided) {
                throw Error("mu and one-sided alternatives are not defined for more than 2 groups");
            }
            return ds_ranksum_multigroup(sample);
        }
        return ds_ranksum(sample, req.alternative, req.mu);
    }
    if (sample.group_count() != 2) {
        throw Error("the rgl rank-sum test compares exactly 2 groups");
    }
    if (sample.cluster_level_grouping()) {
        if (req.exact) {
            return rgl_ranksum_exact(sample, req.alternative, req.mu, req.draws, req.seed);
        }
        return sample.has_strata() ? rgl_ranksum_stratified(sample, req.alternative, req.mu)
                                   : rgl_ranksum(sample, req.alternative, req.mu);
    }
    if (req.exact) {
        throw Error("exact mode unsupported for subunit-level grouping with rgl");
    }
    if (sample.has_strata()) {
        throw Error("--stratum requires cluster-level grouping");
    }
    return rgl_ranksum_subunit(sample, req.alternative, req.mu);
}

TestResult run_test(const TestRequest& req) {
    req.validate();
    const auto table = read_csv_file(req.input);
    const auto records = records_from_csv(table, {req.value_column, req.cluster_column,
                                                  req.paired ? std::nullopt : req.group_column, req.stratum_column});
    return dispatch(req, ClusteredSample::ingest(records, req.paired));
}

std::string format_text(const TestRequest& req, const TestResult& r) {
    std::ostringstream out;
    out << "\n\t" << r.method << "\n\n";
    out << data_line(req) << "\n";
    out << "number of observations: " << r.n_obs << ";  number of clusters: " << r.n_clusters << "\n";
    if (r.df) {
        out << "number of groups: " << r.n_groups << "\n";
        out << "chi-square test statistic = " << sig6(r.statistic) << ", p-value = " << sig6(r.p_value) << "\n";
        return out.str();
    }
    out << r.statistic_name << " = " << sig6(r.statistic) << ", p-value = " << sig6(r.p_value) << "\n";
    if (r.permutations) {
        out << (r.exhaustive ? "permutations enumerated: " : "random permutations: ") << *r.permutations << "\n";
    }
    out << alternative_line(req) << "\n";
    return out.str();
}

nlohmann::json to_json(const TestRequest& req, const TestResult& r) {
    auto num = [](double v) -> nlohmann::json {
        if (std::isfinite(v)) {
            return v;
        }
        return nullptr;
    };
    nlohmann::json j;
    j["method"] = r.method;
    j["data"] = {{"value", req.value_column}, {"cluster", req.cluster_column}, {"input", req.input}};
    if (req.group_column && !req.paired) {
        j["data"]["group"] = *req.group_column;
    }
    if (req.stratum_column) {
        j["data"]["stratum"] = *req.stratum_column;
    }
    j["statistic_name"] = r.statistic_name;
    j["statistic"] = num(r.statistic);
    j["observed"] = num(r.observed);
    j["null_mean"] = num(r.null_mean);
    j["variance"] = num(r.variance);
    j["z"] = num(r.z);
    j["p_value"] = num(r.p_value);
    j["alternative"] = std::string(to_string(r.alternative));
    j["mu"] = req.mu;
    j["n_obs"] = r.n_obs;
    j["n_clusters"] = r.n_clusters;
    j["n_groups"] = r.n_groups;
    if (r.df) {
        j["df"] = *r.df;
    }
    if (r.permutations) {
        j["permutations"] = *r.permutations;
        j["exhaustive"] = r.exhaustive;
    }
    j["warnings"] = r.warnings;
    return j;
}

namespace {

void power_row(std::ostream& out, const PowerReport& rep, const std::string& table, const std::string& row,
               const std::optional<ReferenceRates>& ref, int delta_index) {
    const auto& s = rep.scenario;
    out << table << ',' << row << ',' << (s.paired ? "paired" : (s.clusgrp ? "cluster" : "subunit")) << ','
        << s.misrate << ',' << s.maxclsize << ',' << s.rho0 << ',' << (s.paired ? s.rho0 : s.rho1) << ','
        << to_string(s.structure) << ',' << s.nclus << ',' << s.delta << ',' << s.nrep << ',' << s.seed;
    for (const MethodRate* m : {&rep.rgl, &rep.ds}) {
        out << ',' << fixed(100.0 * m->rate, 2) << ',' << fixed(100.0 * m->se, 2) << ',' << m->rejections << ','
            << m->failures << ',';
        if (ref) {
            out << (m == &rep.rgl ? ref->rgl[delta_index] : ref->ds[delta_index]);
        }
    }
    out << '\n';
}

constexpr const char* power_header =
    "table,row,grouping,misrate,maxclsize,rho0,rho1,structure,nclus,delta,nrep,seed,"
    "rgl_rate_pct,rgl_se_pct,rgl_rejections,rgl_failures,rgl_reference_pct,"
    "ds_rate_pct,ds_se_pct,ds_rejections,ds_failures,ds_reference_pct\n";

} // namespace

void write_power_csv(std::ostream& out, const std::vector<PowerReport>& reports, const std::string& table) {
    out << power_header;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        power_row(out, reports[i], table, std::to_string(i + 1), std::nullopt, 0);
    }
}

void write_table_csv(std::ostream& out, const TableReport& report) {
    out << power_header;
    for (const auto& cell : report.cells) {
        power_row(out, cell.report, std::string(to_string(report.id)), std::to_string(cell.row + 1),
                   report.rows[cell.row].reference, cell.delta_index);
    }
}

std::string format_table(const TableReport& report) {
    const bool paired = report.id == TableId::srex || report.id == TableId::srar;
    std::ostringstream out;
    out << "Empirical rejection percentage (published value in parentheses), table " << to_string(report.id)
        << ", correlation "
        << ((report.id == TableId::rsar || report.id == TableId::srar) ? "AR1" : "exchangeable") << "\n";
    out << (paired ? "" : "group    ") << "miss  max  rho        size |";
    for (double d : table_deltas) {
        out << "            delta = " << fixed(d, 1) << "          |";
    }
    out << "\n";
    out << (paired ? "" : "level    ") << "rate  n_i                  |";
    for (int d = 0; d < 3; ++d) {
        (void)d;
        out << "     RGL           DS           |";
    }
    out << "\n";
    for (std::size_t r = 0; r < report.rows.size(); ++r) {
        const auto& s = report.rows[r].scenario;
        char head[96];
        if (paired) {
            std::snprintf(head, sizeof head, "%-4s  %-3d  %-9s  %-4d |", fixed(s.misrate, 1).c_str(), s.maxclsize,
                          fixed(s.rho0, 1).c_str(), s.nclus);
        } else {
            const std::string rho = fixed(s.rho0, 1) + "," + fixed(s.rho1, 1);
            std::snprintf(head, sizeof head, "%-7s  %-4s  %-3d  %-9s  %-4d |", s.clusgrp ? "cluster" : "subunit",
                          fixed(s.misrate, 1).c_str(), s.maxclsize, rho.c_str(), s.nclus);
        }
        out << head;
        for (const auto& cell : report.cells) {
            if (cell.row != r) {
                continue;
            }
            const auto& ref = report.rows[r].reference;
            const int d = cell.delta_index;
            char buf[96];
            std::snprintf(buf, sizeof buf, " %5.1f (%5.1f) %5.1f (%5.1f) |", 100.0 * cell.report.rgl.rate,
                          ref.rgl[d], 100.0 * cell.report.ds.rate, ref.ds[d]);
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

std::string format_power(const PowerReport& rep) {
    std::ostringstream out;
    const auto& s = rep.scenario;
    out << (s.paired ? "signed-rank" : "rank-sum") << " scenario: nclus=" << s.nclus << " maxclsize=" << s.maxclsize
        << " delta=" << s.delta << " rho=" << s.rho0;
    if (!s.paired) {
        out << "," << s.rho1 << " grouping=" << (s.clusgrp ? "cluster" : "subunit");
    }
    out << " structure=" << to_string(s.structure) << " misrate=" << s.misrate << " level=" << s.level
        << " nrep=" << s.nrep << " seed=" << s.seed << "\n";
    for (const MethodRate* m : {&rep.rgl, &rep.ds}) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "  %-4s %.6g (se %.4f, failures %zu)\n", m->method.c_str(), m->rate, m->se,
                      m->failures);
        out << buf;
    }
    return out.str();
}

} // namespace clusrank
