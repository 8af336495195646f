#include "urnsim/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "urnsim/io.hpp"
#include "urnsim/landscape.hpp"

namespace urnsim {

namespace {

constexpr double kBasinRadius = 0.1;
constexpr double kHistogramBin = 0.01;

bool wants(const ExperimentConfig& cfg, const std::string& name) {
    if (cfg.outputs.empty()) return true;
    return std::find(cfg.outputs.begin(), cfg.outputs.end(), name) != cfg.outputs.end();
}

void write_file(const std::string& out_dir, const std::string& name,
                const std::string& body) {
    std::filesystem::create_directories(out_dir);
    std::ofstream os(std::filesystem::path(out_dir) / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + name + " under " + out_dir);
    os << body;
}

nlohmann::json zero_to_json(const ModelParams& p, const ZeroPoint& z, int id) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : z.groups)
        groups.push_back({{"value", g.value}, {"count", g.count}});
    nlohmann::json j{{"id", id},
                     {"groups", groups},
                     {"kind", to_string(z.kind)},
                     {"residual", z.residual},
                     {"spectrum", z.spectrum},
                     {"stability", to_string(z.stability)},
                     // a zero eigenvalue leaves attraction undecided
                     {"marginal", z.stability == Stability::Stable},
                     {"excluded_given_nonzero_start", z.excluded_given_nonzero_start}};
    if (z.stability == Stability::StrictlyStable) {
        const double lambda = clt_exponent(p, z);
        j["clt_exponent"] = lambda;
        j["regime"] = to_string(regime_for(lambda));
    } else {
        j["clt_exponent"] = nullptr;
        j["regime"] = nullptr;
    }
    return j;
}

std::vector<ReplicationReport> run_and_assign(const ExperimentConfig& cfg,
                                              const std::vector<ZeroPoint>& zeros) {
    std::vector<ReplicationReport> reports =
        replicate(cfg.model, cfg.init, cfg.horizon, cfg.replications, cfg.seed,
                  cfg.threads);
    for (auto& r : reports) assign_nearest(r, zeros, kBasinRadius);
    return reports;
}

} // namespace

nlohmann::json zeros_payload(const ModelParams& p, bool include_unstable_middle) {
    std::vector<ZeroPoint> zeros = all_zeros(p, include_unstable_middle);
    const std::vector<ZeroPoint> support = exclude_unstable(p, zeros);
    // when nothing was dropped the support list carries the nonzero-start
    // marks for the same zeros, so serialize those
    if (support.size() == zeros.size()) zeros = support;
    const EquilibriaDiagnostics diag = diagnostics(p);

    nlohmann::json jz = nlohmann::json::array();
    for (std::size_t i = 0; i < zeros.size(); ++i)
        jz.push_back(zero_to_json(p, zeros[i], static_cast<int>(i)));

    // ids of the zeros the limit can actually charge
    std::vector<int> support_ids;
    for (const auto& s : support) {
        if (s.excluded_given_nonzero_start) continue;
        const std::vector<double> sz = s.expand();
        for (std::size_t i = 0; i < zeros.size(); ++i) {
            const std::vector<double> zi = zeros[i].expand();
            double diff = 0.0;
            for (std::size_t k = 0; k < sz.size(); ++k)
                diff = std::max(diff, std::abs(sz[k] - zi[k]));
            if (diff <= 1e-12) {
                support_ids.push_back(static_cast<int>(i));
                break;
            }
        }
    }

    nlohmann::json flags{{"u1", diag.flags.u1}, {"u2", diag.flags.u2},
                         {"u3", diag.flags.u3}, {"s1", diag.flags.s1},
                         {"s2", diag.flags.s2}, {"s3", diag.flags.s3},
                         {"s4", diag.flags.s4}};
    nlohmann::json jd{{"half_is_zero", diag.half_is_zero},
                      {"degenerate", diag.degenerate},
                      {"cond_cs", diag.flags.cond_cs},
                      {"flags", flags},
                      {"xhat", diag.abscissas.xhat},
                      {"xstar12", diag.abscissas.xstar12},
                      {"predicted_support", support_ids}};

    return nlohmann::json{{"schema_version", 1},
                          {"model", model_to_json(p)},
                          {"zeros", jz},
                          {"diagnostics", jd}};
}

std::string trajectory_csv(const std::vector<StateVector>& snapshots) {
    std::ostringstream os;
    os << "n,agent,z,ibar\n";
    for (const auto& s : snapshots)
        for (std::size_t h = 0; h < s.z.size(); ++h)
            os << s.n << ',' << h << ',' << format_double(s.z[h]) << ','
               << format_double(s.ibar(static_cast<int>(h))) << '\n';
    return os.str();
}

std::string report_csv(const std::vector<ReplicationReport>& reports) {
    std::ostringstream os;
    os << "replication,seed,agent,z_final,ibar_final,assigned_zero_id,distance\n";
    for (std::size_t r = 0; r < reports.size(); ++r) {
        const auto& rep = reports[r];
        const int zid = rep.assigned_zero ? *rep.assigned_zero : -1;
        for (std::size_t h = 0; h < rep.terminal.z.size(); ++h)
            os << r << ',' << format_u64(rep.seed) << ',' << h << ','
               << format_double(rep.terminal.z[h]) << ','
               << format_double(rep.empirical_means[h]) << ',' << zid << ','
               << format_double(rep.distance_to_zero) << '\n';
    }
    return os.str();
}

int cmd_simulate(const ExperimentConfig& cfg, const std::string& out_dir,
                 std::ostream& log) {
    const std::vector<ZeroPoint> zeros = all_zeros(cfg.model, cfg.include_unstable_middle);

    if (wants(cfg, "trajectory")) {
        const RunResult first = run_replication(cfg.model, cfg.init, cfg.horizon,
                                                cfg.seed, 0, cfg.record_every);
        write_file(out_dir, "trajectory.csv", trajectory_csv(first.snapshots));
    }

    std::vector<ReplicationReport> reports = run_and_assign(cfg, zeros);
    if (wants(cfg, "report")) write_file(out_dir, "report.csv", report_csv(reports));

    double spread = 0.0, mean_dist = 0.0;
    std::vector<int> hit_ids;
    for (const auto& r : reports) {
        const auto [lo, hi] =
            std::minmax_element(r.terminal.z.begin(), r.terminal.z.end());
        spread = std::max(spread, *hi - *lo);
        mean_dist += r.distance_to_zero;
        if (r.assigned_zero &&
            std::find(hit_ids.begin(), hit_ids.end(), *r.assigned_zero) == hit_ids.end())
            hit_ids.push_back(*r.assigned_zero);
    }
    mean_dist /= static_cast<double>(reports.size());
    std::sort(hit_ids.begin(), hit_ids.end());
    log << "simulate: R=" << reports.size() << " T=" << cfg.horizon
        << " max_terminal_spread=" << format_double(spread)
        << " mean_distance_to_nearest_zero=" << format_double(mean_dist)
        << " zeros_hit=[";
    for (std::size_t i = 0; i < hit_ids.size(); ++i)
        log << (i ? "," : "") << hit_ids[i];
    log << "]\n";
    return 0;
}

int cmd_equilibria(const ExperimentConfig& cfg, const std::string& out_dir,
                   std::ostream& log) {
    const nlohmann::json payload = zeros_payload(cfg.model, cfg.include_unstable_middle);
    if (wants(cfg, "zeros")) write_file(out_dir, "zeros.json", payload.dump(2) + "\n");
    log << "equilibria: " << payload.at("zeros").size() << " zeros, support=["
        << payload.at("diagnostics").at("predicted_support").dump() << "]\n";
    return 0;
}

int cmd_field(const ExperimentConfig& cfg, const std::string& out_dir,
              std::ostream& log) {
    if (cfg.model.n_agents != 2)
        throw ConfigError("field: model.n must be 2");
    const std::vector<FieldRow> rows = field_grid(cfg.model, GridSpec{cfg.grid_resolution});
    if (wants(cfg, "field")) {
        std::ostringstream os;
        write_field_csv(os, rows);
        write_file(out_dir, "field.csv", os.str());
    }
    log << "field: " << rows.size() << " nodes at resolution " << cfg.grid_resolution
        << "\n";
    return 0;
}

nlohmann::json mc_payload(const ExperimentConfig& cfg) {
    if (cfg.replications < 2) throw ConfigError("mc: needs replications >= 2");
    const std::vector<ZeroPoint> zeros = all_zeros(cfg.model, cfg.include_unstable_middle);
    const std::vector<ReplicationReport> reports = run_and_assign(cfg, zeros);

    std::vector<long> hits(zeros.size(), 0);
    long unassigned = 0;
    const int n_bins = static_cast<int>(std::lround(1.0 / kHistogramBin));
    std::vector<long> histogram(n_bins, 0);
    for (const auto& r : reports) {
        if (r.assigned_zero)
            ++hits[*r.assigned_zero];
        else
            ++unassigned;
        for (double z : r.terminal.z) {
            const int bin = std::min(n_bins - 1, static_cast<int>(z / kHistogramBin));
            ++histogram[bin];
        }
    }

    nlohmann::json jz = nlohmann::json::array();
    for (std::size_t i = 0; i < zeros.size(); ++i) {
        nlohmann::json zj = zero_to_json(cfg.model, zeros[i], static_cast<int>(i));
        zj["hits"] = hits[i];
        jz.push_back(std::move(zj));
    }
    return nlohmann::json{{"schema_version", 1},
                          {"model", model_to_json(cfg.model)},
                          {"replications", cfg.replications},
                          {"horizon", cfg.horizon},
                          {"radius", kBasinRadius},
                          {"zeros", jz},
                          {"unassigned", unassigned},
                          {"histogram",
                           {{"bin_width", kHistogramBin}, {"counts", histogram}}}};
}

int cmd_mc(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& log) {
    const nlohmann::json payload = mc_payload(cfg);
    if (wants(cfg, "basin")) write_file(out_dir, "basin.json", payload.dump(2) + "\n");
    log << "mc: R=" << cfg.replications << " unassigned=" << payload.at("unassigned")
        << "\n";
    return 0;
}

nlohmann::json clt_payload(const ExperimentConfig& cfg) {
    const std::vector<ZeroPoint> zeros = all_zeros(cfg.model, false);
    std::vector<ZeroPoint> candidates;
    for (const auto& z : zeros)
        if (z.kind == ZeroKind::Synchronization &&
            z.stability == Stability::StrictlyStable)
            candidates.push_back(z);
    if (cfg.zero_index < 0 || cfg.zero_index >= static_cast<int>(candidates.size()))
        throw ConfigError("clt-check: zero_index out of range (" +
                          std::to_string(candidates.size()) +
                          " strictly stable synchronization zeros)");
    const ZeroPoint& zero = candidates[cfg.zero_index];

    const CltCheckReport rep = clt_empirical_check(cfg.model, zero, cfg.horizon,
                                                   cfg.replications, cfg.seed,
                                                   cfg.threads);
    const int n = cfg.model.n_agents;
    auto matrix = [&](const std::vector<double>& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < n; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (int j = 0; j < n; ++j) row.push_back(m[i * n + j]);
            rows.push_back(std::move(row));
        }
        return rows;
    };
    return nlohmann::json{{"schema_version", 1},
                          {"model", model_to_json(cfg.model)},
                          {"zero", zero_to_json(cfg.model, zero, cfg.zero_index)},
                          {"horizon", cfg.horizon},
                          {"replications", cfg.replications},
                          {"lambda", rep.lambda},
                          {"regime", to_string(rep.regime)},
                          {"predicted_cov", matrix(rep.predicted_cov)},
                          {"empirical_cov", matrix(rep.empirical_cov)},
                          {"max_rel_err_diag", rep.max_rel_err_diag},
                          {"max_abs_err", rep.max_abs_err},
                          {"qualified", rep.qualified},
                          {"insufficient_sample", rep.insufficient_sample}};
}

int cmd_clt_check(const ExperimentConfig& cfg, const std::string& out_dir,
                  std::ostream& log) {
    const nlohmann::json payload = clt_payload(cfg);
    if (wants(cfg, "clt")) write_file(out_dir, "clt.json", payload.dump(2) + "\n");
    log << "clt-check: lambda=" << payload.at("lambda")
        << " max_rel_err_diag=" << payload.at("max_rel_err_diag") << "\n";
    return 0;
}

} // namespace urnsim
