// hestonvvix: theoretical VVIX under Heston four ways (log contract, discrete
// replication, full-PDE double replication, closed-form approximation) plus
// VVIX-anchored calibration, table reproduction, and vol-of-vol sweeps.

#include <array>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "vvix/calibration.hpp"
#include "vvix/heston.hpp"
#include "vvix/mc_oracle.hpp"
#include "vvix/pde.hpp"
#include "vvix/replication.hpp"
#include "vvix/serialization.hpp"
#include "vvix/vix_analytics.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 2;        // input or numerical failure
constexpr int kExitNoConverge = 3;   // calibration finished without converging

struct ParamOverrides {
    std::optional<double> v0, kappa, theta, rho, sigma;
};

struct OutputSink {
    std::string path;    // empty means stdout
    std::string format;  // "csv" or "json"

    void write(const std::string& text) const {
        if (path.empty()) {
            std::cout << text;
        } else {
            vvix::write_text_file(path, text);
        }
    }
};

vvix::HestonParams load_params(const std::string& source, const ParamOverrides& ov,
                               vvix::MarketConvention& conv) {
    vvix::HestonParams p = vvix::resolve_params_source(source, conv);
    if (ov.v0) p.v0 = *ov.v0;
    if (ov.kappa) p.kappa = *ov.kappa;
    if (ov.theta) p.theta = *ov.theta;
    if (ov.rho) p.rho = *ov.rho;
    if (ov.sigma) p.sigma = *ov.sigma;
    p.validate();
    return p;
}

std::string fmt(double v) { return vvix::format_double(v); }

// One Table-1-shaped row: future, log contract, replication at two ladders,
// closed-form approximation.
struct VvixRow {
    std::string label;
    double future;
    double log_contract;
    double repl_k5;
    double repl_k10;
    double simple;
};

VvixRow compute_row(const std::string& label, const vvix::HestonParams& p, double tenor,
                    const vvix::MarketConvention& conv) {
    VvixRow row;
    row.label = label;
    row.future = vvix::vix_future(p, tenor, conv).points;
    row.log_contract = vvix::vvix_log_contract(p, tenor, conv).points;
    row.repl_k5 =
        vvix::vvix_by_replication(p, tenor, conv, vvix::default_vix_option_grid(5.0)).points;
    row.repl_k10 =
        vvix::vvix_by_replication(p, tenor, conv, vvix::default_vix_option_grid(10.0)).points;
    row.simple = vvix::vvix_simple(p, tenor, conv).points;
    return row;
}

struct McColumns {
    vvix::McEstimate future;
    vvix::McEstimate vvix_log;
};

McColumns compute_mc(const vvix::HestonParams& p, const vvix::MarketConvention& conv,
                     double tenor, std::size_t paths, std::uint64_t seed) {
    McColumns mc;
    mc.future = vvix::mc_vix_future(p, tenor, conv, paths, seed);
    mc.vvix_log = vvix::mc_vvix_log(p, tenor, conv, paths, seed + 1);
    return mc;
}

std::string rows_to_csv(const std::vector<VvixRow>& rows, const std::vector<McColumns>* mc) {
    std::string out = "set,vix_future,vvix_log,vvix_repl_k5,vvix_repl_k10,vvix_simple";
    if (mc != nullptr) out += ",mc_future,mc_future_se,mc_vvix_log,mc_vvix_log_se";
    out += '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const VvixRow& r = rows[i];
        out += r.label + ',' + fmt(r.future) + ',' + fmt(r.log_contract) + ',' + fmt(r.repl_k5) +
               ',' + fmt(r.repl_k10) + ',' + fmt(r.simple);
        if (mc != nullptr) {
            const McColumns& m = (*mc)[i];
            out += ',' + fmt(m.future.mean) + ',' + fmt(m.future.std_error) + ',' +
                   fmt(m.vvix_log.mean) + ',' + fmt(m.vvix_log.std_error);
        }
        out += '\n';
    }
    return out;
}

std::string rows_to_json(const std::vector<VvixRow>& rows, const std::vector<McColumns>* mc) {
    json arr = json::array();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const VvixRow& r = rows[i];
        json obj{{"set", r.label},          {"vixFuture", r.future},
                 {"vvixLog", r.log_contract}, {"vvixReplK5", r.repl_k5},
                 {"vvixReplK10", r.repl_k10}, {"vvixSimple", r.simple}};
        if (mc != nullptr) {
            const McColumns& m = (*mc)[i];
            obj["mc"] = {{"future", m.future.mean},
                         {"futureSe", m.future.std_error},
                         {"vvixLog", m.vvix_log.mean},
                         {"vvixLogSe", m.vvix_log.std_error}};
        }
        arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
}

std::vector<double> parse_triplet(const std::string& text, const char* what) {
    std::vector<double> vals;
    std::string token;
    std::istringstream stream(text);
    while (std::getline(stream, token, ':')) vals.push_back(std::stod(token));
    if (vals.size() != 3) {
        throw CLI::ValidationError(std::string(what) + " must be lo:hi:step");
    }
    return vals;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Theoretical VVIX under the Heston model and VVIX-anchored calibration"};
    app.require_subcommand(1);

    std::string params_source = "set1";
    ParamOverrides ov;
    OutputSink sink;
    sink.format = "csv";
    double k1 = 5.0, kmax = 150.0, dk = 0.5;
    double tenor = 30.0 / 365.0;
    double spot = 6000.0;
    std::uint64_t seed = 42;
    std::size_t mc_paths = 1000000;

    auto add_common = [&](CLI::App* cmd, bool with_strikes) {
        cmd->add_option("--params", params_source, "Parameter preset (set1..set6) or JSON path");
        cmd->add_option("--v0", ov.v0, "Override initial variance");
        cmd->add_option("--kappa", ov.kappa, "Override mean-reversion speed");
        cmd->add_option("--theta", ov.theta, "Override long-run variance");
        cmd->add_option("--rho", ov.rho, "Override spot/vol correlation");
        cmd->add_option("--sigma", ov.sigma, "Override vol-of-vol");
        cmd->add_option("--out", sink.path, "Output file (default stdout)");
        cmd->add_option("--format", sink.format, "Output format")
            ->check(CLI::IsMember({"csv", "json"}));
        if (with_strikes) {
            cmd->add_option("--k1", k1, "Lowest VIX option strike");
            cmd->add_option("--kmax", kmax, "Highest VIX option strike");
            cmd->add_option("--dk", dk, "VIX option strike spacing");
        }
    };

    // --- vvix ---------------------------------------------------------------
    CLI::App* cmd_vvix = app.add_subcommand("vvix", "One Table 1-shaped row for a parameter set");
    bool vvix_mc_check = false;
    add_common(cmd_vvix, false);
    cmd_vvix->add_flag("--mc-check", vvix_mc_check, "Append Monte Carlo oracle columns");
    cmd_vvix->add_option("--seed", seed, "Monte Carlo seed");
    cmd_vvix->add_option("--paths", mc_paths, "Monte Carlo path count");

    // --- table1 ---------------------------------------------------------------
    CLI::App* cmd_table1 =
        app.add_subcommand("table1", "All six preset rows (futures and the four VVIX methods)");
    add_common(cmd_table1, false);

    // --- pde-table -------------------------------------------------------------
    CLI::App* cmd_pde = app.add_subcommand(
        "pde-table", "Full-PDE double replication over the grid-refinement ladder");
    std::string grid_spec;
    add_common(cmd_pde, true);
    cmd_pde->add_option("--grid", grid_spec, "Single cell N,M,L instead of the ladder");
    cmd_pde->add_option("--spot", spot, "Spot level X0");

    // --- sweep -----------------------------------------------------------------
    CLI::App* cmd_sweep =
        app.add_subcommand("sweep", "Vol-of-vol sweep: sigma vs the three analytic methods");
    std::string sweep_spec = "0.1:3.0:0.05";
    add_common(cmd_sweep, true);
    cmd_sweep->add_option("--sweep", sweep_spec, "Sweep range lo:hi:step");

    // --- mc-check -----------------------------------------------------------------
    CLI::App* cmd_mc = app.add_subcommand(
        "mc-check", "Monte Carlo oracle vs quadrature: future, log contract, VIX options");
    add_common(cmd_mc, false);
    cmd_mc->add_option("--seed", seed, "Monte Carlo seed");
    cmd_mc->add_option("--paths", mc_paths, "Monte Carlo path count");

    // --- calibrate -----------------------------------------------------------------
    CLI::App* cmd_cal = app.add_subcommand("calibrate", "Fit parameters to a vanilla quote sheet");
    std::string quotes_path;
    std::string weights_name = "uniform";
    std::string vvix_penalty_spec;
    std::optional<double> vvix_solve_target;
    std::optional<double> fix_kappa, fix_theta;
    std::string vvix_model_name = "log";
    double cal_spot = 100.0;
    add_common(cmd_cal, false);
    cmd_cal->add_option("--quotes", quotes_path, "Quote CSV path")->required();
    cmd_cal->add_option("--spot", cal_spot, "Spot of the quoted underlier");
    cmd_cal->add_option("--weights", weights_name, "Weighting scheme")
        ->check(CLI::IsMember({"uniform", "discount", "vega"}));
    cmd_cal->add_option("--vvix-penalty", vvix_penalty_spec,
                        "Anchor the VVIX by penalty: weight,target");
    cmd_cal->add_option("--vvix-solve", vvix_solve_target,
                        "Anchor the VVIX by eliminating sigma: target");
    cmd_cal->add_option("--vvix-model", vvix_model_name, "Anchor model")
        ->check(CLI::IsMember({"log", "simple"}));
    cmd_cal->add_option("--fix-kappa", fix_kappa, "Hold kappa fixed");
    cmd_cal->add_option("--fix-theta", fix_theta, "Hold theta fixed");
    cmd_cal->add_option("--seed", seed, "Differential evolution seed");

    CLI11_PARSE(app, argc, argv);

    try {
        vvix::MarketConvention conv{};

        if (cmd_vvix->parsed() || cmd_table1->parsed()) {
            std::vector<VvixRow> rows;
            std::vector<McColumns> mc;
            if (cmd_table1->parsed()) {
                for (std::size_t i = 1; i <= vvix::kNumPresets; ++i) {
                    const std::string name = "set" + std::to_string(i);
                    vvix::MarketConvention row_conv{};
                    const vvix::HestonParams p = load_params(name, ov, row_conv);
                    rows.push_back(compute_row(name, p, tenor, row_conv));
                }
            } else {
                const vvix::HestonParams p = load_params(params_source, ov, conv);
                rows.push_back(compute_row(params_source, p, tenor, conv));
                if (vvix_mc_check) mc.push_back(compute_mc(p, conv, tenor, mc_paths, seed));
            }
            const std::vector<McColumns>* mc_ptr = mc.empty() ? nullptr : &mc;
            sink.write(sink.format == "json" ? rows_to_json(rows, mc_ptr)
                                             : rows_to_csv(rows, mc_ptr));
            return kExitOk;
        }

        if (cmd_pde->parsed()) {
            const vvix::HestonParams p = load_params(params_source, ov, conv);
            const vvix::StrikeGrid spx = vvix::default_spx_strip(spot);
            const vvix::StrikeGrid vix = vvix::make_strike_grid(k1, kmax, dk);
            std::vector<std::array<int, 3>> cells;
            if (!grid_spec.empty()) {
                std::vector<double> v;
                std::istringstream stream(grid_spec);
                std::string tok;
                while (std::getline(stream, tok, ',')) v.push_back(std::stod(tok));
                if (v.size() != 3) throw std::runtime_error("--grid must be N,M,L");
                cells.push_back({static_cast<int>(v[0]), static_cast<int>(v[1]),
                                 static_cast<int>(v[2])});
            } else {
                cells = {{25, 12, 16}, {50, 25, 30}, {100, 50, 60}, {200, 100, 120},
                         {400, 200, 240}};
            }
            json jrows = json::array();
            std::string csv = "N,M,L,vvix\n";
            for (const auto& cell : cells) {
                std::string value;
                try {
                    const vvix::IndexQuote q =
                        vvix::pde_vvix(p, conv, spot, cell[1], cell[2], cell[0], spx, vix);
                    value = fmt(q.points);
                    jrows.push_back({{"N", cell[0]}, {"M", cell[1]}, {"L", cell[2]},
                                     {"vvix", q.points}});
                } catch (const std::exception& e) {
                    std::cerr << "row N=" << cell[0] << " failed: " << e.what() << "\n";
                    value = "nan";
                    jrows.push_back({{"N", cell[0]}, {"M", cell[1]}, {"L", cell[2]},
                                     {"error", e.what()}});
                }
                csv += std::to_string(cell[0]) + ',' + std::to_string(cell[1]) + ',' +
                       std::to_string(cell[2]) + ',' + value + '\n';
            }
            sink.write(sink.format == "json" ? jrows.dump(2) + "\n" : csv);
            return kExitOk;
        }

        if (cmd_sweep->parsed()) {
            const vvix::HestonParams base = load_params(params_source, ov, conv);
            const std::vector<double> range = parse_triplet(sweep_spec, "--sweep");
            const vvix::StrikeGrid vix = vvix::make_strike_grid(k1, kmax, dk);
            std::string csv = "sigma,vvix_simple,vvix_log,vvix_repl\n";
            json jrows = json::array();
            for (double sig = range[0]; sig <= range[1] + 1e-12; sig += range[2]) {
                vvix::HestonParams p = base;
                p.sigma = sig;
                auto cell = [&](auto&& f) -> std::string {
                    try {
                        return fmt(f());
                    } catch (const std::exception&) {
                        return "nan";
                    }
                };
                const std::string simple =
                    cell([&] { return vvix::vvix_simple(p, tenor, conv).points; });
                const std::string log_c =
                    cell([&] { return vvix::vvix_log_contract(p, tenor, conv).points; });
                const std::string repl =
                    cell([&] { return vvix::vvix_by_replication(p, tenor, conv, vix).points; });
                csv += fmt(sig) + ',' + simple + ',' + log_c + ',' + repl + '\n';
                jrows.push_back({{"sigma", sig}, {"vvixSimple", simple}, {"vvixLog", log_c},
                                 {"vvixRepl", repl}});
            }
            sink.write(sink.format == "json" ? jrows.dump(2) + "\n" : csv);
            return kExitOk;
        }

        if (cmd_mc->parsed()) {
            const vvix::HestonParams p = load_params(params_source, ov, conv);
            const McColumns mc = compute_mc(p, conv, tenor, mc_paths, seed);
            const double f_quad = vvix::vix_future(p, tenor, conv).points;
            const double log_quad = vvix::vvix_log_contract(p, tenor, conv).points;
            std::string csv = "quantity,quadrature,mc,mc_se,z\n";
            auto push = [&](const char* name, double quad, const vvix::McEstimate& est) {
                csv += std::string(name) + ',' + fmt(quad) + ',' + fmt(est.mean) + ',' +
                       fmt(est.std_error) + ',' + fmt((quad - est.mean) / est.std_error) + '\n';
            };
            push("vix_future", f_quad, mc.future);
            push("vvix_log", log_quad, mc.vvix_log);
            for (double strike : {15.0, 20.0, 25.0}) {
                const double quad = vvix::vix_option(p, strike, tenor, +1, conv);
                const vvix::McEstimate est =
                    vvix::mc_vix_option(p, strike, tenor, +1, conv, mc_paths, seed + 7);
                push(("vix_call_" + fmt(strike)).c_str(), quad, est);
            }
            if (sink.format == "json") {
                json obj;
                obj["vixFuture"] = {{"quadrature", f_quad}, {"mc", mc.future.mean},
                                    {"se", mc.future.std_error}};
                obj["vvixLog"] = {{"quadrature", log_quad}, {"mc", mc.vvix_log.mean},
                                  {"se", mc.vvix_log.std_error}};
                sink.write(obj.dump(2) + "\n");
            } else {
                sink.write(csv);
            }
            return kExitOk;
        }

        if (cmd_cal->parsed()) {
            vvix::CalibrationSpec spec;
            spec.quotes = vvix::quotes_from_csv(vvix::read_text_file(quotes_path));
            spec.spot = cal_spot;
            spec.conv = conv;
            spec.de_seed = seed;
            if (weights_name == "discount") {
                spec.scheme.kind = vvix::WeightKind::kInverseDiscount;
            } else if (weights_name == "vega") {
                spec.scheme.kind = vvix::WeightKind::kInverseVega;
            }
            if (!vvix_penalty_spec.empty() && vvix_solve_target) {
                throw std::runtime_error("--vvix-penalty and --vvix-solve are exclusive");
            }
            if (!vvix_penalty_spec.empty()) {
                std::istringstream stream(vvix_penalty_spec);
                std::string w, t;
                if (!std::getline(stream, w, ',') || !std::getline(stream, t, ',')) {
                    throw std::runtime_error("--vvix-penalty must be weight,target");
                }
                spec.vvix_mode = vvix::VvixMode::kPenalty;
                spec.vvix_weight = std::stod(w);
                spec.vvix_target = std::stod(t);
            }
            if (vvix_solve_target) {
                spec.vvix_mode = vvix::VvixMode::kSolve;
                spec.vvix_target = *vvix_solve_target;
            }
            spec.vvix_model = (vvix_model_name == "simple") ? vvix::VvixModel::kSimple
                                                            : vvix::VvixModel::kLogContract;
            spec.fixed_kappa = fix_kappa;
            spec.fixed_theta = fix_theta;

            const vvix::CalibrationResult result = vvix::calibrate(spec);
            sink.write(vvix::calibration_result_to_json(result));
            return result.converged ? kExitOk : kExitNoConverge;
        }

        std::cerr << "no command given\n";
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
}
