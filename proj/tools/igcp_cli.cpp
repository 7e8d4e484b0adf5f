// Command-line front end: pmf/moments tables, simulation with seed
// provenance, verification suites, and dependence-decay reports.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "igcp/compound.hpp"
#include "igcp/igcp.hpp"
#include "igcp/mc.hpp"
#include "igcp/multivariate.hpp"
#include "igcp/qiter.hpp"
#include "igcp/timechange.hpp"
#include "igcp/verify.hpp"

using nlohmann::json;
using namespace igcp;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitBudget = 3;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// CLI flags take precedence over the config file, which beats defaults
struct Options {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    std::string suite = "all";
    std::string mode = "lrd";
    std::optional<double> t;
    std::optional<long> n_max;
    std::optional<double> u;
    std::optional<double> alpha;
    std::optional<long long> samples;
    std::optional<uint64_t> seed;
    std::optional<int> workers;
    bool paths = false;
    double s_fixed = 1.0;
    double t_lo = 1e3, t_hi = 1e6;
    int grid_points = 13;
};

json load_config(const Options& opt) {
    json cfg = json::object();
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw std::invalid_argument("cannot open config file " + opt.config_path);
        in >> cfg;
    }
    if (opt.t) cfg["t"] = *opt.t;
    if (opt.n_max) cfg["n_max"] = *opt.n_max;
    if (opt.u) cfg["u"] = *opt.u;
    if (opt.alpha) cfg["alpha"] = *opt.alpha;
    if (opt.samples) cfg["mc"]["samples"] = *opt.samples;
    if (opt.seed) cfg["mc"]["seed"] = *opt.seed;
    if (opt.workers) cfg["mc"]["workers"] = *opt.workers;
    return cfg;
}

std::vector<double> parse_rate_list(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument(what + " must be a non-empty array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

GcpParams require_gcp(const json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw std::invalid_argument("config missing '" + key + "'");
    return GcpParams(parse_rate_list(cfg.at(key), key));
}

IgcpParams require_igcp(const json& cfg) {
    return IgcpParams(require_gcp(cfg, "outer_rates"), require_gcp(cfg, "inner_rates"));
}

RateSchedule require_schedule(const json& cfg) {
    if (!cfg.contains("schedule")) throw std::invalid_argument("config missing 'schedule'");
    const json& s = cfg.at("schedule");
    std::vector<double> grid = parse_rate_list(s.at("grid"), "schedule.grid");
    std::vector<std::vector<double>> rows;
    for (const auto& row : s.at("rates")) rows.push_back(parse_rate_list(row, "schedule.rates"));
    return RateSchedule(grid, rows);
}

JumpLaw require_law(const json& cfg) {
    if (!cfg.contains("law")) throw std::invalid_argument("config missing 'law'");
    const json& l = cfg.at("law");
    std::string kind = l.at("kind").get<std::string>();
    if (kind == "point_mass") return JumpLaw::point_mass(l.at("a").get<double>());
    if (kind == "geometric") return JumpLaw::geometric(l.at("p").get<double>());
    if (kind == "exponential") return JumpLaw::exponential(l.at("rate").get<double>());
    if (kind == "gcp_unit") return JumpLaw::gcp_unit(GcpParams(parse_rate_list(l.at("rates"), "law.rates")));
    if (kind == "explicit_discrete") {
        PmfVector pmf;
        pmf.p = parse_rate_list(l.at("pmf"), "law.pmf");
        return JumpLaw::explicit_discrete(pmf);
    }
    throw std::invalid_argument("unknown jump law kind '" + kind + "'");
}

TcIgcpParams require_tc(const json& cfg) {
    if (!cfg.contains("alpha")) throw std::invalid_argument("config missing 'alpha'");
    return TcIgcpParams(require_igcp(cfg), StableParams(cfg.at("alpha").get<double>()));
}

double config_t(const json& cfg) { return cfg.value("t", 1.0); }

McConfig config_mc(const json& cfg) {
    McConfig mc;
    if (cfg.contains("mc")) {
        const json& m = cfg.at("mc");
        mc.samples = m.value("samples", 100000LL);
        mc.master_seed = m.value("seed", 1ULL);
        mc.workers = m.value("workers", 0);
    }
    return mc;
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file " + opt.out_path);
    out << text;
}

struct PmfRow {
    std::vector<long> state;
    double probability;
    double tail;
};

int cmd_pmf(const Options& opt) {
    json cfg = load_config(opt);
    std::string process = cfg.value("process", "igcp");
    double t = config_t(cfg);
    std::vector<PmfRow> rows;
    json params_echo = cfg;
    params_echo.erase("mc");

    auto scalar_rows = [&](const std::function<SeriesResult(long)>& f, long n_max) {
        for (long n = 0; n <= n_max; ++n) {
            auto r = f(n);
            rows.push_back(PmfRow{{n}, r.value, r.tail_bound});
        }
    };

    if (process == "gcp") {
        GcpParams p = require_gcp(cfg, "outer_rates");
        long n_max = cfg.value("n_max", gcp_default_truncation(p, t));
        auto vec = gcp_pmf_vector(p, t, n_max);
        for (long n = 0; n <= n_max; ++n) rows.push_back(PmfRow{{n}, vec.at(n), 0.0});
    } else if (process == "igcp") {
        IgcpParams p = require_igcp(cfg);
        auto m = igcp_moments(p, t, t);
        long n_max = cfg.value("n_max", long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0)));
        scalar_rows([&](long n) { return igcp_pmf(p, n, t); }, n_max);
    } else if (process == "nh_igcp") {
        GcpParams outer = require_gcp(cfg, "outer_rates");
        RateSchedule sched = require_schedule(cfg);
        auto m = nh_igcp_moments(outer, sched, t);
        long n_max = cfg.value("n_max", long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0)));
        scalar_rows([&](long n) { return nh_igcp_pmf(outer, sched, n, t); }, n_max);
    } else if (process == "compound") {
        IgcpParams p = require_igcp(cfg);
        JumpLaw law = require_law(cfg);
        auto m = compound_igcp_moments(p, law, t);
        long n_max = cfg.value("n_max", long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0)));
        scalar_rows([&](long n) { return compound_igcp_pmf(p, law, n, t); }, n_max);
    } else if (process == "qiter") {
        GcpParams outer = require_gcp(cfg, "outer_rates");
        std::vector<GcpParams> layers;
        for (const auto& l : cfg.at("layers")) layers.push_back(GcpParams(parse_rate_list(l, "layers")));
        QIterParams p(outer, layers);
        auto m = qiter_moments(p, t);
        long n_max = cfg.value("n_max", long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0)));
        scalar_rows([&](long n) { return qiter_pmf(p, n, t); }, n_max);
    } else if (process == "tc_igcp") {
        TcIgcpParams p = require_tc(cfg);
        auto m = tc_igcp_moments(p, t);
        long n_max = cfg.value("n_max", long(std::ceil(m.mean + 12.0 * std::sqrt(m.variance) + 20.0)));
        scalar_rows([&](long n) { return tc_igcp_pmf(p, n, t); }, n_max);
    } else if (process == "multivariate") {
        std::vector<GcpParams> comps;
        for (const auto& c : cfg.at("components")) comps.push_back(GcpParams(parse_rate_list(c, "components")));
        MvIgcpParams p(comps, require_gcp(cfg, "inner_rates"));
        long n_max = cfg.value("n_max", 10L);
        std::vector<long> state(size_t(p.q()), 0);
        std::function<void(int)> walk = [&](int depth) {
            if (depth == p.q()) {
                auto r = mv_pmf(p, state, t);
                rows.push_back(PmfRow{state, r.value, r.tail_bound});
                return;
            }
            for (long n = 0; n <= n_max; ++n) {
                state[size_t(depth)] = n;
                walk(depth + 1);
            }
        };
        walk(0);
    } else {
        throw std::invalid_argument("unknown process '" + process + "'");
    }

    if (opt.format == "json") {
        json out;
        out["params"] = params_echo;
        out["t"] = t;
        json table = json::array();
        for (const auto& r : rows) {
            json row;
            row["n"] = r.state.size() == 1 ? json(r.state[0]) : json(r.state);
            row["probability"] = r.probability;
            row["tail_bound"] = r.tail;
            table.push_back(row);
        }
        out["pmf"] = table;
        emit(opt, out.dump(2) + "\n");
    } else {
        std::string text;
        size_t dims = rows.empty() ? 1 : rows.front().state.size();
        if (dims == 1) {
            text = "n,probability,tail_bound\n";
        } else {
            for (size_t i = 1; i <= dims; ++i) text += "n" + std::to_string(i) + ",";
            text += "probability\n";
        }
        for (const auto& r : rows) {
            for (long v : r.state) text += std::to_string(v) + ",";
            text += fmt17(r.probability);
            if (dims == 1) text += "," + fmt17(r.tail);
            text += "\n";
        }
        emit(opt, text);
    }
    return kExitOk;
}

int cmd_moments(const Options& opt) {
    json cfg = load_config(opt);
    std::string process = cfg.value("process", "igcp");
    double t = config_t(cfg);
    double mean = 0.0, variance = 0.0;
    if (process == "gcp") {
        auto m = gcp_moments(require_gcp(cfg, "outer_rates"), t);
        mean = m.mean; variance = m.variance;
    } else if (process == "igcp") {
        auto m = igcp_moments(require_igcp(cfg), t, t);
        mean = m.mean; variance = m.variance;
    } else if (process == "nh_igcp") {
        auto m = nh_igcp_moments(require_gcp(cfg, "outer_rates"), require_schedule(cfg), t);
        mean = m.mean; variance = m.variance;
    } else if (process == "compound") {
        auto m = compound_igcp_moments(require_igcp(cfg), require_law(cfg), t);
        mean = m.mean; variance = m.variance;
    } else if (process == "qiter") {
        GcpParams outer = require_gcp(cfg, "outer_rates");
        std::vector<GcpParams> layers;
        for (const auto& l : cfg.at("layers")) layers.push_back(GcpParams(parse_rate_list(l, "layers")));
        auto m = qiter_moments(QIterParams(outer, layers), t);
        mean = m.mean; variance = m.variance;
    } else if (process == "tc_igcp") {
        auto m = tc_igcp_moments(require_tc(cfg), t);
        mean = m.mean; variance = m.variance;
    } else {
        throw std::invalid_argument("unknown process '" + process + "'");
    }
    std::string text = "{\"process\": \"" + process + "\", \"t\": " + fmt17(t) +
                       ", \"mean\": " + fmt17(mean) + ", \"variance\": " + fmt17(variance) + "}\n";
    emit(opt, text);
    return kExitOk;
}

int cmd_simulate(const Options& opt) {
    json cfg = load_config(opt);
    std::string process = cfg.value("process", "igcp");
    double t = config_t(cfg);
    McConfig mc = config_mc(cfg);
    long long n = opt.samples.value_or(cfg.contains("mc") ? mc.samples : 10);

    std::string text = "# process=" + process + ",t=" + fmt17(t) +
                       ",seed=" + std::to_string(mc.master_seed) + ",samples=" + std::to_string(n) + "\n";
    if (opt.paths) {
        if (process != "gcp" && process != "igcp")
            throw std::invalid_argument("path output supports gcp and igcp only");
        text += "path,event_time,jump_size\n";
        for (long long i = 0; i < n; ++i) {
            RngStream s(mc.master_seed, uint64_t(i));
            GcpPath path = (process == "gcp")
                               ? sample_gcp_path(require_gcp(cfg, "outer_rates"), t, s)
                               : sample_igcp_path(require_igcp(cfg), t, s);
            for (size_t e = 0; e < path.event_times.size(); ++e)
                text += std::to_string(i) + "," + fmt17(path.event_times[e]) + "," +
                        std::to_string(path.jump_sizes[e]) + "\n";
        }
        emit(opt, text);
        return kExitOk;
    }

    text += "sample,value\n";
    for (long long i = 0; i < n; ++i) {
        RngStream s(mc.master_seed, uint64_t(i));
        double v = 0.0;
        if (process == "gcp") v = double(sample_gcp_value(require_gcp(cfg, "outer_rates"), t, s));
        else if (process == "igcp") v = double(sample_igcp_value(require_igcp(cfg), t, s));
        else if (process == "nh_igcp")
            v = double(sample_nh_igcp_value(require_gcp(cfg, "outer_rates"), require_schedule(cfg), t, s));
        else if (process == "compound") v = sample_compound_value(require_igcp(cfg), require_law(cfg), t, s);
        else if (process == "tc_igcp") v = double(sample_tc_igcp_value(require_tc(cfg), t, s));
        else if (process == "qiter") {
            GcpParams outer = require_gcp(cfg, "outer_rates");
            std::vector<GcpParams> layers;
            for (const auto& l : cfg.at("layers")) layers.push_back(GcpParams(parse_rate_list(l, "layers")));
            v = double(sample_qiter_value(QIterParams(outer, layers), t, s));
        } else if (process == "multivariate") {
            std::vector<GcpParams> comps;
            for (const auto& c : cfg.at("components")) comps.push_back(GcpParams(parse_rate_list(c, "components")));
            auto vec = sample_mv_value(MvIgcpParams(comps, require_gcp(cfg, "inner_rates")), t, s);
            text += std::to_string(i);
            for (long x : vec) text += "," + std::to_string(x);
            text += "\n";
            continue;
        } else {
            throw std::invalid_argument("unknown process '" + process + "'");
        }
        text += std::to_string(i) + "," + fmt17(v) + "\n";
    }
    emit(opt, text);
    return kExitOk;
}

int cmd_verify(const Options& opt) {
    uint64_t seed = opt.seed.value_or(20240817ULL);
    auto checks = igcp::verify::run_suite(opt.suite, seed);
    std::string report = igcp::verify::report_json(opt.suite, seed, checks);
    emit(opt, report);
    bool budget = false, fail = false;
    for (const auto& c : checks) {
        budget = budget || c.status == "budget_exceeded";
        fail = fail || !c.pass;
    }
    if (budget) return kExitBudget;
    return fail ? kExitVerifyFail : kExitOk;
}

int cmd_lrd(const Options& opt) {
    json cfg = load_config(opt);
    TcIgcpParams p = require_tc(cfg);
    if (opt.grid_points < 2) throw std::invalid_argument("lrd: need at least two grid points");
    std::vector<double> grid;
    for (int i = 0; i < opt.grid_points; ++i)
        grid.push_back(opt.t_lo * std::pow(opt.t_hi / opt.t_lo, double(i) / double(opt.grid_points - 1)));

    double exponent = 0.0, ci_lo = 0.0, ci_hi = 0.0;
    if (opt.mode == "lrd") {
        exponent = lrd_exponent(p, opt.s_fixed, grid);
        ci_lo = ci_hi = exponent;  // deterministic fit of the analytic correlation
    } else if (opt.mode == "srd") {
        auto report = srd_increment_diagnostic(p, cfg.value("h", 1.0), opt.s_fixed, grid, config_mc(cfg));
        if (!report.conclusive) {
            emit(opt, "{\"alpha\": " + fmt17(p.stable.alpha) + ", \"status\": \"inconclusive\"}\n");
            return kExitVerifyFail;
        }
        exponent = report.exponent;
        ci_lo = report.ci_low;
        ci_hi = report.ci_high;
    } else {
        throw std::invalid_argument("unknown mode '" + opt.mode + "'");
    }
    std::string text = "{\"alpha\": " + fmt17(p.stable.alpha) +
                       ", \"fitted_exponent\": " + fmt17(exponent) + ", \"ci\": [" + fmt17(ci_lo) +
                       ", " + fmt17(ci_hi) + "], \"grid\": [";
    for (size_t i = 0; i < grid.size(); ++i) {
        if (i) text += ", ";
        text += fmt17(grid[i]);
    }
    text += "]}\n";
    emit(opt, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"iterated counting process toolkit"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config file");
        sub->add_option("--out", opt.out_path, "output file (default stdout)");
        sub->add_option("--t", opt.t, "evaluation time");
        sub->add_option("--n-max", opt.n_max, "largest state in tables");
        sub->add_option("--alpha", opt.alpha, "stable index for tc_igcp");
        sub->add_option("--samples", opt.samples, "Monte Carlo sample count");
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--workers", opt.workers, "Monte Carlo worker threads");
    };

    CLI::App* pmf = app.add_subcommand("pmf", "write a state-probability table");
    add_common(pmf);
    pmf->add_option("--format", opt.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    CLI::App* moments = app.add_subcommand("moments", "mean and variance of the configured process");
    add_common(moments);

    CLI::App* simulate = app.add_subcommand("simulate", "draw samples or paths with seed provenance");
    add_common(simulate);
    simulate->add_flag("--paths", opt.paths, "write path event lists instead of values");

    CLI::App* verify = app.add_subcommand("verify", "run numerical cross-check suites");
    verify->add_option("--suite", opt.suite, "suite name or 'all'");
    verify->add_option("--seed", opt.seed, "master seed");
    verify->add_option("--out", opt.out_path, "report file (default stdout)");

    CLI::App* lrd = app.add_subcommand("lrd", "dependence-decay exponent report");
    add_common(lrd);
    lrd->add_option("--mode", opt.mode, "lrd (analytic) or srd (Monte Carlo)")
        ->check(CLI::IsMember({"lrd", "srd"}));
    lrd->add_option("--s", opt.s_fixed, "fixed earlier time");
    lrd->add_option("--t-lo", opt.t_lo, "grid start");
    lrd->add_option("--t-hi", opt.t_hi, "grid end");
    lrd->add_option("--points", opt.grid_points, "grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitBadInput;
    }

    try {
        if (pmf->parsed()) return cmd_pmf(opt);
        if (moments->parsed()) return cmd_moments(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (verify->parsed()) return cmd_verify(opt);
        if (lrd->parsed()) return cmd_lrd(opt);
    } catch (const budget_error& e) {
        std::cerr << "{\"error\": \"budget_exceeded\", \"detail\": \"" << e.what() << "\"}\n";
        return kExitBudget;
    } catch (const truncation_error& e) {
        std::cerr << "{\"error\": \"truncation\", \"detail\": \"" << e.what() << "\"}\n";
        return kExitBudget;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\": \"invalid_input\", \"detail\": \"" << e.what() << "\"}\n";
        return kExitBadInput;
    }
    return kExitBadInput;
}
