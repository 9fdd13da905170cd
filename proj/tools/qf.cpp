// qf: command-line runner for the quantile-fluctuation toolkit.
//
// Subcommands: kernel (exact covariance grids), gp (Gaussian-process
// sampling + quartic-variation report), particles (ensemble Monte Carlo +
// covariance reports), rw (sandwich / tail-bound / Taylor checks), verify
// (the full acceptance suite).  Exit codes: 0 ok, 1 assertion failed,
// 2 config error, 3 numeric error.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qf/errors.hpp"
#include "qf/gp.hpp"
#include "qf/io.hpp"
#include "qf/limit_kernel.hpp"
#include "qf/particles.hpp"
#include "qf/rw.hpp"
#include "qf/verify.hpp"

namespace {

using qf::io::json;

constexpr std::uint64_t kDefaultSeed = 12345;  // fixed so bare runs reproduce

unsigned resolve_threads(int cli_threads) {
    if (cli_threads > 0) return unsigned(cli_threads);
    if (const char* env = std::getenv("QF_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0) return unsigned(v);
    }
    return 1;
}

// "a:b:step" inclusive of both ends (within half a step of b).
std::vector<double> parse_grid(const std::string& spec) {
    double a, b, step;
    char c1, c2;
    std::istringstream in(spec);
    if (!(in >> a >> c1 >> b >> c2 >> step) || c1 != ':' || c2 != ':' || !(step > 0.0) ||
        b < a || !in.eof())
        throw qf::config_error("bad --grid, expected a:b:step with step > 0: " + spec);
    std::vector<double> out;
    for (double v = a; v <= b + 0.5 * step; v += step) out.push_back(std::min(v, b));
    return out;
}

std::vector<double> parse_times(const std::string& csv) {
    std::vector<double> out;
    std::istringstream in(csv);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw qf::config_error("bad --times entry: " + tok);
        }
    }
    if (out.empty()) throw qf::config_error("--times is empty");
    return out;
}

struct BaseConfig {
    qf::MixtureDensity mixture = qf::MixtureDensity::standard_normal();
    double alpha = 0.5;
    json raw;  // full config document (empty object when no --config)
};

BaseConfig load_base(const std::string& config_path) {
    BaseConfig base;
    base.raw = json::object();
    if (config_path.empty()) return base;
    base.raw = qf::io::load_json_file(config_path);
    base.mixture = qf::io::mixture_from_json(base.raw);
    base.alpha = qf::io::alpha_from_json(base.raw);
    return base;
}

json base_sidecar(const char* command, const std::string& config_path, const BaseConfig& base,
                  std::uint64_t seed, unsigned threads, const std::string& out) {
    return json{{"command", command},
                {"config", config_path.empty() ? json(nullptr) : json(config_path)},
                {"mixture", qf::io::mixture_to_json(base.mixture)},
                {"alpha", base.alpha},
                {"seed", seed},
                {"threads", threads},
                {"out", out}};
}

// Pulls cfg[section][key] when present, else the given default.
template <class T>
T section_or(const json& raw, const char* section, const char* key, T fallback) {
    if (raw.contains(section) && raw.at(section).contains(key)) {
        try {
            return raw.at(section).at(key).get<T>();
        } catch (const json::exception& e) {
            throw qf::config_error(std::string(section) + "." + key + ": " + e.what());
        }
    }
    return fallback;
}

int cmd_kernel(const std::string& config_path, std::string grid_spec, const std::string& out,
               std::uint64_t seed, unsigned threads) {
    const BaseConfig base = load_base(config_path);
    if (grid_spec.empty())
        grid_spec = section_or<std::string>(base.raw, "kernel", "grid", "0:3:0.1");
    const std::vector<double> grid = parse_grid(grid_spec);
    const qf::QuantileCurve curve(qf::HeatField(base.mixture), base.alpha);
    const qf::LimitKernel kernel(curve);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size() * grid.size());
    for (double s : grid) {
        for (double t : grid) {
            const bool ordered = s < t;
            rows.push_back({s, t, kernel.rho(s, t), kernel.rho_tilde(s, t),
                            ordered ? kernel.ds_rho_tilde(s, t) : nan,
                            ordered ? kernel.dst_rho_tilde(s, t) : nan});
        }
    }
    qf::io::write_csv(out, "s,t,rho,rho_tilde,ds_rho_tilde,d2st_rho_tilde", rows);
    json side = base_sidecar("kernel", config_path, base, seed, threads, out);
    side["grid"] = grid_spec;
    qf::io::write_run_sidecar(out, side);
    return 0;
}

int cmd_gp(const std::string& config_path, long long grid_n_flag, double t_max_flag,
           long long replicas_flag, const std::string& out, std::uint64_t seed,
           unsigned threads) {
    const BaseConfig base = load_base(config_path);
    const std::size_t grid_n =
        grid_n_flag > 0 ? std::size_t(grid_n_flag)
                        : std::size_t(section_or<long long>(base.raw, "gp", "grid_n", 512));
    const double t_max =
        t_max_flag > 0.0 ? t_max_flag : section_or<double>(base.raw, "gp", "t_max", 1.0);
    const std::size_t replicas =
        replicas_flag > 0 ? std::size_t(replicas_flag)
                          : std::size_t(section_or<long long>(base.raw, "gp", "replicas", 8));
    if (grid_n < 1) throw qf::config_error("--grid-n must be >= 1");

    const qf::QuantileCurve curve(qf::HeatField(base.mixture), base.alpha);
    const qf::LimitKernel kernel(curve);
    std::vector<double> grid(grid_n + 1);
    for (std::size_t j = 0; j <= grid_n; ++j) grid[j] = t_max * double(j) / double(grid_n);
    const qf::GpSample sample = qf::sample_gp(kernel, grid, replicas, seed, threads);

    std::ostringstream header;
    header << "t";
    for (std::size_t r = 0; r < replicas; ++r) header << ",path" << r;
    std::vector<std::vector<double>> rows(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        rows[g].reserve(replicas + 1);
        rows[g].push_back(grid[g]);
        for (std::size_t r = 0; r < replicas; ++r) rows[g].push_back(sample.path(r)[g]);
    }
    qf::io::write_csv(out, header.str(), rows);

    const double limit = qf::quartic_limit(kernel, t_max);
    double acc = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) acc += qf::quartic_variation(sample, r, t_max);
    const double estimate = acc / double(replicas);
    const json report{{"limit", limit},
                      {"estimate", estimate},
                      {"rel_err", std::fabs(estimate - limit) / limit},
                      {"grid_n", grid_n},
                      {"replicas", replicas},
                      {"seed", seed}};
    qf::io::write_json_file(out + ".report.json", report);

    json side = base_sidecar("gp", config_path, base, seed, threads, out);
    side["grid_n"] = grid_n;
    side["t_max"] = t_max;
    side["replicas"] = replicas;
    qf::io::write_run_sidecar(out, side);
    return 0;
}

int cmd_particles(const std::string& config_path, long long n_flag, long long replicas_flag,
                  std::string times_csv, const std::string& out, const std::string& dump,
                  std::uint64_t seed, unsigned threads, bool strict) {
    const BaseConfig base = load_base(config_path);
    qf::EnsembleConfig cfg;
    cfg.mixture = base.mixture;
    cfg.alpha = base.alpha;
    cfg.n = n_flag > 0 ? std::size_t(n_flag)
                       : std::size_t(section_or<long long>(base.raw, "particles", "n", 10000));
    cfg.replicas = replicas_flag > 0
                       ? std::size_t(replicas_flag)
                       : std::size_t(section_or<long long>(base.raw, "particles", "replicas",
                                                           10000));
    if (times_csv.empty()) {
        const std::vector<double> def{0.0, 0.5, 1.0};
        cfg.times = section_or<std::vector<double>>(base.raw, "particles", "times", def);
    } else {
        cfg.times = parse_times(times_csv);
    }
    cfg.seed = seed;
    cfg.threads = threads;

    const qf::LimitKernel kernel(qf::QuantileCurve(qf::HeatField(cfg.mixture), cfg.alpha));
    const qf::FluctuationSample sample = qf::simulate_ensemble(cfg);
    const qf::FddReport rep = qf::fdd_covariance_check(sample, kernel);

    const std::size_t tn = cfg.times.size();
    const auto matrix = [&](const std::vector<double>& flat) {
        json m = json::array();
        for (std::size_t i = 0; i < tn; ++i) {
            json row = json::array();
            for (std::size_t j = 0; j < tn; ++j) row.push_back(flat[i * tn + j]);
            m.push_back(row);
        }
        return m;
    };
    const json report{{"times", cfg.times},
                      {"n", cfg.n},
                      {"replicas", cfg.replicas},
                      {"seed", cfg.seed},
                      {"emp_cov", matrix(rep.emp_cov)},
                      {"kernel_cov", matrix(rep.kernel_cov)},
                      {"rel_err", matrix(rep.rel_err)},
                      {"kurtosis", rep.kurtosis}};
    qf::io::write_json_file(out, report);

    if (!dump.empty()) {
        std::ostringstream header;
        for (std::size_t k = 0; k < tn; ++k) {
            if (k) header << ',';
            header << "F(" << qf::io::format_g17(cfg.times[k]) << ')';
        }
        std::vector<std::vector<double>> rows(cfg.replicas);
        for (std::size_t r = 0; r < cfg.replicas; ++r) {
            rows[r].reserve(tn);
            for (std::size_t k = 0; k < tn; ++k) rows[r].push_back(sample.value(r, k));
        }
        qf::io::write_csv(dump, header.str(), rows);
    }

    json side = base_sidecar("particles", config_path, base, seed, threads, out);
    side["n"] = cfg.n;
    side["replicas"] = cfg.replicas;
    side["times"] = cfg.times;
    if (!dump.empty()) side["dump"] = dump;
    qf::io::write_run_sidecar(out, side);

    if (strict && rep.max_rel_err > 0.05) {
        std::cerr << "strict: covariance relative error " << rep.max_rel_err << " > 0.05\n";
        return 1;
    }
    return 0;
}

int cmd_rw(const std::string& config_path, const std::string& out, std::uint64_t seed,
           unsigned threads, bool strict) {
    const BaseConfig base = load_base(config_path);
    const qf::QuantileCurve curve(qf::HeatField(base.mixture), base.alpha);
    json rw = base.raw.contains("rw") ? base.raw.at("rw") : json::object();
    if (!rw.contains("sandwich"))
        rw["sandwich"] = json::array(
            {{{"n", 200}, {"s", 0.5}, {"gap", 0.1}, {"y", -0.05}, {"replicas", 20000}}});
    if (!rw.contains("bound"))
        rw["bound"] = {{"tau", 2.0},
                       {"pairs", {{0.2, 0.1}, {0.3, 0.1}, {0.4, 0.2}, {0.1, 0.02}, {0.8, 0.5}}},
                       {"ns", {100, 1000, 10000}}};
    if (!rw.contains("taylor"))
        rw["taylor"] = {{"s", 0.5}, {"x", 0.0}, {"deltas", {0.1, 0.01, 0.001}},
                        {"y_exponent", 0.6}};

    bool all_pass = true;
    json checks = json::array();

    std::size_t idx = 0;
    for (const json& sc : rw.at("sandwich")) {
        const std::size_t n = sc.at("n").get<std::size_t>();
        const double s = sc.at("s").get<double>();
        const double gap = sc.at("gap").get<double>();
        const double y = sc.at("y").get<double>();
        const std::size_t replicas = sc.at("replicas").get<std::size_t>();
        const std::size_t rank = sc.contains("rank")
                                     ? sc.at("rank").get<std::size_t>()
                                     : std::size_t(std::ceil(base.alpha * double(n)));
        const qf::SandwichResult r =
            qf::sandwich_check(curve, rank, n, s, s + gap, y, replicas, seed + idx, threads);
        all_pass = all_pass && r.pass;
        checks.push_back({{"type", "sandwich"},
                          {"params",
                           {{"n", n},
                            {"rank", rank},
                            {"s", s},
                            {"t", s + gap},
                            {"y", y},
                            {"replicas", replicas},
                            {"seed", seed + idx}}},
                          {"lower", r.mean_lower},
                          {"mid", r.mean_indicator},
                          {"upper", r.mean_upper},
                          {"se", std::max(r.lower_se, r.upper_se)},
                          {"pass", r.pass}});
        ++idx;
    }

    {
        const json& bd = rw.at("bound");
        const double tau = bd.at("tau").get<double>();
        std::vector<std::vector<double>> sweep_rows;
        json pairs = json::array();
        bool bound_pass = true;
        for (const json& pr : bd.at("pairs")) {
            const double r1 = pr.at(0).get<double>(), r2 = pr.at(1).get<double>();
            double base_ratio = -1.0, peak = 0.0;
            for (const json& nj : bd.at("ns")) {
                const std::size_t n = nj.get<std::size_t>();
                const qf::RwestCheck c = qf::rwest_check(n, base.alpha, r1, r2, tau);
                sweep_rows.push_back({double(n), r1, r2, tau, c.psi_le, c.ratio});
                if (base_ratio < 0.0) base_ratio = c.ratio;
                peak = std::max(peak, c.ratio);
            }
            const bool ok = peak <= 2.0 * base_ratio;
            bound_pass = bound_pass && ok;
            pairs.push_back({{"r1", r1},
                             {"r2", r2},
                             {"base_ratio", base_ratio},
                             {"max_ratio", peak},
                             {"pass", ok}});
        }
        qf::io::write_csv(out + ".sweep.csv", "n,r1,r2,tau,psi,ratio", sweep_rows);
        all_pass = all_pass && bound_pass;
        checks.push_back({{"type", "bound"},
                          {"params", {{"tau", tau}, {"alpha", base.alpha}}},
                          {"pairs", pairs},
                          {"pass", bound_pass}});
    }

    {
        const json& ty = rw.at("taylor");
        const double s = ty.at("s").get<double>();
        const double x = ty.at("x").get<double>();
        const double yexp = ty.at("y_exponent").get<double>();
        json points = json::array();
        bool taylor_pass = true;
        for (const json& dj : ty.at("deltas")) {
            const double delta = dj.get<double>();
            for (double sign : {1.0, -1.0}) {
                const double y = sign * std::pow(delta, yexp);
                const qf::TaylorCheck tc = qf::taylor_check(curve, s, delta, x, y);
                const bool ok = std::fabs(tc.remainder) <= 10.0 * tc.bound;
                taylor_pass = taylor_pass && ok;
                points.push_back({{"delta", delta},
                                  {"x", x},
                                  {"y", y},
                                  {"remainder", tc.remainder},
                                  {"bound", tc.bound},
                                  {"ratio", tc.ratio},
                                  {"pass", ok}});
            }
        }
        all_pass = all_pass && taylor_pass;
        checks.push_back({{"type", "taylor"},
                          {"params", {{"s", s}, {"x", x}, {"y_exponent", yexp}}},
                          {"points", points},
                          {"pass", taylor_pass}});
    }

    qf::io::write_json_file(out, json{{"checks", checks}, {"pass", all_pass}});
    json side = base_sidecar("rw", config_path, base, seed, threads, out);
    side["rw"] = rw;
    qf::io::write_run_sidecar(out, side);

    if (strict && !all_pass) {
        std::cerr << "strict: one or more rw checks failed\n";
        return 1;
    }
    return 0;
}

int cmd_verify(const std::string& config_path, const std::string& out, bool quick,
               unsigned threads, std::uint64_t seed) {
    const BaseConfig base = load_base(config_path);  // validates config if given
    qf::AcceptanceOptions opt;
    opt.quick = quick;
    opt.threads = threads;
    const std::vector<qf::CriterionResult> results = qf::run_acceptance(opt);
    json jr = json::array();
    int failed = 0, ran = 0;
    for (const auto& r : results) {
        std::cout << qf::format_criterion(r) << '\n';
        if (r.ran) {
            ++ran;
            if (!r.pass) ++failed;
        }
        jr.push_back({{"id", r.id},
                      {"name", r.name},
                      {"ran", r.ran},
                      {"pass", r.pass},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
    }
    std::cout << "acceptance: " << (ran - failed) << "/" << ran << " passed"
              << (quick ? " (quick subset)" : "") << '\n';
    qf::io::write_json_file(out, json{{"results", jr}, {"failed", failed}, {"quick", quick}});
    json side = base_sidecar("verify", config_path, base, seed, threads, out);
    side["quick"] = quick;
    qf::io::write_run_sidecar(out, side);
    return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantile-fluctuation toolkit: exact kernels, sampled limits, "
                 "particle ensembles, random-walk bounds"};
    app.require_subcommand(1);

    std::string config_path, out, grid_spec, times_csv, dump;
    std::uint64_t seed = kDefaultSeed;
    int threads_flag = 0;
    long long n_flag = 0, replicas_flag = 0, grid_n_flag = 0;
    double t_max_flag = 0.0;
    bool strict = false, quick = false;
    int rc = 0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config (mixture, alpha, presets)");
        sub->add_option("--seed", seed, "RNG seed (default " + std::to_string(kDefaultSeed) + ")");
        sub->add_option("--threads", threads_flag, "worker threads (or env QF_THREADS)");
    };

    CLI::App* kernel = app.add_subcommand("kernel", "export exact covariance grid as CSV");
    add_common(kernel);
    kernel->add_option("--grid", grid_spec, "time grid a:b:step (default 0:3:0.1)");
    kernel->add_option("--out", out, "output CSV path")->default_val("kernel.csv");
    kernel->callback([&] {
        rc = cmd_kernel(config_path, grid_spec, out, seed, resolve_threads(threads_flag));
    });

    CLI::App* gp = app.add_subcommand("gp", "sample the limit process; quartic report");
    add_common(gp);
    gp->add_option("--grid-n", grid_n_flag, "number of grid steps on [0, t-max]");
    gp->add_option("--t-max", t_max_flag, "time horizon (default 1)");
    gp->add_option("--replicas", replicas_flag, "independent paths (default 8)");
    gp->add_option("--out", out, "paths CSV path")->default_val("gp.csv");
    gp->callback([&] {
        rc = cmd_gp(config_path, grid_n_flag, t_max_flag, replicas_flag, out, seed,
                    resolve_threads(threads_flag));
    });

    CLI::App* particles =
        app.add_subcommand("particles", "simulate the particle ensemble; covariance report");
    add_common(particles);
    particles->add_option("--n", n_flag, "particles per replica (default 10000)");
    particles->add_option("--replicas", replicas_flag, "replicas (default 10000)");
    particles->add_option("--times", times_csv, "comma-separated times (default 0,0.5,1)");
    particles->add_option("--dump", dump, "optional raw fluctuation CSV (row per replica)");
    particles->add_flag("--strict", strict, "exit 1 if covariance error exceeds 5%");
    particles->add_option("--out", out, "report JSON path")->default_val("particles.json");
    particles->callback([&] {
        rc = cmd_particles(config_path, n_flag, replicas_flag, times_csv, out, dump, seed,
                           resolve_threads(threads_flag), strict);
    });

    CLI::App* rw = app.add_subcommand("rw", "sandwich / tail-bound / Taylor checks");
    add_common(rw);
    rw->add_flag("--strict", strict, "exit 1 if any check fails");
    rw->add_option("--out", out, "report JSON path")->default_val("rw.json");
    rw->callback([&] {
        rc = cmd_rw(config_path, out, seed, resolve_threads(threads_flag), strict);
    });

    CLI::App* verify = app.add_subcommand("verify", "run the acceptance suite");
    add_common(verify);
    verify->add_flag("--quick", quick, "skip the heavy Monte Carlo criteria");
    verify->add_option("--out", out, "results JSON path")->default_val("verify.json");
    verify->callback([&] {
        rc = cmd_verify(config_path, out, quick, resolve_threads(threads_flag), seed);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const qf::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qf::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const qf::numeric_error& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return rc;
}
