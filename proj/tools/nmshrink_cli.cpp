// nmshrink command line: estimate, risk-sim, audit, gibbs-diag, kernel-eval, repro tables.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nmshrink/io.hpp"
#include "nmshrink/nmshrink.hpp"
#include "nmshrink/version.hpp"

namespace fs = std::filesystem;
using nmshrink::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitCondition = 4;

const char* const kOutputDirEnv = "NMSHRINK_OUTPUT_DIR";

// Prior flags shared by several subcommands. Unset values are filled per
// estimator in resolve().
struct PriorFlags {
    std::string file;
    double alpha = 0.0;
    double beta = 1.0;
    std::string g = "g1";
    double c = 0.0;
    double kappa = 1.0;
    double a0 = 0.0;
    std::vector<double> a;
    CLI::Option* alpha_opt = nullptr;
    CLI::Option* a0_opt = nullptr;

    void add_to(CLI::App* app) {
        app->add_option("--prior", file, "Prior JSON {alpha, beta, g, a0, a}; overrides the flags below")
            ->check(CLI::ExistingFile);
        alpha_opt = app->add_option("--alpha", alpha, "Gamma shape of the prior on t");
        app->add_option("--beta", beta, "Gamma rate of the prior on t")->capture_default_str();
        app->add_option("--g", g, "Weight function: g1 or komaki")
            ->check(CLI::IsMember({"g1", "komaki"}))
            ->capture_default_str();
        app->add_option("--c", c, "Komaki weight exponent c")->capture_default_str();
        app->add_option("--kappa", kappa, "Komaki weight scale kappa")->capture_default_str();
        a0_opt = app->add_option("--a0", a0, "Dirichlet a0 (default: Jeffreys, (1 - m) / 2)");
        app->add_option("--a", a, "Dirichlet a_1..a_m; one value is repeated m times (default: 1/2)");
    }

    [[nodiscard]] bool alpha_given() const { return !file.empty() || alpha_opt->count() > 0; }

    [[nodiscard]] nmshrink::GChoice weight() const {
        return g == "g1" ? nmshrink::GChoice::constant_one() : nmshrink::GChoice::komaki(c, kappa);
    }

    nmshrink::PriorSpec resolve(std::size_t m) const {
        if (!file.empty()) {
            std::ifstream in(file);
            auto p = nmshrink::io::prior_from_json(nmshrink::io::parse_json(in, file));
            nmshrink::require_input(p.a.size() == m, "prior: a has " + std::to_string(p.a.size()) +
                                                         " entries, counts have m = " + std::to_string(m));
            return p;
        }
        nmshrink::PriorSpec p;
        p.alpha = alpha_opt->count() > 0 ? alpha : 1.0;
        p.beta = beta;
        p.g = weight();
        const double md = static_cast<double>(m);
        p.a0 = a0_opt->count() > 0 ? a0 : (1.0 - md) / 2.0;
        if (a.empty())
            p.a.assign(m, 0.5);
        else if (a.size() == 1)
            p.a.assign(m, a[0]);
        else
            p.a = a;
        nmshrink::require_input(p.a.size() == m, "prior: --a has " + std::to_string(p.a.size()) +
                                                     " entries, counts have m = " + std::to_string(m));
        p.validate();
        return p;
    }
};

nmshrink::CountMatrix read_counts(const std::string& path, bool header) {
    if (path.empty() || path == "-") return nmshrink::io::read_counts_csv(std::cin, header);
    std::ifstream in(path);
    nmshrink::require_input(static_cast<bool>(in), "cannot open '" + path + "'");
    try {
        return nmshrink::io::read_counts_csv(in, header);
    } catch (const nmshrink::InputError& e) {
        throw nmshrink::InputError(path + ": " + e.what());
    }
}

json read_json_file(const std::string& path) {
    if (path.empty() || path == "-") return nmshrink::io::parse_json(std::cin, "stdin");
    std::ifstream in(path);
    nmshrink::require_input(static_cast<bool>(in), "cannot open '" + path + "'");
    return nmshrink::io::parse_json(in, path);
}

// Writes through `fn` to a file, or to stdout for an empty path.
template <class F>
void with_output(const std::string& path, F&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    nmshrink::require_input(static_cast<bool>(out), "cannot write '" + path + "'");
    fn(out);
}

json verdict_json(const nmshrink::audit::Verdict& v) {
    json conds = json::array();
    for (const auto& c : v.conditions) conds.push_back({{"name", c.name}, {"holds", c.holds}, {"inequality", c.inequality}});
    return {{"holds", v.holds}, {"conditions", conds}, {"first_failure", v.first_failure()}};
}

std::string kernel_settings_text(const nmshrink::KernelSettings& ks) {
    std::ostringstream os;
    os << "quadrature: Gauss-Legendre " << nmshrink::quadrature::kOrder << "-point panels in u = log t, initial_nodes "
       << ks.quad.initial_nodes << ", max_nodes " << ks.quad.max_nodes << ", split_nats " << ks.quad.split_nats
       << ", rel_tol " << ks.quad.rel_tol;
    return os.str();
}

json kernel_settings_json(const nmshrink::KernelSettings& ks) {
    return {{"order", nmshrink::quadrature::kOrder},
            {"initial_nodes", ks.quad.initial_nodes},
            {"max_nodes", ks.quad.max_nodes},
            {"split_nats", ks.quad.split_nats},
            {"rel_tol", ks.quad.rel_tol}};
}

nmshrink::LossKind loss_kind(const std::string& s) {
    return s == "kl" ? nmshrink::LossKind::kl : nmshrink::LossKind::ss;
}

void write_risk_table(std::ostream& out, const std::vector<nmshrink::CaseTableRow>& rows,
                      const std::vector<std::string>& names) {
    out << "truth";
    for (const auto& n : names) out << ',' << n << "_risk," << n << "_se," << n << "_prial";
    out << '\n' << std::setprecision(6);
    for (const auto& row : rows) {
        out << row.scenario.name;
        for (const auto& r : row.reports) out << ',' << r.risk << ',' << r.mc_stderr << ',' << r.prial_vs_reference;
        out << '\n';
    }
}

void write_dominance(std::ostream& out) {
    out << "case,eb0,eb,hb\n";
    for (const auto& c : nmshrink::audit::simulation_cases()) {
        const auto row = nmshrink::audit::dominance_row(c);
        auto mark = [](const nmshrink::audit::Verdict& v) { return v.holds ? '+' : '-'; };
        out << c.name << ',' << mark(row.eb0) << ',' << mark(row.eb) << ',' << mark(row.hb) << '\n';
    }
}

// Either the scenarios of one case, a single preset truth, or all nine.
std::vector<nmshrink::Scenario> select_scenarios(const std::string& which) {
    if (which == "all") return nmshrink::scenario_presets();
    if (which == "i" || which == "ii" || which == "iii") return nmshrink::scenarios_of_case(which);
    for (auto& s : nmshrink::scenario_presets())
        if (s.name == which) return {s};
    throw nmshrink::InputError("unknown scenario '" + which + "' (use i, ii, iii, all or a truth such as p1(2))");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nmshrink: shrinkage estimation of negative multinomial probabilities"};
    app.set_config("--config", "", "Read options from a TOML/INI config file");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", [] {
        return std::string("nmshrink ") + nmshrink::kVersion + "\n" + kernel_settings_text({});
    });
    bool dry_run = false;
    app.add_flag("--dry-run", dry_run, "Validate inputs and print the resolved configuration without computing");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate p from a counts CSV (m rows x N columns)");
    std::string est_name = "umvu", est_input, est_output;
    double est_r = 0.0;
    bool est_header = false;
    PriorFlags est_prior;
    est->add_option("--estimator", est_name, "Estimator")
        ->check(CLI::IsMember({"umvu", "eb0", "eb", "hb", "dir-pm", "hb-pm"}))
        ->capture_default_str();
    est->add_option("--r", est_r, "Negative multinomial shape r")->required();
    est->add_option("--input,-i", est_input, "Counts CSV (default stdin)");
    est->add_option("--output,-o", est_output, "Estimates CSV (default stdout)");
    est->add_flag("--header", est_header, "Skip a header line in the counts CSV");
    est_prior.add_to(est);

    // risk-sim
    auto* sim = app.add_subcommand("risk-sim", "Monte Carlo risk with common random numbers");
    std::string sim_scenario = "i", sim_custom, sim_loss = "ss", sim_output;
    std::vector<std::string> sim_est{"umvu", "eb0", "eb", "hb"};
    std::size_t sim_reps = 1000, sim_jobs = 1, sim_ref = 0, sim_n = 0;
    std::uint64_t sim_seed = 42;
    PriorFlags sim_prior;
    sim->add_option("--scenario", sim_scenario, "i, ii, iii, all, or one truth such as p3(1)")->capture_default_str();
    sim->add_option("--custom", sim_custom, "Custom truth JSON {r, columns}")->check(CLI::ExistingFile);
    sim->add_option("--reps", sim_reps, "Replications")->capture_default_str()->check(CLI::Range(2, 100000000));
    sim->add_option("--seed", sim_seed, "Seed")->capture_default_str();
    sim->add_option("--loss", sim_loss, "Loss")->check(CLI::IsMember({"ss", "kl"}))->capture_default_str();
    sim->add_option("--estimators", sim_est, "Estimator list")
        ->delimiter(',')
        ->check(CLI::IsMember(nmshrink::estimator_names()))
        ->capture_default_str();
    sim->add_option("--reference", sim_ref, "Index of the PRIAL reference in --estimators")->capture_default_str();
    sim->add_option("--n", sim_n, "Leading columns in the loss (0 = all)")->capture_default_str();
    sim->add_option("--jobs,-j", sim_jobs, "Worker threads; results do not depend on it")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    sim->add_option("--output,-o", sim_output, "CSV table (default stdout)");
    sim_prior.add_to(sim);

    // audit
    auto* aud = app.add_subcommand("audit", "Check propriety and dominance conditions for a scenario");
    std::string aud_input;
    bool aud_strict = false, aud_cases = false;
    long long aud_zmax = 10000;
    aud->add_option("--input,-i", aud_input,
                    "Scenario JSON {r, m, N, n, alpha, beta, g, a0, a} (default stdin)");
    aud->add_flag("--strict", aud_strict, "Exit 4 if any dominance verdict fails");
    aud->add_flag("--cases", aud_cases, "Print the dominance table of the three simulation cases as CSV");
    aud->add_option("--z-max", aud_zmax, "Largest z in the sufficient-condition scan")->capture_default_str();

    // gibbs-diag
    auto* gd = app.add_subcommand("gibbs-diag", "Gibbs sampler diagnostics for one count matrix");
    std::string gd_input, gd_output;
    double gd_r = 0.0;
    bool gd_header = false;
    nmshrink::gibbs::ChainConfig gd_chain;
    PriorFlags gd_prior;
    gd->add_option("--input,-i", gd_input, "Counts CSV (default stdin)");
    gd->add_option("--output,-o", gd_output, "JSON report (default stdout)");
    gd->add_option("--r", gd_r, "Negative multinomial shape r")->required();
    gd->add_flag("--header", gd_header, "Skip a header line in the counts CSV");
    gd->add_option("--iter", gd_chain.n_iter, "Iterations")->capture_default_str();
    gd->add_option("--burn-in", gd_chain.burn_in, "Burn-in iterations")->capture_default_str();
    gd->add_option("--thin", gd_chain.thin, "Thinning")->capture_default_str();
    gd->add_option("--seed", gd_chain.seed, "Seed")->capture_default_str();
    gd_prior.add_to(gd);

    // kernel-eval
    auto* ke = app.add_subcommand("kernel-eval", "Evaluate log K and the ratio K(alpha+1) / K(alpha)");
    std::string ke_input;
    ke->add_option("--input,-i", ke_input, "JSON {alpha, beta, g, xi0, xi} (default stdin)");

    // repro
    auto* repro = app.add_subcommand("repro", "Reproduction scripts");
    repro->require_subcommand(1);
    auto* tables = repro->add_subcommand("tables", "Write dominance.csv .. risk_case_iii.csv and manifest.json");
    std::size_t rt_reps = 1000, rt_jobs = 1;
    std::uint64_t rt_seed = 42;
    std::string rt_out;
    tables->add_option("--reps", rt_reps, "Replications per truth")->capture_default_str();
    tables->add_option("--seed", rt_seed, "Seed")->capture_default_str();
    tables->add_option("--jobs,-j", rt_jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
    tables->add_option("--out", rt_out, std::string("Output directory (default $") + kOutputDirEnv + " or .)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    // The active subcommand's options as an INI section that --config reads back.
    auto print_config = [&] {
        const CLI::App* sub = &app;
        std::string section;
        while (!sub->get_subcommands().empty()) {
            sub = sub->get_subcommands().front();
            section += (section.empty() ? "" : ".") + sub->get_name();
        }
        std::cout << "[" << section << "]\n";
        std::istringstream lines(sub->config_to_str(true, false));
        for (std::string line; std::getline(lines, line);)
            if (line.size() < 3 || line.compare(line.size() - 3, 3, "=\"\"") != 0) std::cout << line << "\n";
    };

    try {
        if (*est) {
            const auto X = read_counts(est_input, est_header);
            nmshrink::require_input(est_name != "hb" || est_prior.alpha_given(), "estimate: hb needs --alpha or --prior");
            nmshrink::require_input(est_name != "hb-pm" || est_prior.alpha_given(),
                                    "estimate: hb-pm needs --alpha or --prior");
            nmshrink::EstimatorOptions o;
            o.r = est_r;
            o.prior = est_prior.resolve(X.m());
            const auto estimator = nmshrink::make_estimator(est_name, o);
            if (dry_run) {
                print_config();
                std::cout << "# counts: " << X.m() << " x " << X.n_cols() << "\n";
                return kExitOk;
            }
            nmshrink::RandomStream unused(0);
            const auto d = estimator.fn(X, unused);
            with_output(est_output, [&](std::ostream& out) { nmshrink::io::write_matrix_csv(out, d); });
            return kExitOk;
        }

        if (*sim) {
            std::vector<nmshrink::Scenario> scen;
            if (!sim_custom.empty()) {
                const auto params = nmshrink::io::model_params_from_json(read_json_file(sim_custom));
                scen.push_back({"custom", "custom", params, sim_prior.alpha_given() ? sim_prior.alpha : 1.0});
            } else {
                scen = select_scenarios(sim_scenario);
            }
            nmshrink::require_input(sim_ref < sim_est.size(), "risk-sim: --reference out of range");
            nmshrink::RiskConfig cfg;
            cfg.loss = loss_kind(sim_loss);
            cfg.n = sim_n;
            cfg.reps = sim_reps;
            cfg.seed = sim_seed;
            cfg.jobs = sim_jobs;
            cfg.reference = sim_ref;
            std::vector<nmshrink::CaseTableRow> rows;
            std::vector<std::pair<nmshrink::Scenario, std::vector<nmshrink::Estimator>>> plan;
            for (auto& sc : scen) {
                nmshrink::EstimatorOptions o;
                o.r = sc.params.r();
                o.prior = sim_prior.resolve(sc.params.m());
                if (!sim_prior.alpha_given()) o.prior.alpha = sc.alpha_hb;
                std::vector<nmshrink::Estimator> est_list;
                for (const auto& n : sim_est) est_list.push_back(nmshrink::make_estimator(n, o));
                plan.emplace_back(sc, std::move(est_list));
            }
            if (dry_run) {
                print_config();
                for (const auto& [sc, e] : plan)
                    std::cout << "# truth " << sc.name << ": r = " << sc.params.r() << ", m = " << sc.params.m()
                              << ", N = " << sc.params.n_cols() << "\n";
                return kExitOk;
            }
            for (auto& [sc, e] : plan) rows.push_back({sc, nmshrink::risk_mc(e, sc.params, cfg)});
            with_output(sim_output, [&](std::ostream& out) { write_risk_table(out, rows, sim_est); });
            return kExitOk;
        }

        if (*aud) {
            if (aud_cases) {
                if (dry_run) {
                    print_config();
                    return kExitOk;
                }
                write_dominance(std::cout);
                bool all = true;
                for (const auto& c : nmshrink::audit::simulation_cases()) {
                    const auto row = nmshrink::audit::dominance_row(c);
                    all = all && row.eb0.holds && row.eb.holds && row.hb.holds;
                }
                return aud_strict && !all ? kExitCondition : kExitOk;
            }
            const json j = read_json_file(aud_input);
            using nmshrink::io::detail::get;
            const double r = get<double>(j, "r", "audit");
            const auto m = get<std::size_t>(j, "m", "audit");
            const auto N = get<std::size_t>(j, "N", "audit");
            const std::size_t n = j.contains("n") ? get<std::size_t>(j, "n", "audit") : N;
            nmshrink::require_input(m >= 1 && N >= 1 && n >= 1 && n <= N, "audit: need m, N >= 1 and 1 <= n <= N");
            const double alpha = get<double>(j, "alpha", "audit");
            const double beta = j.contains("beta") ? get<double>(j, "beta", "audit") : 1.0;
            const auto g = j.contains("g") ? nmshrink::io::g_from_json(j.at("g")) : nmshrink::GChoice::constant_one();
            if (dry_run) {
                print_config();
                std::cout << "# scenario: " << j.dump() << "\n";
                return kExitOk;
            }
            json out;
            bool ok = true;
            const auto eb = nmshrink::audit::check_eb_dominance(m, r);
            out["eb_dominance"] = verdict_json(eb);
            const auto hbv = nmshrink::audit::check_hb_dominance(alpha, beta, g, r, m, n, N);
            out["hb_dominance"] = verdict_json(hbv);
            ok = ok && eb.holds && hbv.holds;
            if (r >= 2.5) {
                const auto t = nmshrink::audit::check_sufficient_condition(nmshrink::eb_delta(m, N, r), r, m, n, aud_zmax);
                json tj{{"holds_up_to_z_max", t.holds_up_to_z_max}, {"z_max", aud_zmax},
                        {"failed_condition", t.failed_condition}};
                tj["first_violation"] = t.first_violation ? json(*t.first_violation) : json(nullptr);
                tj["limit_holds"] = t.limit_holds ? json(*t.limit_holds) : json(nullptr);
                out["eb_sufficient_condition"] = tj;
            }
            if (j.contains("a")) {
                nmshrink::PriorSpec prior{alpha, beta, g, j.contains("a0") ? get<double>(j, "a0", "audit") : 0.0,
                                          get<std::vector<double>>(j, "a", "audit")};
                nmshrink::require_input(prior.a.size() == m, "audit: a must have m entries");
                const auto pv = nmshrink::audit::check_prior_propriety(prior, N);
                out["prior_proper"] = pv.prior_proper;
                out["posterior"] = verdict_json(pv.posterior(r));
                const auto kl = nmshrink::audit::check_kl_dominance(alpha, beta, g, prior.a0, prior.a, r, n, N);
                out["kl_dominance"] = verdict_json(kl);
                ok = ok && kl.holds;
            }
            std::cout << out.dump(2) << "\n";
            return aud_strict && !ok ? kExitCondition : kExitOk;
        }

        if (*gd) {
            const auto X = read_counts(gd_input, gd_header);
            nmshrink::require_input(gd_prior.alpha_given(), "gibbs-diag: needs --alpha or --prior");
            const auto prior = gd_prior.resolve(X.m());
            gd_chain.validate();
            if (dry_run) {
                print_config();
                std::cout << "# counts: " << X.m() << " x " << X.n_cols() << "\n";
                return kExitOk;
            }
            const auto rep = nmshrink::gibbs::diagnose(X, gd_r, prior, gd_chain);
            json out{{"posterior_mean_p", nmshrink::io::matrix_to_json(rep.posterior_mean_p)},
                     {"posterior_mean_t", rep.posterior_mean_t},
                     {"ess_t", rep.ess_t},
                     {"delta_kl", rep.delta_kl},
                     {"draws", rep.draws},
                     {"prior", nmshrink::io::to_json(prior)}};
            out["delta_ss"] = std::isfinite(rep.delta_ss) ? json(rep.delta_ss) : json(nullptr);
            with_output(gd_output, [&](std::ostream& os) { os << std::setprecision(17) << out.dump(2) << "\n"; });
            return kExitOk;
        }

        if (*ke) {
            const json j = read_json_file(ke_input);
            using nmshrink::io::detail::get;
            const double alpha = get<double>(j, "alpha", "kernel-eval");
            const double beta = j.contains("beta") ? get<double>(j, "beta", "kernel-eval") : 0.0;
            const auto g = j.contains("g") ? nmshrink::io::g_from_json(j.at("g")) : nmshrink::GChoice::constant_one();
            const double xi0 = get<double>(j, "xi0", "kernel-eval");
            const auto xi = get<std::vector<double>>(j, "xi", "kernel-eval");
            if (dry_run) {
                print_config();
                std::cout << "# kernel: " << j.dump() << "\n";
                return kExitOk;
            }
            const auto res = nmshrink::log_K_detailed(alpha, beta, g, xi0, xi);
            const auto up = nmshrink::log_K_detailed(alpha + 1.0, beta, g, xi0, xi);
            auto num = [](double v) { return std::isfinite(v) ? json(v) : json("inf"); };
            json out{{"log_K", num(res.log_value)},
                     {"divergent", res.divergent},
                     {"rel_error", res.rel_error},
                     {"nodes", res.nodes},
                     {"log_K_alpha_plus_1", num(up.log_value)},
                     {"divergent_alpha_plus_1", up.divergent}};
            if (!res.divergent) out["delta"] = up.divergent ? json("inf") : json(std::exp(up.log_value - res.log_value));
            std::cout << std::setprecision(17) << out.dump(2) << "\n";
            return kExitOk;
        }

        if (*tables) {
            fs::path dir = rt_out;
            if (dir.empty()) {
                const char* env = std::getenv(kOutputDirEnv);
                dir = env != nullptr && *env != '\0' ? fs::path(env) : fs::path(".");
            }
            nmshrink::require_input(rt_reps >= 2, "repro tables: --reps must be at least 2");
            if (dry_run) {
                print_config();
                std::cout << "# output directory: " << dir.string() << "\n";
                return kExitOk;
            }
            fs::create_directories(dir);
            const auto start = std::chrono::steady_clock::now();
            {
                std::ofstream out(dir / "dominance.csv");
                write_dominance(out);
            }
            const std::vector<std::string> names{"umvu", "eb0", "eb", "hb"};
            nmshrink::RiskConfig cfg;
            cfg.reps = rt_reps;
            cfg.seed = rt_seed;
            cfg.jobs = rt_jobs;
            for (const char* c : {"i", "ii", "iii"}) {
                const auto rows = nmshrink::case_table(c, names, cfg);
                std::ofstream out(dir / (std::string("risk_case_") + c + ".csv"));
                write_risk_table(out, rows, names);
            }
            const double secs =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            json manifest{{"version", nmshrink::kVersion},
                          {"seed", rt_seed},
                          {"reps", rt_reps},
                          {"jobs", rt_jobs},
                          {"estimators", names},
                          {"prial_reference", "umvu"},
                          {"kernel", kernel_settings_json({})},
                          {"files", {"dominance.csv", "risk_case_i.csv", "risk_case_ii.csv", "risk_case_iii.csv"}},
                          {"runtime_seconds", secs}};
            std::ofstream(dir / "manifest.json") << manifest.dump(2) << "\n";
            std::cerr << "wrote dominance.csv, risk_case_{i,ii,iii}.csv and manifest.json to " << dir.string() << "\n";
            return kExitOk;
        }
    } catch (const nmshrink::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nmshrink::ConditionViolation& e) {
        std::cerr << "condition violated: " << e.what() << "\n";
        return kExitCondition;
    } catch (const nmshrink::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
