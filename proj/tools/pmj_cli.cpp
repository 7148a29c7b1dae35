#include <tbb/global_control.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "pmj/acceptance.hpp"
#include "pmj/asymptotics.hpp"
#include "pmj/config.hpp"
#include "pmj/error.hpp"
#include "pmj/oracle.hpp"
#include "pmj/periodic.hpp"
#include "pmj/turan.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kUsage = 1, kOutOfClass = 2, kAcceptance = 3 };

struct Globals {
    std::optional<long> horizon;
    double rel_tol = 1e-3;
    int threads = 0;
    std::string out = ".";
};

struct Run {
    std::string command;
    pmj::ModelConfig cfg;
    ordered_json outputs = ordered_json::array();
    ordered_json flags = ordered_json::object();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

pmj::ModelConfig load(const std::string& path, const Globals& g) {
    pmj::ModelConfig c = pmj::load_config(path);
    if (g.horizon) {
        if (*g.horizon < 1000) throw pmj::Error("config: horizon must be at least 1000");
        c.model.horizon = *g.horizon;
    }
    return c;
}

fs::path out_path(const Globals& g, const std::string& file) {
    fs::create_directories(g.out);
    return fs::path(g.out) / file;
}

void model_flags(Run& r, const pmj::ModulatedModel& m) {
    r.flags["increments_vanish"] = pmj::increments_vanish(m);
    r.flags["conjectural"] = !pmj::increments_vanish(m);
    if (m.perturbation) {
        r.flags["summable"] = m.perturbation->summability.summable;
        if (!m.perturbation->summability.warning.empty()) r.flags["summability_warning"] = m.perturbation->summability.warning;
    }
}

void finish(Run& r, const Globals& g) {
    ordered_json j;
    j["command"] = r.command;
    j["config"] = r.cfg.name;
    j["config_hash"] = pmj::config_hash(r.cfg);
    j["seed"] = r.cfg.seed;
    j["outputs"] = r.outputs;
    j["flags"] = r.flags;
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - r.t0).count();
    const fs::path p = out_path(g, r.command + "_report.json");
    std::ofstream(p) << j.dump(2) << "\n";
    std::cout << "report: " << p.string() << "\n";
}

// model that is not in the parabolic class: print and gate with exit 2
pmj::Analysis analyse_or_throw(const pmj::ModulatedModel& m) {
    const pmj::Case c = pmj::classify(m.periodic);
    if (c != pmj::Case::IIb) throw pmj::Error(std::string("out of class: case ") + pmj::case_name(c));
    if (!m.perturbed()) return pmj::analyse(m);
    return pmj::analyse_perturbed(pmj::analyse(m.unperturbed()), m);
}

ordered_json bound(double v) {
    if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
    return v;
}

std::string interval_str(const pmj::Interval& I) {
    std::ostringstream os;
    os << "(" << I.lo << ", " << I.hi << ")";
    return os.str();
}

int cmd_classify(const std::string& path, const Globals& g) {
    Run r{"classify", load(path, g)};
    const pmj::ModulatedModel& m = r.cfg.model;
    const pmj::Case c = pmj::classify(m.periodic);
    const pmj::Mat2 X0 = pmj::frak_X(m.periodic, 0, 0.0);
    std::cout << std::setprecision(12);
    std::cout << "case: " << pmj::case_name(c) << "\n";
    std::cout << "tr X_0(0): " << X0.tr() << "\n";
    std::cout << "bands:";
    ordered_json bands = ordered_json::array();
    try {
        for (const auto& I : pmj::spectral_bands(m.periodic)) {
            std::cout << " [" << I.lo << ", " << I.hi << "]";
            bands.push_back({I.lo, I.hi});
        }
    } catch (const pmj::Error& e) {
        std::cout << " unavailable (" << e.what() << ")";
    }
    std::cout << "\n";
    r.flags["case"] = pmj::case_name(c);
    r.flags["trace"] = X0.tr();
    r.flags["bands"] = bands;
    if (c != pmj::Case::IIb) {
        finish(r, g);
        std::cerr << "out of class: case " << pmj::case_name(c) << "\n";
        return kOutOfClass;
    }
    const pmj::Analysis an = pmj::analyse(m.unperturbed());
    const pmj::TauData& t = an.tau;
    std::cout << "epsilon: " << t.epsilon << "\n";
    std::cout << "tau(x) = " << t.slope << " x + " << t.intercept << "\n";
    std::cout << "x0: " << t.x0 << "\n";
    std::cout << "Lambda_-: " << interval_str(t.lambda_minus) << "\n";
    std::cout << "Lambda_+: " << interval_str(t.lambda_plus) << "\n";
    std::cout << "s/r: " << (m.s_r_source == pmj::SRSource::UserExact ? "user" : "estimated");
    for (std::size_t k = 0; k < an.model.s.size(); ++k) std::cout << " s" << k << "=" << an.model.s[k] << " r" << k << "=" << an.model.r[k];
    std::cout << "\n";
    r.flags["epsilon"] = t.epsilon;
    r.flags["tau"] = {{"slope", t.slope}, {"intercept", t.intercept}};
    r.flags["x0"] = t.x0;
    r.flags["lambda_minus"] = {bound(t.lambda_minus.lo), bound(t.lambda_minus.hi)};
    r.flags["lambda_plus"] = {bound(t.lambda_plus.lo), bound(t.lambda_plus.hi)};
    model_flags(r, an.model);
    finish(r, g);
    return kOk;
}

int cmd_density(const std::string& path, const Globals& g, double lo, double hi, int points, int residue) {
    Run r{"density", load(path, g)};
    const pmj::Analysis an = analyse_or_throw(r.cfg.model);
    const pmj::DensityTable t = pmj::density_table(an, residue, lo, hi, points, g.rel_tol);
    const fs::path p = out_path(g, "density.csv");
    std::ofstream os(p);
    pmj::write_csv(os, t);
    r.outputs.push_back(p.string());
    model_flags(r, an.model);
    r.flags["conjectural"] = t.conjectural;
    std::cout << "wrote " << t.rows.size() << " rows to " << p.string() << (t.conjectural ? " (conjectural)" : "") << "\n";
    finish(r, g);
    return kOk;
}

int cmd_asymptotics(const std::string& path, const Globals& g, double x, long j_lo, long window, int residue) {
    Run r{"asymptotics", load(path, g)};
    const pmj::ModulatedModel& m = r.cfg.model;
    const pmj::Analysis an = analyse_or_throw(m);
    const pmj::AsymptoticsReport rep =
        m.perturbed() ? pmj::perturbed_asymptotics(pmj::analyse(m.unperturbed()), an, residue, x, j_lo, j_lo + window, -1, g.rel_tol)
                      : pmj::amplitude_extract(an, residue, x, j_lo, j_lo + window, -1, g.rel_tol);
    const fs::path p = out_path(g, "asymptotics.json");
    std::ofstream os(p);
    pmj::write_json(os, rep);
    r.outputs.push_back(p.string());
    model_flags(r, an.model);
    r.flags["j0"] = rep.j0;
    std::cout << "amplitude ratio " << rep.ratio() << " (measured " << rep.amplitude_measured << ", predicted "
              << rep.amplitude_predicted << "), j0=" << rep.j0 << "\n";
    finish(r, g);
    return kOk;
}

int cmd_kernel(const std::string& path, const Globals& g, double x, long n, double box, int points) {
    Run r{"kernel", load(path, g)};
    const pmj::Analysis an = analyse_or_throw(r.cfg.model);
    if (points < 2) throw pmj::Error("kernel: need at least 2 grid points");
    std::vector<double> grid;
    for (int k = 0; k < points; ++k) grid.push_back(-box + 2 * box * k / (points - 1));
    const pmj::KernelProfile kp = pmj::universality_profile(an, n, x, grid, -1, g.rel_tol);
    const fs::path p = out_path(g, "kernel.csv");
    std::ofstream os(p);
    pmj::write_csv(os, kp);
    r.outputs.push_back(p.string());
    model_flags(r, an.model);
    const double dev = kp.max_deviation(2 * box);
    r.flags["max_deviation"] = dev;
    std::cout << "max deviation " << dev << " of upsilon/mu' (upsilon=" << kp.upsilon << ", mu'=" << kp.mu_prime << ")\n";
    finish(r, g);
    return kOk;
}

int cmd_oracle(const std::string& path, const Globals& g, long M, double lo, double hi) {
    Run r{"oracle", load(path, g)};
    const pmj::ModulatedModel& m = r.cfg.model;
    const pmj::Tridiagonal td = pmj::truncate(m, M);
    const pmj::OracleMeasure om = pmj::eigendecomp(td.diag, td.offdiag);
    const fs::path pm = out_path(g, "oracle_measure.csv");
    {
        std::ofstream os(pm);
        pmj::write_csv(os, om);
    }
    r.outputs.push_back(pm.string());

    std::vector<long> sizes{M / 4, M / 2, M};
    std::vector<long> counts;
    pmj::Interval K{lo, hi};
    bool probe = false;
    if (pmj::classify(m.periodic) == pmj::Case::IIb) {
        const pmj::Analysis an = analyse_or_throw(m);
        if (an.tau.in_plus(lo) && an.tau.in_plus(hi) && an.tau.sigma(lo) == an.tau.sigma(hi) &&
            !(lo < an.tau.x0 && an.tau.x0 < hi)) {
            const pmj::ProbeResult pr = pmj::ess_spectrum_probe(an, K, sizes);
            K = pr.K;
            counts = pr.counts;
            probe = true;
        }
    }
    if (!probe)
        for (long s : sizes) {
            const pmj::Tridiagonal t = pmj::truncate(m, s);
            counts.push_back(pmj::sturm_count(t, hi) - pmj::sturm_count(t, lo));
        }
    const fs::path pc = out_path(g, "oracle_counts.csv");
    {
        std::ofstream os(pc);
        os << "# interval [" << K.lo << ", " << K.hi << "]" << (probe ? " (margin around x0 removed)" : "") << "\n";
        os << "M,count\n";
        for (std::size_t k = 0; k < sizes.size(); ++k) os << sizes[k] << "," << counts[k] << "\n";
    }
    r.outputs.push_back(pc.string());
    r.flags["counts"] = counts;
    std::cout << "eigenvalue counts in [" << K.lo << ", " << K.hi << "]:";
    for (std::size_t k = 0; k < sizes.size(); ++k) std::cout << " M=" << sizes[k] << ":" << counts[k];
    std::cout << "\n";
    finish(r, g);
    return kOk;
}

int cmd_report(const std::string& path, const Globals& g) {
    Run r{"report", load(path, g)};
    const auto results = pmj::run_acceptance({}, [](const pmj::CriterionResult& c) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << ": " << c.detail << std::endl;
    });
    const ordered_json j = pmj::acceptance_json(results);
    const fs::path p = out_path(g, "acceptance.json");
    std::ofstream(p) << j.dump(2) << "\n";
    r.outputs.push_back(p.string());
    r.flags["all_passed"] = j["all_passed"];
    finish(r, g);
    return j["all_passed"].get<bool>() ? kOk : kAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral analysis of periodically modulated Jacobi matrices"};
    app.require_subcommand(1);
    Globals g;
    long horizon = 0;
    app.add_option("--horizon", horizon, "override the model horizon");
    app.add_option("--rel-tol", g.rel_tol, "Cauchy tolerance for Turan limits")->check(CLI::PositiveNumber);
    app.add_option("--threads", g.threads, "worker threads (0 = all)")->check(CLI::NonNegativeNumber);
    app.add_option("--out", g.out, "output directory");

    std::string config;
    auto add = [&](const char* name, const char* help) {
        CLI::App* s = app.add_subcommand(name, help);
        s->add_option("config", config, "model config JSON")->required();
        s->fallthrough();
        return s;
    };
    CLI::App* classify = add("classify", "classify the periodic limit and print tau, x0, Lambda");
    CLI::App* density = add("density", "Turan density table on a grid in Lambda_-");
    double lo = -2, hi = -1, x = -1, box = 1, o_lo = 0.5, o_hi = 1.5;
    int points = 64, k_points = 9, residue = 0;
    long j_lo = 100000, window = 1000, n = 100000, M = 4000;
    density->add_option("--x-lo", lo);
    density->add_option("--x-hi", hi);
    density->add_option("--points", points);
    density->add_option("--residue", residue);
    CLI::App* asym = add("asymptotics", "scaled polynomial amplitude on a window of j");
    asym->add_option("--x", x);
    asym->add_option("--j-lo", j_lo);
    asym->add_option("--window", window);
    asym->add_option("--residue", residue);
    CLI::App* kernel = add("kernel", "Christoffel-Darboux kernel profile");
    kernel->add_option("--x", x);
    kernel->add_option("--n", n);
    kernel->add_option("--box", box, "half width of the (u, v) box");
    kernel->add_option("--points", k_points);
    CLI::App* oracle = add("oracle", "truncated-operator spectral measure and eigenvalue counts");
    oracle->add_option("--M", M);
    oracle->add_option("--lo", o_lo);
    oracle->add_option("--hi", o_hi);
    CLI::App* report = add("report", "run the acceptance suite and emit a JSON verdict");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }
    if (horizon != 0) g.horizon = horizon;
    std::unique_ptr<tbb::global_control> gc;
    if (g.threads > 0)
        gc = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                   static_cast<std::size_t>(g.threads));
    try {
        if (*classify) return cmd_classify(config, g);
        if (*density) return cmd_density(config, g, lo, hi, points, residue);
        if (*asym) return cmd_asymptotics(config, g, x, j_lo, window, residue);
        if (*kernel) return cmd_kernel(config, g, x, n, box, k_points);
        if (*oracle) return cmd_oracle(config, g, M, o_lo, o_hi);
        if (*report) return cmd_report(config, g);
    } catch (const pmj::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return std::string(e.what()).rfind("out of class", 0) == 0 ? kOutOfClass : kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
