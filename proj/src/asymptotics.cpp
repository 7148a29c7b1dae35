#include "pmj/asymptotics.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"
#include "pmj/conjugation.hpp"
#include "pmj/error.hpp"
#include "pmj/kahan.hpp"
#include "pmj/recurrence.hpp"
#include "pmj/turan.hpp"

namespace pmj {

UpsilonForms upsilon_forms(const Analysis& an, double x) {
    if (!an.tau.in_minus(x)) throw Error("x outside Lambda_-");
    const PeriodicParams& p = an.model.periodic;
    const int N = p.N();
    const double den = 2.0 * std::numbers::pi * N * std::sqrt(std::fabs(an.tau.tau(x)));
    double sum = 0;
    for (int k = 1; k <= N; ++k) sum += std::fabs(frak_X(p, k, 0.0).m21) / p.a(k - 1);
    return {sum / den, std::fabs(trace_derivative_at_zero(p)) / den};
}

double upsilon(const Analysis& an, double x) {
    const UpsilonForms f = upsilon_forms(an, x);
    if (std::fabs(f.sum_form - f.trace_form) > 1e-10 * f.trace_form) throw Error("upsilon mismatch");
    return f.trace_form;
}

double rho(const ModulatedModel& m, long n) {
    CompensatedSum s;
    for (long k = 0; k <= n; ++k) s += std::sqrt(m.periodic.a(k) / m.a(k));
    return s.value();
}

double two_point_amplitude(double w0, double w1, double theta) {
    const double sn = std::sin(theta);
    return std::sqrt((w0 * w0 + w1 * w1 - 2.0 * w0 * w1 * std::cos(theta)) / (sn * sn));
}

namespace {

double wrap_pi(double a) {
    a = std::remainder(a, 2.0 * std::numbers::pi);
    return a;
}

// polynomials of `poly_model`, phases from `phase`
AsymptoticsReport extract(const Analysis& phase, const ModulatedModel& poly_model, int i, double x, long j_lo,
                          long j_hi, double mu_prime) {
    if (!phase.tau.in_minus(x)) throw Error("x outside Lambda_-");
    if (j_hi <= j_lo) throw Error("empty window");
    const int N = poly_model.N();
    AsymptoticsReport rep;
    rep.x = x;
    rep.i = i;
    rep.j_lo = j_lo;
    rep.j_hi = j_hi;
    rep.mu_prime = mu_prime;
    rep.j0 = detect_j0(phase, i, x, std::min<long>(j_lo, 4096));

    std::vector<double> w;
    Stream s(poly_model, kE2, x);
    for (long j = j_lo; j <= j_hi; ++j) {
        s.advance_to(j * N + i);
        w.push_back(std::pow(poly_model.a((j + 1) * N + i - 1), 0.25) * s.cur());
    }
    std::vector<double> amps, thetas;
    CompensatedSum acc;
    for (long j = j_lo; j < j_hi; ++j) {
        const ConjugationFrame f = frame(phase, i, j, x, rep.j0);
        thetas.push_back(f.theta);
        if (std::sin(f.theta) < 1e-3) {
            amps.push_back(std::nan(""));
            continue;
        }
        const std::size_t k = static_cast<std::size_t>(j - j_lo);
        const double A = two_point_amplitude(w[k], w[k + 1], f.theta);
        amps.push_back(A);
        acc += A;
    }
    const long used = std::count_if(amps.begin(), amps.end(), [](double a) { return !std::isnan(a); });
    if (used == 0) throw Error("resonant window");
    rep.amplitude_measured = acc.value() / double(used);
    for (double a : amps)
        if (!std::isnan(a))
            rep.amplitude_spread = std::max(rep.amplitude_spread, std::fabs(a / rep.amplitude_measured - 1.0));
    for (double v : w) rep.max_scaled_value = std::max(rep.max_scaled_value, std::fabs(v));

    // phi_j from (w_j, w_{j+1}); residual = phi_{j+1} - phi_j - theta_j
    std::vector<double> phi;
    for (std::size_t k = 0; k < thetas.size(); ++k) {
        const double th = thetas[k];
        phi.push_back(std::atan2(w[k], (w[k + 1] - w[k] * std::cos(th)) / std::sin(th)));
    }
    for (std::size_t k = 0; k + 1 < phi.size(); ++k)
        rep.phase_residuals.push_back(wrap_pi(phi[k + 1] - phi[k] - thetas[k]));

    const PeriodicParams& p = phase.model.periodic;
    const double x21 = std::fabs(frak_X(p, i, 0.0).m21);
    rep.amplitude_predicted =
        std::sqrt(x21 / (std::numbers::pi * mu_prime * std::sqrt(p.a(i - 1) * std::fabs(phase.tau.tau(x)))));
    return rep;
}

}  // namespace

AsymptoticsReport amplitude_extract(const Analysis& an, int i, double x, long j_lo, long j_hi, double mu_prime,
                                    double rel_tol) {
    if (!an.tau.in_minus(x)) throw Error("x outside Lambda_-");
    if (mu_prime <= 0) mu_prime = density(an, i, x, rel_tol);
    return extract(an, an.model, i, x, j_lo, j_hi, mu_prime);
}

AsymptoticsReport perturbed_asymptotics(const Analysis& base, const Analysis& perturbed, int i, double x, long j_lo,
                                        long j_hi, double mu_prime, double rel_tol) {
    if (!base.tau.in_minus(x)) throw Error("x outside Lambda_-");
    if (mu_prime <= 0) mu_prime = perturbed_density(perturbed, i, x, rel_tol);
    return extract(base, perturbed.model, i, x, j_lo, j_hi, mu_prime);
}

double sinc(double t) { return t == 0.0 ? 1.0 : std::sin(t) / t; }

double KernelProfile::max_deviation(double span) const {
    const double scale = upsilon / mu_prime;
    double worst = 0;
    for (std::size_t a = 0; a < u_grid.size(); ++a)
        for (std::size_t b = 0; b < u_grid.size(); ++b)
            if (std::fabs(u_grid[a] - u_grid[b]) <= span + 1e-12)
                worst = std::max(worst, std::fabs(values[a][b] - prediction[a][b]) / scale);
    return worst;
}

KernelProfile universality_profile(const Analysis& an, long n, double x, const std::vector<double>& u_grid,
                                   double mu_prime, double rel_tol) {
    if (!an.tau.in_minus(x)) throw Error("x outside Lambda_-");
    KernelProfile k;
    k.x = x;
    k.n = n;
    k.u_grid = u_grid;
    k.rho_n = rho(an.model, n);
    k.upsilon = upsilon(an, x);
    if (mu_prime <= 0) {
        mu_prime = an.model.perturbed() ? perturbed_density(an, 0, x, rel_tol) : density(an, 0, x, rel_tol);
    }
    k.mu_prime = mu_prime;
    const std::size_t G = u_grid.size();
    std::vector<std::vector<double>> p(G);
    tbb::parallel_for(std::size_t(0), G, [&](std::size_t a) { p[a] = polys(an.model, x + u_grid[a] / k.rho_n, n); });
    k.values.assign(G, std::vector<double>(G));
    k.prediction.assign(G, std::vector<double>(G));
    for (std::size_t a = 0; a < G; ++a)
        for (std::size_t b = a; b < G; ++b) {
            CompensatedSum s;
            for (long j = 0; j <= n; ++j) s += p[a][j] * p[b][j];
            const double v = s.value() / k.rho_n;
            const double pr = k.upsilon / mu_prime * sinc((u_grid[a] - u_grid[b]) * std::numbers::pi * k.upsilon);
            k.values[a][b] = k.values[b][a] = v;
            k.prediction[a][b] = k.prediction[b][a] = pr;
        }
    return k;
}

DiagonalConstant diagonal_constant(const Analysis& an, long n, double x, double mu_prime, double rel_tol,
                                   double match_tol) {
    if (an.model.N() != 1) throw Error("diagonal limit needs N = 1");
    if (!an.tau.in_minus(x)) throw Error("x outside Lambda_-");
    if (mu_prime <= 0) mu_prime = density(an, 0, x, rel_tol);
    Stream s(an.model, kE2, x);
    CompensatedSum num, den;
    num += 1.0;
    den += 1.0 / std::sqrt(an.model.a(0));
    for (long j = 1; j <= n; ++j) {
        s.step();
        num += s.cur() * s.cur();
        den += 1.0 / std::sqrt(an.model.a(j));
    }
    DiagonalConstant r;
    r.value = num.value() / den.value();
    const double root = std::sqrt(std::fabs(x + an.model.r[0]));
    r.candidate_pi = 1.0 / (std::numbers::pi * mu_prime * root);
    r.candidate_two_pi = 0.5 * r.candidate_pi;
    r.rel_dev_pi = std::fabs(r.value / r.candidate_pi - 1.0);
    r.rel_dev_two_pi = std::fabs(r.value / r.candidate_two_pi - 1.0);
    const bool a = r.rel_dev_pi <= match_tol, b = r.rel_dev_two_pi <= match_tol;
    r.matched = a && b ? "both" : a ? "1/pi" : b ? "1/(2pi)" : "none";
    return r;
}

void write_csv(std::ostream& os, const KernelProfile& k) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "# kernel profile x=%.17g n=%ld rho_n=%.17g upsilon=%.17g mu_prime=%.17g\n", k.x,
                  k.n, k.rho_n, k.upsilon, k.mu_prime);
    os << buf << "u,v,value,prediction\n";
    for (std::size_t a = 0; a < k.u_grid.size(); ++a)
        for (std::size_t b = 0; b < k.u_grid.size(); ++b) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", k.u_grid[a], k.u_grid[b], k.values[a][b],
                          k.prediction[a][b]);
            os << buf;
        }
}

void write_json(std::ostream& os, const AsymptoticsReport& r) {
    nlohmann::ordered_json j;
    j["x"] = r.x;
    j["residue"] = r.i;
    j["j_lo"] = r.j_lo;
    j["j_hi"] = r.j_hi;
    j["j0"] = r.j0;
    j["mu_prime"] = r.mu_prime;
    j["amplitude_measured"] = r.amplitude_measured;
    j["amplitude_predicted"] = r.amplitude_predicted;
    j["ratio"] = r.ratio();
    j["amplitude_spread"] = r.amplitude_spread;
    j["max_scaled_value"] = r.max_scaled_value;
    double worst = 0;
    for (double v : r.phase_residuals) worst = std::max(worst, std::fabs(v));
    j["max_phase_residual"] = worst;
    os << j.dump(2) << "\n";
}

}  // namespace pmj
