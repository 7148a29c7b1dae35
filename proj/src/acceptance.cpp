#include "pmj/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "pmj/asymptotics.hpp"
#include "pmj/config.hpp"
#include "pmj/conjugation.hpp"
#include "pmj/error.hpp"
#include "pmj/oracle.hpp"
#include "pmj/periodic.hpp"
#include "pmj/recurrence.hpp"
#include "pmj/turan.hpp"

namespace pmj {

using nlohmann::ordered_json;

namespace {

struct Outcome {
    bool ok = true;
    std::ostringstream detail;
    ordered_json data;
    void require(bool cond) { ok = ok && cond; }
};

double rel_err(double a, double b) { return std::fabs(a - b) / std::max(1.0, std::max(std::fabs(a), std::fabs(b))); }

// value and x-derivative of the periodic transfer product, by forward differentiation
struct DualMat {
    Mat2 v, d;
};

double trace_derivative_dual(const PeriodicParams& p, double x) {
    DualMat acc{Mat2::identity(), Mat2{}};
    for (int k = 0; k < p.N(); ++k) {
        const Mat2 B = frak_B(p, k, x);
        const Mat2 dB{0, 0, 0, 1.0 / p.a(k)};
        acc = {B * acc.v, dB * acc.v + B * acc.d};
    }
    return acc.d.tr();
}

// replace beta_{N-1} so that tr X_0(0) = target
bool make_parabolic(PeriodicParams& p, double target) {
    const int N = p.N();
    if (N == 1) {
        p.beta[0] = -target * p.alpha[0];
        return true;
    }
    Mat2 P = Mat2::identity();
    for (int k = 0; k < N - 1; ++k) P = frak_B(p, k, 0.0) * P;
    if (std::fabs(P.m22) < 1e-3) return false;
    const double c = -p.a(N - 2) / p.a(N - 1);
    const double beta = p.a(N - 1) * (P.m21 + c * P.m12 - target) / P.m22;
    if (std::fabs(beta) > 50) return false;
    p.beta[N - 1] = beta;
    return classify(p) == Case::IIb;
}

PeriodicParams random_periodic(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(1, 6);
    std::uniform_real_distribution<double> ad(0.5, 2.0), bd(-2.0, 2.0);
    const int N = nd(rng);
    std::vector<double> a(N), b(N);
    for (int k = 0; k < N; ++k) {
        a[k] = ad(rng);
        b[k] = bd(rng);
    }
    return PeriodicParams(a, b);
}

void criterion1(Outcome& o) {
    std::mt19937_64 rng(20240601);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst_deriv = 0, worst_abs = 0, worst_prod = 0, worst_sq = 0;
    int sets = 0, band_points = 0, parabolic_sets = 0, failures = 0;
    while (sets < 1000) {
        PeriodicParams p = random_periodic(rng);
        ++sets;
        for (double x : {0.0, -3.0 + 6.0 * u01(rng)})
            worst_deriv = std::max(worst_deriv, rel_err(trace_derivative(p, x), trace_derivative_dual(p, x)));
        try {
            const auto bands = spectral_bands(p);
            for (int k = 0; k < 5 && !bands.empty(); ++k) {
                const Interval& I = bands[static_cast<std::size_t>(u01(rng) * bands.size()) % bands.size()];
                const double x = I.lo + (I.hi - I.lo) * (0.01 + 0.98 * u01(rng));
                const auto [l, r] = absolute_trace_identity(p, x);
                worst_abs = std::max(worst_abs, std::max(rel_err(l, r), rel_err(l, std::fabs(trace_derivative_dual(p, x)))));
                ++band_points;
            }
        } catch (const Error&) {
            ++failures;
        }
        PeriodicParams q = p;
        if (!make_parabolic(q, u01(rng) < 0.5 ? 2.0 : -2.0)) continue;
        ++parabolic_sets;
        try {
            const PeriodicCache c = conjugator_chain(q);
            for (int i = 0; i < q.N(); ++i) {
                const Mat2 X = frak_X(q, i, 0.0);
                const Mat2& T = c.T[static_cast<std::size_t>(i)];
                const double dT = T.det(), s1 = T.m11 + T.m12, s2 = T.m21 + T.m22;
                worst_prod = std::max(worst_prod, rel_err(s1 * s2 / dT, 1.0 - c.epsilon * X.m11));
                worst_sq = std::max(worst_sq, rel_err(s2 * s2 / dT, -c.epsilon * X.m21));
            }
            const auto [l, r] = absolute_trace_identity(q, 0.0);
            worst_abs = std::max(worst_abs, std::max(rel_err(l, r), rel_err(l, std::fabs(trace_derivative_dual(q, 0.0)))));
        } catch (const Error&) {
            ++failures;
        }
    }
    o.require(failures == 0 && worst_deriv <= 1e-9 && worst_abs <= 1e-9 && worst_prod <= 1e-9 && worst_sq <= 1e-9);
    o.detail << "sets=" << sets << " band_points=" << band_points << " parabolic=" << parabolic_sets
             << " trace_derivative=" << worst_deriv << " absolute_sum=" << worst_abs << " conj_product=" << worst_prod << " conj_square=" << worst_sq
             << " failures=" << failures;
    o.data = {{"sets", sets}, {"band_points", band_points}, {"parabolic_sets", parabolic_sets},
              {"trace_derivative_max_err", worst_deriv}, {"absolute_sum_max_err", worst_abs}, {"conjugator_product_max_err", worst_prod},
              {"conjugator_square_max_err", worst_sq}, {"failures", failures}};
}

void criterion2(Outcome& o) {
    const Analysis an = analyse(fixtures::m1());
    double worst = 0;
    for (double x : {-2.0, -1.0, -0.5, 0.5, 1.0}) {
        const double v = scaled_discriminant(an, 0, 100000, x);
        const double lim = 4.0 * an.tau.tau(x);
        const double e = std::fabs(v - lim) / std::fabs(lim);
        worst = std::max(worst, e);
        o.data["points"].push_back({{"x", x}, {"scaled_discriminant", v}, {"limit", lim}, {"rel_err", e}});
    }
    o.require(worst <= 0.02);
    o.detail << "max relative error " << worst << " (tol 0.02)";
}

void criterion3(Outcome& o) {
    const Analysis an = analyse(fixtures::m1());
    double worstR = 0, worstQ = 0;
    bool trend = true;
    for (int k = 0; k <= 6; ++k) {
        const double x = -2.0 + 0.25 * k;
        const Mat2 Rlim = limit_R(an.tau.sigma(x));
        const ConjugationFrame f1 = frame(an, 0, 100000, x), f4 = frame(an, 0, 400000, x);
        const double r1 = max_norm(f1.R - Rlim), r4 = max_norm(f4.R - Rlim);
        const double q1 = max_norm(f1.Q), q4 = max_norm(f4.Q);
        worstR = std::max(worstR, r1);
        worstQ = std::max(worstQ, q1);
        trend = trend && r4 < r1 && q4 < q1;
        o.data["points"].push_back({{"x", x}, {"R_err_1e5", r1}, {"R_err_4e5", r4}, {"Q_1e5", q1}, {"Q_4e5", q4}});
    }
    o.require(worstR <= 0.05 && worstQ <= 0.02 && trend);
    o.detail << "max |R-Rlim|=" << worstR << " (tol 0.05) max |Q|=" << worstQ << " (tol 0.02) decreasing="
             << (trend ? "yes" : "no");
}

std::vector<double> truncated_on(const Analysis& an, long L, const std::vector<double>& grid) {
    std::vector<double> v;
    for (double x : grid) v.push_back(truncated_density(an, L, x));
    return v;
}

void criterion4(Outcome& o) {
    const Analysis an = analyse(fixtures::m1());
    const DensityTable t = density_table(an, 0, -2.0, -1.0, 64, 1e-3);
    const std::vector<double> grid = t.grid(), tur = t.mu_prime();
    const std::vector<double> tr = truncated_on(an, 100000, grid);
    const Tridiagonal td = truncate(an.model, 4000);
    const OracleMeasure om = eigendecomp(td.diag, td.offdiag);
    const double g_tt = cdf_gap(grid, tur, tr);
    const CdfComparison c_ot = cdf_compare(om, grid, tur), c_or = cdf_compare(om, grid, tr);
    o.require(g_tt <= 0.015 && c_ot.sup_gap <= 0.015 && c_or.sup_gap <= 0.015);
    o.detail << "gaps turan/truncated=" << g_tt << " oracle/turan=" << c_ot.sup_gap
             << " oracle/truncated=" << c_or.sup_gap << " (tol 0.015), interval mass=" << c_ot.mass;
    o.data = {{"gap_turan_truncated", g_tt}, {"gap_oracle_turan", c_ot.sup_gap},
              {"gap_oracle_truncated", c_or.sup_gap}, {"oracle_mass", c_ot.mass},
              {"turan_mass", c_ot.density_mass}, {"truncated_mass", c_or.density_mass}};
}

void criterion5(Outcome& o) {
    const Analysis an = analyse(fixtures::m1());
    const AsymptoticsReport r = amplitude_extract(an, 0, -1.0, 100000, 101000);
    o.require(r.ratio() >= 0.98 && r.ratio() <= 1.02);
    o.detail << "measured/predicted=" << r.ratio() << " (measured " << r.amplitude_measured << ", predicted "
             << r.amplitude_predicted << ")";
    o.data = {{"ratio", r.ratio()}, {"measured", r.amplitude_measured}, {"predicted", r.amplitude_predicted},
              {"mu_prime", r.mu_prime}, {"j0", r.j0}};
}

std::vector<double> unit_grid() {
    std::vector<double> g;
    for (int k = -4; k <= 4; ++k) g.push_back(0.25 * k);
    return g;
}

void criterion6(Outcome& o) {
    const Analysis an = analyse(fixtures::m1());
    const double x = -1.0;
    const double mu = density(an, 0, x, 1e-3);
    const KernelProfile k = universality_profile(an, 100000, x, unit_grid(), mu);
    const double dev = k.max_deviation(2.0);
    const DiagonalConstant same = diagonal_constant(an, 100000, x, mu);
    const std::size_t c = k.u_grid.size() / 2;
    const double diag = k.values[c][c];
    const double consistency = std::fabs(same.value / diag - 1.0);
    const DiagonalConstant big = diagonal_constant(an, 1000000, x, mu);
    const double sinc_constant = k.upsilon / mu;
    const bool one = big.matched == "1/pi" || big.matched == "1/(2pi)";
    const double matched_value = big.matched == "1/pi" ? big.candidate_pi : big.candidate_two_pi;
    const bool consistent_with_kernel = one && std::fabs(matched_value / sinc_constant - 1.0) < 1e-6;
    o.require(dev <= 0.05 && consistency <= 0.01 && one && consistent_with_kernel);
    o.detail << "max deviation " << dev << " of upsilon/mu' (tol 0.05); diagonal constant matched " << big.matched
             << " (dev 1/pi=" << big.rel_dev_pi << ", 1/(2pi)=" << big.rel_dev_two_pi << ")";
    o.data = {{"max_deviation", dev}, {"upsilon", k.upsilon}, {"mu_prime", mu}, {"rho_n", k.rho_n},
              {"diagonal_value_n1e5", diag}, {"code_path_consistency", consistency},
              {"diagonal_value_n1e6", big.value}, {"candidate_1_over_pi", big.candidate_pi},
              {"candidate_1_over_2pi", big.candidate_two_pi}, {"matched", big.matched}};
}

void criterion7(Outcome& o) {
    const Analysis an = analyse(fixtures::m1());
    const ProbeResult p = ess_spectrum_probe(an, {0.5, 1.5}, {1000, 2000, 4000});
    bool ok = true;
    for (std::size_t k = 1; k < p.counts.size(); ++k) ok = ok && std::labs(p.counts[k] - p.counts[k - 1]) <= 1;
    o.require(ok);
    o.detail << "counts in [" << p.K.lo << "," << p.K.hi << "]:";
    for (long c : p.counts) o.detail << " " << c;
    o.data = {{"sizes", p.sizes}, {"counts", p.counts}};
}

void criterion8(Outcome& o) {
    const Analysis base = analyse(fixtures::m1());
    const ModulatedModel mp = perturb(base.model, PerturbationSeq::parse("geometric(0.5)"), PerturbationSeq{});
    const Analysis pan = analyse_perturbed(base, mp);

    double cauchy = 0, detdev = 0;
    for (double x : {-2.0, -1.0, -0.5}) {
        const Mat2 M1 = m_matrix(mp, 1000, x), M2 = m_matrix(mp, 2000, x);
        cauchy = std::max(cauchy, max_norm(M2 - M1));
        detdev = std::max(detdev, std::fabs(M2.det() - 1.0));
    }
    const DensityTable t = density_table(pan, 0, -2.0, -1.0, 64, 1e-3);
    const Tridiagonal td = truncate(pan.model, 4000);
    const OracleMeasure om = eigendecomp(td.diag, td.offdiag);
    const CdfComparison cd = cdf_compare(om, t.grid(), t.mu_prime());
    const double mu = perturbed_density(pan, 0, -1.0, 1e-3);
    const AsymptoticsReport ar = perturbed_asymptotics(base, pan, 0, -1.0, 100000, 101000, mu);
    const KernelProfile kp = universality_profile(pan, 100000, -1.0, unit_grid(), mu);
    const double dev = kp.max_deviation(2.0);
    o.require(cauchy <= 1e-5 && detdev <= 1e-6 && cd.sup_gap <= 0.02 && ar.ratio() >= 0.97 && ar.ratio() <= 1.03 &&
              dev <= 0.05 && pan.model.perturbation->summability.summable);
    o.detail << "|M2000-M1000|=" << cauchy << " |detM2000-1|=" << detdev << " density/oracle gap=" << cd.sup_gap
             << " amplitude ratio=" << ar.ratio() << " kernel deviation=" << dev;
    o.data = {{"m_cauchy", cauchy}, {"det_deviation", detdev}, {"density_oracle_gap", cd.sup_gap},
              {"oracle_mass", cd.mass}, {"amplitude_ratio", ar.ratio()}, {"kernel_deviation", dev},
              {"perturbed_mu_prime_at_-1", mu}};
}

void criterion9(Outcome& o) {
    struct Fixture {
        std::string name;
        ModulatedModel m;
        bool minus_left;  // Lambda_- = (-inf, x0)
        double x0;
    };
    const std::vector<Fixture> fx = {
        {"diagonal_q_zero(q=1)", fixtures::diagonal_q_zero(1.0), true, 0.0},
        {"diagonal_q_zero(q=3)", fixtures::diagonal_q_zero(3.0), true, 0.0},
        {"diagonal_q_inverse(q=1)", fixtures::diagonal_q_inverse(1.0), false, 0.0},
        {"offdiagonal_sum_one(q=0.5)", fixtures::offdiagonal_sum_one(0.5), false, 0.0},
        {"offdiagonal_sum_one(q=0.25)", fixtures::offdiagonal_sum_one(0.25), false, 0.0},
        {"offdiagonal_gap_one(q=1)", fixtures::offdiagonal_gap_one(1.0), true, 0.0},
        {"n1(q=2,r=0.7)", fixtures::n1_q(2.0, 0.7), false, -0.7},
        {"n1(q=-2,r=0.7)", fixtures::n1_q(-2.0, 0.7), true, -0.7},
        {"laguerre_type(kappa=2)", fixtures::laguerre_type(2), false, 0.0},
        {"laguerre_type(kappa=3)", fixtures::laguerre_type(3), false, 0.0},
        {"laguerre(lambda=0)", fixtures::laguerre(0.0), false, 0.0},
    };
    for (const Fixture& f : fx) {
        bool ok = false;
        ordered_json row{{"name", f.name}};
        try {
            const Analysis an = analyse(f.m);
            const bool left = an.tau.slope > 0;
            ok = classify(an.model.periodic) == Case::IIb && left == f.minus_left &&
                 std::fabs(an.tau.x0 - f.x0) <= 1e-3;
            row["case"] = case_name(classify(an.model.periodic));
            row["lambda_minus"] = left ? "(-inf,x0)" : "(x0,inf)";
            row["x0"] = an.tau.x0;
        } catch (const Error& e) {
            row["error"] = e.what();
        }
        row["ok"] = ok;
        o.data["fixtures"].push_back(row);
        o.require(ok);
        if (!ok) o.detail << f.name << " failed; ";
    }
    const Analysis lag = analyse(fixtures::laguerre(0.0));
    const double mu = density(lag, 0, 1.0, 1e-3);
    const double err = std::fabs(mu / std::exp(-1.0) - 1.0);
    const bool conjectural = !increments_vanish(lag.model);
    o.require(err <= 0.01 && conjectural);
    o.detail << "classification fixtures ok=" << (o.ok ? "yes" : "no") << "; laguerre mu'(1)=" << mu
             << " rel err vs e^-1 " << err << " (tol 0.01), flagged conjectural=" << (conjectural ? "yes" : "no");
    o.data["laguerre_mu_prime_at_1"] = mu;
    o.data["laguerre_rel_err"] = err;
    o.data["laguerre_conjectural"] = conjectural;
}

void criterion10(Outcome& o) {
    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    double worst = 0;
    int models = 0;
    while (models < 200) {
        PeriodicParams p = random_periodic(rng);
        ModulatedModel m;
        m.periodic = p;
        m.a_family = SequenceFamily::power(0.3 + 0.6 * u01(rng));
        m.b_mode = BMode::BetaScaled;
        const long L = 50 + static_cast<long>(450 * u01(rng));
        const ModulatedModel t = truncated_params(m, L);
        const int N = t.N();
        // sample x with an elliptic periodic tail so the stream stays bounded
        double x = 0;
        bool found = false;
        for (int tries = 0; tries < 50 && !found; ++tries) {
            x = -3.0 + 6.0 * u01(rng);
            found = std::fabs(transfer_X(t, L + N, x).tr()) < 2.0;
        }
        if (!found) continue;
        ++models;
        const double ref = turan(t, L + N, x);
        for (int k = 2; k <= 5; ++k) {
            const double v = turan(t, L + k * N, x);
            worst = std::max(worst, std::fabs(v - ref) / std::fabs(ref));
        }
    }
    o.require(worst <= 1e-10);
    o.detail << "models=" << models << " max relative deviation " << worst << " (tol 1e-10)";
    o.data = {{"models", models}, {"max_rel_dev", worst}};
}

struct Criterion {
    int id;
    const char* title;
    double budget;
    void (*fn)(Outcome&);
};

const Criterion kCriteria[] = {
    {1, "algebraic identities (trace derivative, absolute sum, conjugator)", 5, criterion1},
    {2, "scaled discriminant limit", 10, criterion2},
    {3, "shifted conjugation remainders R_j, Q_j", 30, criterion3},
    {4, "Turan / truncated / oracle density triangle", 120, criterion4},
    {5, "polynomial amplitude", 30, criterion5},
    {6, "Christoffel-Darboux universality and diagonal constant", 120, criterion6},
    {7, "no essential spectrum in Lambda_+", 60, criterion7},
    {8, "l1 perturbation suite", 180, criterion8},
    {9, "classification fixtures and Laguerre density", 120, criterion9},
    {10, "stationarity of truncated Turan determinants", 5, criterion10},
};

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<CriterionResult> out;
    for (const Criterion& s : kCriteria) {
        if (!ids.empty() && std::find(ids.begin(), ids.end(), s.id) == ids.end()) continue;
        CriterionResult r;
        r.id = s.id;
        r.title = s.title;
        r.budget = s.budget;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            s.fn(o);
        } catch (const std::exception& e) {
            o.ok = false;
            o.detail << "error: " << e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        r.passed = o.ok && r.seconds <= r.budget;
        r.detail = o.detail.str();
        if (r.seconds > r.budget) r.detail += " [over time budget]";
        r.data = o.data;
        out.push_back(r);
        if (on_result) on_result(r);
    }
    return out;
}

ordered_json acceptance_json(const std::vector<CriterionResult>& rs) {
    ordered_json j;
    bool all = true;
    for (const auto& r : rs) {
        all = all && r.passed;
        j["criteria"].push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"seconds", r.seconds},
                                 {"budget_seconds", r.budget}, {"detail", r.detail}, {"data", r.data}});
    }
    j["all_passed"] = all;
    return j;
}

}  // namespace pmj
