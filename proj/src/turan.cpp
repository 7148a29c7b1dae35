#include "pmj/turan.hpp"

#include <tbb/parallel_for.h>

#include <cmath>
#include <cstdio>
#include <numbers>

#include "pmj/error.hpp"
#include "pmj/recurrence.hpp"

namespace pmj {

namespace {

// <E u_{n+N}, u_n> from one streamed pass
double turan_pair(const ModulatedModel& m, Vec2 eta, long n, double x) {
    if (n < 1) throw Error("turan determinant needs n >= 1");
    Stream s(m, eta, x);
    s.advance_to(n);
    const double um = s.prev(), u = s.cur();
    s.advance_to(n + m.N());
    return u * s.prev() - um * s.cur();
}

}  // namespace

double turan(const ModulatedModel& m, long n, double x) { return turan_pair(m, kE2, n, x); }

double gen_turan(const ModulatedModel& m, Vec2 eta, long n, double x) {
    if (std::fabs(std::hypot(eta.x, eta.y) - 1.0) > 1e-12) throw Error("eta must have unit norm");
    return std::pow(m.a(n + m.N() - 1), 1.5) * turan_pair(m, eta, n, x);
}

TuranState g_limit(const Analysis& an, int i, double x, double rel_tol) {
    if (!an.tau.in_minus(x)) throw Error("x outside Lambda_-");
    const ModulatedModel& m = an.model;
    const int N = m.N();
    TuranState st;
    st.i = i;
    st.x = x;
    long j = 256;
    Stream s(m, kE2, x);
    while (true) {
        const long n = j * N + i;
        if (n + N > m.horizon || n + N > m.a_family.max_index()) break;
        s.advance_to(n);
        const double um = s.prev(), u = s.cur();
        s.advance_to(n + N);
        const double D = u * s.prev() - um * s.cur();
        const double v = std::pow(s.a_prev(), 1.5) * std::fabs(D);
        st.samples.emplace_back(n, v);
        st.g_estimate = v;
        if (st.samples.size() >= 3) {
            const double last = st.samples[st.samples.size() - 2].second;
            st.cauchy_gap = std::fabs(v - last) / v;
            if (st.cauchy_gap < rel_tol) {
                st.converged = true;
                return st;
            }
        }
        j *= 2;
    }
    throw HorizonExhausted("horizon exhausted", st);
}

double density_from_g(const Analysis& an, int i, double x, double g) {
    return std::sqrt(an.model.periodic.a(i - 1) * std::fabs(an.tau.tau(x))) / (std::numbers::pi * g);
}

double density(const Analysis& an, int i, double x, double rel_tol) {
    return density_from_g(an, i, x, g_limit(an, i, x, rel_tol).g_estimate);
}

ModulatedModel truncated_params(const ModulatedModel& m, long L) {
    if (L < 1) throw Error("truncation needs L >= 1");
    ModulatedModel t = m;
    t.truncation = L;
    return t;
}

double truncated_density(const Analysis& an, long L, double x) {
    const ModulatedModel t = truncated_params(an.model, L);
    const int N = t.N();
    const double aL = t.a(L + N - 1);
    const double h = aL * discr(transfer_X(t, L + N, x));
    if (!(h < 0)) throw Error("hyperbolic truncation");
    const double D = turan(t, L + N, x);
    return std::sqrt(-h) / (2.0 * std::numbers::pi * std::pow(aL, 1.5) * std::fabs(D));
}

Analysis analyse_perturbed(const Analysis& base, const ModulatedModel& m_perturbed) {
    Analysis an = base;
    an.model = m_perturbed;
    an.model.s = base.model.s;
    an.model.r = base.model.r;
    an.model.s_r_source = base.model.s_r_source;
    return an;
}

double perturbed_density(const Analysis& an, int i, double x, double rel_tol) {
    try {
        return density(an, i, x, rel_tol);
    } catch (const HorizonExhausted& e) {
        throw HorizonExhausted("non-Cauchy along dyadics", e.state);
    }
}

std::vector<double> DensityTable::grid() const {
    std::vector<double> g;
    for (auto& r : rows) g.push_back(r.x);
    return g;
}

std::vector<double> DensityTable::mu_prime() const {
    std::vector<double> g;
    for (auto& r : rows) g.push_back(r.mu_prime);
    return g;
}

DensityTable density_table(const Analysis& an, int i, double x_lo, double x_hi, int points, double rel_tol) {
    if (points < 2) throw Error("density grid needs at least 2 points");
    if (!an.tau.in_minus(x_lo) || !an.tau.in_minus(x_hi)) throw Error("grid leaves Lambda_-");
    DensityTable t;
    t.residue = i;
    t.horizon = an.model.horizon;
    t.rel_tol = rel_tol;
    t.conjectural = !increments_vanish(an.model);
    if (t.conjectural) t.header_notes.push_back("conjectural: a_{n+N}-a_n does not tend to 0");
    if (an.model.perturbed() && !an.model.perturbation->summability.summable)
        t.header_notes.push_back(an.model.perturbation->summability.warning);
    t.rows.resize(static_cast<std::size_t>(points));
    tbb::parallel_for(0, points, [&](int k) {
        const double x = x_lo + (x_hi - x_lo) * k / (points - 1);
        DensityRow row{x, an.tau.tau(x), 0, 0, 0, ""};
        TuranState st;
        try {
            st = g_limit(an, i, x, rel_tol);
        } catch (const HorizonExhausted& e) {
            st = e.state;
            row.flags = "horizon_exhausted";
        }
        row.g = st.g_estimate;
        row.gap = st.cauchy_gap;
        row.mu_prime = density_from_g(an, i, x, st.g_estimate);
        if (t.conjectural) row.flags += row.flags.empty() ? "conjectural" : ";conjectural";
        t.rows[static_cast<std::size_t>(k)] = row;
    });
    return t;
}

void write_csv(std::ostream& os, const DensityTable& t) {
    char buf[256];
    os << "# density table\n";
    os << "# residue=" << t.residue << " horizon=" << t.horizon;
    std::snprintf(buf, sizeof buf, " rel_tol=%.17g\n", t.rel_tol);
    os << buf;
    os << "# conjectural=" << (t.conjectural ? "true" : "false") << "\n";
    for (auto& n : t.header_notes) os << "# " << n << "\n";
    os << "x,tau,g,mu_prime,gap,flags\n";
    for (auto& r : t.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,", r.x, r.tau, r.g, r.mu_prime, r.gap);
        os << buf << r.flags << "\n";
    }
}

}  // namespace pmj
