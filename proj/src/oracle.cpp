#include "pmj/oracle.hpp"

#include <tbb/parallel_for.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pmj/error.hpp"
#include "pmj/kahan.hpp"

namespace pmj {

Tridiagonal truncate(const ModulatedModel& m, long M) {
    if (M < 1) throw Error("truncation size must be positive");
    Tridiagonal t;
    t.diag.reserve(static_cast<std::size_t>(M));
    for (long n = 0; n < M; ++n) t.diag.push_back(m.b(n));
    for (long n = 0; n + 1 < M; ++n) t.offdiag.push_back(m.a(n));
    return t;
}

namespace {

double pivmin(const Tridiagonal& t) {
    double mx = 1.0;
    for (double e : t.offdiag) mx = std::max(mx, e * e);
    return std::numeric_limits<double>::min() * mx;
}

long count_below(const Tridiagonal& t, double x, double pmin) {
    long cnt = 0;
    double q = t.diag[0] - x;
    if (std::fabs(q) < pmin) q = -pmin;
    if (q < 0) ++cnt;
    for (std::size_t i = 1; i < t.diag.size(); ++i) {
        const double e = t.offdiag[i - 1];
        q = (t.diag[i] - x) - e * e / q;
        if (std::fabs(q) < pmin) q = -pmin;
        if (q < 0) ++cnt;
    }
    return cnt;
}

std::pair<double, double> gershgorin(const Tridiagonal& t) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    const std::size_t M = t.diag.size();
    for (std::size_t i = 0; i < M; ++i) {
        double r = 0;
        if (i > 0) r += std::fabs(t.offdiag[i - 1]);
        if (i + 1 < M) r += std::fabs(t.offdiag[i]);
        lo = std::min(lo, t.diag[i] - r);
        hi = std::max(hi, t.diag[i] + r);
    }
    const double pad = 1e-12 * std::max(std::fabs(lo), std::fabs(hi)) + 1e-300;
    return {lo - pad, hi + pad};
}

}  // namespace

long sturm_count(const Tridiagonal& t, double x) { return count_below(t, x, pivmin(t)); }

std::vector<double> eigenvalues(const Tridiagonal& t) {
    const std::size_t M = t.diag.size();
    std::vector<double> ev(M);
    if (M == 0) return ev;
    if (M == 1) return t.diag;
    for (double e : t.offdiag)
        if (!(e > 0)) throw Error("off-diagonal must be strictly positive");
    const auto [glo, ghi] = gershgorin(t);
    const double pmin = pivmin(t);
    const double atol = 4 * std::numeric_limits<double>::epsilon() * std::max(std::fabs(glo), std::fabs(ghi));
    std::atomic<bool> failed = false;
    tbb::parallel_for(std::size_t(0), M, [&](std::size_t k) {
        double lo = glo, hi = ghi;
        int it = 0;
        while (true) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi || hi - lo <= atol) break;
            if (count_below(t, mid, pmin) > static_cast<long>(k))
                hi = mid;
            else
                lo = mid;
            if (++it > 400) {
                failed = true;
                break;
            }
        }
        ev[k] = 0.5 * (lo + hi);
    });
    if (failed) throw Error("convergence failure");
    return ev;
}

OracleMeasure eigendecomp(const std::vector<double>& diag, const std::vector<double>& offdiag) {
    if (diag.empty() || offdiag.size() + 1 != diag.size()) throw Error("tridiagonal shape mismatch");
    OracleMeasure om;
    Tridiagonal t{diag, offdiag};
    om.atoms = eigenvalues(t);
    const std::size_t M = diag.size();
    if (M == 1) {
        om.weights = {1.0};
        return om;
    }
    Tridiagonal minor{std::vector<double>(diag.begin() + 1, diag.end()),
                      std::vector<double>(offdiag.begin() + 1, offdiag.end())};
    const std::vector<double> mu = eigenvalues(minor);
    om.weights.resize(M);
    tbb::parallel_for(std::size_t(0), M, [&](std::size_t k) {
        // every factor lies in (0, 1) by interlacing
        const double lk = om.atoms[k];
        double w = 1.0;
        for (std::size_t j = 0; j < k; ++j) w *= (lk - mu[j]) / (lk - om.atoms[j]);
        for (std::size_t j = k + 1; j < M; ++j) w *= (lk - mu[j - 1]) / (lk - om.atoms[j]);
        om.weights[k] = std::fabs(w);
    });
    CompensatedSum s;
    for (double w : om.weights) s += w;
    const double total = s.value();
    for (double& w : om.weights) w /= total;
    return om;
}

namespace {

std::vector<double> trapezoid_cdf(const std::vector<double>& grid, const std::vector<double>& f) {
    std::vector<double> F(grid.size(), 0.0);
    CompensatedSum acc;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        acc += 0.5 * (f[k] + f[k - 1]) * (grid[k] - grid[k - 1]);
        F[k] = acc.value();
    }
    return F;
}

}  // namespace

CdfComparison cdf_compare(const OracleMeasure& om, const std::vector<double>& grid, const std::vector<double>& density) {
    if (grid.size() < 2 || grid.size() != density.size()) throw Error("cdf grid mismatch");
    const std::vector<double> F = trapezoid_cdf(grid, density);
    const double c = grid.front();
    CdfComparison r;
    std::size_t a = std::upper_bound(om.atoms.begin(), om.atoms.end(), c) - om.atoms.begin();
    CompensatedSum q;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        while (a < om.atoms.size() && om.atoms[a] <= grid[k]) q += om.weights[a++];
        r.sup_gap = std::max(r.sup_gap, std::fabs(q.value() - F[k]));
    }
    r.mass = q.value();
    r.density_mass = F.back();
    return r;
}

double cdf_gap(const std::vector<double>& grid, const std::vector<double>& f, const std::vector<double>& g) {
    const std::vector<double> F = trapezoid_cdf(grid, f), G = trapezoid_cdf(grid, g);
    double gap = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) gap = std::max(gap, std::fabs(F[k] - G[k]));
    return gap;
}

ProbeResult ess_spectrum_probe(const Analysis& an, Interval K, const std::vector<long>& sizes) {
    if (!(K.lo < K.hi) || !an.tau.in_plus(K.lo) || !an.tau.in_plus(K.hi)) throw Error("K must lie inside Lambda_+");
    ProbeResult res;
    const double margin = 0.1 * (K.hi - K.lo);
    const double x0 = an.tau.x0;
    if (an.tau.slope > 0)
        K.lo = std::max(K.lo, x0 + margin);
    else
        K.hi = std::min(K.hi, x0 - margin);
    res.K = K;
    res.sizes = sizes;
    for (long M : sizes) {
        const Tridiagonal t = truncate(an.model, M);
        res.counts.push_back(sturm_count(t, K.hi) - sturm_count(t, K.lo));
    }
    return res;
}

void write_csv(std::ostream& os, const OracleMeasure& om) {
    char buf[128];
    os << "atom,weight\n";
    for (std::size_t k = 0; k < om.atoms.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", om.atoms[k], om.weights[k]);
        os << buf;
    }
}

}  // namespace pmj
