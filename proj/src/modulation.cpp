#include "pmj/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "pmj/error.hpp"
#include "pmj/kahan.hpp"
#include "pmj/recurrence.hpp"

namespace pmj {

SequenceFamily SequenceFamily::power(double gamma, double c, double offset) {
    SequenceFamily f;
    f.kind = Kind::Power;
    f.gamma = gamma;
    f.c = c;
    f.offset = offset;
    return f;
}

SequenceFamily SequenceFamily::power_shift(double gamma, double c, std::vector<double> d, double offset) {
    SequenceFamily f = power(gamma, c, offset);
    f.kind = Kind::PowerShift;
    if (d.empty()) d.push_back(0.0);
    f.d = std::move(d);
    return f;
}

SequenceFamily SequenceFamily::sqrt_product(double lambda) {
    SequenceFamily f;
    f.kind = Kind::SqrtProduct;
    f.lambda = lambda;
    return f;
}

SequenceFamily SequenceFamily::explicit_values(std::vector<double> v) {
    SequenceFamily f;
    f.kind = Kind::Explicit;
    f.values = std::move(v);
    return f;
}

double SequenceFamily::value(long n) const {
    switch (kind) {
        case Kind::Power:
            return c * std::pow(double(n) + offset, gamma);
        case Kind::PowerShift:
            return c * std::pow(double(n) + offset, gamma) + d[static_cast<std::size_t>(n) % d.size()];
        case Kind::SqrtProduct:
            return std::sqrt((double(n) + 1.0) * (double(n) + 1.0 + lambda));
        case Kind::Explicit:
            if (n < 0 || static_cast<std::size_t>(n) >= values.size()) throw Error("horizon exhausted");
            return values[static_cast<std::size_t>(n)];
    }
    return 0.0;
}

long SequenceFamily::max_index() const {
    if (kind == Kind::Explicit) return static_cast<long>(values.size()) - 1;
    return std::numeric_limits<long>::max();
}

std::string SequenceFamily::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::Power: os << "power(gamma=" << gamma << ",c=" << c << ",offset=" << offset << ")"; break;
        case Kind::PowerShift:
            os << "power_shift(gamma=" << gamma << ",c=" << c << ",offset=" << offset << ",|d|=" << d.size() << ")";
            break;
        case Kind::SqrtProduct: os << "sqrt_product(lambda=" << lambda << ")"; break;
        case Kind::Explicit: os << "explicit(n=" << values.size() << ")"; break;
    }
    return os.str();
}

PerturbationSeq PerturbationSeq::parse(const std::string& form) {
    static const std::regex re(R"(\s*(geometric|power)\s*\(\s*([-+0-9.eE]+)\s*\)\s*)");
    PerturbationSeq p;
    if (form.empty() || form == "zero") return p;
    std::smatch m;
    if (!std::regex_match(form, m, re)) throw Error("unknown perturbation form: " + form);
    p.kind = m[1] == "geometric" ? Kind::Geometric : Kind::Power;
    p.c = std::stod(m[2]);
    return p;
}

double PerturbationSeq::value(long n) const {
    switch (kind) {
        case Kind::Zero: return 0.0;
        case Kind::Geometric: return std::pow(c, double(n));
        case Kind::Power: return std::pow(double(n) + 1.0, -c);
        case Kind::Explicit:
            return static_cast<std::size_t>(n) < values.size() ? values[static_cast<std::size_t>(n)] : 0.0;
    }
    return 0.0;
}

std::string PerturbationSeq::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case Kind::Zero: os << "zero"; break;
        case Kind::Geometric: os << "geometric(" << c << ")"; break;
        case Kind::Power: os << "power(" << c << ")"; break;
        case Kind::Explicit: os << "explicit(n=" << values.size() << ")"; break;
    }
    return os.str();
}

double ModulatedModel::base_a(long n) const {
    const long k = map_index(n);
    return periodic.a(k) * a_family.value(k);
}

double ModulatedModel::base_b(long n) const {
    const long k = map_index(n);
    if (b_mode == BMode::BetaScaled) return periodic.b(k) * a_family.value(k);
    return b_family.value(k);
}

double ModulatedModel::a(long n) const {
    const double v = base_a(n);
    if (!perturbation) return v;
    return v * (1.0 + perturbation->xi.value(map_index(n)));
}

double ModulatedModel::b(long n) const {
    const double v = base_b(n);
    if (!perturbation) return v;
    return v * (1.0 + perturbation->zeta.value(map_index(n)));
}

ModulatedModel ModulatedModel::unperturbed() const {
    ModulatedModel m = *this;
    m.perturbation.reset();
    return m;
}

const char* verdict_name(StolzVerdict v) {
    switch (v) {
        case StolzVerdict::ConvergentTrend: return "ConvergentTrend";
        case StolzVerdict::Inconclusive: return "Inconclusive";
        case StolzVerdict::Divergent: return "Divergent";
    }
    return "?";
}

namespace {

// least-squares slope of log2(w_k) against k over the trailing nonzero blocks
double block_exponent(const std::vector<double>& w, bool& all_zero_tail) {
    std::vector<std::pair<double, double>> pts;
    all_zero_tail = true;
    const std::size_t first = w.size() > 6 ? w.size() - 6 : 0;
    for (std::size_t k = first; k < w.size(); ++k) {
        if (w[k] > 0) {
            all_zero_tail = false;
            pts.emplace_back(double(k), std::log2(w[k]));
        }
    }
    if (pts.size() < 2) return -std::numeric_limits<double>::infinity();
    double mx = 0, my = 0;
    for (auto& [x, y] : pts) { mx += x; my += y; }
    mx /= pts.size();
    my /= pts.size();
    double sxy = 0, sxx = 0;
    for (auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    return sxy / sxx;
}

double aitken(double e1, double e2, double e3) {
    const double d1 = e2 - e1, d2 = e3 - e2;
    if (std::fabs(d2) <= 1e-14 * std::max(1.0, std::fabs(e3)) || d1 == 0.0) return e3;
    const double q = d2 / d1;
    if (!(q > 0.0 && q < 0.95)) return e3;
    return e3 + d2 * q / (1.0 - q);
}

long top_index(const ModulatedModel& m) {
    long top = std::min(m.horizon, m.a_family.max_index());
    if (m.b_mode == BMode::Independent) top = std::min(top, m.b_family.max_index());
    return top;
}

}  // namespace

StolzReport stolz_diagnostic(const std::function<double(long)>& seq, int N, long horizon) {
    if (horizon < 10L * N) throw Error("horizon too small for Stolz diagnostic");
    StolzReport rep;
    std::vector<double> blocks;
    CompensatedSum total;
    std::vector<double> window;  // x_n for the last N indices
    for (long k = 0; k < N; ++k) window.push_back(seq(k));
    // x_{n+N} - x_n, n = 0, 1, ...; blocks [2^k, 2^{k+1}) of n
    long n = 0;
    CompensatedSum block;
    long next_edge = 1;
    while (n + N <= horizon) {
        const double xnN = seq(n + N);
        const double inc = std::fabs(xnN - window[static_cast<std::size_t>(n % N)]);
        window[static_cast<std::size_t>(n % N)] = xnN;
        total += inc;
        block += inc;
        ++n;
        if (n == next_edge) {
            if (n > 1) blocks.push_back(block.value());
            block = CompensatedSum{};
            rep.partial_variation.emplace_back(n, total.value());
            next_edge *= 2;
        }
    }
    bool zero_tail = false;
    rep.tail_exponent = block_exponent(blocks, zero_tail);
    if (zero_tail || rep.tail_exponent < -0.05)
        rep.verdict = StolzVerdict::ConvergentTrend;
    else if (rep.tail_exponent > -0.005)
        rep.verdict = StolzVerdict::Divergent;
    else
        rep.verdict = StolzVerdict::Inconclusive;
    return rep;
}

SREstimate estimate_s_r(const ModulatedModel& model) {
    const int N = model.N();
    const long top = top_index(model) - N - 1;
    if (top < 10000L * N) throw Error("horizon too small for s/r estimation");
    if (model.base_a(top) / model.base_a(top / 64) < 1.0 + 1e-3)
        throw Error("bounded a_n: modulation requires a_n -> infinity");
    const PeriodicParams& p = model.periodic;
    SREstimate est;
    for (int i = 0; i < N; ++i) {
        const long jt = (top - i) / N;
        auto fs = [&](long j) {
            const long n = j * N + i;
            return p.a(i - 1) / p.a(i) * model.base_a(n) - model.base_a(n - 1);
        };
        auto fr = [&](long j) {
            const long n = j * N + i;
            return p.b(i) / p.a(i) * model.base_a(n) - model.base_b(n);
        };
        for (int which = 0; which < 2; ++which) {
            auto f = [&](long j) { return which == 0 ? fs(j) : fr(j); };
            const double e1 = f(jt / 8), e2 = f(jt / 4), e3 = f(jt / 2), e4 = f(jt);
            const double A = aitken(e1, e2, e3), B = aitken(e2, e3, e4);
            const double gap = std::fabs(A - B) / std::max(1.0, std::fabs(B));
            if (gap > 1e-4) throw Error("non-convergent s/r");
            (which == 0 ? est.s : est.r).push_back(B);
            (which == 0 ? est.s_gap : est.r_gap).push_back(gap);
        }
    }
    return est;
}

ModulatedModel with_s_r(ModulatedModel m) {
    if (m.s_r_source == SRSource::UserExact) {
        if (static_cast<int>(m.s.size()) != m.N() || static_cast<int>(m.r.size()) != m.N())
            throw Error("s/r overrides must have length N");
        return m;
    }
    const SREstimate e = estimate_s_r(m);
    m.s = e.s;
    m.r = e.r;
    m.s_r_source = SRSource::Estimated;
    return m;
}

namespace {

TauData finish_tau(double slope, double intercept, int eps) {
    if (slope == 0.0 || !std::isfinite(slope)) throw Error("zero slope");
    TauData t;
    t.slope = slope;
    t.intercept = intercept;
    t.epsilon = eps;
    t.x0 = -intercept / slope;
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (slope > 0) {
        t.lambda_minus = {-inf, t.x0};
        t.lambda_plus = {t.x0, inf};
    } else {
        t.lambda_minus = {t.x0, inf};
        t.lambda_plus = {-inf, t.x0};
    }
    return t;
}

void require_s_r(const ModulatedModel& m) {
    if (m.s_r_source == SRSource::Unset || static_cast<int>(m.s.size()) != m.N() ||
        static_cast<int>(m.r.size()) != m.N())
        throw Error("s/r unavailable");
}

}  // namespace

TauData tau_data(const ModulatedModel& m) {
    require_s_r(m);
    const PeriodicParams& p = m.periodic;
    const Case c = classify(p);
    if (c != Case::IIb) throw Error(std::string("out of class: case ") + case_name(c));
    const int eps = frak_X(p, 0, 0.0).tr() > 0 ? 1 : -1;
    double slope = 0, intercept = 0;
    for (int k = 0; k < p.N(); ++k) {
        const Mat2 X = frak_X(p, k, 0.0);
        const double al = p.a(k - 1);
        intercept += (m.s[k] * (1.0 - eps * X.m11) - m.r[k] * eps * X.m21) / al;
        slope -= eps * X.m21 / al;
    }
    return finish_tau(slope, intercept, eps);
}

TauData tau_data_from_conjugators(const ModulatedModel& m, const PeriodicCache& cache) {
    require_s_r(m);
    const PeriodicParams& p = m.periodic;
    double slope = 0, intercept = 0;
    for (int k = 0; k < p.N(); ++k) {
        const Mat2& T = cache.T[k];
        const double dT = T.det();
        const double u = T.m11 + T.m12, w = T.m21 + T.m22;
        const double al = p.a(k - 1);
        intercept += (m.s[k] * u * w / dT + m.r[k] * w * w / dT) / al;
        slope += w * w / dT / al;
    }
    return finish_tau(slope, intercept, cache.epsilon);
}

namespace {

SummabilityReport summability(const ModulatedModel& m, const PerturbationSeq& xi, const PerturbationSeq& zeta) {
    SummabilityReport rep;
    const long H = std::min<long>(top_index(m), 1L << 22);
    CompensatedSum total, block;
    std::vector<double> blocks;
    long edge = 1;
    for (long n = 0; n <= H; ++n) {
        const double t = std::sqrt(m.base_a(n)) * (std::fabs(xi.value(n)) + std::fabs(zeta.value(n)));
        total += t;
        block += t;
        if (n + 1 == edge) {
            if (n > 0) blocks.push_back(block.value());
            block = CompensatedSum{};
            rep.partial_sums.emplace_back(n, total.value());
            edge *= 2;
        }
    }
    bool zero_tail = false;
    rep.tail_exponent = block_exponent(blocks, zero_tail);
    rep.summable = zero_tail || rep.tail_exponent < -0.05;
    if (!rep.summable)
        rep.warning = "perturbation not summable: partial sums of sqrt(a_n)(|xi_n|+|zeta_n|) keep growing";
    return rep;
}

}  // namespace

ModulatedModel perturb(const ModulatedModel& m, const PerturbationSeq& xi, const PerturbationSeq& zeta) {
    if (xi.kind == PerturbationSeq::Kind::Geometric && xi.c <= -1.0)
        throw Error("negative perturbed coefficient");
    if (xi.kind == PerturbationSeq::Kind::Explicit)
        for (double v : xi.values)
            if (!(1.0 + v > 0.0)) throw Error("negative perturbed coefficient");
    ModulatedModel out = m.unperturbed();
    Perturbation p;
    p.xi = xi;
    p.zeta = zeta;
    p.summability = summability(out, xi, zeta);
    out.perturbation = p;
    return out;
}

Mat2 m_matrix(const ModulatedModel& mp, long j, double x) {
    const ModulatedModel base = mp.unperturbed();
    Mat2 Pinv = transfer_B(base, 0, x).inverse();
    Mat2 Pt = transfer_B(mp, 0, x);
    Mat2 M = Pinv * Pt;
    for (long k = 1; k <= j; ++k) {
        const Mat2 Bk = transfer_B(base, k, x);
        const Mat2 Btk = transfer_B(mp, k, x);
        Pinv = Pinv * Bk.inverse();
        M = M + Pinv * (Btk - Bk) * Pt;
        Pt = Btk * Pt;
        if (max_norm(Pinv) > 1e100 || max_norm(Pt) > 1e100 || !M.finite())
            throw Error("overflow in M_j product");
    }
    return M;
}

double growth_limit(const ModulatedModel& m, int i) {
    require_s_r(m);
    double s = 0;
    for (int k = 0; k < m.N(); ++k) s += m.s[k] / m.periodic.a(k - 1);
    return m.periodic.a(i) * s;
}

bool increments_vanish(const ModulatedModel& m) {
    for (int i = 0; i < m.N(); ++i)
        if (std::fabs(growth_limit(m, i)) > 1e-4) return false;
    return true;
}

bool carleman_diagnostic(const ModulatedModel& m) {
    const long H = std::min<long>(top_index(m), 1L << 22);
    CompensatedSum b1, b2;
    for (long n = H / 4; n < H / 2; ++n) b1 += 1.0 / m.a(n);
    for (long n = H / 2; n < H; ++n) b2 += 1.0 / m.a(n);
    return b2.value() >= 0.95 * b1.value();
}

Analysis analyse(const ModulatedModel& m) {
    Analysis an;
    an.model = with_s_r(m);
    an.cache = conjugator_chain(an.model.periodic);
    an.tau = tau_data(an.model);
    return an;
}

}  // namespace pmj
