#include "pmj/recurrence.hpp"

#include <cmath>

#include "pmj/error.hpp"
#include "pmj/kahan.hpp"

namespace pmj {

namespace {
constexpr double kGrowthGuard = 1e200;
}

Mat2 transfer_B(const ModulatedModel& m, long n, double x) {
    const double an = m.a(n);
    const double am = n == 0 ? 1.0 : m.a(n - 1);
    return {0.0, 1.0, -am / an, (x - m.b(n)) / an};
}

Mat2 transfer_X(const ModulatedModel& m, long n, double x) {
    Mat2 p = transfer_B(m, n, x);
    for (long k = n + 1; k < n + m.N(); ++k) p = transfer_B(m, k, x) * p;
    return p;
}

Stream::Stream(const ModulatedModel& m, Vec2 eta, double x) : m_(&m), x_(x), prev_(eta.x), cur_(eta.y) {}

void Stream::step() {
    const double an = m_->a(n_);
    const double next = ((x_ - m_->b(n_)) * cur_ - a_prev_ * prev_) / an;
    if (!(std::fabs(next) <= kGrowthGuard)) throw Error("growth regime");
    prev_ = cur_;
    cur_ = next;
    a_prev_ = an;
    ++n_;
}

RecurrenceTrace eval_stream(const ModulatedModel& m, Vec2 eta, double x, long n_max) {
    const double nrm = std::hypot(eta.x, eta.y);
    if (std::fabs(nrm - 1.0) > 1e-12) throw Error("eta must have unit norm");
    RecurrenceTrace tr;
    tr.x = x;
    tr.eta = eta;
    tr.n_max = n_max;
    tr.values.reserve(static_cast<std::size_t>(n_max) + 1);
    Stream s(m, eta, x);
    tr.values.push_back(s.cur());
    while (s.n() < n_max) {
        s.step();
        tr.values.push_back(s.cur());
    }
    return tr;
}

std::vector<double> polys(const ModulatedModel& m, double x, long n) {
    return eval_stream(m, kE2, x, n).values;
}

double cd_kernel(const ModulatedModel& m, long n, double x, double y) {
    Stream sx(m, kE2, x), sy(m, kE2, y);
    CompensatedSum k;
    k += 1.0;
    for (long j = 1; j <= n; ++j) {
        sx.step();
        sy.step();
        k += sx.cur() * sy.cur();
    }
    return k.value();
}

}  // namespace pmj
