#pragma once
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pmj/mat2.hpp"
#include "pmj/periodic.hpp"

namespace pmj {

// Generator for the unscaled sequence a~_n.
struct SequenceFamily {
    enum class Kind { Power, PowerShift, SqrtProduct, Explicit };
    Kind kind = Kind::Power;
    double gamma = 0.5;
    double c = 1.0;
    double offset = 1.0;         // Power, PowerShift: c (n + offset)^gamma
    double lambda = 0.0;         // SqrtProduct: sqrt((n+1)(n+1+lambda))
    std::vector<double> d;       // PowerShift: additive term, extended periodically
    std::vector<double> values;  // Explicit

    static SequenceFamily power(double gamma, double c = 1.0, double offset = 1.0);
    static SequenceFamily power_shift(double gamma, double c, std::vector<double> d, double offset = 1.0);
    static SequenceFamily sqrt_product(double lambda);
    static SequenceFamily explicit_values(std::vector<double> v);

    double value(long n) const;
    // largest index the generator can serve (closed forms are unbounded)
    long max_index() const;
    std::string describe() const;
};

// xi_n or zeta_n
struct PerturbationSeq {
    enum class Kind { Zero, Geometric, Power, Explicit };
    Kind kind = Kind::Zero;
    double c = 0.0;  // Geometric: c^n, Power: (n+1)^(-c)
    std::vector<double> values;

    static PerturbationSeq parse(const std::string& form);  // "geometric(0.5)", "power(2)", "zero"
    double value(long n) const;
    std::string describe() const;
};

struct SummabilityReport {
    std::vector<std::pair<long, double>> partial_sums;  // dyadic checkpoints of sum sqrt(a_n)(|xi_n|+|zeta_n|)
    double tail_exponent = 0.0;
    bool summable = false;
    std::string warning;
};

struct Perturbation {
    PerturbationSeq xi, zeta;
    SummabilityReport summability;
};

enum class BMode { BetaScaled, Independent };
enum class SRSource { UserExact, Estimated, Unset };

// a_n = alpha_n a~_n; b_n = beta_n a~_n (BetaScaled) or b_family(n) (Independent).
// Optional l1 perturbation and eventually-periodic truncation at L.
struct ModulatedModel {
    PeriodicParams periodic;
    SequenceFamily a_family;
    SequenceFamily b_family;
    BMode b_mode = BMode::BetaScaled;
    std::vector<double> s, r;
    SRSource s_r_source = SRSource::Unset;
    long horizon = 4'000'000;
    std::optional<Perturbation> perturbation;
    long truncation = -1;

    int N() const { return periodic.N(); }
    long map_index(long n) const {
        if (truncation < 0 || n < truncation + N()) return n;
        return truncation + periodic.wrap(n - truncation);
    }
    double a(long n) const;
    double b(long n) const;
    double base_a(long n) const;  // before perturbation, after truncation
    double base_b(long n) const;
    bool perturbed() const { return perturbation.has_value(); }
    ModulatedModel unperturbed() const;
};

enum class StolzVerdict { ConvergentTrend, Inconclusive, Divergent };
const char* verdict_name(StolzVerdict v);

struct StolzReport {
    std::vector<std::pair<long, double>> partial_variation;  // (m, V_m) on a dyadic grid
    double tail_exponent = 0.0;                              // growth exponent of dyadic block variation
    StolzVerdict verdict = StolzVerdict::Inconclusive;
};

StolzReport stolz_diagnostic(const std::function<double(long)>& seq, int N, long horizon);

struct SREstimate {
    std::vector<double> s, r;
    std::vector<double> s_gap, r_gap;  // disagreement of the two refined estimates
};
SREstimate estimate_s_r(const ModulatedModel& m);

// fills s, r by estimation unless the user supplied them
ModulatedModel with_s_r(ModulatedModel m);

struct TauData {
    double slope = 0, intercept = 0;
    int epsilon = 1;
    double x0 = 0;
    Interval lambda_minus, lambda_plus;

    double tau(double x) const { return slope * x + intercept; }
    int sigma(double x) const {
        const double t = tau(x);
        return t > 0 ? 1 : (t < 0 ? -1 : 0);
    }
    bool in_minus(double x) const { return tau(x) < 0; }
    bool in_plus(double x) const { return tau(x) > 0; }
};

TauData tau_data(const ModulatedModel& m);
// same quantity assembled from the conjugators T_i instead of the entries of X_i(0)
TauData tau_data_from_conjugators(const ModulatedModel& m, const PeriodicCache& cache);

ModulatedModel perturb(const ModulatedModel& m, const PerturbationSeq& xi, const PerturbationSeq& zeta);

Mat2 m_matrix(const ModulatedModel& m_perturbed, long j, double x);

// a_{n+N} - a_n -> 0, read off the limit alpha_i sum_k s_k/alpha_{k-1}
bool increments_vanish(const ModulatedModel& m);
double growth_limit(const ModulatedModel& m, int i);

// partial sums of 1/a_n keep growing between doubled horizons
bool carleman_diagnostic(const ModulatedModel& m);

// bundle reused by the analysis modules
struct Analysis {
    ModulatedModel model;
    PeriodicCache cache;
    TauData tau;
};
Analysis analyse(const ModulatedModel& m);

}  // namespace pmj
