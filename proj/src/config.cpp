#include "pmj/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "pmj/error.hpp"

namespace pmj {

using nlohmann::json;

namespace {

std::vector<double> vec(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array()) throw Error(std::string("config: missing array '") + key + "'");
    return j[key].get<std::vector<double>>();
}

SequenceFamily parse_family(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power")
        return SequenceFamily::power(j.at("gamma").get<double>(), j.value("c", 1.0), j.value("offset", 1.0));
    if (kind == "power_shift")
        return SequenceFamily::power_shift(j.at("gamma").get<double>(), j.value("c", 1.0),
                                           j.value("d", std::vector<double>{0.0}), j.value("offset", 1.0));
    if (kind == "sqrt_product") return SequenceFamily::sqrt_product(j.at("lambda").get<double>());
    if (kind == "explicit") return SequenceFamily::explicit_values(j.at("values").get<std::vector<double>>());
    throw Error("config: unknown family kind '" + kind + "'");
}

json family_json(const SequenceFamily& f) {
    json j;
    switch (f.kind) {
        case SequenceFamily::Kind::Power:
            j = {{"kind", "power"}, {"gamma", f.gamma}, {"c", f.c}, {"offset", f.offset}};
            break;
        case SequenceFamily::Kind::PowerShift:
            j = {{"kind", "power_shift"}, {"gamma", f.gamma}, {"c", f.c}, {"offset", f.offset}, {"d", f.d}};
            break;
        case SequenceFamily::Kind::SqrtProduct: j = {{"kind", "sqrt_product"}, {"lambda", f.lambda}}; break;
        case SequenceFamily::Kind::Explicit: j = {{"kind", "explicit"}, {"values", f.values}}; break;
    }
    return j;
}

PerturbationSeq parse_pert(const json& j) {
    if (j.is_string()) return PerturbationSeq::parse(j.get<std::string>());
    if (j.is_array()) {
        PerturbationSeq p;
        p.kind = PerturbationSeq::Kind::Explicit;
        p.values = j.get<std::vector<double>>();
        return p;
    }
    throw Error("config: perturbation entries must be a string form or an array");
}

json pert_json(const PerturbationSeq& p) {
    if (p.kind == PerturbationSeq::Kind::Explicit) return p.values;
    return p.describe();
}

}  // namespace

ModelConfig parse_config(const json& j) {
    try {
        if (j.value("schema_version", 0) != kSchemaVersion) throw Error("config: unsupported schema_version");
        ModelConfig c;
        c.name = j.value("name", std::string("model"));
        const int N = j.at("N").get<int>();
        std::vector<double> alpha = vec(j, "alpha"), beta = vec(j, "beta");
        if (N < 1 || static_cast<int>(alpha.size()) != N || static_cast<int>(beta.size()) != N)
            throw Error("config: alpha and beta must have length N");
        for (double a : alpha)
            if (!(a > 0)) throw Error("config: alpha entries must be positive");
        ModulatedModel& m = c.model;
        m.periodic = PeriodicParams(alpha, beta);
        m.a_family = parse_family(j.at("a_family"));
        const json& bf = j.value("b_family", json{{"kind", "beta_scaled"}});
        if (bf.at("kind") == "beta_scaled") {
            m.b_mode = BMode::BetaScaled;
        } else {
            m.b_mode = BMode::Independent;
            m.b_family = parse_family(bf);
        }
        if (j.contains("s") || j.contains("r")) {
            m.s = vec(j, "s");
            m.r = vec(j, "r");
            if (static_cast<int>(m.s.size()) != N || static_cast<int>(m.r.size()) != N)
                throw Error("config: s and r must have length N");
            m.s_r_source = SRSource::UserExact;
        }
        m.horizon = j.value("horizon", 4'000'000L);
        if (m.horizon < 1000) throw Error("config: horizon must be at least 1000");
        c.seed = j.value("seed", std::uint64_t{1});
        if (j.contains("perturbation")) {
            const json& p = j["perturbation"];
            c.model = perturb(m, parse_pert(p.value("xi", json("zero"))), parse_pert(p.value("zeta", json("zero"))));
        }
        return c;
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
}

ModelConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("config: cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    return parse_config(j);
}

nlohmann::ordered_json to_json(const ModelConfig& c) {
    const ModulatedModel& m = c.model;
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = c.name;
    j["N"] = m.N();
    j["alpha"] = m.periodic.alpha;
    j["beta"] = m.periodic.beta;
    j["a_family"] = family_json(m.a_family);
    j["b_family"] = m.b_mode == BMode::BetaScaled ? json{{"kind", "beta_scaled"}} : family_json(m.b_family);
    if (m.s_r_source == SRSource::UserExact) {
        j["s"] = m.s;
        j["r"] = m.r;
    }
    if (m.perturbation) j["perturbation"] = {{"xi", pert_json(m.perturbation->xi)}, {"zeta", pert_json(m.perturbation->zeta)}};
    j["horizon"] = m.horizon;
    j["seed"] = c.seed;
    return j;
}

std::string config_hash(const ModelConfig& c) {
    const std::string s = to_json(c).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace fixtures {

ModulatedModel m1() {
    ModulatedModel m;
    m.periodic = PeriodicParams({1.0}, {-2.0});
    m.a_family = SequenceFamily::power(0.6);
    m.b_mode = BMode::BetaScaled;
    return m;
}

ModulatedModel laguerre(double lambda) {
    ModulatedModel m;
    m.periodic = PeriodicParams({1.0}, {2.0});
    m.a_family = SequenceFamily::sqrt_product(lambda);
    m.b_mode = BMode::Independent;
    m.b_family = SequenceFamily::power_shift(1.0, 2.0, {lambda - 1.0});
    return m;
}

ModulatedModel laguerre_type(int kappa) {
    // c0 = (2 (2k)!! / (k (2k-1)!!))^{1/k}, d_n = c0 n^{1/k}
    double even = 1, odd = 1;
    for (int k = 2; k <= 2 * kappa; k += 2) even *= k;
    for (int k = 1; k <= 2 * kappa - 1; k += 2) odd *= k;
    const double c0 = std::pow(2.0 * even / (kappa * odd), 1.0 / kappa);
    ModulatedModel m;
    m.periodic = PeriodicParams({1.0}, {2.0});
    m.a_family = SequenceFamily::power(1.0 / kappa, c0 / 4.0, 1.0);
    m.b_mode = BMode::Independent;
    m.b_family = SequenceFamily::power(1.0 / kappa, c0 / 2.0, 0.0);
    return m;
}

ModulatedModel n1_q(double q, double r, double gamma) {
    ModulatedModel m;
    m.periodic = PeriodicParams({1.0}, {q});
    m.a_family = SequenceFamily::power(gamma);
    m.b_mode = BMode::Independent;
    m.b_family = SequenceFamily::power_shift(gamma, q, {-r});
    return m;
}

namespace {
ModulatedModel two_periodic(std::vector<double> alpha, std::vector<double> beta, double gamma) {
    ModulatedModel m;
    m.periodic = PeriodicParams(std::move(alpha), std::move(beta));
    m.a_family = SequenceFamily::power(gamma);
    m.b_mode = BMode::BetaScaled;
    return m;
}
}  // namespace

ModulatedModel diagonal_q_zero(double q, double gamma) { return two_periodic({1, 1}, {q, 0}, gamma); }
ModulatedModel diagonal_q_inverse(double q, double gamma) { return two_periodic({1, 1}, {q, 4 / q}, gamma); }
ModulatedModel offdiagonal_sum_one(double q, double gamma) { return two_periodic({q, 1 - q}, {1, 1}, gamma); }
ModulatedModel offdiagonal_gap_one(double q, double gamma) { return two_periodic({q, 1 + q}, {1, 1}, gamma); }

}  // namespace fixtures

}  // namespace pmj
