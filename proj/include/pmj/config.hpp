#pragma once
#include <cstdint>
#include <string>

#include "json.hpp"
#include "pmj/modulation.hpp"

namespace pmj {

inline constexpr int kSchemaVersion = 1;

struct ModelConfig {
    std::string name;
    ModulatedModel model;
    std::uint64_t seed = 1;
};

ModelConfig parse_config(const nlohmann::json& j);
ModelConfig load_config(const std::string& path);
nlohmann::ordered_json to_json(const ModelConfig& c);
// FNV-1a of the canonical JSON dump
std::string config_hash(const ModelConfig& c);

namespace fixtures {

// N=1, alpha=1, beta=-2, a_n=(n+1)^0.6, b_n=-2a_n
ModulatedModel m1();
// a_n = sqrt((n+1)(n+1+lambda)), b_n = 2n+1+lambda
ModulatedModel laguerre(double lambda);
// weight exp(-x^kappa) on (0, inf): leading recurrence asymptotics a_{n-1} ~ d_n/4, b_n ~ d_n/2
ModulatedModel laguerre_type(int kappa);
// N=1, b_n = q a_n - r with q = +-2
ModulatedModel n1_q(double q, double r, double gamma = 0.6);
// N=2: a_n = alpha_n a~_n, b_n = beta_n a~_n with a~_n = (n+1)^gamma
// beta = (q, 0), alpha = (1, 1)
ModulatedModel diagonal_q_zero(double q, double gamma = 0.5);
// beta = (q, 4/q), alpha = (1, 1)
ModulatedModel diagonal_q_inverse(double q, double gamma = 0.5);
// alpha = (q, 1-q), beta = (1, 1), q in (0, 1)
ModulatedModel offdiagonal_sum_one(double q, double gamma = 0.5);
// alpha = (q, 1+q), beta = (1, 1)
ModulatedModel offdiagonal_gap_one(double q, double gamma = 0.5);

}  // namespace fixtures

}  // namespace pmj
