#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "crdf/design.hpp"
#include "crdf/gauss_markov.hpp"
#include "crdf/realization.hpp"
#include "crdf/simulate.hpp"

namespace crdf {

inline nlohmann::json to_json(const GmSchedule& s) {
    return nlohmann::json{{"sigma0_sq", s.sigma0_sq},
                          {"a", s.a},
                          {"xi_var", s.xi_var},
                          {"D", s.D}};
}

inline GmSchedule schedule_from_json(const nlohmann::json& j) {
    GmSchedule s;
    s.sigma0_sq = j.at("sigma0_sq").get<double>();
    s.a = j.at("a").get<std::vector<double>>();
    s.xi_var = j.at("xi_var").get<std::vector<double>>();
    s.D = j.at("D").get<std::vector<double>>();
    validate_schedule(s);
    return s;
}

inline nlohmann::json to_json(const DesignOutcome& outcome) {
    return nlohmann::json{{"rate_nats", outcome.rate_nats},
                          {"rate_bits", outcome.rate_nats / std::numbers::ln2},
                          {"K", outcome.state.snr_k},
                          {"distortion_trace", outcome.distortion_trace},
                          {"w_taps", outcome.state.w_taps},
                          {"f_samples", outcome.state.shaping},
                          {"sigma_u_sq", outcome.sigma_u_sq}};
}

inline DesignOutcome design_outcome_from_json(const nlohmann::json& j) {
    DesignOutcome out;
    out.rate_nats = j.at("rate_nats").get<double>();
    out.state.snr_k = j.at("K").get<double>();
    out.distortion_trace = j.at("distortion_trace").get<std::vector<double>>();
    out.state.w_taps = j.at("w_taps").get<std::vector<double>>();
    out.state.shaping = j.at("f_samples").get<std::vector<double>>();
    out.sigma_u_sq = j.value("sigma_u_sq", 0.0);
    out.state.grid = FrequencyGrid(out.state.shaping.size());
    validate_design_state(out.state);
    return out;
}

inline nlohmann::json to_json(const FilterSet& fs) {
    return nlohmann::json{{"a_taps", fs.a_taps},
                          {"b_taps", fs.b_taps},
                          {"f_taps", fs.one_minus_f_taps},
                          {"w_taps", fs.w_taps},
                          {"sigma_n_sq", fs.sigma_n_sq},
                          {"delta", fs.delta}};
}

inline FilterSet filter_set_from_json(const nlohmann::json& j) {
    FilterSet fs;
    fs.a_taps = j.at("a_taps").get<std::vector<double>>();
    fs.b_taps = j.at("b_taps").get<std::vector<double>>();
    fs.one_minus_f_taps = j.at("f_taps").get<std::vector<double>>();
    fs.w_taps = j.at("w_taps").get<std::vector<double>>();
    fs.sigma_n_sq = j.at("sigma_n_sq").get<double>();
    fs.delta = j.value("delta", std::sqrt(12.0 * fs.sigma_n_sq));
    return fs;
}

inline nlohmann::json to_json(const SimReport& rep) {
    nlohmann::json j{{"empirical_mse", rep.empirical_mse},
                     {"predicted_mse", rep.predicted_mse},
                     {"noise_whiteness", rep.noise_whiteness},
                     {"noise_variance", rep.noise_variance},
                     {"rate_bound_bits", rep.rate_bound_bits},
                     {"samples_used", rep.samples_used},
                     {"variant", rep.variant == ChannelVariant::sdusq ? "sdusq" : "awgn"}};
    j["noise_uniformity_stat"] = std::isfinite(rep.noise_uniformity_stat)
                                     ? nlohmann::json(rep.noise_uniformity_stat)
                                     : nlohmann::json(nullptr);
    j["entropy_rate_bits"] = std::isfinite(rep.entropy_rate_bits)
                                 ? nlohmann::json(rep.entropy_rate_bits)
                                 : nlohmann::json(nullptr);
    return j;
}

}  // namespace crdf
