#pragma once

// JSON serialization of result records. Keys are snake_case; complex numbers are [re, im].

#include <optional>
#include <string>

#include "json.hpp"

#include "bounds.hpp"
#include "criterion.hpp"
#include "repeater.hpp"

namespace repeaterlab {

using json = nlohmann::json;

inline json to_json_value(const cplx &z) { return json::array({z.real(), z.imag()}); }
inline cplx cplx_from_json(const json &j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

inline json to_json_value(const Ket &k) {
    json a = json::array();
    for (const auto &z : k.amplitudes()) {
        a.push_back(to_json_value(z));
    }
    return a;
}

inline Ket ket_from_json(const json &j) {
    Ket k(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        k[i] = cplx_from_json(j[i]);
    }
    return k;
}

inline json to_json_value(const ComplexMatrix &m) {
    json entries = json::array();
    for (const auto &z : m.data()) {
        entries.push_back(to_json_value(z));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", entries}};
}

inline ComplexMatrix matrix_from_json(const json &j) {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    std::vector<cplx> data;
    for (const auto &e : j.at("entries")) {
        data.push_back(cplx_from_json(e));
    }
    return ComplexMatrix(rows, cols, std::move(data));
}

inline void to_json(json &j, const ProtocolAnalysis &a) {
    json outcomes = json::array();
    for (const auto &o : a.outcomes) {
        outcomes.push_back({
            {"index", o.index},
            {"probability", o.probability},
            {"maximal", o.maximal},
            {"bob_acts", o.bob_acts},
            {"bob_success", o.bob_success},
            {"schmidt_angle", o.schmidt_angle},
            {"post_state", o.post_state ? to_json_value(*o.post_state) : json(nullptr)},
        });
    }
    j = {
        {"theta", a.theta},
        {"eta", a.eta},
        {"p_ms", a.p_ms},
        {"per_outcome", outcomes},
        {"ledger",
         {{"classical_bits_sent", a.classical_bits_sent},
          {"bob_acts_probability", a.bob_acts_probability},
          {"expected_local_measurements", a.expected_local_measurements}}},
    };
}

inline void from_json(const json &j, ProtocolAnalysis &a) {
    a = ProtocolAnalysis{};
    a.theta = j.at("theta").get<double>();
    a.eta = j.at("eta").get<double>();
    a.p_ms = j.at("p_ms").get<double>();
    for (const auto &o : j.at("per_outcome")) {
        OutcomeAnalysis out;
        out.index = o.at("index").get<std::size_t>();
        out.probability = o.at("probability").get<double>();
        out.maximal = o.at("maximal").get<bool>();
        out.bob_acts = o.at("bob_acts").get<bool>();
        out.bob_success = o.at("bob_success").get<double>();
        out.schmidt_angle = o.at("schmidt_angle").get<double>();
        if (!o.at("post_state").is_null()) {
            out.post_state = ket_from_json(o.at("post_state"));
        }
        a.outcomes.push_back(std::move(out));
    }
    const auto &l = j.at("ledger");
    a.classical_bits_sent = l.at("classical_bits_sent").get<std::size_t>();
    a.bob_acts_probability = l.at("bob_acts_probability").get<double>();
    a.expected_local_measurements = l.at("expected_local_measurements").get<double>();
}

inline void to_json(json &j, const SampledEstimate &s) {
    j = {
        {"theta", s.theta},
        {"eta", s.eta},
        {"n", s.n},
        {"seed", s.seed},
        {"successes", s.successes},
        {"estimate", s.estimate},
        {"standard_error", s.standard_error},
        {"bob_acts", s.bob_acts},
        {"bob_acts_frequency", s.bob_acts_frequency},
        {"bob_acts_standard_error", s.bob_acts_standard_error},
        {"ledger", {{"mean_classical_bits", s.mean_classical_bits}, {"mean_local_measurements", s.mean_local_measurements}}},
    };
}

inline void from_json(const json &j, SampledEstimate &s) {
    s.theta = j.at("theta").get<double>();
    s.eta = j.at("eta").get<double>();
    s.n = j.at("n").get<std::size_t>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.successes = j.at("successes").get<std::size_t>();
    s.estimate = j.at("estimate").get<double>();
    s.standard_error = j.at("standard_error").get<double>();
    s.bob_acts = j.at("bob_acts").get<std::size_t>();
    s.bob_acts_frequency = j.at("bob_acts_frequency").get<double>();
    s.bob_acts_standard_error = j.at("bob_acts_standard_error").get<double>();
    s.mean_classical_bits = j.at("ledger").at("mean_classical_bits").get<double>();
    s.mean_local_measurements = j.at("ledger").at("mean_local_measurements").get<double>();
}

inline void to_json(json &j, const CriterionReport &r) {
    j = {
        {"lhs", r.lhs},
        {"rhs", r.rhs},
        {"p_s", r.p_s},
        {"optimal_rate", r.optimal_rate},
        {"optimal", r.optimal},
        {"rate_route_optimal", r.rate_route_optimal},
        {"tolerance", r.tolerance},
    };
}

inline void from_json(const json &j, CriterionReport &r) {
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.p_s = j.at("p_s").get<double>();
    r.optimal_rate = j.at("optimal_rate").get<double>();
    r.optimal = j.at("optimal").get<bool>();
    r.rate_route_optimal = j.at("rate_route_optimal").get<bool>();
    r.tolerance = j.at("tolerance").get<double>();
}

inline void to_json(json &j, const BoundResult &b) {
    j = {
        {"p_max", b.p_max},
        {"achieved_p", b.achieved_p},
        {"post_fidelity", b.post_fidelity},
        {"max_eigenvalue", b.max_eigenvalue},
        {"optimal_u", to_json_value(b.optimal_u)},
        {"m_i", to_json_value(b.m_i)},
    };
}

inline void from_json(const json &j, BoundResult &b) {
    b.p_max = j.at("p_max").get<double>();
    b.achieved_p = j.at("achieved_p").get<double>();
    b.post_fidelity = j.at("post_fidelity").get<double>();
    b.max_eigenvalue = j.at("max_eigenvalue").get<double>();
    b.optimal_u = matrix_from_json(j.at("optimal_u"));
    b.m_i = matrix_from_json(j.at("m_i"));
}

inline void to_json(json &j, const BellComparison &c) {
    j = {
        {"theta", c.theta},
        {"eta", c.eta},
        {"rates_equal", c.rates_equal},
        {"optimal", c.optimal},
        {"bell", c.bell},
    };
}

inline void from_json(const json &j, BellComparison &c) {
    c.theta = j.at("theta").get<double>();
    c.eta = j.at("eta").get<double>();
    c.rates_equal = j.at("rates_equal").get<bool>();
    c.optimal = j.at("optimal").get<ProtocolAnalysis>();
    c.bell = j.at("bell").get<ProtocolAnalysis>();
}

inline json to_json_value(const OptimalBasis &b) {
    json kets = json::array();
    for (const auto &k : b.kets) {
        kets.push_back(to_json_value(k));
    }
    return {{"beta1", b.beta1}, {"beta2", b.beta2}, {"kets", kets}};
}

} // namespace repeaterlab
