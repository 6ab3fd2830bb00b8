#pragma once

/**
 * @file
 * Command-line front end. `parse_args` turns argv (without the program name)
 * into a validated RunConfig; `run` dispatches it and writes the report.
 *
 * Angles on the command line may lie anywhere in (0, pi/2). Values above
 * pi/4 are reflected to pi/2 - angle, which is the same pair up to X (x) X;
 * a measurement read from a file is conjugated by X on the matching Clare
 * qubit so results are unchanged by the reflection.
 */

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "bounds.hpp"
#include "criterion.hpp"
#include "repeater.hpp"
#include "report.hpp"
#include "states.hpp"

namespace repeaterlab::cli {

enum class Command { rate, basis, simulate, criterion, bound, sweep, compare };
enum class OutputFormat { json, csv, text };

inline std::string_view to_string(Command c) {
    switch (c) {
    case Command::rate: return "rate";
    case Command::basis: return "basis";
    case Command::simulate: return "simulate";
    case Command::criterion: return "criterion";
    case Command::bound: return "bound";
    case Command::sweep: return "sweep";
    case Command::compare: return "compare";
    }
    return "?";
}

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Thrown for --help; what() carries the help text.
class HelpRequested : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    Command command = Command::rate;
    double theta = 0.0; ///< radians, as given (after --degrees conversion)
    double eta = 0.0;
    std::size_t n_samples = 10000;
    std::uint64_t seed = 0;
    double beta1 = 0.0;
    double beta2 = 0.0;
    std::optional<OutputFormat> output_format; ///< empty: command default
    std::optional<std::string> output_path;
    std::vector<double> schmidt_a;
    std::vector<double> schmidt_b;
    std::optional<std::string> measurement; ///< built-in name or path
    std::size_t grid = 20;
    double tolerance = 1e-9;
};

inline OutputFormat effective_format(const RunConfig &c) {
    if (c.output_format) {
        return *c.output_format;
    }
    switch (c.command) {
    case Command::basis: return OutputFormat::text;
    case Command::sweep: return OutputFormat::csv;
    default: return OutputFormat::json;
    }
}

namespace detail {

inline std::vector<double> parse_list(const std::string &flag, const std::string &text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception &) {
            throw UsageError(flag + ": malformed number '" + item + "'");
        }
    }
    if (out.empty()) {
        throw UsageError(flag + ": empty list");
    }
    return out;
}

inline std::uint64_t env_seed() {
    const char *s = std::getenv("REPEATERLAB_SEED");
    if (s == nullptr || *s == '\0') {
        return 0;
    }
    try {
        return std::stoull(s);
    } catch (const std::exception &) {
        throw UsageError(std::string("REPEATERLAB_SEED: malformed integer '") + s + "'");
    }
}

} // namespace detail

inline RunConfig parse_args(const std::vector<std::string> &args) {
    RunConfig cfg;
    CLI::App app{"Entanglement swapping analysis for a single quantum repeater node", "repeaterlab"};
    app.require_subcommand(1);

    bool degrees = false;
    std::string format;
    std::string output;
    std::string list_a;
    std::string list_b;
    std::string measurement;
    std::optional<std::uint64_t> seed;

    auto angles = [&](CLI::App *sub) {
        sub->add_option("--theta", cfg.theta, "Alice-Clare pair angle")->required();
        sub->add_option("--eta", cfg.eta, "Clare-Bob pair angle")->required();
        sub->add_flag("--degrees", degrees, "angles are given in degrees");
    };
    auto common = [&](CLI::App *sub) {
        sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--output", output, "write the report to a file");
    };

    auto *rate = app.add_subcommand("rate", "exact success rate of the optimal-basis protocol");
    angles(rate);
    rate->add_option("--beta1", cfg.beta1);
    rate->add_option("--beta2", cfg.beta2);
    common(rate);

    auto *basis = app.add_subcommand("basis", "Clare's optimal measurement basis (matrix text, one ket per row)");
    angles(basis);
    basis->add_option("--beta1", cfg.beta1);
    basis->add_option("--beta2", cfg.beta2);
    basis->add_option("--format", format, "json")->check(CLI::IsMember({"json"}));
    basis->add_option("--output", output);

    auto *simulate = app.add_subcommand("simulate", "Monte-Carlo run of the protocol");
    angles(simulate);
    simulate->add_option("--n", cfg.n_samples, "number of runs")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", seed, "RNG seed (falls back to REPEATERLAB_SEED)");
    simulate->add_option("--beta1", cfg.beta1);
    simulate->add_option("--beta2", cfg.beta2);
    common(simulate);

    auto *criterion = app.add_subcommand("criterion", "optimality test for a projective measurement");
    angles(criterion);
    criterion->add_option("--measurement", measurement, "bell | optimal | computational | <file>")->required();
    criterion->add_option("--tolerance", cfg.tolerance);
    common(criterion);

    auto *bound = app.add_subcommand("bound", "success-probability bound for Schmidt-form pairs");
    bound->add_option("--a", list_a, "comma-separated Schmidt probabilities of the left pair")->required();
    bound->add_option("--b", list_b, "comma-separated Schmidt probabilities of the right pair")->required();
    common(bound);

    auto *sweep = app.add_subcommand("sweep", "grid over (theta, eta) in (0, pi/4]^2");
    sweep->add_option("--grid", cfg.grid, "points per axis")->check(CLI::PositiveNumber);
    common(sweep);

    auto *compare = app.add_subcommand("compare", "optimal basis versus Bell basis");
    angles(compare);
    common(compare);

    std::vector<const char *> argv;
    argv.push_back("repeaterlab");
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &) {
        const CLI::App *target = &app;
        for (const auto *sub : app.get_subcommands()) {
            target = sub;
        }
        throw HelpRequested(target->help());
    } catch (const CLI::ParseError &e) {
        throw UsageError(e.get_name() + ": " + e.what());
    }

    const std::pair<CLI::App *, Command> table[] = {
        {rate, Command::rate},           {basis, Command::basis},   {simulate, Command::simulate},
        {criterion, Command::criterion}, {bound, Command::bound},   {sweep, Command::sweep},
        {compare, Command::compare},
    };
    for (const auto &[sub, cmd] : table) {
        if (sub->parsed()) {
            cfg.command = cmd;
        }
    }

    if (degrees) {
        cfg.theta *= std::numbers::pi / 180.0;
        cfg.eta *= std::numbers::pi / 180.0;
    }
    if (!format.empty()) {
        cfg.output_format = format == "csv" ? OutputFormat::csv : OutputFormat::json;
    }
    if (!output.empty()) {
        cfg.output_path = output;
    }
    if (!measurement.empty()) {
        cfg.measurement = measurement;
    }
    cfg.seed = seed ? *seed : detail::env_seed();

    const bool has_angles = cfg.command != Command::bound && cfg.command != Command::sweep;
    if (has_angles) {
        for (auto [name, value] : {std::pair{"--theta", cfg.theta}, std::pair{"--eta", cfg.eta}}) {
            if (!(value > 0.0 && value < std::numbers::pi / 2.0)) {
                throw UsageError(std::string(name) + ": angle must lie in (0, pi/2) radians");
            }
        }
    }
    if (cfg.command == Command::bound) {
        cfg.schmidt_a = detail::parse_list("--a", list_a);
        cfg.schmidt_b = detail::parse_list("--b", list_b);
        for (auto [name, list] : {std::pair{"--a", &cfg.schmidt_a}, std::pair{"--b", &cfg.schmidt_b}}) {
            try {
                SchmidtState check(*list);
            } catch (const Error &e) {
                throw UsageError(std::string(name) + ": " + e.what());
            }
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------

namespace detail {

// Bit flip on one qubit of Clare's register: 0 = left (paired with Alice), 1 = right.
inline ComplexMatrix clare_flip(std::size_t qubit) {
    ComplexMatrix x(2, 2);
    x(0, 1) = x(1, 0) = 1.0;
    const auto id = ComplexMatrix::identity(2);
    return qubit == 0 ? tensor(x, id) : tensor(id, x);
}

struct Angles {
    double theta;
    double eta;
    bool theta_reflected;
    bool eta_reflected;
};

inline Angles canonical(const RunConfig &c) {
    return {canonical_angle(c.theta), canonical_angle(c.eta), c.theta > quarter_pi, c.eta > quarter_pi};
}

inline ProjectiveMeasurement load_measurement_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open measurement file '" + path + "'");
    }
    const auto mats = read_matrices(in);
    std::vector<Ket> kets;
    if (mats.size() == 1 && mats[0].rows() == 4 && mats[0].cols() == 4) {
        for (std::size_t r = 0; r < 4; ++r) {
            Ket k(4);
            for (std::size_t c = 0; c < 4; ++c) {
                k[c] = mats[0](r, c);
            }
            kets.push_back(k);
        }
    } else if (mats.size() == 4) {
        for (const auto &m : mats) {
            if (m.data().size() != 4) {
                throw Error(ErrorCode::parse_error, "measurement file: each ket must have 4 amplitudes");
            }
            kets.emplace_back(std::vector<cplx>(m.data().begin(), m.data().end()));
        }
    } else {
        throw Error(ErrorCode::parse_error,
                    "measurement file: expected one 4x4 matrix (rows are kets) or four 4-amplitude kets");
    }
    return ProjectiveMeasurement::from_kets(kets);
}

inline ProjectiveMeasurement resolve_measurement(const RunConfig &c, const Angles &a) {
    const std::string &name = *c.measurement;
    if (name == "bell") {
        return bell_basis();
    }
    if (name == "computational") {
        return computational_basis();
    }
    if (name == "optimal") {
        return build_optimal_basis(a.theta, a.eta).measurement();
    }
    auto meas = load_measurement_file(name);
    std::vector<Ket> kets = meas.kets();
    for (std::size_t q = 0; q < 2; ++q) {
        if (q == 0 ? a.theta_reflected : a.eta_reflected) {
            const auto x = clare_flip(q);
            for (auto &k : kets) {
                k = x * k;
            }
        }
    }
    return ProjectiveMeasurement::from_kets(kets);
}

inline std::string csv_number(double x) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os.precision(17);
    os << x;
    return os.str();
}

inline std::string csv_row(std::initializer_list<double> values) {
    std::string row;
    for (double v : values) {
        if (!row.empty()) {
            row += ',';
        }
        row += csv_number(v);
    }
    return row;
}

inline void sweep(const RunConfig &c, OutputFormat fmt, std::ostream &out) {
    const std::size_t n = c.grid;
    const char *header = "theta,eta,p_ms,direct_success,projection_lower,projection_upper,p_max,"
                         "bob_acts_optimal,bob_acts_bell";
    json rows = json::array();
    if (fmt == OutputFormat::csv) {
        out << header << '\n';
    }
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            const double theta = quarter_pi * static_cast<double>(i) / static_cast<double>(n);
            const double eta = quarter_pi * static_cast<double>(j) / static_cast<double>(n);
            const auto cmp = compare_with_bell(theta, eta);
            const auto pb = projection_bounds(theta, eta);
            const double direct = cmp.optimal.outcomes[0].probability + cmp.optimal.outcomes[1].probability;
            const double ct = std::cos(theta), st = std::sin(theta), ce = std::cos(eta), se = std::sin(eta);
            const double pm = p_max(SchmidtState({ct * ct, st * st}), SchmidtState({ce * ce, se * se}));
            if (fmt == OutputFormat::csv) {
                out << csv_row({theta, eta, cmp.optimal.p_ms, direct, pb.lower, pb.upper, pm,
                                cmp.optimal.bob_acts_probability, cmp.bell.bob_acts_probability})
                    << '\n';
            } else {
                rows.push_back({{"theta", theta},
                                {"eta", eta},
                                {"p_ms", cmp.optimal.p_ms},
                                {"direct_success", direct},
                                {"projection_lower", pb.lower},
                                {"projection_upper", pb.upper},
                                {"p_max", pm},
                                {"bob_acts_optimal", cmp.optimal.bob_acts_probability},
                                {"bob_acts_bell", cmp.bell.bob_acts_probability}});
            }
        }
    }
    if (fmt != OutputFormat::csv) {
        out << json{{"grid", n}, {"rows", rows}}.dump(2) << '\n';
    }
}

inline void dispatch(const RunConfig &c, std::ostream &out) {
    const OutputFormat fmt = effective_format(c);
    switch (c.command) {
    case Command::rate: {
        const auto a = canonical(c);
        const auto r = run_protocol_analytic(a.theta, a.eta, c.beta1, c.beta2);
        if (fmt == OutputFormat::csv) {
            out << "theta,eta,p_ms,p1,p2,p3,p4,bob_acts_probability\n"
                << csv_row({r.theta, r.eta, r.p_ms, r.outcomes[0].probability, r.outcomes[1].probability,
                            r.outcomes[2].probability, r.outcomes[3].probability, r.bob_acts_probability})
                << '\n';
        } else {
            out << json(r).dump(2) << '\n';
        }
        return;
    }
    case Command::basis: {
        const auto a = canonical(c);
        const auto b = build_optimal_basis(a.theta, a.eta, c.beta1, c.beta2);
        if (fmt == OutputFormat::json) {
            out << to_json_value(b).dump(2) << '\n';
        } else {
            ComplexMatrix m(4, 4);
            for (std::size_t r = 0; r < 4; ++r) {
                for (std::size_t k = 0; k < 4; ++k) {
                    m(r, k) = b.kets[r][k];
                }
            }
            write_matrix(out, m);
        }
        return;
    }
    case Command::simulate: {
        const auto a = canonical(c);
        const auto s = run_protocol_sampled(a.theta, a.eta, c.n_samples, c.seed, c.beta1, c.beta2);
        if (fmt == OutputFormat::csv) {
            out << "theta,eta,n,seed,estimate,standard_error,bob_acts_frequency,mean_local_measurements\n"
                << csv_row({s.theta, s.eta, static_cast<double>(s.n), static_cast<double>(s.seed), s.estimate,
                            s.standard_error, s.bob_acts_frequency, s.mean_local_measurements})
                << '\n';
        } else {
            out << json(s).dump(2) << '\n';
        }
        return;
    }
    case Command::criterion: {
        const auto a = canonical(c);
        const auto meas = resolve_measurement(c, a);
        const auto r = is_optimal(meas, a.theta, a.eta, c.tolerance);
        if (fmt == OutputFormat::csv) {
            out << "theta,eta,lhs,rhs,p_s,optimal\n"
                << csv_row({a.theta, a.eta, r.lhs, r.rhs, r.p_s, r.optimal ? 1.0 : 0.0}) << '\n';
        } else {
            json j = r;
            j["theta"] = a.theta;
            j["eta"] = a.eta;
            j["measurement"] = *c.measurement;
            out << j.dump(2) << '\n';
        }
        return;
    }
    case Command::bound: {
        const SchmidtState sa(c.schmidt_a);
        const SchmidtState sb(c.schmidt_b);
        const auto r = achieving_operator(sa, sb);
        if (fmt == OutputFormat::csv) {
            out << "p_max,achieved_p,post_fidelity,max_eigenvalue\n"
                << csv_row({r.p_max, r.achieved_p, r.post_fidelity, r.max_eigenvalue}) << '\n';
        } else {
            out << json(r).dump(2) << '\n';
        }
        return;
    }
    case Command::sweep:
        sweep(c, fmt, out);
        return;
    case Command::compare: {
        const auto a = canonical(c);
        const auto r = compare_with_bell(a.theta, a.eta);
        if (fmt == OutputFormat::csv) {
            out << "theta,eta,p_ms_optimal,p_ms_bell,bob_acts_optimal,bob_acts_bell\n"
                << csv_row({r.theta, r.eta, r.optimal.p_ms, r.bell.p_ms, r.optimal.bob_acts_probability,
                            r.bell.bob_acts_probability})
                << '\n';
        } else {
            out << json(r).dump(2) << '\n';
        }
        return;
    }
    }
}

} // namespace detail

inline json error_json(std::string_view code, const std::string &message) {
    return {{"error", {{"code", code}, {"message", message}}}};
}

/// Runs one command. Reports go to `out` (or the --output file); failures print an error
/// JSON object to `err`. Returns 0 on success, 1 on a computation or I/O failure.
inline int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
    try {
        if (config.output_path) {
            std::ofstream file(*config.output_path);
            if (!file) {
                throw Error(ErrorCode::io_error, "cannot open output file '" + *config.output_path + "'");
            }
            detail::dispatch(config, file);
            if (!file) {
                throw Error(ErrorCode::io_error, "failed writing '" + *config.output_path + "'");
            }
        } else {
            detail::dispatch(config, out);
        }
        return 0;
    } catch (const Error &e) {
        err << error_json(repeaterlab::to_string(e.code()), std::string(to_string(config.command)) + ": " + e.what())
            << '\n';
    } catch (const std::exception &e) {
        err << error_json("internal", std::string(to_string(config.command)) + ": " + e.what()) << '\n';
    }
    return 1;
}

/// Full entry point used by the executable: parse, run, and map usage errors to exit code 2.
inline int main(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    try {
        cfg = parse_args(args);
    } catch (const HelpRequested &h) {
        out << h.what();
        return 0;
    } catch (const UsageError &e) {
        err << error_json("usage", e.what()) << '\n';
        return 2;
    }
    return run(cfg, out, err);
}

} // namespace repeaterlab::cli
