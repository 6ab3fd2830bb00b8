#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "repeaterlab/cli.hpp"

using namespace repeaterlab;
using namespace repeaterlab::cli;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(const std::vector<std::string> &args) {
    std::ostringstream out, err;
    const int code = cli::main(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> split_lines(const std::string &text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        lines.push_back(line);
    }
    return lines;
}

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::filesystem::path temp_file(const std::string &name) {
    return std::filesystem::temp_directory_path() / ("repeaterlab_test_" + name);
}
} // namespace

TEST_CASE("parse_args: examples", "[cli][parse]") {
    auto c = parse_args({"rate", "--theta", "0.5236", "--eta", "0.7854"});
    CHECK(c.command == Command::rate);
    CHECK(c.theta == Approx(pi / 6).margin(1e-4));
    CHECK(c.eta == Approx(pi / 4).margin(1e-4));

    c = parse_args({"simulate", "--theta", "0.3", "--eta", "0.6", "--n", "100000", "--seed", "7"});
    CHECK(c.command == Command::simulate);
    CHECK(c.n_samples == 100000);
    CHECK(c.seed == 7);

    c = parse_args({"bound", "--a", "0.5,0.3,0.2", "--b", "0.4,0.35,0.25"});
    CHECK(c.command == Command::bound);
    CHECK(c.schmidt_a == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(c.schmidt_b == std::vector<double>{0.4, 0.35, 0.25});

    c = parse_args({"rate", "--theta", "30", "--eta", "45", "--degrees", "--format", "csv"});
    CHECK(c.theta == Approx(pi / 6).margin(1e-15));
    CHECK(c.eta == Approx(pi / 4).margin(1e-15));
    CHECK(effective_format(c) == OutputFormat::csv);

    c = parse_args({"sweep", "--grid", "5"});
    CHECK(c.grid == 5);
    CHECK(effective_format(c) == OutputFormat::csv);
}

TEST_CASE("parse_args: usage errors", "[cli][parse]") {
    CHECK_THROWS_AS(parse_args({"rate", "--theta", "0.3", "--eta", "0.4", "--bogus"}), UsageError);
    CHECK_THROWS_AS(parse_args({"rate", "--theta", "0.3"}), UsageError);
    CHECK_THROWS_AS(parse_args({"rate", "--theta", "abc", "--eta", "0.4"}), UsageError);
    CHECK_THROWS_AS(parse_args({"rate", "--theta", "2.0", "--eta", "0.4"}), UsageError);
    CHECK_THROWS_AS(parse_args({"bound", "--a", "0.5,x", "--b", "1"}), UsageError);
    CHECK_THROWS_AS(parse_args({"bound", "--a", "0.3,0.3", "--b", "1"}), UsageError);
    CHECK_THROWS_AS(parse_args({}), UsageError);
    CHECK_THROWS_AS(parse_args({"frobnicate"}), UsageError);
    try {
        parse_args({"rate", "--theta", "0.3"});
    } catch (const UsageError &e) {
        CHECK(std::string(e.what()).find("--eta") != std::string::npos);
    }
    const auto r = invoke({"rate", "--theta", "0.3"});
    CHECK(r.code == 2);
    CHECK(json::parse(r.err).at("error").at("code") == "usage");
}

TEST_CASE("run: rate and criterion outputs", "[cli][run]") {
    auto r = invoke({"rate", "--theta", "0.5235987755982988", "--eta", "0.7853981633974483"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("p_ms").get<double>() == Approx(0.5).margin(1e-12));
    CHECK(j.at("per_outcome").size() == 4);
    CHECK(j.at("ledger").at("classical_bits_sent") == 2);

    r = invoke({"criterion", "--measurement", "bell", "--theta", "0.5236", "--eta", "0.7854"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("optimal") == true);
    r = invoke({"criterion", "--measurement", "computational", "--theta", "0.5236", "--eta", "0.7854"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("optimal") == false);
}

TEST_CASE("run: reflected angles give the canonical results", "[cli][run]") {
    auto a = invoke({"rate", "--theta", "0.3", "--eta", "0.5"});
    auto b = invoke({"rate", "--theta", num(pi / 2 - 0.3), "--eta", "0.5"});
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(json::parse(a.out).at("p_ms").get<double>() ==
          Approx(json::parse(b.out).at("p_ms").get<double>()).margin(1e-12));
}

TEST_CASE("run: every JSON report round-trips", "[cli][json]") {
    const auto check = [](const std::vector<std::string> &args, auto tag) {
        using T = decltype(tag);
        const auto r = invoke(args);
        REQUIRE(r.code == 0);
        json j = json::parse(r.out);
        if constexpr (std::is_same_v<T, CriterionReport>) {
            j.erase("theta");
            j.erase("eta");
            j.erase("measurement");
        }
        const T value = j.get<T>();
        CHECK(json(value) == j);
    };
    check({"rate", "--theta", "0.3", "--eta", "0.6"}, ProtocolAnalysis{});
    check({"simulate", "--theta", "0.3", "--eta", "0.6", "--n", "500", "--seed", "4"}, SampledEstimate{});
    check({"criterion", "--theta", "0.3", "--eta", "0.6", "--measurement", "optimal"}, CriterionReport{});
    check({"bound", "--a", "0.5,0.3,0.2", "--b", "0.4,0.35,0.25"}, BoundResult{});
    check({"compare", "--theta", "0.3", "--eta", "0.7"}, BellComparison{});
}

TEST_CASE("run: bound report", "[cli][run]") {
    const auto r = invoke({"bound", "--a", "0.5,0.3,0.2", "--b", "0.4,0.35,0.25"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j.at("achieved_p").get<double>() == Approx(j.at("p_max").get<double>()).margin(1e-10));
    CHECK(j.at("post_fidelity").get<double>() >= 1.0 - 1e-10);
}

TEST_CASE("run: simulate is seeded and honours the environment fallback", "[cli][run]") {
    const auto a = invoke({"simulate", "--theta", "0.3", "--eta", "0.6", "--n", "2000", "--seed", "11"});
    const auto b = invoke({"simulate", "--theta", "0.3", "--eta", "0.6", "--n", "2000", "--seed", "11"});
    CHECK(a.out == b.out);
    CHECK(parse_args({"simulate", "--theta", "0.3", "--eta", "0.6"}).seed == 0);
}

TEST_CASE("run: sweep CSV shape and monotonicity", "[cli][sweep]") {
    const auto r = invoke({"sweep", "--grid", "20"});
    REQUIRE(r.code == 0);
    const auto lines = split_lines(r.out);
    REQUIRE(lines.size() == 401);
    CHECK(lines[0] == "theta,eta,p_ms,direct_success,projection_lower,projection_upper,p_max,bob_acts_optimal,"
                      "bob_acts_bell");
    std::vector<std::vector<double>> pms(20, std::vector<double>(20));
    for (std::size_t row = 1; row < lines.size(); ++row) {
        std::stringstream ss(lines[row]);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ',')) {
            values.push_back(std::stod(cell));
        }
        REQUIRE(values.size() == 9);
        pms[(row - 1) / 20][(row - 1) % 20] = values[2];
        CHECK(values[2] == Approx(std::min(2 * std::pow(std::sin(values[0]), 2), 2 * std::pow(std::sin(values[1]), 2)))
                               .margin(1e-12));
    }
    for (std::size_t i = 0; i < 20; ++i) {
        for (std::size_t k = 0; k + 1 < 20; ++k) {
            CHECK(pms[i][k + 1] >= pms[i][k] - 1e-12);
            CHECK(pms[k + 1][i] >= pms[k][i] - 1e-12);
        }
    }
}

TEST_CASE("run: basis output feeds the criterion command", "[cli][io]") {
    const auto path = temp_file("basis.txt");
    auto r = invoke({"basis", "--theta", "0.3", "--eta", "0.6", "--beta1", "0.7", "--output", path.string()});
    REQUIRE(r.code == 0);
    r = invoke({"criterion", "--theta", "0.3", "--eta", "0.6", "--measurement", path.string()});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j.at("optimal") == true);
    CHECK(j.at("p_s").get<double>() == Approx(2 * std::pow(std::sin(0.3), 2)).margin(1e-12));

    // The reflected right pair is (X (x) X) times the canonical one, so the matching
    // basis carries X on Clare's right qubit.
    std::ifstream in(path);
    const auto mats = read_matrices(in);
    REQUIRE(mats.size() == 1);
    const auto flipped_path = temp_file("basis_flipped.txt");
    {
        std::ofstream f(flipped_path);
        write_matrix(f, mats[0] * cli::detail::clare_flip(1));
    }
    const std::string reflected = num(pi / 2 - 0.6);
    r = invoke({"criterion", "--theta", "0.3", "--eta", reflected, "--measurement", flipped_path.string()});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out).at("p_s").get<double>() == Approx(2 * std::pow(std::sin(0.3), 2)).margin(1e-12));
    std::filesystem::remove(path);
    std::filesystem::remove(flipped_path);
}

TEST_CASE("run: failures produce error JSON", "[cli][errors]") {
    auto r = invoke({"criterion", "--theta", "0.3", "--eta", "0.6", "--measurement", "/nonexistent/basis.txt"});
    CHECK(r.code == 1);
    auto j = json::parse(r.err);
    CHECK(j.at("error").at("code") == "io_error");

    const auto path = temp_file("bad_basis.txt");
    {
        std::ofstream f(path);
        f << "4 4\n";
        for (int i = 0; i < 16; ++i) {
            f << "1 0 ";
        }
        f << '\n';
    }
    r = invoke({"criterion", "--theta", "0.3", "--eta", "0.6", "--measurement", path.string()});
    CHECK(r.code == 1);
    j = json::parse(r.err);
    CHECK(j.at("error").at("code") == "not_projective");
    std::filesystem::remove(path);

    r = invoke({"rate", "--theta", "0.3", "--eta", "0.6", "--output", "/nonexistent/dir/out.json"});
    CHECK(r.code == 1);
}

TEST_CASE("help goes to standard output", "[cli]") {
    const auto r = invoke({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("rate") != std::string::npos);
}
