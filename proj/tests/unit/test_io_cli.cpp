#include "kmt/io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using namespace kmt;
using nlohmann::json;

json sig12_json() {
    return json{{"field", {{"degree", 1}}},
                {"gram", {{2, 0, 0}, {0, -2, 0}, {0, 0, -2}}},
                {"e", 1}};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / name;
}

int run_cli(const std::string& args, const std::filesystem::path& capture = {}) {
    std::string cmd = std::string(KMT_CLI_PATH) + " " + args;
    if (!capture.empty()) cmd += " > " + capture.string() + " 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

} // namespace

TEST_CASE("parse_field handles both degrees and rejects others") {
    CHECK(io::parse_field(json{{"degree", 1}}).degree() == 1);
    const TotallyRealField F = io::parse_field(json{{"degree", 2}, {"D", 5}});
    CHECK(F.degree() == 2);
    CHECK(F.discriminant() == 5);
    CHECK_THROWS(io::parse_field(json{{"degree", 3}}));
    CHECK_THROWS(io::parse_field(json{{"degree", 2}}));
    CHECK_THROWS(io::parse_field(json::array()));
}

TEST_CASE("parse_field_element accepts integers, fraction strings, and pairs") {
    const TotallyRealField F = TotallyRealField::real_quadratic(5);
    CHECK(io::parse_field_element(json(3), F) == F.element(3));
    CHECK(io::parse_field_element(json("-7/3"), F) == F.element(Rational(-7, 3)));
    const FieldElement x = io::parse_field_element(json{{"a", "1/2"}, {"b", 2}}, F);
    CHECK(x == F.element(Rational(1, 2), Rational(2)));
    CHECK_THROWS(io::parse_field_element(json(1.5), F));
}

TEST_CASE("parse_space round-trips the gram matrix and rejects asymmetry") {
    const QuadraticSpace V = io::parse_space(sig12_json());
    CHECK(V.dim() == 3);
    CHECK(V.e() == 1);
    CHECK(V.gram()(0, 0) == V.field().element(2));
    CHECK(V.gram()(1, 1) == V.field().element(-2));

    json bad = sig12_json();
    bad["gram"][0][1] = 1; // (1,0) stays 0
    CHECK_THROWS(io::parse_space(bad));
    json ragged = sig12_json();
    ragged["gram"][1] = json::array({0, -2});
    CHECK_THROWS(io::parse_space(ragged));
}

TEST_CASE("parse_lattice defaults to the standard basis and honors zbasis") {
    json plain = {{"field", {{"degree", 1}}}, {"gram", {{2, 0}, {0, 2}}}, {"e", 0}};
    const OLattice std_lat = io::parse_lattice(plain);
    CHECK(std_lat.zrank() == 2);

    json with_basis = {{"space", plain}, {"zbasis", {{2, 0}, {0, 1}}}};
    const OLattice sub = io::parse_lattice(with_basis);
    CHECK(sub.zrank() == 2);
    // doubling the first axis drops (+-1,0) but keeps (0,+-1)
    const QExpansion qe = theta_coefficients(sub, 4.0);
    CHECK(qe.coefficients.at("1|0").real() == 2.0);
    CHECK(qe.coefficients.at("4|0").real() == 4.0); // (+-2,0) and (0,+-2)

    json short_row = with_basis;
    short_row["zbasis"][0] = json::array({2});
    CHECK_THROWS(io::parse_lattice(short_row));
}

TEST_CASE("parse_taus builds the period point the library would") {
    const QuadraticSpace V = io::parse_space(sig12_json());
    json taus = json::array({{{"place", 0},
                              {"alpha", {0.55, 1.0, 0.0}},
                              {"beta", {0.0, 0.0, 1.0}}}});
    const PolyPeriodPoint pts = io::parse_taus(taus, V);
    REQUIRE(pts.size() == 1);

    Eigen::VectorXd a(3), b(3);
    a << 0.55, 1.0, 0.0;
    b << 0.0, 0.0, 1.0;
    const PeriodPoint direct = make_period_point(V, 0, a, b);
    Eigen::VectorXd x(3);
    x << 1.0, 0.3, -0.2;
    CHECK(majorant_R(V, pts[0], x) == doctest::Approx(majorant_R(V, direct, x)).epsilon(1e-14));

    CHECK_THROWS(io::parse_taus(json::array(), V));            // wrong count
    json short_alpha = taus;
    short_alpha[0]["alpha"] = json::array({1.0, 0.0});
    CHECK_THROWS(io::parse_taus(short_alpha, V));
}

TEST_CASE("format_double is stable and round-trip exact") {
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(-2.5) == "-2.5");
    const double x = 0.4357298672917462;
    CHECK(std::stod(io::format_double(x)) == x);
}

TEST_CASE("places_key_string spells subset masks one-based") {
    CHECK(io::places_key_string({{0b101u, 0b010u}}) == "1+3|2");
    CHECK(io::places_key_string({{1u, 0u}, {0u, 3u}}) == "1|&|1+2");
}

TEST_CASE("qexpansion CSV matches a golden transcript") {
    QExpansion q;
    q.radius = 2.5;
    q.coefficients["0|0"] = {1.0, 0.0};
    q.coefficients["1|0"] = {2.0, 0.0};
    std::ostringstream os;
    io::write_qexpansion_csv(os, q);
    CHECK(os.str() == "# radius=2.5 tail_bound=0\nT,Re,Im\n0|0,1,0\n1|0,2,0\n");
}

TEST_CASE("cli selftest passes") {
    CHECK(run_cli("selftest", temp_path("kmt_selftest.txt")) == 0);
}

TEST_CASE("cli theta is deterministic across runs") {
    const auto out1 = temp_path("kmt_theta1.csv");
    const auto out2 = temp_path("kmt_theta2.csv");
    REQUIRE(run_cli("theta --output " + out1.string()) == 0);
    REQUIRE(run_cli("theta --output " + out2.string()) == 0);
    const std::string a = slurp(out1);
    CHECK(!a.empty());
    CHECK(a == slurp(out2));
}

TEST_CASE("cli inspect validates input and sets the exit code") {
    const auto good_p = temp_path("kmt_good.json");
    {
        std::ofstream f(good_p);
        f << json{{"space", sig12_json()}}.dump();
    }
    const auto report = temp_path("kmt_inspect.txt");
    CHECK(run_cli("inspect --input " + good_p.string(), report) == 0);
    CHECK(slurp(report).find("PASS") != std::string::npos);

    const auto bad_p = temp_path("kmt_bad.json");
    {
        json bad = sig12_json();
        bad["gram"][0][1] = 1;
        std::ofstream f(bad_p);
        f << json{{"space", bad}}.dump();
    }
    CHECK(run_cli("inspect --input " + bad_p.string(), temp_path("kmt_null.txt")) == 2);
}

TEST_CASE("cli theta reproduces the E8 representation numbers") {
    const auto in_p = temp_path("kmt_e8.json");
    {
        json gram(json::value_t::array);
        for (int i = 0; i < 8; ++i) {
            json row(json::value_t::array);
            for (int j = 0; j < 8; ++j) row.push_back(i == j ? 2 : 0);
            gram.push_back(row);
        }
        const int bonds[7][2] = {{0, 2}, {1, 3}, {2, 3}, {3, 4}, {4, 5}, {5, 6}, {6, 7}};
        for (const auto& b : bonds) {
            gram[b[0]][b[1]] = -1;
            gram[b[1]][b[0]] = -1;
        }
        std::ofstream f(in_p);
        f << json{{"space", {{"field", {{"degree", 1}}}, {"gram", gram}, {"e", 0}}}}.dump();
    }
    const auto out_p = temp_path("kmt_e8.csv");
    REQUIRE(run_cli("theta --radius 3 --input " + in_p.string() + " --output " + out_p.string()) ==
            0);
    const std::string csv = slurp(out_p);
    CHECK(csv.find("1|0,240,0\n") != std::string::npos);
    CHECK(csv.find("2|0,2160,0\n") != std::string::npos);
    CHECK(csv.find("3|0,6720,0\n") != std::string::npos);
}

TEST_CASE("cli rejects unknown flags and missing files") {
    CHECK(run_cli("theta --no-such-flag", temp_path("kmt_null.txt")) == 2);
    CHECK(run_cli("inspect --input /nonexistent/x.json", temp_path("kmt_null.txt")) == 2);
}
