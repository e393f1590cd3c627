#include <doctest.h>

#include "helpers.hpp"
#include "sqz/cli.hpp"
#include "sqz/io.hpp"

#include <json.hpp>

#include <filesystem>
#include <sstream>

using namespace sqz;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "sqzlp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("sqz_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = (dir / name).string();
        write_file(p, content);
        return p;
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

const char* kExample = "2 1\n50 2\n2\n200 4\n";

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream is(text);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("cli solve on example") {
    TempDir t;
    const auto r = run({"solve", t.file("example.txt", kExample)});
    CHECK(r.code == 0);
    CHECK(r.out.find("status: Optimal") != std::string::npos);
    CHECK(r.out.find("alpha: 1,5,6") != std::string::npos);
    CHECK(r.out.find("objective: 1\n") != std::string::npos);
}

TEST_CASE("cli exit codes for bad input") {
    TempDir t;
    CHECK(run({"solve", t.file("empty.txt", "")}).code == 1);
    CHECK(run({"solve", t.path("missing.txt")}).code == 1);
    CHECK(run({"solve", t.file("zero.txt", "2 1\n1 1\n1\n1 0\n")}).code == 1);
    CHECK(run({"solve", t.file("unb.txt", "1 1\n1\n-1\n-1\n")}).code == 2);
    CHECK(run({"bogus"}).code == 1);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"solve", t.file("f.txt", kExample), "--epsilon", "0.9"}).code == 1);
}

TEST_CASE("cli solve --json") {
    TempDir t;
    const auto r = run({"solve", t.file("example.txt", kExample), "--json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "Optimal");
    CHECK(j["alpha"] == std::vector<int>{1, 5, 6});
    CHECK(j["objective"].get<double>() == doctest::Approx(1.0));
    CHECK(j["z"].size() == 6);
    CHECK(j["iterations"].is_number_integer());
    CHECK(j["flags"].is_array());

    const auto u = run({"solve", t.file("unb.txt", "1 1\n1\n-1\n-1\n"), "--json"});
    const auto ju = nlohmann::json::parse(u.out);
    CHECK(ju["status"] == "Infeasible");
    CHECK(ju["alpha"].is_null());
}

TEST_CASE("cli trace csv") {
    TempDir t;
    const auto trace = t.path("trace.csv");
    const auto r = run({"solve", t.file("example.txt", kExample), "--delta-switch", "2", "--trace-out", trace});
    REQUIRE(r.code == 0);
    const auto rows = lines(read_file(trace));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].rfind("k,j,sigma_j,delta,peak_shaving,sum_omega_gamma,gamma,phi_1,", 0) == 0);
    CHECK(rows[0].find("omega_6") != std::string::npos);
    CHECK(rows[1].rfind("0,,1,,0,", 0) == 0);
    CHECK(rows[2].rfind("1,3,", 0) == 0);
    CHECK(rows[4].find(",2|3|4,") != std::string::npos);
}

TEST_CASE("cli gen is deterministic and writes a truth sidecar") {
    TempDir t;
    const auto a = t.path("a.txt"), b = t.path("b.txt");
    REQUIRE(run({"gen", "--n", "5", "--m", "3", "--seed", "11", "--out", a}).code == 0);
    REQUIRE(run({"gen", "--n", "5", "--m", "3", "--seed", "11", "--out", b}).code == 0);
    CHECK(lines(read_file(a)).size() == lines(read_file(b)).size());
    CHECK(read_file(a).substr(read_file(a).find('\n')) == read_file(b).substr(read_file(b).find('\n')));
    CHECK(read_file(a + ".truth") == read_file(b + ".truth"));
    const auto v = run({"verify", a});
    CHECK(v.code == 0);
    CHECK(v.out.find("agreement: 1/1") != std::string::npos);
}

TEST_CASE("cli verify over a seed range") {
    const auto r = run({"verify", "--seeds", "1..10", "--n", "5", "--m", "3"});
    CHECK(r.code == 0);
    CHECK(r.out.find("silent mismatches 0") != std::string::npos);
    CHECK(run({"verify"}).code == 1);
    CHECK(run({"verify", "--seeds", "x"}).code == 1);
}

TEST_CASE("cli locus points lie on the sphere") {
    TempDir t;
    const auto r = run({"locus", t.file("example.txt", kExample), "--j", "3", "--samples", "20", "--negative"});
    REQUIRE(r.code == 0);
    const auto rows = lines(r.out);
    int points = 0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        if (rows[k][0] == '#') continue;
        std::istringstream is(rows[k]);
        std::string cell;
        std::getline(is, cell, ',');
        double norm2 = 0.0;
        while (std::getline(is, cell, ',')) {
            const double v = std::stod(cell);
            norm2 += (1.0 - v) * (1.0 - v);
        }
        CHECK(std::abs(norm2 - 3.0) < 1e-8);
        ++points;
    }
    CHECK(points >= 40);
    CHECK(r.out.find("\ninf,") != std::string::npos);

    const auto p = run({"locus", t.file("example_b.txt", kExample), "--j", "3", "--samples", "2", "--path",
                        "--delta-switch", "2"});
    int path_rows = 0;
    for (const auto& l : lines(p.out))
        if (l.rfind("k=", 0) == 0) ++path_rows;
    CHECK(path_rows == 4);
    CHECK(run({"locus", t.file("example_c.txt", kExample), "--j", "7"}).code == 1);
}

TEST_CASE("cli identities") {
    TempDir t;
    const auto r = run({"identities", t.file("example.txt", kExample)});
    CHECK(r.code == 0);
    CHECK(r.out.find("identities hold") != std::string::npos);
    CHECK(run({"identities", t.file("zero.txt", "2 1\n1 1\n1\n1 0\n")}).code == 1);
}
