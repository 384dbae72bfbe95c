#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

std::string bin_path() {
    const char* p = std::getenv("DTFIM_BIN");
    REQUIRE_MESSAGE(p != nullptr, "DTFIM_BIN must point at the dtfim binary");
    return p;
}

std::string tmp_dir() {
    const char* p = std::getenv("DTFIM_TMP");
    return p ? p : ".";
}

int run(const std::string& args, const std::string& out_file = "") {
    std::string cmd = bin_path() + " " + args;
    if (!out_file.empty()) cmd += " --out " + out_file;
    cmd += " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Csv {
    std::string comment;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv out;
    std::istringstream ss(text);
    std::string line;
    bool header_done = false;
    while (std::getline(ss, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (out.comment.empty()) out.comment = line;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!header_done) {
            out.columns = cells;
            header_done = true;
        } else {
            out.rows.push_back(cells);
        }
    }
    return out;
}

int column(const Csv& csv, const std::string& name) {
    for (size_t i = 0; i < csv.columns.size(); ++i)
        if (csv.columns[i] == name) return static_cast<int>(i);
    return -1;
}

}  // namespace

TEST_CASE("fixed-points: dark state, Bloch value, bistable triple") {
    const std::string f = tmp_dir() + "/fp.csv";
    CHECK(run("fixed-points --delta 3 --omega 0 --vint 20", f) == 0);
    Csv csv = parse_csv(slurp(f));
    REQUIRE(csv.rows.size() == 1);
    CHECK(std::stod(csv.rows[0][column(csv, "m")]) == doctest::Approx(-1.0).epsilon(1e-12));

    CHECK(run("fixed-points --delta 2 --omega 2 --vint 0", f) == 0);
    csv = parse_csv(slurp(f));
    REQUIRE(csv.rows.size() == 1);
    CHECK(std::stod(csv.rows[0][column(csv, "m")]) == doctest::Approx(-0.68).epsilon(1e-10));

    CHECK(run("fixed-points --delta 7 --omega 2 --vint 20", f) == 0);
    csv = parse_csv(slurp(f));
    REQUIRE(csv.rows.size() == 3);
    CHECK(csv.rows[0][column(csv, "branch")] == "lower");
    CHECK(csv.rows[1][column(csv, "branch")] == "middle");
    CHECK(csv.rows[2][column(csv, "branch")] == "upper");
    CHECK(csv.rows[0][column(csv, "stable")] == "1");
    CHECK(csv.rows[1][column(csv, "stable")] == "0");
    CHECK(csv.rows[2][column(csv, "stable")] == "1");
}

TEST_CASE("exit codes: config errors and resource guard") {
    CHECK(run("fixed-points --delta 1 --gamma 0") == 1);
    CHECK(run("scan --delta 1") == 1);                      // missing --sweep
    CHECK(run("scan --sweep bogus:0:1:5") == 1);            // bad axis
    CHECK(run("squeeze-map --grid 0:1:1,0:1:4") == 1);      // steps < 2
    CHECK(run("oracle --natoms 9 --omega 2 --vint 1") == 3);
    CHECK(run("converge --natoms 9 --omega 2 --vint 1") == 3);
    CHECK(run("definitely-not-a-subcommand") == 1);
}

TEST_CASE("scan output: deterministic, complete and flagged") {
    const std::string f1 = tmp_dir() + "/scan1.csv";
    const std::string f2 = tmp_dir() + "/scan2.csv";
    const std::string args =
        "scan --omega 2 --vint 20 --sweep delta:3:10:181 --natoms 100 --seed 42";
    CHECK(run(args, f1) == 0);
    CHECK(run(args, f2) == 0);
    CHECK(slurp(f1) == slurp(f2));  // byte-identical reruns

    const Csv csv = parse_csv(slurp(f1));
    CHECK(csv.comment.find("subcommand=scan") != std::string::npos);
    CHECK(csv.comment.find("omega=2") != std::string::npos);
    CHECK(csv.comment.find("seed=42") != std::string::npos);
    REQUIRE(csv.columns.size() == 10);
    const int c_stable = column(csv, "stable");
    const int c_xi2 = column(csv, "xi2");
    const int c_flags = column(csv, "flags");
    int unstable_rows = 0;
    double min_xi2 = 2.0;
    for (const auto& row : csv.rows) {
        if (row[c_stable] == "0") {
            ++unstable_rows;
            CHECK(row[c_flags] == "unstable");
        } else if (row[c_flags] == "ok") {
            min_xi2 = std::min(min_xi2, std::stod(row[c_xi2]));
        }
    }
    CHECK(unstable_rows > 0);  // the sweep crosses the bistable window
    CHECK(min_xi2 < 0.75);     // deep squeezing near the lower critical point
}

TEST_CASE("scan with Omega = 0 gives xi2 = 1 everywhere") {
    const std::string f = tmp_dir() + "/scan0.csv";
    CHECK(run("scan --omega 0 --vint 5 --sweep delta:-2:2:11", f) == 0);
    const Csv csv = parse_csv(slurp(f));
    const int c_xi2 = column(csv, "xi2");
    REQUIRE(csv.rows.size() == 11);
    for (const auto& row : csv.rows)
        CHECK(std::stod(row[c_xi2]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("squeeze-map boundaries and JSON mirror") {
    const std::string f = tmp_dir() + "/map.csv";
    CHECK(run("squeeze-map --delta 0 --grid 0:10:5,0:4:5", f) == 0);
    const Csv csv = parse_csv(slurp(f));
    REQUIRE(csv.rows.size() == 25);
    const int c_v = column(csv, "vint");
    const int c_o = column(csv, "omega");
    const int c_xi2 = column(csv, "xi2");
    for (const auto& row : csv.rows) {
        const double v = std::stod(row[c_v]);
        const double o = std::stod(row[c_o]);
        const double xi2 = std::stod(row[c_xi2]);
        if (v == 0.0 || o == 0.0)
            CHECK(xi2 == doctest::Approx(1.0).epsilon(1e-10));
        else
            CHECK(xi2 < 1.0);
    }

    const std::string j = tmp_dir() + "/map.json";
    CHECK(run("squeeze-map --delta 0 --grid 0:10:5,0:4:5 --format json", j) == 0);
    const auto doc = nlohmann::json::parse(slurp(j));
    CHECK(doc["tool"] == "dtfim");
    CHECK(doc["subcommand"] == "squeeze-map");
    REQUIRE(doc["rows"].size() == 25);
    CHECK(doc["columns"].size() == 4);
    // same numbers as the CSV
    CHECK(doc["rows"][0][2].get<double>() ==
          doctest::Approx(std::stod(csv.rows[0][c_xi2])).epsilon(1e-15));
}

TEST_CASE("oracle subcommand compares exact and analytic at V = 0") {
    const std::string f = tmp_dir() + "/oracle.csv";
    CHECK(run("oracle --delta 2 --omega 2 --vint 0 --natoms 4", f) == 0);
    const Csv csv = parse_csv(slurp(f));
    const int c_dev = column(csv, "abs_dev");
    REQUIRE(csv.rows.size() == 10);  // 3 means + 6 covariances + xi2
    for (const auto& row : csv.rows) CHECK(std::stod(row[c_dev]) <= 1e-8);
}

TEST_CASE("oracle subcommand at Omega = 0: both xi2 columns are exactly 1") {
    const std::string f = tmp_dir() + "/oracle0.csv";
    CHECK(run("oracle --delta 1 --omega 0 --vint 3 --natoms 5", f) == 0);
    const Csv csv = parse_csv(slurp(f));
    const auto& last = csv.rows.back();
    REQUIRE(last[column(csv, "quantity")] == "xi2");
    CHECK(std::stod(last[column(csv, "exact")]) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::stod(last[column(csv, "analytic")]) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("converge subcommand emits the fit footnote") {
    const std::string f = tmp_dir() + "/conv.csv";
    CHECK(run("converge --delta 0 --omega 2 --vint 1 --natoms 4", f) == 0);
    const std::string text = slurp(f);
    CHECK(text.find("# fitted_exponent=") != std::string::npos);
    const Csv csv = parse_csv(text);
    REQUIRE(csv.rows.size() == 3);  // N = 2, 3, 4
    const int c_dev = column(csv, "dev_xi2");
    CHECK(std::stod(csv.rows[0][c_dev]) > std::stod(csv.rows[2][c_dev]));
}

TEST_CASE("config file merges under command-line flags") {
    const std::string cfg = tmp_dir() + "/run.cfg";
    {
        std::ofstream f(cfg);
        f << "omega=2\nvint=0\ndelta=99\n";
    }
    const std::string f = tmp_dir() + "/cfg.csv";
    // --delta on the command line wins over delta=99 from the file.
    CHECK(run("fixed-points --config " + cfg + " --delta 2", f) == 0);
    const Csv csv = parse_csv(slurp(f));
    REQUIRE(csv.rows.size() == 1);
    CHECK(std::stod(csv.rows[0][column(csv, "m")]) == doctest::Approx(-0.68).epsilon(1e-10));
}
