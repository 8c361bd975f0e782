// Exit-code and file-format checks for the command-line tool. Takes the
// binary path and the bundled data directory on the command line.

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
    std::printf("%s %s\n", ok ? "[PASS]" : "[FAIL]", what.c_str());
    if (!ok) ++failures;
}

int run(const std::string& cmd) {
    const int rc = std::system(cmd.c_str());
    if (rc == -1) return -1;
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

std::vector<std::vector<double>> parse_csv(const std::string& path, std::size_t cols) {
    std::ifstream in(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() == cols) rows.push_back(row);
    }
    return rows;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: cli_checks <cli-binary> <data-dir>\n");
        return 2;
    }
    const std::string cli = argv[1];
    const std::string data = argv[2];
    namespace fs = std::filesystem;
    const fs::path work = fs::current_path() / "cli_checks_tmp";
    fs::remove_all(work);
    fs::create_directories(work);
    const std::string w = work.string();

    // fit on the bundled example
    expect(run(cli + " fit --in " + data + "/constraints_example.csv --m 2 --p 3 --out " + w +
               "/fit --svg > " + w + "/fit.log") == 0,
           "fit on bundled example exits 0");
    expect(fs::exists(work / "fit.json") && fs::exists(work / "fit.csv") &&
               fs::exists(work / "fit.svg"),
           "fit writes json, csv, svg");
    const std::string json = slurp(w + "/fit.json");
    expect(json.find("\"converged\": true") != std::string::npos, "fit json reports convergence");
    expect(count_lines(slurp(w + "/fit.csv")) == 513, "fit csv has header plus 512 samples");

    // eval reproduces the fitted curve byte for byte
    expect(run(cli + " eval --in " + w + "/fit.json --out " + w + "/eval > /dev/null") == 0,
           "eval on fit output exits 0");
    expect(slurp(w + "/eval.csv") == slurp(w + "/fit.csv"), "eval csv identical to fit csv");

    // zero targets give the flat zero curve
    {
        std::ofstream z(w + "/zero.csv");
        z << "site,target\n-0.5,0\n0.0,0\n0.5,0\n";
    }
    expect(run(cli + " fit --in " + w + "/zero.csv --out " + w + "/zeroed > /dev/null") == 0,
           "fit with zero targets exits 0");
    {
        double worst = 0.0;
        for (const auto& row : parse_csv(w + "/zeroed.csv", 3))
            worst = std::max(worst, std::max(std::abs(row[1]), std::abs(row[2])));
        expect(worst <= 1e-12, "zero-target curve is identically zero");
    }

    // unreachable tolerance: diagnostics still written, exit 3
    expect(run(cli + " fit --in " + data + "/constraints_example.csv --p 3 --tol 1e-30 --out " +
               w + "/hard > /dev/null 2>&1") == 3,
           "unreachable tolerance exits 3");
    expect(slurp(w + "/hard.json").find("\"converged\": false") != std::string::npos,
           "non-converged fit still writes diagnostics json");

    // degenerate constraints: duplicated site
    {
        std::ofstream d(w + "/dup.csv");
        d << "site,target\n0.25,1\n0.25,2\n0.7,0\n";
    }
    expect(run(cli + " fit --in " + w + "/dup.csv --out " + w + "/dup 2> /dev/null") == 4,
           "duplicated constraint site exits 4");

    // parse errors
    {
        std::ofstream b(w + "/bad.csv");
        b << "site,target\nnot,a,number\n";
    }
    expect(run(cli + " fit --in " + w + "/bad.csv --out " + w + "/bad 2> /dev/null") == 2,
           "garbage constraint file exits 2");
    expect(run(cli + " fit --in " + w + "/missing.csv --out " + w + "/x 2> /dev/null") == 2,
           "missing input file exits 2");

    // JSON constraints: general Dirac combinations and a lambda override
    {
        std::ofstream j(w + "/gencons.json");
        j << "{\n"
          << "  \"functionals\": [[{\"w\": 1.0, \"t\": -0.5}],\n"
          << "                  [{\"w\": 1.0, \"t\": 0.4}, {\"w\": -1.0, \"t\": -0.5}],\n"
          << "                  [{\"w\": 2.0, \"t\": 0.75}, {\"w\": 0.5, \"t\": 0.0}]],\n"
          << "  \"targets\": [0.3, -0.2, 1.0],\n"
          << "  \"lambda_nodes\": [-0.5, 0.4]\n"
          << "}\n";
    }
    expect(run(cli + " fit --in " + w + "/gencons.json --p 3 --out " + w +
               "/genfit > /dev/null") == 0,
           "fit with JSON Dirac-combination constraints exits 0");
    expect(run(cli + " eval --in " + w + "/genfit.json --out " + w + "/genfine > /dev/null") == 0,
           "eval on the general-functional solution exits 0");
    expect(run(cli + " eval --in " + w + "/gencons.json --out " + w + "/genx 2> /dev/null") == 2,
           "eval on a constraint file (no mu) exits 2");

    // kernel sampling
    expect(run(cli + " kernel --m 1 --which C --grid 6 --out " + w + "/ker.csv") == 0,
           "kernel sampling exits 0");
    {
        const auto rows = parse_csv(w + "/ker.csv", 3);
        expect(rows.size() == 36, "kernel csv has grid*grid rows");
        double worst = 0.0;
        for (const auto& row : rows)
            if (row[0] > 0.0 && row[1] > 0.0)
                worst = std::max(worst, std::abs(row[2] - std::min(row[0], row[1])));
        expect(worst <= 1e-9, "order-1 kernel table matches min(s,t) in the positive quadrant");
    }
    expect(run(cli + " kernel --grid 1 --out " + w + "/ker1.csv") == 0, "single-cell grid runs");
    expect(count_lines(slurp(w + "/ker1.csv")) == 2, "single-cell grid gives one value row");
    expect(run(cli + " kernel --grid 0 --out " + w + "/ker0.csv 2> /dev/null") == 2,
           "bad grid spec exits 2");

    // bspline report
    expect(run(cli + " bspline --m 2 --p 3 --step 1 --out " + w + "/bsp > /dev/null") == 0,
           "bspline report exits 0");
    expect(slurp(w + "/bsp_report.json").find("\"integral_ok\": true") != std::string::npos,
           "bspline report integral flag set");
    expect(run(cli + " bspline --m 2 --knots 0,1,3 --out " + w + "/bspbad 2> /dev/null") == 2,
           "non-uniform knots exit 2");

    // pde
    {
        std::ofstream z(w + "/phi0.csv");
        z << "i,j,phi\n";
    }
    expect(run(cli + " pde --grid 8 --p 3 --in " + w + "/phi0.csv --out " + w +
               "/pde0.csv > /dev/null") == 0,
           "pde with zero phi exits 0");
    {
        double worst = 0.0;
        for (const auto& row : parse_csv(w + "/pde0.csv", 5))
            worst = std::max(worst, std::abs(row[4]));
        expect(worst == 0.0, "pde zero source gives the zero field");
    }
    expect(run(cli + " pde --grid 1 --out " + w + "/pdebad.csv 2> /dev/null") == 2,
           "degenerate pde grid exits 2");

    std::printf("cli_checks: %d failure(s)\n", failures);
    return failures == 0 ? 0 : 1;
}
