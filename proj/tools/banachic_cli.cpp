// Batch front door: fit L^p interpolation splines from constraint files,
// sample kernels / B-splines / triangle fields to CSV, and run the property
// suites. All numeric output uses 17 significant digits so identical inputs
// produce byte-identical files.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "banachic/brute_force.hpp"
#include "banachic/bsplines.hpp"
#include "banachic/core_maps.hpp"
#include "banachic/errors.hpp"
#include "banachic/functionals.hpp"
#include "banachic/kernels.hpp"
#include "banachic/plaplace2d.hpp"
#include "banachic/spline_solver.hpp"
#include "banachic/verify.hpp"

namespace {

using namespace banachic;

struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

std::string num17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file " + path);
    return out;
}

// ---------------------------------------------------------------- constraints

struct FitInput {
    ConstraintSet constraints;
    std::vector<DualFunctional> lambda_override;  // empty: default lambdas
};

FitInput read_constraints_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open constraint file " + path);
    std::string line;
    if (!std::getline(in, line)) throw input_error("empty constraint file " + path);
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "site,target")
        throw input_error("constraint CSV must start with header 'site,target'");
    std::vector<double> sites, targets;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b))
            throw input_error("bad constraint row at line " + std::to_string(lineno));
        try {
            sites.push_back(std::stod(a));
            targets.push_back(std::stod(b));
        } catch (const std::exception&) {
            throw input_error("bad number at line " + std::to_string(lineno) + " of " + path);
        }
    }
    if (sites.empty()) throw input_error("no constraints in " + path);
    return {ConstraintSet::at_sites(sites, targets), {}};
}

DualFunctional parse_functional(const nlohmann::json& arr) {
    if (!arr.is_array() || arr.empty()) throw input_error("functional must be a non-empty array");
    DualFunctional f;
    for (const auto& term : arr) {
        if (!term.contains("w") || !term.contains("t"))
            throw input_error("functional term needs fields 'w' and 't'");
        f.terms.push_back({term["w"].get<double>(), term["t"].get<double>()});
    }
    return f;
}

FitInput read_constraints_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open constraint file " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("JSON parse failure in " + path + ": " + e.what());
    }
    FitInput fit;
    if (!j.contains("targets")) throw input_error("constraint JSON needs 'targets'");
    fit.constraints.targets = j["targets"].get<std::vector<double>>();
    if (j.contains("functionals")) {
        for (const auto& arr : j["functionals"])
            fit.constraints.functionals.push_back(parse_functional(arr));
    } else if (j.contains("sites")) {
        for (double s : j["sites"].get<std::vector<double>>())
            fit.constraints.functionals.push_back(DualFunctional::dirac(s));
    } else {
        throw input_error("constraint JSON needs 'functionals' or 'sites'");
    }
    if (fit.constraints.functionals.size() != fit.constraints.targets.size())
        throw input_error("functional/target count mismatch in " + path);
    if (j.contains("lambdas")) {
        for (const auto& arr : j["lambdas"]) fit.lambda_override.push_back(parse_functional(arr));
    } else if (j.contains("lambda_nodes")) {
        for (double s : j["lambda_nodes"].get<std::vector<double>>())
            fit.lambda_override.push_back(DualFunctional::dirac(s));
    }
    return fit;
}

FitInput read_constraints(const std::string& path) {
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
        return read_constraints_json(path);
    return read_constraints_csv(path);
}

// Default lambdas: point evaluations at the first m distinct constraint
// sites. A JSON input may override them.
ProblemSpace make_space(double a, int m, double p, const FitInput& fit) {
    if (!fit.lambda_override.empty()) {
        if (static_cast<int>(fit.lambda_override.size()) != m)
            throw input_error("lambda override must list exactly m functionals");
        return ProblemSpace(a, m, p, fit.lambda_override);
    }
    std::vector<double> nodes;
    for (const DualFunctional& e : fit.constraints.functionals) {
        for (const DiracTerm& t : e.terms) {
            if (std::find(nodes.begin(), nodes.end(), t.site) == nodes.end())
                nodes.push_back(t.site);
            if (static_cast<int>(nodes.size()) == m) break;
        }
        if (static_cast<int>(nodes.size()) == m) break;
    }
    if (static_cast<int>(nodes.size()) < m)
        throw degeneracy_error("fewer than m distinct constraint sites for the default lambdas");
    return ProblemSpace(a, m, p, nodes);
}

// ---------------------------------------------------------------- serializers

std::string functional_json(const DualFunctional& f) {
    std::string s = "[";
    for (std::size_t i = 0; i < f.terms.size(); ++i) {
        if (i) s += ", ";
        s += "{\"t\": " + num17(f.terms[i].site) + ", \"w\": " + num17(f.terms[i].weight) + "}";
    }
    return s + "]";
}

std::string array_json(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += num17(v[i]);
    }
    return s + "]";
}

void write_solution_json(const std::string& path, const SplineSolution& sol, bool converged) {
    std::ofstream out = open_out(path);
    const ProblemSpace& sp = sol.space;
    out << "{\n";
    out << "  \"a\": " << num17(sp.a()) << ",\n";
    out << "  \"m\": " << sp.m() << ",\n";
    out << "  \"p\": " << num17(sp.p()) << ",\n";
    out << "  \"converged\": " << (converged ? "true" : "false") << ",\n";
    out << "  \"iterations\": " << sol.iterations << ",\n";
    out << "  \"residual\": " << num17(sol.residual) << ",\n";
    out << "  \"mu\": " << array_json(sol.mu) << ",\n";
    bool all_dirac = true;
    std::vector<double> sites;
    for (const DualFunctional& e : sol.constraints.functionals) {
        all_dirac = all_dirac && e.is_unit_dirac();
        if (e.is_unit_dirac()) sites.push_back(e.terms[0].site);
    }
    if (all_dirac) out << "  \"sites\": " << array_json(sites) << ",\n";
    out << "  \"functionals\": [";
    for (std::size_t l = 0; l < sol.constraints.functionals.size(); ++l) {
        if (l) out << ", ";
        out << functional_json(sol.constraints.functionals[l]);
    }
    out << "],\n";
    out << "  \"lambdas\": [";
    for (std::size_t k = 0; k < sp.lambdas().size(); ++k) {
        if (k) out << ", ";
        out << functional_json(sp.lambdas()[k]);
    }
    out << "],\n";
    out << "  \"targets\": " << array_json(sol.constraints.targets) << "\n";
    out << "}\n";
}

void write_svg(const std::string& path, const std::vector<double>& xs,
               const std::vector<double>& ys) {
    const double width = 800.0, height = 500.0, margin = 40.0;
    double xmin = xs.front(), xmax = xs.back();
    double ymin = ys[0], ymax = ys[0];
    for (double y : ys) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 1.0;
        ymax += 1.0;
    }
    auto px = [&](double x) {
        return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin);
    };
    auto py = [&](double y) {
        return height - margin - (y - ymin) / (ymax - ymin) * (height - 2 * margin);
    };
    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 500\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n";
    out << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    char buf[64];
    for (std::size_t i = 0; i < xs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(xs[i]), py(ys[i]));
        out << buf;
    }
    out << "\"/>\n</svg>\n";
}

// ---------------------------------------------------------------- subcommands

struct CommonOpts {
    double a = 1.0;
    int m = 2;
    double p = 2.0;
    std::string in_path;
    std::string out_path = "out";
    int samples = 512;
    int grid = 32;
    double tol = 0.0;  // 0: per-command default
    bool svg = false;
};

void sample_solution(const SplineSolution& sol, int samples, const std::string& csv_path,
                     bool svg) {
    const double a = sol.space.a();
    std::ofstream out = open_out(csv_path);
    out << "t,sigma,sigma_m\n";
    std::vector<double> xs, ys;
    for (int i = 0; i < samples; ++i) {
        const double t = -a + (i + 0.5) * (2.0 * a) / samples;
        const double v = spline_eval(sol, t);
        const double d = spline_deriv_m(sol, t);
        out << num17(t) << "," << num17(v) << "," << num17(d) << "\n";
        xs.push_back(t);
        ys.push_back(v);
    }
    if (svg) write_svg(csv_path.substr(0, csv_path.size() - 4) + ".svg", xs, ys);
}

int cmd_fit(const CommonOpts& o) {
    const FitInput fit = read_constraints(o.in_path);
    const ProblemSpace space = make_space(o.a, o.m, o.p, fit);
    SolveOptions sopt;
    if (o.tol > 0.0) sopt.tol = o.tol;
    try {
        const SplineSolution sol = solve(space, fit.constraints, sopt);
        write_solution_json(o.out_path + ".json", sol, true);
        sample_solution(sol, o.samples, o.out_path + ".csv", o.svg);
        std::cout << "fit: converged in " << sol.iterations
                  << " iterations, residual = " << num17(sol.residual) << "\n";
        return 0;
    } catch (const convergence_error& e) {
        SplineSolution sol{space, fit.constraints, e.best_point, -1, e.residual, 0.0, true};
        write_solution_json(o.out_path + ".json", sol, false);
        std::cout << "fit: no convergence, residual = " << num17(e.residual) << "\n";
        return 3;
    }
}

int cmd_eval(const CommonOpts& o) {
    std::ifstream in(o.in_path);
    if (!in) throw input_error("cannot open solution file " + o.in_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw input_error("JSON parse failure in " + o.in_path + ": " + e.what());
    }
    for (const char* key : {"a", "m", "p", "mu", "functionals", "lambdas", "targets"})
        if (!j.contains(key)) throw input_error("solution JSON missing field '" + std::string(key) + "'");
    std::vector<DualFunctional> lambdas;
    for (const auto& arr : j["lambdas"]) lambdas.push_back(parse_functional(arr));
    const ProblemSpace space(j["a"].get<double>(), j["m"].get<int>(), j["p"].get<double>(),
                             lambdas);
    ConstraintSet cons;
    for (const auto& arr : j["functionals"]) cons.functionals.push_back(parse_functional(arr));
    cons.targets = j["targets"].get<std::vector<double>>();
    SplineSolution sol{space, cons, j["mu"].get<std::vector<double>>(), 0, 0.0, 0.0, false};
    if (sol.mu.size() != cons.size()) throw input_error("mu/functional count mismatch");
    sample_solution(sol, o.samples, o.out_path + ".csv", o.svg);
    std::cout << "eval: wrote " << o.samples << " samples\n";
    return 0;
}

int cmd_kernel(const CommonOpts& o, const std::string& which) {
    if (o.grid < 1) throw input_error("kernel: grid must be >= 1");
    if (which != "A" && which != "C") throw input_error("kernel: --which must be A or C");
    std::vector<double> nodes(o.m);
    for (int k = 0; k < o.m; ++k) nodes[k] = -o.a + 2.0 * o.a * (k + 1) / (o.m + 1);
    const ProblemSpace space(o.a, o.m, o.p, nodes);
    const KernelContext ctx(space);
    std::ofstream out = open_out(o.out_path);
    out << "s,t,value\n";
    for (int i = 0; i < o.grid; ++i)
        for (int j = 0; j < o.grid; ++j) {
            const double s = -o.a + (i + 0.5) * (2.0 * o.a) / o.grid;
            const double t = -o.a + (j + 0.5) * (2.0 * o.a) / o.grid;
            const double v = (which == "A")
                                 ? kernel_Ap(ctx, s, t)
                                 : kernel_Cp(ctx, DualFunctional::dirac(s),
                                             DualFunctional::dirac(t));
            out << num17(s) << "," << num17(t) << "," << num17(v) << "\n";
        }
    return 0;
}

int cmd_bspline(const CommonOpts& o, double h, double t0, const std::string& knots_arg) {
    std::optional<BSplineSpec> spec;
    try {
        if (!knots_arg.empty()) {
            std::vector<double> knots;
            std::istringstream ss(knots_arg);
            std::string tok;
            while (std::getline(ss, tok, ',')) knots.push_back(std::stod(tok));
            spec.emplace(o.m, std::move(knots), o.p);
        } else {
            spec.emplace(BSplineSpec::uniform(o.m, t0, h, o.p));
        }
    } catch (const configuration_error& e) {
        // non-uniform or miscounted knots are an input problem here
        throw input_error(e.what());
    } catch (const std::invalid_argument&) {
        throw input_error("bspline: bad knot list '" + knots_arg + "'");
    }

    std::ofstream out = open_out(o.out_path + ".csv");
    out << "t,q2,qp\n";
    const double lo = spec->knots.front(), hi = spec->knots.back();
    const double pad = 0.25 * (hi - lo);
    for (int i = 0; i < o.samples; ++i) {
        const double t = lo - pad + (i + 0.5) * (hi - lo + 2 * pad) / o.samples;
        out << num17(t) << "," << num17(bspline_classical(*spec, t)) << ","
            << num17(bspline_banachic(*spec, t)) << "\n";
    }

    const BSplineIdentityReport rep = bspline_identity_report(*spec);
    std::ofstream rout = open_out(o.out_path + "_report.json");
    rout << "{\n";
    rout << "  \"m\": " << spec->m << ",\n";
    rout << "  \"h\": " << num17(spec->h) << ",\n";
    rout << "  \"p\": " << num17(o.p) << ",\n";
    rout << "  \"sup\": " << num17(rep.sup) << ",\n";
    rout << "  \"sup_bound\": " << num17(rep.sup_bound) << ",\n";
    rout << "  \"sup_within_bound\": " << (rep.sup_within_bound ? "true" : "false") << ",\n";
    rout << "  \"nonnegative\": " << (rep.nonnegative ? "true" : "false") << ",\n";
    rout << "  \"integral_p1\": " << num17(rep.integral_p1) << ",\n";
    rout << "  \"integral_ok\": " << (rep.integral_ok ? "true" : "false") << ",\n";
    rout << "  \"lattice_sum\": " << num17(rep.lattice_sum) << ",\n";
    rout << "  \"lattice_ok\": " << (rep.lattice_ok ? "true" : "false") << ",\n";
    rout << "  \"dd_lhs\": " << num17(rep.dd_lhs) << ",\n";
    rout << "  \"dd_rhs\": " << num17(rep.dd_rhs) << ",\n";
    rout << "  \"dd_ok\": " << (rep.dd_ok ? "true" : "false") << "\n";
    rout << "}\n";
    if (!rep.all_ok()) {
        std::cout << "bspline: property report has failures\n";
        return 5;
    }
    return 0;
}

GridField read_phi(const TriangleGrid& grid, const std::string& path) {
    GridField phi = GridField::zeros(grid);
    if (path.empty()) {
        const int c = grid.subdivisions() / 3;
        phi.at(grid, c, c) = 1.0;  // source on the symmetry axis
        return phi;
    }
    std::ifstream in(path);
    if (!in) throw input_error("cannot open phi file " + path);
    std::string line;
    if (!std::getline(in, line)) throw input_error("empty phi file");
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line != "i,j,phi") throw input_error("phi CSV must start with header 'i,j,phi'");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.size() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b, c;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
            throw input_error("bad phi row at line " + std::to_string(lineno));
        try {
            const int i = std::stoi(a), j = std::stoi(b);
            if (!grid.in_grid(i, j))
                throw input_error("phi node (" + a + "," + b + ") outside the grid");
            phi.at(grid, i, j) = std::stod(c);
        } catch (const input_error&) {
            throw;
        } catch (const std::exception&) {
            throw input_error("bad number at line " + std::to_string(lineno) + " of " + path);
        }
    }
    return phi;
}

int cmd_pde(const CommonOpts& o, int max_iter) {
    const TriangleGrid grid(o.grid);
    const GridField phi = read_phi(grid, o.in_path);
    PdeSolveOptions popt;
    if (o.tol > 0.0) popt.tol = o.tol;
    popt.max_iter = max_iter;
    const GridField u = solve_kernel(grid, phi, o.p, popt);
    std::ofstream out = open_out(o.out_path);
    out << "i,j,x,y,u\n";
    for (int j = 0; j <= grid.subdivisions(); ++j)
        for (int i = 0; i + j <= grid.subdivisions(); ++i)
            out << i << "," << j << "," << num17(i * grid.h()) << "," << num17(j * grid.h())
                << "," << num17(u.at(grid, i, j)) << "\n";
    std::cout << "pde: n = " << grid.subdivisions() << ", p = " << num17(o.p)
              << ", residual = " << num17(residual(grid, u, phi, o.p)) << "\n";
    if (o.p == 2.0) {
        const GridField ref = plaplace_linear_reference(grid, phi);
        double gap = 0.0;
        for (int k = 0; k < grid.node_count(); ++k)
            gap = std::max(gap, std::abs(u.values[k] - ref.values[k]));
        std::cout << "pde: linear-reference sup difference = " << num17(gap) << "\n";
    }
    return 0;
}

int cmd_verify() {
    const std::vector<Check> checks = verify_all();
    std::size_t failed = 0;
    for (const Check& c : checks) {
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  value=" << num17(c.value)
                  << " threshold=" << num17(c.threshold) << "\n";
        if (!c.pass) ++failed;
    }
    std::cout << (failed ? "verify: FAILED " : "verify: OK ") << (checks.size() - failed) << "/"
              << checks.size() << " checks passed\n";
    return failed ? 5 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"banachic: L^p spline kernels, banachic B-splines, and the triangle "
                 "p-Dirichlet kernel"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string which = "A";
    double h = 1.0, t0 = 0.0;
    std::string knots_arg;
    int max_iter = 200000;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--a", o.a, "interval half-width");
        sub->add_option("--m", o.m, "derivative order");
        sub->add_option("--p", o.p, "exponent p > 1");
        sub->add_option("--in", o.in_path, "input file");
        sub->add_option("--out", o.out_path, "output path (or prefix)");
        sub->add_option("--samples", o.samples, "curve sample count");
        sub->add_option("--grid", o.grid, "grid size");
        sub->add_option("--tol", o.tol, "solver tolerance");
        sub->add_flag("--svg", o.svg, "also write an SVG plot");
    };

    CLI::App* fit = app.add_subcommand("fit", "solve the L^p interpolation problem");
    add_common(fit);
    CLI::App* eval = app.add_subcommand("eval", "sample a previously fitted spline");
    add_common(eval);
    CLI::App* kernel = app.add_subcommand("kernel", "sample a kernel on a grid");
    add_common(kernel);
    kernel->add_option("--which", which, "A or C");
    CLI::App* bspline = app.add_subcommand("bspline", "sample a banachic B-spline and report");
    add_common(bspline);
    bspline->add_option("--step", h, "uniform knot step");
    bspline->add_option("--t0", t0, "first knot");
    bspline->add_option("--knots", knots_arg, "comma-separated knot list (m+1 uniform knots)");
    CLI::App* pde = app.add_subcommand("pde", "triangle p-Dirichlet kernel field");
    add_common(pde);
    pde->add_option("--max-iter", max_iter, "iteration budget");
    CLI::App* verify = app.add_subcommand("verify", "run all property suites");
    (void)verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(o);
        if (eval->parsed()) return cmd_eval(o);
        if (kernel->parsed()) return cmd_kernel(o, which);
        if (bspline->parsed()) return cmd_bspline(o, h, t0, knots_arg);
        if (pde->parsed()) return cmd_pde(o, max_iter);
        return cmd_verify();
    } catch (const degeneracy_error& e) {
        std::cerr << "error (degeneracy): " << e.what() << "\n";
        return 4;
    } catch (const convergence_error& e) {
        std::cerr << "error (no convergence): " << e.what() << "\n";
        return 3;
    } catch (const input_error& e) {
        std::cerr << "error (input): " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
