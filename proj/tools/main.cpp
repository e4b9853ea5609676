#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <jbsde/jbsde.hpp>

namespace {

// Step values accept plain decimals and base^exponent shorthand, so a study
// over {2^-4 ... 2^-8} does not need decimal expansions on the command line.
double parse_step_token(const std::string& token)
{
    const std::size_t caret = token.find('^');
    if (caret == std::string::npos) return std::stod(token);
    const double base = std::stod(token.substr(0, caret));
    const double expo = std::stod(token.substr(caret + 1));
    return std::pow(base, expo);
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
}

struct CommonOptions {
    std::string problem = "example1";
    double delta = 1.0;
    double T = 1.0;
    double a = 0.0;
    double b = 1.0;
    double dx = 0.01;
    int N = 64;
    jbsde::SolverConfig solver;
    std::string boundary = "extrapolate";

    void apply_boundary()
    {
        if (boundary == "extrapolate") {
            solver.boundary = jbsde::Boundary::extrapolate;
        } else if (boundary == "analytic") {
            solver.boundary = jbsde::Boundary::analytic;
        } else {
            throw std::invalid_argument("boundary must be 'extrapolate' or 'analytic'");
        }
    }
};

void add_common_options(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--problem", o.problem, "Benchmark problem name (example1, example2)");
    cmd->add_option("--delta", o.delta, "Half-width of the uniform jump-size support");
    cmd->add_option("--T", o.T, "Time horizon");
    cmd->add_option("--a", o.a, "Left end of the interest region");
    cmd->add_option("--b", o.b, "Right end of the interest region");
    cmd->add_option("--dx", o.dx, "Spatial mesh width");
    cmd->add_option("--N", o.N, "Number of time steps");
    cmd->add_option("--degree", o.solver.degree, "Interpolation degree (1, 2 or 3)")
        ->check(CLI::IsMember({1, 2, 3}));
    cmd->add_option("--my", o.solver.M_y, "Jump truncation for the solution expectations");
    cmd->add_option("--mf", o.solver.M_f, "Jump truncation for the generator expectations");
    cmd->add_option("--gh", o.solver.n_gh, "Gauss-Hermite rule size");
    cmd->add_option("--gl", o.solver.n_gl, "Gauss-Legendre rule size");
    cmd->add_option("--pad", o.solver.pad, "Mesh padding beyond [a, b]; negative derives it");
    cmd->add_option("--boundary", o.boundary, "Out-of-mesh policy: extrapolate or analytic")
        ->check(CLI::IsMember({"extrapolate", "analytic"}));
    cmd->add_option("--picard-tol", o.solver.picard_tol, "Picard residual tolerance");
    cmd->add_option("--picard-iters", o.solver.picard_max_iters, "Picard iteration cap");
    cmd->add_option("--workers", o.solver.workers, "Worker threads (0 = hardware)");
}

int run_solve(const CommonOptions& opts, const std::string& out_path)
{
    const jbsde::FBSDEProblem problem = jbsde::registry_get(opts.problem, opts.delta, opts.T);
    jbsde::SolverConfig cfg = opts.solver;
    if (cfg.pad < 0.0) cfg.pad = jbsde::default_padding(problem, opts.a, opts.b, cfg.M_y);

    const jbsde::SpatialMesh mesh(opts.a, opts.b, opts.dx, cfg.pad);
    const jbsde::TimePartition partition(opts.T, opts.N);
    const jbsde::SolveResult result = jbsde::solve(problem, mesh, partition, cfg);

    nlohmann::json layer;
    {
        nlohmann::json xs = nlohmann::json::array();
        nlohmann::json ys = nlohmann::json::array();
        nlohmann::json zs = nlohmann::json::array();
        nlohmann::json gs = nlohmann::json::array();
        const double slack = 1e-9 * std::max({1.0, std::abs(opts.a), std::abs(opts.b)});
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double x = mesh.points[i];
            if (x < opts.a - slack || x > opts.b + slack) continue;
            xs.push_back(x);
            ys.push_back(result.layer0.y[i]);
            zs.push_back(result.layer0.z[i]);
            gs.push_back(result.layer0.gamma[i]);
        }
        layer = {{"x", xs}, {"y", ys}, {"z", zs}, {"gamma", gs}};
    }

    nlohmann::json doc = {{"problem", problem.name},
                          {"config",
                           {{"delta", opts.delta},
                            {"T", opts.T},
                            {"a", opts.a},
                            {"b", opts.b},
                            {"dx", opts.dx},
                            {"N", opts.N},
                            {"solver", jbsde::to_json(cfg)}}},
                          {"diagnostics",
                           {{"max_picard_iterations", result.diagnostics.max_picard_iterations},
                            {"atoms_per_point_y", result.diagnostics.atoms_per_point_y},
                            {"atoms_per_point_f", result.diagnostics.atoms_per_point_f},
                            {"wall_seconds", result.diagnostics.wall_seconds}}},
                          {"layer", layer}};

    if (problem.has_exact()) {
        const jbsde::SolutionLayer truth = jbsde::exact_layer(problem, mesh, 0.0);
        const jbsde::ErrorTriple err =
            jbsde::error_linf(result.layer0, truth, mesh, opts.a, opts.b);
        doc["errors"] = {{"e_y", err.e_y}, {"e_z", err.e_z}, {"e_gamma", err.e_gamma}};
    }

    write_text(out_path, doc.dump(2));
    return 0;
}

int run_converge(const CommonOptions& opts, const CLI::App* cmd, const std::string& preset,
                 const std::string& axis_in, const std::vector<std::string>& value_tokens,
                 const std::string& out_path, const std::string& csv_path)
{
    std::string problem = opts.problem;
    std::string axis = axis_in;
    std::vector<double> values;
    jbsde::StudyConfig base;

    if (!preset.empty()) {
        const int degree_override =
            cmd->get_option("--degree")->count() ? opts.solver.degree : 0;
        const jbsde::StudyPreset p = jbsde::table_preset(preset, degree_override);
        problem = p.problem;
        axis = p.axis;
        values = p.values;
        base = p.config;
        if (cmd->get_option("--problem")->count()) problem = opts.problem;
        if (cmd->get_option("--axis")->count()) axis = axis_in;
        if (cmd->get_option("--N")->count()) base.N = opts.N;
        if (cmd->get_option("--dx")->count()) base.dx = opts.dx;
        if (cmd->get_option("--delta")->count()) base.delta = opts.delta;
        if (cmd->get_option("--T")->count()) base.T = opts.T;
        if (cmd->get_option("--a")->count()) base.a = opts.a;
        if (cmd->get_option("--b")->count()) base.b = opts.b;
        if (cmd->get_option("--my")->count()) base.solver.M_y = opts.solver.M_y;
        if (cmd->get_option("--mf")->count()) base.solver.M_f = opts.solver.M_f;
        if (cmd->get_option("--gh")->count()) base.solver.n_gh = opts.solver.n_gh;
        if (cmd->get_option("--gl")->count()) base.solver.n_gl = opts.solver.n_gl;
        if (cmd->get_option("--pad")->count()) base.solver.pad = opts.solver.pad;
        if (cmd->get_option("--boundary")->count()) base.solver.boundary = opts.solver.boundary;
        if (cmd->get_option("--picard-tol")->count())
            base.solver.picard_tol = opts.solver.picard_tol;
        if (cmd->get_option("--picard-iters")->count())
            base.solver.picard_max_iters = opts.solver.picard_max_iters;
        if (cmd->get_option("--workers")->count()) base.solver.workers = opts.solver.workers;
    } else {
        base.delta = opts.delta;
        base.T = opts.T;
        base.a = opts.a;
        base.b = opts.b;
        base.dx = opts.dx;
        base.N = opts.N;
        base.solver = opts.solver;
    }

    if (!value_tokens.empty()) {
        values.clear();
        for (const std::string& tok : value_tokens) values.push_back(parse_step_token(tok));
    }
    if (axis.empty()) throw std::invalid_argument("converge: --axis or --preset is required");
    if (values.empty()) throw std::invalid_argument("converge: --values or --preset is required");

    const jbsde::ConvergenceReport report = jbsde::run_study(problem, axis, values, base);
    write_text(out_path, jbsde::to_json(report).dump(2));
    if (!csv_path.empty()) write_text(csv_path, jbsde::to_csv(report));

    for (const jbsde::StudyRecord& rec : report.records)
        if (!rec.ok()) {
            std::cerr << "converge: run at step " << jbsde::format_double(rec.step)
                      << " failed: " << rec.error << "\n";
            return 3;
        }
    return 0;
}

int run_oracle(const CommonOptions& opts, const std::string& weight, const std::string& v_name,
               double t, double x, double dt, std::uint64_t paths, std::uint64_t seed,
               int power, const std::string& out_path)
{
    const jbsde::FBSDEProblem problem = jbsde::registry_get(opts.problem, opts.delta, opts.T);

    jbsde::WeightKind kind;
    if (weight == "plain") {
        kind = jbsde::WeightKind::plain;
    } else if (weight == "brownian") {
        kind = jbsde::WeightKind::brownian;
    } else if (weight == "jump") {
        kind = jbsde::WeightKind::jump;
    } else {
        throw std::invalid_argument("oracle: weight must be plain, brownian or jump");
    }

    std::function<double(double)> V;
    if (v_name == "one") {
        V = [](double) { return 1.0; };
    } else if (v_name == "identity") {
        V = [](double xp) { return xp; };
    } else if (v_name == "sin") {
        V = [](double xp) { return std::sin(xp); };
    } else if (v_name == "terminal") {
        const double pad = opts.solver.pad >= 0.0
                               ? opts.solver.pad
                               : jbsde::default_padding(problem, opts.a, opts.b, opts.solver.M_y);
        const jbsde::SpatialMesh mesh(opts.a, opts.b, opts.dx, pad);
        const jbsde::SolutionLayer term = jbsde::exact_layer(problem, mesh, problem.T);
        auto interp = std::make_shared<jbsde::PiecewiseLagrangeInterpolant>(
            mesh, term.y, opts.solver.degree);
        V = [interp](double xp) { return (*interp)(xp); };
    } else {
        throw std::invalid_argument("oracle: V must be one, identity, sin or terminal");
    }

    const jbsde::McResult r = jbsde::mc_expectation(problem, t, x, dt, kind, V, paths, seed,
                                                    power, opts.solver.workers);

    const nlohmann::json doc = {{"problem", problem.name}, {"weight", weight}, {"V", v_name},
                                {"t", t},                  {"x", x},           {"dt", dt},
                                {"paths", paths},          {"seed", seed},     {"power", power},
                                {"estimate", r.estimate},  {"std_error", r.std_error}};
    write_text(out_path, doc.dump(2));
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Probabilistic solver for decoupled forward-backward SDEs with jumps"};
    app.require_subcommand(1);

    CommonOptions solve_opts;
    std::string solve_out;
    CLI::App* solve_cmd = app.add_subcommand("solve", "Solve a problem, report the t = 0 layer");
    add_common_options(solve_cmd, solve_opts);
    solve_cmd->add_option("--out", solve_out, "JSON output file (stdout when absent)");

    CommonOptions conv_opts;
    std::string conv_axis, conv_preset, conv_out, conv_csv;
    std::vector<std::string> conv_values;
    CLI::App* conv_cmd = app.add_subcommand("converge", "Run a convergence study");
    add_common_options(conv_cmd, conv_opts);
    conv_cmd->add_option("--axis", conv_axis, "Varied axis: dt or dx")
        ->check(CLI::IsMember({"dt", "dx"}));
    conv_cmd->add_option("--values", conv_values,
                         "Step values, comma separated; base^exp shorthand allowed")
        ->delimiter(',');
    conv_cmd->add_option("--preset", conv_preset,
                         "Benchmark table preset: table1, table2, table3 or table4");
    conv_cmd->add_option("--out", conv_out, "JSON output file (stdout when absent)");
    conv_cmd->add_option("--csv", conv_csv, "CSV output file");

    CommonOptions oracle_opts;
    std::string oracle_weight = "plain", oracle_v = "one", oracle_out;
    double oracle_t = 0.5, oracle_x = 0.5, oracle_dt = 1.0 / 64.0;
    std::uint64_t oracle_paths = 1000000, oracle_seed = 1;
    int oracle_power = 1;
    CLI::App* oracle_cmd =
        app.add_subcommand("oracle", "Monte Carlo check of one-step expectations");
    add_common_options(oracle_cmd, oracle_opts);
    oracle_cmd->add_option("--weight", oracle_weight, "Weight factor: plain, brownian or jump")
        ->check(CLI::IsMember({"plain", "brownian", "jump"}));
    oracle_cmd->add_option("--V", oracle_v, "Integrand: one, identity, sin or terminal")
        ->check(CLI::IsMember({"one", "identity", "sin", "terminal"}));
    oracle_cmd->add_option("--t", oracle_t, "Step start time");
    oracle_cmd->add_option("--x", oracle_x, "Step start point");
    oracle_cmd->add_option("--dt", oracle_dt, "Step size");
    oracle_cmd->add_option("--paths", oracle_paths, "Number of Monte Carlo paths");
    oracle_cmd->add_option("--seed", oracle_seed, "Random seed");
    oracle_cmd->add_option("--power", oracle_power, "Weight power (2 for second moments)");
    oracle_cmd->add_option("--out", oracle_out, "JSON output file (stdout when absent)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve_cmd->parsed()) {
            solve_opts.apply_boundary();
            return run_solve(solve_opts, solve_out);
        }
        if (conv_cmd->parsed()) {
            conv_opts.apply_boundary();
            return run_converge(conv_opts, conv_cmd, conv_preset, conv_axis, conv_values,
                                conv_out, conv_csv);
        }
        if (oracle_cmd->parsed()) {
            oracle_opts.apply_boundary();
            return run_oracle(oracle_opts, oracle_weight, oracle_v, oracle_t, oracle_x,
                              oracle_dt, oracle_paths, oracle_seed, oracle_power, oracle_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
