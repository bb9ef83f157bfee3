// Command-line front end: run / sweep / micro.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nchmm/analysis.hpp"
#include "nchmm/examples.hpp"
#include "nchmm/micro.hpp"

namespace fs = std::filesystem;
using namespace nchmm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSolveFailure = 1;
constexpr int kExitUsage = 2;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Parses "a/b" or "n" exactly into a mesh-count denominator (H = a/b with
/// b divisible by a). Throws CLI::ValidationError on malformed input.
int parse_h_denominator(const std::string& text) {
    long num = 1, den = 1;
    const auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            den = std::stol(text);
        } else {
            num = std::stol(text.substr(0, slash));
            den = std::stol(text.substr(slash + 1));
        }
    } catch (const std::exception&) {
        throw CLI::ValidationError("--H", "cannot parse fraction '" + text + "'");
    }
    if (num <= 0 || den <= 0 || den % num != 0)
        throw CLI::ValidationError("--H", "'" + text + "' is not a unit fraction of the domain");
    return static_cast<int>(den / num);
}

double parse_delta(const std::string& mode, double eps) {
    if (mode == "eps") return eps;
    if (mode == "sqrt-eps") return std::sqrt(eps);
    if (mode.rfind("factor:", 0) == 0) {
        try {
            return std::stod(mode.substr(7)) * eps;
        } catch (const std::exception&) {
            throw CLI::ValidationError("--delta", "cannot parse factor in '" + mode + "'");
        }
    }
    try {
        std::size_t used = 0;
        const double v = std::stod(mode, &used);
        if (used == mode.size() && v > 0.0) return v;
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--delta",
                               "'" + mode + "' is not eps, sqrt-eps, factor:R, or a number");
}

Coupling parse_coupling(const std::string& text) {
    if (text == "periodic") return Coupling::Periodic;
    if (text == "dirichlet") return Coupling::Dirichlet;
    throw CLI::ValidationError("--coupling", "'" + text + "' is not periodic|dirichlet");
}

void write_report_csv(const fs::path& path, const std::vector<RunRecord>& records, double eps) {
    std::ofstream out(path);
    out << "H,h_over_eps,delta,coupling,err_h1_broken,err_l2,tensor_err_fro,"
           "micro_cg_iters_total,macro_cg_iters\n";
    for (const RunRecord& r : records) {
        if (!r.ok) {
            out << "# failed H=1/" << r.H_den << " n=" << r.micro_n << " delta=" << fmt(r.delta)
                << ": " << r.message << "\n";
            continue;
        }
        out << fmt(1.0 / r.H_den) << ',' << fmt(r.delta / r.micro_n / eps) << ',' << fmt(r.delta)
            << ',' << (r.coupling == Coupling::Periodic ? "periodic" : "dirichlet") << ','
            << fmt(r.err_h1) << ',' << fmt(r.err_l2) << ',' << fmt(r.tensor_err_sup) << ','
            << r.micro_cg_iters_total << ',' << r.macro_cg_iters << '\n';
    }
}

void write_tensors_csv(const fs::path& path, const RunOutput& run) {
    std::ofstream out(path);
    out << "element,qpoint,center_x,center_y,a11,a12,a21,a22\n";
    for (std::size_t t = 0; t < run.tensors.size(); ++t) {
        const Mat2& m = run.tensors[t];
        out << t / 4 << ',' << t % 4 << ',' << fmt(run.centers[t].x) << ','
            << fmt(run.centers[t].y) << ',' << fmt(m(0, 0)) << ',' << fmt(m(0, 1)) << ','
            << fmt(m(1, 0)) << ',' << fmt(m(1, 1)) << '\n';
    }
}

void write_rates_csv(const fs::path& path, const std::vector<RunRecord>& records) {
    std::ofstream out(path);
    out << "quantity,delta,micro_n,H_den,from,to,rate\n";
    // H-convergence per (delta, micro_n) series.
    std::map<std::pair<double, int>, std::vector<const RunRecord*>> by_series;
    for (const RunRecord& r : records)
        if (r.ok) by_series[{r.delta, r.micro_n}].push_back(&r);
    auto emit = [&](const char* q, double delta, int n, int h_den, int from, int to, double e0,
                    double e1) {
        out << q << ',' << fmt(delta) << ',' << n << ',' << h_den << ',' << from << ',' << to
            << ',' << fmt(std::log2(e0 / e1)) << '\n';
    };
    for (auto& [key, rows] : by_series) {
        std::sort(rows.begin(), rows.end(),
                  [](const RunRecord* a, const RunRecord* b) { return a->H_den < b->H_den; });
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            if (rows[i + 1]->H_den != 2 * rows[i]->H_den) continue;
            emit("err_h1_broken", key.first, key.second, 0, rows[i]->H_den, rows[i + 1]->H_den,
                 rows[i]->err_h1, rows[i + 1]->err_h1);
            emit("err_l2", key.first, key.second, 0, rows[i]->H_den, rows[i + 1]->H_den,
                 rows[i]->err_l2, rows[i + 1]->err_l2);
        }
    }
    // Micro-resolution convergence of the tensor error per (delta, H) series.
    std::map<std::pair<double, int>, std::vector<const RunRecord*>> by_h;
    for (const RunRecord& r : records)
        if (r.ok) by_h[{r.delta, r.H_den}].push_back(&r);
    for (auto& [key, rows] : by_h) {
        std::sort(rows.begin(), rows.end(),
                  [](const RunRecord* a, const RunRecord* b) { return a->micro_n < b->micro_n; });
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            if (rows[i + 1]->micro_n != 2 * rows[i]->micro_n) continue;
            emit("tensor_err_fro", key.first, rows[i]->micro_n, key.second, rows[i]->micro_n,
                 rows[i + 1]->micro_n, rows[i]->tensor_err_sup, rows[i + 1]->tensor_err_sup);
        }
    }
}

/// Simple diverging-free sequential palette (dark blue -> yellow).
std::string color_for(double t) {
    t = std::clamp(t, 0.0, 1.0);
    const double stops[5][3] = {{68, 1, 84}, {59, 82, 139}, {33, 145, 140}, {94, 201, 98},
                                {253, 231, 37}};
    const double pos = t * 4.0;
    const int i = std::min(3, static_cast<int>(pos));
    const double f = pos - i;
    char buf[16];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                  static_cast<int>(stops[i][0] + f * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + f * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + f * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

void write_solution_svg(const fs::path& path, const Field& field) {
    const UniformQuadMesh& mesh = field.mesh;
    double lo = 1e300, hi = -1e300;
    std::vector<double> cell(static_cast<std::size_t>(mesh.element_count()));
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const auto verts = mesh.element_vertices(e);
        double v = 0.0;
        for (VertexId w : verts) v += 0.25 * field.vertex_values[w];
        cell[e] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = (hi > lo) ? hi - lo : 1.0;
    const int size = 512, margin = 40;
    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin
        << "\" height=\"" << size + 2 * margin << "\">\n";
    const double cw = static_cast<double>(size) / mesh.nx();
    const double ch = static_cast<double>(size) / mesh.ny();
    for (ElementId e = 0; e < mesh.element_count(); ++e) {
        const auto [i, j] = mesh.element_grid(e);
        out << "<rect x=\"" << margin + i * cw << "\" y=\"" << margin + (mesh.ny() - 1 - j) * ch
            << "\" width=\"" << cw + 0.5 << "\" height=\"" << ch + 0.5 << "\" fill=\""
            << color_for((cell[e] - lo) / span) << "\"/>\n";
    }
    out << "<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << size
        << "\" height=\"" << size << "\" fill=\"none\" stroke=\"black\"/>\n";
    out << "<text x=\"" << margin << "\" y=\"" << margin - 8 << "\" font-size=\"13\">min "
        << fmt(lo) << "  max " << fmt(hi) << "</text>\n";
    out << "</svg>\n";
}

void write_convergence_svg(const fs::path& path, const std::vector<RunRecord>& records) {
    std::map<std::pair<double, int>, std::vector<std::pair<double, double>>> series;
    double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
    for (const RunRecord& r : records) {
        if (!r.ok || !(r.err_h1 > 0.0)) continue;
        const double x = std::log10(1.0 / r.H_den), y = std::log10(r.err_h1);
        series[{r.delta, r.micro_n}].push_back({x, y});
        xlo = std::min(xlo, x);
        xhi = std::max(xhi, x);
        ylo = std::min(ylo, y);
        yhi = std::max(yhi, y);
    }
    const int w = 560, h = 420, margin = 50;
    std::ofstream out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
        << "\">\n<rect x=\"" << margin << "\" y=\"" << margin << "\" width=\"" << w - 2 * margin
        << "\" height=\"" << h - 2 * margin << "\" fill=\"none\" stroke=\"black\"/>\n";
    if (!series.empty()) {
        if (xhi <= xlo) xhi = xlo + 1.0;
        if (yhi <= ylo) yhi = ylo + 1.0;
        auto px = [&](double x) { return margin + (x - xlo) / (xhi - xlo) * (w - 2 * margin); };
        auto py = [&](double y) { return h - margin - (y - ylo) / (yhi - ylo) * (h - 2 * margin); };
        const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
        int idx = 0;
        for (auto& [key, pts] : series) {
            std::sort(pts.begin(), pts.end());
            out << "<polyline fill=\"none\" stroke=\"" << palette[idx % 6] << "\" points=\"";
            for (const auto& [x, y] : pts) out << px(x) << ',' << py(y) << ' ';
            out << "\"/>\n";
            out << "<text x=\"" << w - margin - 170 << "\" y=\"" << margin + 16 + 14 * idx
                << "\" font-size=\"12\" fill=\"" << palette[idx % 6] << "\">delta=" << key.first
                << " n=" << key.second << "</text>\n";
            ++idx;
        }
        out << "<text x=\"" << w / 2 - 50 << "\" y=\"" << h - 12
            << "\" font-size=\"13\">log10 H</text>\n";
        out << "<text x=\"8\" y=\"" << h / 2
            << "\" font-size=\"13\" transform=\"rotate(-90 14 " << h / 2
            << ")\">log10 energy error</text>\n";
    }
    out << "</svg>\n";
}

struct CommonOptions {
    std::string example;
    std::vector<std::string> H_texts;
    std::vector<int> micro_ns;
    std::vector<std::string> delta_texts;
    std::string coupling_text;
    double tol = 1e-10;
    double macro_tol = 1e-12;
    int jobs = 1;
    bool memoize = false;
    bool jacobi = false;
    bool no_svg = false;
    std::string out_dir = ".";
};

void add_common(CLI::App* cmd, CommonOptions& o, bool need_lists) {
    cmd->add_option("--example", o.example, "built-in example name")->required();
    auto* H = cmd->add_option("--H", o.H_texts, "macro mesh sizes as exact fractions, e.g. 1/8");
    auto* n = cmd->add_option("--micro-n", o.micro_ns, "micro elements per sampling-domain axis");
    if (need_lists) {
        H->required();
        n->required();
    }
    cmd->add_option("--delta", o.delta_texts,
                    "sampling-domain size: eps | sqrt-eps | factor:R | number");
    cmd->add_option("--coupling", o.coupling_text, "periodic|dirichlet (default: example's)");
    cmd->add_option("--tol", o.tol, "micro CG relative tolerance");
    cmd->add_option("--macro-tol", o.macro_tol, "macro CG relative tolerance");
    cmd->add_option("--jobs", o.jobs, "worker threads for micro solves / sweep cells");
    cmd->add_flag("--memoize", o.memoize, "reuse micro solves across identical sampling domains");
    cmd->add_flag("--jacobi", o.jacobi, "diagonal preconditioning in CG");
    cmd->add_flag("--no-svg", o.no_svg, "skip SVG artifacts");
    cmd->add_option("--out", o.out_dir, "output directory");
}

struct ResolvedOptions {
    const ExampleProblem* example;
    std::vector<int> H_dens;
    std::vector<double> deltas;
    RunOptions run;
};

ResolvedOptions resolve(const CommonOptions& o) {
    ResolvedOptions r;
    r.example = &find_example(o.example);
    for (const std::string& t : o.H_texts) r.H_dens.push_back(parse_h_denominator(t));
    if (o.delta_texts.empty())
        r.deltas.push_back(r.example->default_delta);
    else
        for (const std::string& t : o.delta_texts) r.deltas.push_back(parse_delta(t, r.example->epsilon));
    r.run.memoize = o.memoize;
    r.run.jobs = o.jobs;
    r.run.micro_cg.tol = o.tol;
    r.run.micro_cg.jacobi = o.jacobi;
    r.run.macro_tol = o.macro_tol;
    return r;
}

ExampleProblem with_coupling(const ExampleProblem& base, const std::string& coupling_text) {
    ExampleProblem ex = base;
    if (!coupling_text.empty()) ex.coupling = parse_coupling(coupling_text);
    return ex;
}

int cmd_run(const CommonOptions& o) {
    const ResolvedOptions r = resolve(o);
    if (r.H_dens.size() != 1 || o.micro_ns.size() != 1 || r.deltas.size() != 1) {
        std::fprintf(stderr, "run: exactly one --H, --micro-n, and --delta expected\n");
        return kExitUsage;
    }
    const ExampleProblem ex = with_coupling(*r.example, o.coupling_text);
    const RunOutput run = run_fehmm(ex, r.H_dens[0], o.micro_ns[0], r.deltas[0], r.run);
    fs::create_directories(o.out_dir);
    write_report_csv(fs::path(o.out_dir) / "report.csv", {run.record}, ex.epsilon);
    if (!run.record.ok) {
        std::fprintf(stderr, "solve failed: %s\n", run.record.message.c_str());
        return kExitSolveFailure;
    }
    write_tensors_csv(fs::path(o.out_dir) / "tensors.csv", run);
    if (!o.no_svg && run.solution)
        write_solution_svg(fs::path(o.out_dir) / "solution.svg", *run.solution);
    std::printf("H=1/%d h/eps=%s err_h1_broken=%s err_l2=%s tensor_err_fro=%s\n",
                run.record.H_den, fmt(run.record.delta / run.record.micro_n / ex.epsilon).c_str(),
                fmt(run.record.err_h1).c_str(), fmt(run.record.err_l2).c_str(),
                fmt(run.record.tensor_err_sup).c_str());
    return kExitOk;
}

int cmd_sweep(const CommonOptions& o) {
    const ResolvedOptions r = resolve(o);
    const ExampleProblem ex = with_coupling(*r.example, o.coupling_text);
    const ConvergenceReport report = convergence_report(ex, r.H_dens, o.micro_ns, r.deltas, r.run);
    fs::create_directories(o.out_dir);
    write_report_csv(fs::path(o.out_dir) / "report.csv", report.records, ex.epsilon);
    write_rates_csv(fs::path(o.out_dir) / "rates.csv", report.records);
    if (!o.no_svg) write_convergence_svg(fs::path(o.out_dir) / "convergence.svg", report.records);
    int failures = 0;
    for (const RunRecord& rec : report.records) {
        if (!rec.ok) {
            ++failures;
            std::fprintf(stderr, "cell H=1/%d n=%d delta=%s failed: %s\n", rec.H_den, rec.micro_n,
                         fmt(rec.delta).c_str(), rec.message.c_str());
        }
    }
    std::printf("sweep: %zu cells, %d failed; artifacts in %s\n", report.records.size(), failures,
                o.out_dir.c_str());
    return failures == static_cast<int>(report.records.size()) ? kExitSolveFailure : kExitOk;
}

int cmd_micro(const CommonOptions& o, double center_x, double center_y) {
    const ResolvedOptions r = resolve(o);
    if (o.micro_ns.size() != 1 || r.deltas.size() != 1) {
        std::fprintf(stderr, "micro: exactly one --micro-n and --delta expected\n");
        return kExitUsage;
    }
    if (o.micro_ns[0] > 32) {
        std::fprintf(stderr, "micro: dense reference path refused for n > 32\n");
        return kExitUsage;
    }
    const ExampleProblem ex = with_coupling(*r.example, o.coupling_text);
    const SamplingDomain domain{{center_x, center_y}, r.deltas[0], o.micro_ns[0], ex.coupling};
    const MicroSystem system = assemble_micro_system(domain, ex.tensor);
    const Corrector iterative = solve_correctors(domain, system, r.run.micro_cg);
    const RecoveredTensor iter_tensor = recovered_tensor(domain, system, iterative);
    const Corrector dense = dense_micro_reference(domain, ex.tensor);
    const RecoveredTensor dense_tensor = recovered_tensor(domain, system, dense);
    const auto [dim, deficiency] = micro_system_rank_info(system);

    std::printf("iterative system: dimension %d, rank deficiency %d, CG iterations %d + %d\n",
                dim, deficiency, iterative.reports[0].iterations, iterative.reports[1].iterations);
    const int dense_dim =
        domain.make_mesh().vertex_count() +
        (ex.coupling == Coupling::Periodic ? 2 * o.micro_ns[0] + 1 : 4 * o.micro_ns[0]);
    std::printf("dense saddle system: dimension %d (with constraints)\n", dense_dim);
    auto print_tensor = [](const char* label, const Mat2& m) {
        std::printf("%s [[%s, %s], [%s, %s]]\n", label, fmt(m(0, 0)).c_str(),
                    fmt(m(0, 1)).c_str(), fmt(m(1, 0)).c_str(), fmt(m(1, 1)).c_str());
    };
    print_tensor("iterative tensor:", iter_tensor.value);
    print_tensor("dense tensor:    ", dense_tensor.value);
    std::printf("frobenius difference: %s\n",
                fmt((iter_tensor.value - dense_tensor.value).frobenius_norm()).c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nonconforming finite element heterogeneous multiscale solver"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file (flags win)");
    app.allow_config_extras(false);

    CommonOptions run_opts, sweep_opts, micro_opts;
    double center_x = 0.5, center_y = 0.5;
    CLI::App* run = app.add_subcommand("run", "single FEHMM solve with CSV/SVG artifacts");
    add_common(run, run_opts, true);
    CLI::App* sweep = app.add_subcommand("sweep", "(H x micro-n x delta) convergence sweep");
    add_common(sweep, sweep_opts, true);
    CLI::App* micro = app.add_subcommand("micro", "single sampling-domain diagnostic");
    add_common(micro, micro_opts, false);
    micro->add_option("--center-x", center_x, "sampling-domain center x");
    micro->add_option("--center-y", center_y, "sampling-domain center y");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts);
        if (micro->parsed()) {
            if (micro_opts.micro_ns.empty()) micro_opts.micro_ns.push_back(8);
            return cmd_micro(micro_opts, center_x, center_y);
        }
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kExitSolveFailure;
    }
    return kExitUsage;
}
