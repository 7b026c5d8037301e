// prandtl_lab: command-line driver for the shear-flow ill-posedness laboratory.
//
// Subcommands: find-tau, spectrum, sweep, compare, quasimode, heat-check.
// Global flags --config/--out/--seed/--threads/--svg; the environment variable
// PRANDTL_LAB_OUT overrides --out.  Config files are flat key=value text;
// command-line flags win over config entries, config entries over defaults.
//
// Exit codes: 0 success (all convergence flags set), 1 usage/validation,
// 2 non-convergence, 3 spectral-condition alarm.  Failures leave a
// machine-readable error.json in the output directory.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "prandtl/base_flow.hpp"
#include "prandtl/complexode.hpp"
#include "prandtl/heat_halfspace.hpp"
#include "prandtl/mode_compare.hpp"
#include "prandtl/numerics.hpp"
#include "prandtl/prandtl_sim.hpp"
#include "prandtl/quasimode.hpp"
#include "prandtl/shear_layer.hpp"
#include "prandtl/spectral_operator.hpp"

namespace fs = std::filesystem;
using prandtl::cplx;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitSCViolation = 3;

// ---------------------------------------------------------------------------
// Flat key=value config files.

class Config {
  public:
    static Config load(const std::string& path) {
        Config cfg;
        std::ifstream in(path);
        if (!in) throw std::invalid_argument("config: cannot open " + path);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const auto trim = [](std::string s) {
                const auto b = s.find_first_not_of(" \t\r");
                if (b == std::string::npos) return std::string();
                const auto e = s.find_last_not_of(" \t\r");
                return s.substr(b, e - b + 1);
            };
            if (trim(line).empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                            " is not key=value: " + line);
            const std::string key = trim(line.substr(0, eq));
            const std::string val = trim(line.substr(eq + 1));
            if (key.empty())
                throw std::invalid_argument("config: empty key on line " + std::to_string(lineno));
            cfg.kv_[key] = val;
        }
        return cfg;
    }

    bool has(const std::string& key) const { return kv_.count(key) != 0; }

    std::string raw(const std::string& key) const { return kv_.at(key); }

    template <class T>
    T get(const std::string& key, T fallback) const {
        const auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::istringstream ss(it->second);
        T value{};
        ss >> value;
        if (ss.fail())
            throw std::invalid_argument("config: cannot parse " + key + "=" + it->second);
        return value;
    }

  private:
    std::map<std::string, std::string> kv_;
};

template <>
std::string Config::get(const std::string& key, std::string fallback) const {
    return has(key) ? raw(key) : fallback;
}

template <>
bool Config::get(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = raw(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: boolean expected for " + key + ", got " + v);
}

// Precedence: CLI flag (if given) > config entry > compiled default already
// sitting in `target`.
template <class T>
void from_config(const CLI::Option* opt, const Config& cfg, const std::string& key, T& target) {
    if (opt != nullptr && opt->count() > 0) return;
    target = cfg.get<T>(key, target);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw std::invalid_argument("empty numeric list: " + s);
    return out;
}

// ---------------------------------------------------------------------------
// Static single-file SVG line plots (plotting is a convenience; CSV is the
// contract).

struct Series {
    std::string label;
    std::string color;
    std::vector<double> x, y;
    bool dashed = false;
};

struct Panel {
    std::string title, xlabel, ylabel;
    bool logx = false;
    std::vector<Series> series;
};

void write_svg(const std::string& path, const std::vector<Panel>& panels) {
    const int slot_w = 460, height = 400;
    const int box_x = 65, box_y = 45, box_w = 360, box_h = 280;
    const int width = slot_w * static_cast<int>(panels.size());

    std::ofstream out(path);
    if (!out) throw std::runtime_error("svg: cannot open " + path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    out << std::setprecision(6);
    for (std::size_t p = 0; p < panels.size(); ++p) {
        const Panel& panel = panels[p];
        const double ox = slot_w * static_cast<double>(p) + box_x;
        double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
        for (const auto& s : panel.series) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                const double xv = panel.logx ? std::log10(s.x[i]) : s.x[i];
                if (!std::isfinite(xv) || !std::isfinite(s.y[i])) continue;
                xmin = std::min(xmin, xv);
                xmax = std::max(xmax, xv);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
        if (xmin > xmax) { xmin = 0; xmax = 1; }
        if (ymin > ymax) { ymin = 0; ymax = 1; }
        if (xmax - xmin < 1e-300) { xmin -= 1; xmax += 1; }
        const double ypad = std::max(0.05 * (ymax - ymin), 1e-12 * (std::abs(ymax) + 1.0));
        ymin -= ypad;
        ymax += ypad;

        const auto px = [&](double v) { return ox + (v - xmin) / (xmax - xmin) * box_w; };
        const auto py = [&](double v) {
            return box_y + box_h - (v - ymin) / (ymax - ymin) * box_h;
        };

        out << "<text x=\"" << ox + box_w / 2.0 << "\" y=\"22\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"14\">" << panel.title << "</text>\n";
        // frame, ticks, grid
        out << "<rect x=\"" << ox << "\" y=\"" << box_y << "\" width=\"" << box_w
            << "\" height=\"" << box_h << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int tick = 0; tick <= 4; ++tick) {
            const double xv = xmin + (xmax - xmin) * tick / 4.0;
            const double yv = ymin + (ymax - ymin) * tick / 4.0;
            out << "<line x1=\"" << px(xv) << "\" y1=\"" << box_y << "\" x2=\"" << px(xv)
                << "\" y2=\"" << box_y + box_h << "\" stroke=\"#dddddd\"/>\n"
                << "<line x1=\"" << ox << "\" y1=\"" << py(yv) << "\" x2=\"" << ox + box_w
                << "\" y2=\"" << py(yv) << "\" stroke=\"#dddddd\"/>\n";
            std::ostringstream xl, yl;
            xl << std::setprecision(4) << (panel.logx ? std::pow(10.0, xv) : xv);
            yl << std::setprecision(4) << yv;
            out << "<text x=\"" << px(xv) << "\" y=\"" << box_y + box_h + 16
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
                << xl.str() << "</text>\n"
                << "<text x=\"" << ox - 6 << "\" y=\"" << py(yv) + 4
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
                << yl.str() << "</text>\n";
        }
        out << "<text x=\"" << ox + box_w / 2.0 << "\" y=\"" << box_y + box_h + 38
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << panel.xlabel << "</text>\n";
        out << "<text x=\"" << ox - 48 << "\" y=\"" << box_y + box_h / 2.0
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
            << "transform=\"rotate(-90 " << ox - 48 << " " << box_y + box_h / 2.0 << ")\">"
            << panel.ylabel << "</text>\n";

        for (std::size_t s = 0; s < panel.series.size(); ++s) {
            const Series& ser = panel.series[s];
            out << "<polyline fill=\"none\" stroke=\"" << ser.color << "\" stroke-width=\"1.5\"";
            if (ser.dashed) out << " stroke-dasharray=\"6 4\"";
            out << " points=\"";
            for (std::size_t i = 0; i < ser.x.size(); ++i) {
                const double xv = panel.logx ? std::log10(ser.x[i]) : ser.x[i];
                if (!std::isfinite(xv) || !std::isfinite(ser.y[i])) continue;
                out << px(xv) << "," << py(ser.y[i]) << " ";
            }
            out << "\"/>\n";
            const double ly = box_y + 16 + 16 * static_cast<double>(s);
            out << "<line x1=\"" << ox + 8 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ox + 30
                << "\" y2=\"" << ly - 4 << "\" stroke=\"" << ser.color << "\" stroke-width=\"2\"";
            if (ser.dashed) out << " stroke-dasharray=\"6 4\"";
            out << "/>\n<text x=\"" << ox + 34 << "\" y=\"" << ly
                << "\" font-family=\"sans-serif\" font-size=\"11\">" << ser.label << "</text>\n";
        }
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------

struct Context {
    std::string out = ".";
    std::uint64_t seed = 12345;
    int threads = 4;
    bool svg = false;
    Config cfg;
};

void write_error_record(const Context& ctx, const std::string& command,
                        const std::string& kind, const std::string& message, int exit_code) {
    nlohmann::json rec;
    rec["command"] = command;
    rec["error"] = kind;
    rec["message"] = message;
    rec["exit_code"] = exit_code;
    std::ofstream out(fs::path(ctx.out) / "error.json");
    out << rec.dump(2) << "\n";
}

std::string csv_path(const Context& ctx, const std::string& name) {
    return (fs::path(ctx.out) / name).string();
}

std::optional<cplx> read_tau_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) return std::nullopt;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;  // column names
            continue;
        }
        std::stringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',')) return std::nullopt;
        return cplx(std::stod(a), std::stod(b));
    }
    return std::nullopt;
}

std::string fmt_cplx(cplx v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v.real() << (v.imag() < 0 ? " - " : " + ")
       << std::abs(v.imag()) << "i";
    return ss.str();
}

// Shared by compare and quasimode: shooting root and normalized layer profile.
struct LayerBundle {
    prandtl::TauRoot root;
    prandtl::ShearLayerProfile slp;
};

// tol <= 0 requests the default stopping rule: 1e-10 relative to |G| at the
// Newton seed (the scan minimizer).
double resolve_tol(double tol, cplx tau0, double z0, int steps) {
    if (tol > 0.0) return tol;
    return 1e-10 * std::abs(prandtl::evans_mismatch(tau0, z0, steps));
}

LayerBundle build_layer(double z0, int steps, double tol, int maxit) {
    const cplx tau0 = prandtl::grid_scan(-2.0, 0.0, -2.0, -0.1, 20, z0, 1500);
    const prandtl::TauRoot root =
        prandtl::newton_tau(tau0, resolve_tol(tol, tau0, z0, steps), maxit, z0, steps);
    const prandtl::ShootingTrajectory traj = prandtl::integrate_backward(root.tau, z0, steps);
    const prandtl::HeteroclinicProfile het = prandtl::build_heteroclinic(root, traj);
    return LayerBundle{root, prandtl::build_V(het)};
}

// ---------------------------------------------------------------------------
// find-tau

struct FindTauParams {
    double z0 = 6.0;
    int steps = 6000;
    double tol = 0.0;  // 0 = auto: 1e-10 relative to the scan-seed residual
    int maxit = 50;
    int scan_n = 20;
    int scan_steps = 1500;
    double scan_re_lo = -2.0, scan_re_hi = 0.0;
    double scan_im_lo = -2.0, scan_im_hi = -0.1;
    bool scan_only = false;
    double tau0_re = 0.0, tau0_im = 0.0;  // optional Newton seed
    bool tau0_given = false;
};

int cmd_find_tau(const Context& ctx, const FindTauParams& p) {
    if (p.scan_only) {
        prandtl::CsvWriter csv(csv_path(ctx, "scan.csv"), {"re_tau", "im_tau", "abs_G"},
                               "Evans mismatch G(tau) = dX(0) of the normalized decaying "
                               "branch; lattice scan of |G| in the lower half-plane");
        for (int i = 0; i < p.scan_n; ++i) {
            const double re =
                p.scan_re_lo + (p.scan_re_hi - p.scan_re_lo) * i / (p.scan_n - 1.0);
            for (int j = 0; j < p.scan_n; ++j) {
                const double im =
                    p.scan_im_lo + (p.scan_im_hi - p.scan_im_lo) * j / (p.scan_n - 1.0);
                csv.row({re, im,
                         std::abs(prandtl::evans_mismatch(cplx(re, im), p.z0, p.scan_steps))});
            }
        }
        std::cout << "scan-only: wrote |G| lattice (" << p.scan_n << "x" << p.scan_n
                  << ") to scan.csv\n";
        return 0;
    }

    cplx tau0;
    if (p.tau0_given) {
        tau0 = cplx(p.tau0_re, p.tau0_im);
    } else {
        tau0 = prandtl::grid_scan(p.scan_re_lo, p.scan_re_hi, p.scan_im_lo, p.scan_im_hi,
                                  p.scan_n, p.z0, p.scan_steps);
        std::cout << "scan minimum near tau = " << fmt_cplx(tau0) << "\n";
    }

    const double tol = resolve_tol(p.tol, tau0, p.z0, p.steps);
    if (p.tol <= 0.0) std::cout << "auto tol on |G|: " << tol << "\n";
    const prandtl::TauRoot root = prandtl::newton_tau(tau0, tol, p.maxit, p.z0, p.steps);
    const prandtl::ShootingTrajectory traj =
        prandtl::integrate_backward(root.tau, p.z0, p.steps);
    const prandtl::HeteroclinicProfile het = prandtl::build_heteroclinic(root, traj);
    const prandtl::ShearLayerProfile slp = prandtl::build_V(het);
    const cplx intX = prandtl::integral_X(traj);

    // Gaussian decay fit of |X| on z >= 2 (rate ~ Re(lambda)/2 = 1/(2 sqrt 2)).
    std::vector<double> zs, av;
    double max_abs_X = 0.0;
    for (std::size_t i = 0; i < traj.z_nodes.size(); ++i) {
        max_abs_X = std::max(max_abs_X, std::abs(traj.X[i]));
        if (traj.z_nodes[i] >= 2.0) {
            zs.push_back(traj.z_nodes[i]);
            av.push_back(std::abs(traj.X[i]));
        }
    }
    const prandtl::DecayFit fit = prandtl::decay_rate(zs, av);

    {
        prandtl::CsvWriter csv(csv_path(ctx, "tau.csv"),
                               {"tau_re", "tau_im", "residual", "abs_int_X", "decay_rate"},
                               "root of the Evans mismatch G(tau) = dX(0); residual = |G| at "
                               "convergence; decay fit |X| ~ C exp(-r z^2) on z >= 2");
        csv.row({root.tau.real(), root.tau.imag(), root.residual, std::abs(intX), fit.rate});
    }
    prandtl::export_profile(csv_path(ctx, "profile.csv"), het, slp);

    std::cout << std::setprecision(12)
              << "tau            = " << fmt_cplx(root.tau) << "\n"
              << "|G| residual   = " << root.residual << "  (" << root.iterations
              << " Newton iterations, z0 = " << p.z0 << ", " << p.steps << " steps)\n"
              << "|Re - Im|      = " << std::abs(root.tau.real() - root.tau.imag()) << "\n"
              << "|int X|        = " << std::abs(intX) << "  (max |X| = " << max_abs_X
              << ", connection margin " << std::abs(intX) / max_abs_X << ")\n"
              << "decay rate     = " << fit.rate << "  (R^2 = " << fit.r2 << ")\n"
              << "jumps [V]      = " << fmt_cplx(slp.jumpV) << "   target -tau = "
              << fmt_cplx(-root.tau) << "\n"
              << "      [V']     = " << fmt_cplx(slp.jumpV1) << "\n"
              << "      [V'']    = " << fmt_cplx(slp.jumpV2) << "   target 2\n";

    if (!fit.gaussian_ok) {
        write_error_record(ctx, "find-tau", "non-convergence",
                           "Gaussian decay fit of |X| has R^2 < 0.99", kExitNonConvergence);
        std::cerr << "error: decay fit did not certify Gaussian decay\n";
        return kExitNonConvergence;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// spectrum

struct SpectrumParams {
    double Z = 10.0;
    int N = 3200;
};

int cmd_spectrum(const Context& ctx, const SpectrumParams& p) {
    const prandtl::WeightedOperator op = prandtl::assemble(p.Z, p.N);

    std::vector<double> u(op.z_nodes.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        u[i] = std::exp(-2.0 * op.z_nodes[i] * op.z_nodes[i]);
    const double q = prandtl::quadratic_form(op, u);
    const double q_ref = (439.0 / 512.0) * std::sqrt(prandtl::kPi);
    const double q_rel = std::abs(q - q_ref) / q_ref;

    const auto [alpha, vec] = prandtl::top_eigenvalue(op);
    const cplx tau_alpha = prandtl::alpha_to_tau(alpha);

    const std::optional<cplx> tau_shoot = read_tau_csv(csv_path(ctx, "tau.csv"));
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double mismatch = tau_shoot ? std::abs(tau_alpha - *tau_shoot) : nan;

    {
        prandtl::CsvWriter csv(
            csv_path(ctx, "spectrum.csv"),
            {"Z", "N", "quad_form", "quad_ref", "quad_rel_err", "alpha", "tau_alpha_re",
             "tau_alpha_im", "tau_shoot_re", "tau_shoot_im", "mismatch"},
            "weighted operator on [-Z,Z]; quad_form = (A u | u) for u = exp(-2 z^2); "
            "alpha = top eigenvalue; tau = -sqrt(alpha/2) (1 + i)");
        csv.row({p.Z, static_cast<double>(p.N), q, q_ref, q_rel, alpha, tau_alpha.real(),
                 tau_alpha.imag(), tau_shoot ? tau_shoot->real() : nan,
                 tau_shoot ? tau_shoot->imag() : nan, mismatch});
    }

    std::cout << std::setprecision(12)
              << "(A u | u)      = " << q << "   reference " << q_ref << "   rel err "
              << std::setprecision(3) << q_rel << std::setprecision(12) << "\n"
              << "alpha          = " << alpha << "\n"
              << "tau from alpha = " << fmt_cplx(tau_alpha) << "\n";
    if (tau_shoot)
        std::cout << "tau (shooting) = " << fmt_cplx(*tau_shoot) << "   mismatch "
                  << std::setprecision(4) << mismatch << "\n";
    else
        std::cout << "tau (shooting) = n/a (no tau.csv in output directory)\n";
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepCliParams {
    std::string k_list = "1000,10000,100000,1000000";
    double L = 10.0;
    int nsteps = 3600;
    int steps_per_efold = 200;
    int window = 800;
};

int cmd_sweep(const Context& ctx, const SweepCliParams& p) {
    const std::vector<double> ks = parse_list(p.k_list);
    prandtl::SweepParams sp;
    sp.L = p.L;
    sp.nsteps = p.nsteps;
    sp.steps_per_efold = p.steps_per_efold;
    sp.window = p.window;
    sp.base_seed = ctx.seed;
    sp.threads = ctx.threads;

    const prandtl::BaseFlow flow = prandtl::gaussian_shear_flow();
    const std::vector<prandtl::SweepRow> rows = prandtl::sweep_k(ks, flow, sp);
    prandtl::export_sweep(csv_path(ctx, "sweep.csv"), rows);

    std::cout << std::setprecision(6) << std::left;
    std::cout << "k          rescaled (omega + U_s(a)) sqrt(k)        spread_y    status\n";
    bool all_ok = true;
    for (const auto& r : rows) {
        std::cout << std::setw(11) << r.k;
        if (r.ok)
            std::cout << std::setw(40) << fmt_cplx(r.rescaled) << std::setw(12) << r.spread_y
                      << (r.converged ? "converged" : "NOT CONVERGED");
        else
            std::cout << "failed: " << r.error;
        std::cout << "\n";
        all_ok = all_ok && r.ok && r.converged;
    }

    if (ctx.svg) {
        Panel re_panel, im_panel;
        re_panel.title = "rescaled correction, real part";
        im_panel.title = "rescaled correction, imaginary part";
        re_panel.xlabel = im_panel.xlabel = "k (log scale)";
        re_panel.ylabel = "Re (omega + U_s(a)) sqrt(k)";
        im_panel.ylabel = "Im (omega + U_s(a)) sqrt(k)";
        re_panel.logx = im_panel.logx = true;
        Series re_s{"measured", "#4477aa", {}, {}, false};
        Series im_s{"measured", "#4477aa", {}, {}, false};
        Series re_t{"limit -0.9247", "#cc3311", {}, {}, true};
        Series im_t{"limit -0.9247", "#cc3311", {}, {}, true};
        for (const auto& r : rows) {
            if (!r.ok) continue;
            re_s.x.push_back(r.k);
            re_s.y.push_back(r.rescaled.real());
            im_s.x.push_back(r.k);
            im_s.y.push_back(r.rescaled.imag());
            re_t.x.push_back(r.k);
            re_t.y.push_back(-0.9247);
            im_t.x.push_back(r.k);
            im_t.y.push_back(-0.9247);
        }
        re_panel.series = {re_s, re_t};
        im_panel.series = {im_s, im_t};
        write_svg(csv_path(ctx, "sweep.svg"), {re_panel, im_panel});
        std::cout << "wrote sweep.svg\n";
    }

    if (!all_ok) {
        write_error_record(ctx, "sweep", "non-convergence",
                           "one or more k evolutions failed or did not converge",
                           kExitNonConvergence);
        return kExitNonConvergence;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareParams {
    double epsilon = 1e-6;
    int N = 0;  // 0 -> policy default
    double L = 10.0;
    int nsteps = 3600;
    int steps_per_efold = 200;
    int window = 800;
    double z0 = 6.0;
    int steps = 6000;
    double tol = 0.0;  // 0 = auto
    int maxit = 50;
};

int cmd_compare(const Context& ctx, const CompareParams& p) {
    const prandtl::BaseFlow flow = prandtl::gaussian_shear_flow();
    const double k = 1.0 / p.epsilon;

    const LayerBundle layer = build_layer(p.z0, p.steps, p.tol, p.maxit);
    const prandtl::LayerProfile profile(layer.slp);

    prandtl::EvolveParams ep;
    ep.N = p.N > 0 ? p.N : prandtl::default_node_count(k);
    ep.L = p.L;
    ep.nsteps = p.nsteps;
    ep.steps_per_efold = p.steps_per_efold;
    ep.window = p.window;
    ep.seed = ctx.seed;
    std::cout << "evolving k = " << k << " (N = " << ep.N << ", " << ep.nsteps
              << " steps)...\n";
    const prandtl::EvolveResult run = prandtl::evolve(k, flow, ep);
    const prandtl::ExtractedMode mode = prandtl::extract_mode(run);

    const prandtl::ComparisonReport rep =
        prandtl::compare(mode, profile, flow, p.epsilon);
    prandtl::export_outer(csv_path(ctx, "outer.csv"), rep);
    prandtl::export_inner(csv_path(ctx, "inner.csv"), rep);
    prandtl::export_inner_literal(csv_path(ctx, "inner_literal.csv"), rep);
    prandtl::export_mode(csv_path(ctx, "mode.csv"), mode);

    std::cout << std::setprecision(6)
              << "omega          = " << fmt_cplx(run.estimate.omega) << "  (spread_y "
              << run.estimate.spread_y << ", spread_theta " << run.estimate.spread_theta
              << ")\n"
              << "layer width    = " << rep.layer_width << "\n"
              << "outer mismatch = " << rep.outer_sup_err
              << "  (sup ratio outside 5 layer widths)\n"
              << "inner mismatch = " << rep.inner_sup_err << "  (sup ratio on |z| <= 5)\n"
              << "mismatch at {3,5,8} widths vs fixed reference:";
    for (double v : rep.outer_mismatch_fixed) std::cout << " " << v;
    std::cout << "\njump across 0  = " << fmt_cplx(rep.jump_numeric) << "   theory "
              << fmt_cplx(rep.jump_theory) << "\n";

    if (ctx.svg) {
        const auto overlay = [](const std::string& title, const std::string& xlabel,
                                const std::vector<double>& x, const std::vector<cplx>& th,
                                const std::vector<cplx>& num) {
            Panel panel;
            panel.title = title;
            panel.xlabel = xlabel;
            panel.ylabel = "correction";
            Series re_t{"Re theory", "#4477aa", x, {}, false};
            Series re_n{"Re numeric", "#cc3311", x, {}, true};
            Series im_t{"Im theory", "#009988", x, {}, false};
            Series im_n{"Im numeric", "#ee7733", x, {}, true};
            for (const cplx& v : th) {
                re_t.y.push_back(v.real());
                im_t.y.push_back(v.imag());
            }
            for (const cplx& v : num) {
                re_n.y.push_back(v.real());
                im_n.y.push_back(v.imag());
            }
            panel.series = {re_t, re_n, im_t, im_n};
            return panel;
        };
        write_svg(csv_path(ctx, "outer.svg"),
                  {overlay("outer correction, eps = " + std::to_string(p.epsilon), "y",
                           rep.outer_y, rep.outer_theory, rep.outer_numeric)});
        write_svg(csv_path(ctx, "inner.svg"),
                  {overlay("inner correction (self-similar)", "z", rep.inner_z,
                           rep.inner_theory, rep.inner_numeric)});
        std::cout << "wrote outer.svg, inner.svg\n";
    }

    if (!run.estimate.converged) {
        write_error_record(ctx, "compare", "non-convergence",
                           "omega estimator spread exceeded tolerance", kExitNonConvergence);
        return kExitNonConvergence;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// quasimode

struct QuasimodeParams {
    std::string eps_list = "1e-3,1e-4,1e-5";
    int nt = 9;
    std::string flow = "gaussian";
    double z0 = 6.0;
    int steps = 6000;
    double tol = 0.0;  // 0 = auto
    int maxit = 50;
};

int cmd_quasimode(const Context& ctx, const QuasimodeParams& p) {
    const std::vector<double> eps = parse_list(p.eps_list);
    if (p.nt < 2) throw std::invalid_argument("quasimode: nt must be >= 2");

    const LayerBundle layer = build_layer(p.z0, p.steps, p.tol, p.maxit);
    const prandtl::LayerProfile profile(layer.slp);

    std::unique_ptr<prandtl::HeatFlow> flow;
    if (p.flow == "gaussian")
        flow = std::make_unique<prandtl::GaussianHeatFlow>();
    else if (p.flow == "frozen")
        flow = std::make_unique<prandtl::FrozenFlow>(prandtl::gaussian_shear_flow());
    else
        throw std::invalid_argument("quasimode: flow must be gaussian or frozen");

    std::vector<prandtl::ResidualReport> reports;
    std::cout << std::setprecision(6)
              << "eps        sigma0     u-envelope [min,max]    residual envelope [min,max]\n";
    for (double e : eps) {
        std::vector<double> ts(p.nt);
        for (int i = 0; i < p.nt; ++i) ts[i] = std::sqrt(e) * i / (p.nt - 1.0);
        prandtl::ResidualReport rep = prandtl::residual(*flow, profile, e, ts);
        const auto [ulo, uhi] = std::minmax_element(rep.u_ratio.begin(), rep.u_ratio.end());
        const auto [rlo, rhi] =
            std::minmax_element(rep.envelope_ratio.begin(), rep.envelope_ratio.end());
        std::cout << std::setw(11) << e << std::setw(11) << rep.sigma0 << "[" << *ulo << ", "
                  << *uhi << "]      [" << *rlo << ", " << *rhi << "]\n";
        reports.push_back(std::move(rep));
    }
    prandtl::export_envelope(csv_path(ctx, "envelope.csv"), reports);
    std::cout << "wrote envelope.csv\n";
    return 0;
}

// ---------------------------------------------------------------------------
// heat-check

struct HeatCheckParams {
    double t_manufactured = 1.0;
    double Ly = 10.0, hy = 0.01;
    double Lz = 22.0, hz = 0.01;
    std::string k_growth_list = "10,30,100";
    double growth_T = 2.5;
    bool skip_cross = false;
    int cross_N = 2000;
    int cross_nsteps = 3600;
};

std::vector<double> uniform_grid(double L, double h) {
    const auto n = static_cast<std::size_t>(std::llround(L / h));
    std::vector<double> y(n + 1);
    for (std::size_t i = 0; i <= n; ++i) y[i] = i * h;
    return y;
}

int cmd_heat_check(const Context& ctx, const HeatCheckParams& p) {
    const prandtl::BaseFlow flow = prandtl::gaussian_shear_flow();

    // manufactured eigenfunction: U0 = sin y decays like e^{-t} under the
    // half-line Dirichlet heat flow
    const std::vector<double> y = uniform_grid(p.Ly, p.hy);
    const std::vector<double> z = uniform_grid(p.Lz, p.hz);
    std::vector<cplx> U0(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) U0[i] = std::sin(z[i]);
    const std::vector<cplx> U =
        prandtl::solve_duhamel(U0, {}, p.t_manufactured, y, z);
    double man_err = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        man_err = std::max(man_err,
                           std::abs(U[i] - std::exp(-p.t_manufactured) * std::sin(y[i])));
    {
        prandtl::CsvWriter csv(csv_path(ctx, "manufactured.csv"), {"t", "sup_err"},
                               "sup_y |U - e^{-t} sin y| for U0 = sin, half-line Dirichlet "
                               "kernel quadrature");
        csv.row({p.t_manufactured, man_err});
    }
    std::cout << std::setprecision(4) << "manufactured sin eigenfunction: sup err "
              << man_err << " at t = " << p.t_manufactured << "\n";

    // kernel evolution of the base flow against its closed form
    {
        const std::vector<double> yb = uniform_grid(12.0, p.hy);
        const std::vector<double> zb = uniform_grid(24.0, p.hz);
        std::vector<double> Us0(zb.size());
        for (std::size_t i = 0; i < zb.size(); ++i) Us0[i] = flow.Us(zb[i]);
        prandtl::CsvWriter csv(csv_path(ctx, "base_flow.csv"), {"t", "sup_err"},
                               "kernel evolution of U_s vs closed form "
                               "2 (1+4t)^{-3/2} y exp(-y^2/(1+4t))");
        std::cout << "base flow vs closed form:";
        for (const double t : {0.001, 0.01, 0.1}) {
            const std::vector<double> u = prandtl::evolve_base_flow(Us0, t, zb, yb);
            double err = 0.0;
            for (std::size_t i = 0; i < yb.size(); ++i)
                err = std::max(err, std::abs(u[i] - prandtl::us_heat(t, yb[i])));
            csv.row({t, err});
            std::cout << "  t=" << t << ": " << err;
        }
        std::cout << "\n";
    }

    // growth table: log-growth at T linear in k
    const std::vector<double> ks = parse_list(p.k_growth_list);
    std::vector<double> log_growth(ks.size());
    std::vector<prandtl::ModeTrajectory> trajs(ks.size());
    {
        prandtl::CsvWriter csv(csv_path(ctx, "growth.csv"),
                               {"k", "dt", "nsteps", "log_growth"},
                               "log ||U(T)|| / ||U(0)|| in the weighted sup norm "
                               "(alpha_w = 0.5) at T = " +
                                   std::to_string(p.growth_T));
        for (std::size_t i = 0; i < ks.size(); ++i) {
            const int k = static_cast<int>(ks[i]);
            const double dt = std::min(0.02, 0.15 / (0.9 * k));
            const int nsteps = static_cast<int>(std::lround(p.growth_T / dt));
            std::vector<cplx> U0k;  // default data y e^{-y^2} on the module grid
            {
                const std::vector<double> yk = uniform_grid(12.0, 0.01);
                U0k.resize(yk.size());
                for (std::size_t j = 0; j < yk.size(); ++j)
                    U0k[j] = yk[j] * std::exp(-yk[j] * yk[j]);
            }
            trajs[i] = prandtl::evolve_mode_k(U0k, k, flow, p.growth_T, nsteps);
            log_growth[i] = std::log(trajs[i].wnorms.back() / trajs[i].wnorms.front());
            csv.row({ks[i], dt, static_cast<double>(nsteps), log_growth[i]});
        }
    }
    const prandtl::LinearFit kfit = prandtl::linear_fit(ks, log_growth);
    std::cout << "growth table at T = " << p.growth_T << ":\n";
    for (std::size_t i = 0; i < ks.size(); ++i)
        std::cout << "  k = " << std::setw(4) << ks[i] << "  log growth = " << log_growth[i]
                  << "\n";
    std::cout << "  linear in k: slope " << kfit.slope << " (rho = "
              << kfit.slope / p.growth_T << "), R^2 = " << std::setprecision(6) << kfit.r2
              << "\n";

    // cross-oracle at k = 100 against the Crank-Nicolson simulator
    if (!p.skip_cross) {
        const double dt = 0.15 / 90.0;
        const int nsteps = static_cast<int>(std::lround(1.5 / dt));
        std::vector<cplx> U0k;
        {
            const std::vector<double> yk = uniform_grid(12.0, 0.01);
            U0k.resize(yk.size());
            for (std::size_t j = 0; j < yk.size(); ++j)
                U0k[j] = yk[j] * std::exp(-yk[j] * yk[j]);
        }
        const prandtl::ModeTrajectory traj =
            prandtl::evolve_mode_k(U0k, 100, flow, 1.5, nsteps);
        const prandtl::LinearFit late = prandtl::growth_fit(traj.t, traj.wnorms, 1.0);
        const double sigma_heat = late.slope;

        prandtl::EvolveParams ep;
        ep.N = p.cross_N;
        ep.L = 10.0;
        ep.nsteps = p.cross_nsteps;
        ep.seed = ctx.seed;
        const prandtl::EvolveResult run = prandtl::evolve(100.0, flow, ep);
        const double sigma_prandtl = 100.0 * std::abs(run.estimate.omega.imag());
        const double rel = std::abs(sigma_prandtl - sigma_heat) / sigma_heat;

        prandtl::CsvWriter csv(csv_path(ctx, "cross.csv"),
                               {"k", "sigma_heat", "sigma_prandtl", "rel_diff"},
                               "dominant growth exponents: late-window slope of "
                               "log ||U|| (u-form) vs k |Im omega| (V-form)");
        csv.row({100.0, sigma_heat, sigma_prandtl, rel});
        std::cout << "cross-oracle k = 100: sigma_heat = " << sigma_heat
                  << ", sigma_prandtl = " << sigma_prandtl << ", rel diff = " << rel << "\n";
        if (!run.estimate.converged) {
            write_error_record(ctx, "heat-check", "non-convergence",
                               "omega estimator did not converge at k = 100",
                               kExitNonConvergence);
            return kExitNonConvergence;
        }
    }
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------

int main(int argc, char** argv) {
    CLI::App app{"prandtl_lab: numerical laboratory for shear-flow ill-posedness"};
    app.require_subcommand(1);

    std::string config_path, out_cli = ".";
    Context ctx;
    auto* opt_config = app.add_option("--config", config_path, "flat key=value parameter file");
    auto* opt_out = app.add_option("--out", out_cli,
                                   "output directory (PRANDTL_LAB_OUT overrides)");
    auto* opt_seed = app.add_option("--seed", ctx.seed, "base seed for random initial data");
    auto* opt_threads = app.add_option("--threads", ctx.threads, "sweep worker threads");
    auto* opt_svg = app.add_flag("--svg", ctx.svg, "also emit SVG plots");

    FindTauParams ft;
    auto* sub_ft = app.add_subcommand("find-tau", "shooting root of the Evans mismatch");
    sub_ft->fallthrough();
    auto* ft_z0 = sub_ft->add_option("--z0", ft.z0, "shooting start");
    auto* ft_steps = sub_ft->add_option("--steps", ft.steps, "RK4 steps");
    auto* ft_tol = sub_ft->add_option("--tol", ft.tol, "absolute tolerance on |G| (0 = auto: 1e-10 of the scan-seed residual)");
    auto* ft_maxit = sub_ft->add_option("--maxit", ft.maxit, "Newton iteration cap");
    sub_ft->add_flag("--scan-only", ft.scan_only, "emit the |G| lattice and stop");
    auto* ft_t0r = sub_ft->add_option("--tau0-re", ft.tau0_re, "Newton seed, real part");
    auto* ft_t0i = sub_ft->add_option("--tau0-im", ft.tau0_im, "Newton seed, imaginary part");

    SpectrumParams sp;
    auto* sub_sp = app.add_subcommand("spectrum", "weighted-operator eigenvalue route");
    sub_sp->fallthrough();
    auto* sp_Z = sub_sp->add_option("--Z", sp.Z, "half-width of the truncated line");
    auto* sp_N = sub_sp->add_option("--N", sp.N, "interval count");

    SweepCliParams sw;
    auto* sub_sw = app.add_subcommand("sweep", "omega(k) sweep of the simulator");
    sub_sw->fallthrough();
    auto* sw_k = sub_sw->add_option("--k-list", sw.k_list, "comma-separated k values");
    auto* sw_L = sub_sw->add_option("--L", sw.L, "domain length");
    auto* sw_n = sub_sw->add_option("--nsteps", sw.nsteps, "CN steps");
    auto* sw_e = sub_sw->add_option("--steps-per-efold", sw.steps_per_efold,
                                    "time resolution of the expected growth");
    auto* sw_w = sub_sw->add_option("--window", sw.window, "estimator window (steps)");

    CompareParams cp;
    auto* sub_cp = app.add_subcommand("compare", "simulated mode vs asymptotic construction");
    sub_cp->fallthrough();
    auto* cp_eps = sub_cp->add_option("--epsilon", cp.epsilon, "1/k");
    auto* cp_N = sub_cp->add_option("--N", cp.N, "grid nodes (0 = policy default)");
    auto* cp_n = sub_cp->add_option("--nsteps", cp.nsteps, "CN steps");

    QuasimodeParams qp;
    auto* sub_qp = app.add_subcommand("quasimode", "residual envelopes over an eps decade");
    sub_qp->fallthrough();
    auto* qp_eps = sub_qp->add_option("--eps-list", qp.eps_list, "comma-separated eps values");
    auto* qp_nt = sub_qp->add_option("--nt", qp.nt, "time samples in [0, sqrt(eps)]");
    auto* qp_flow = sub_qp->add_option("--flow", qp.flow, "gaussian | frozen");

    HeatCheckParams hp;
    auto* sub_hp = app.add_subcommand("heat-check", "half-space heat solver checks");
    sub_hp->fallthrough();
    auto* hp_T = sub_hp->add_option("--growth-T", hp.growth_T, "growth-table horizon");
    auto* hp_k = sub_hp->add_option("--k-growth-list", hp.k_growth_list, "growth-table k values");
    sub_hp->add_flag("--skip-cross", hp.skip_cross, "skip the k=100 cross-oracle");

    CLI11_PARSE(app, argc, argv);

    std::string command = app.get_subcommands().front()->get_name();
    try {
        if (opt_config->count() > 0) ctx.cfg = Config::load(config_path);
        const Config& cfg = ctx.cfg;
        from_config(opt_out, cfg, "out", out_cli);
        from_config(opt_seed, cfg, "seed", ctx.seed);
        from_config(opt_threads, cfg, "threads", ctx.threads);
        from_config(opt_svg, cfg, "svg", ctx.svg);
        ctx.out = prandtl::output_dir(out_cli);
        fs::create_directories(ctx.out);
        fs::remove(fs::path(ctx.out) / "error.json");

        if (ctx.threads < 1) throw std::invalid_argument("threads must be >= 1");

        int rc = 0;
        if (command == "find-tau") {
            from_config(ft_z0, cfg, "z0", ft.z0);
            from_config(ft_steps, cfg, "steps", ft.steps);
            from_config(ft_tol, cfg, "tol", ft.tol);
            from_config(ft_maxit, cfg, "maxit", ft.maxit);
            from_config(nullptr, cfg, "scan_n", ft.scan_n);
            from_config(nullptr, cfg, "scan_steps", ft.scan_steps);
            from_config(nullptr, cfg, "scan_re_lo", ft.scan_re_lo);
            from_config(nullptr, cfg, "scan_re_hi", ft.scan_re_hi);
            from_config(nullptr, cfg, "scan_im_lo", ft.scan_im_lo);
            from_config(nullptr, cfg, "scan_im_hi", ft.scan_im_hi);
            from_config(ft_t0r, cfg, "tau0_re", ft.tau0_re);
            from_config(ft_t0i, cfg, "tau0_im", ft.tau0_im);
            ft.tau0_given = ft_t0r->count() > 0 || ft_t0i->count() > 0 ||
                            cfg.has("tau0_re") || cfg.has("tau0_im");
            if (ft.maxit < 1 || ft.scan_n < 2)
                throw std::invalid_argument("find-tau: maxit >= 1 and scan_n >= 2 required");
            rc = cmd_find_tau(ctx, ft);
        } else if (command == "spectrum") {
            from_config(sp_Z, cfg, "Z", sp.Z);
            from_config(sp_N, cfg, "N", sp.N);
            rc = cmd_spectrum(ctx, sp);
        } else if (command == "sweep") {
            from_config(sw_k, cfg, "k_list", sw.k_list);
            from_config(sw_L, cfg, "L", sw.L);
            from_config(sw_n, cfg, "nsteps", sw.nsteps);
            from_config(sw_e, cfg, "steps_per_efold", sw.steps_per_efold);
            from_config(sw_w, cfg, "window", sw.window);
            rc = cmd_sweep(ctx, sw);
        } else if (command == "compare") {
            from_config(cp_eps, cfg, "epsilon", cp.epsilon);
            from_config(cp_N, cfg, "N", cp.N);
            from_config(cp_n, cfg, "nsteps", cp.nsteps);
            from_config(nullptr, cfg, "steps_per_efold", cp.steps_per_efold);
            from_config(nullptr, cfg, "window", cp.window);
            if (cp.epsilon <= 0.0 || cp.epsilon >= 1.0)
                throw std::invalid_argument("compare: epsilon must lie in (0, 1)");
            rc = cmd_compare(ctx, cp);
        } else if (command == "quasimode") {
            from_config(qp_eps, cfg, "eps_list", qp.eps_list);
            from_config(qp_nt, cfg, "nt", qp.nt);
            from_config(qp_flow, cfg, "flow", qp.flow);
            rc = cmd_quasimode(ctx, qp);
        } else if (command == "heat-check") {
            from_config(hp_T, cfg, "growth_T", hp.growth_T);
            from_config(hp_k, cfg, "k_growth_list", hp.k_growth_list);
            from_config(nullptr, cfg, "t_manufactured", hp.t_manufactured);
            from_config(nullptr, cfg, "cross_N", hp.cross_N);
            from_config(nullptr, cfg, "cross_nsteps", hp.cross_nsteps);
            if (hp.growth_T <= 0.0) throw std::invalid_argument("heat-check: growth_T > 0");
            rc = cmd_heat_check(ctx, hp);
        }
        return rc;
    } catch (const prandtl::SCViolationError& e) {
        std::cerr << "error (spectral-condition alarm): " << e.what() << "\n";
        write_error_record(ctx, command, "sc-violation", e.what(), kExitSCViolation);
        return kExitSCViolation;
    } catch (const prandtl::NonConvergenceError& e) {
        std::cerr << "error (non-convergence): " << e.what() << "\n";
        write_error_record(ctx, command, "non-convergence", e.what(), kExitNonConvergence);
        return kExitNonConvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        write_error_record(ctx, command, "invalid-argument", e.what(), kExitUsage);
        return kExitUsage;
    }
}
