#include "spinfid/cli.hpp"

#include "spinfid/checkpoint.hpp"
#include "spinfid/errors.hpp"
#include "spinfid/fidelity.hpp"
#include "spinfid/observables.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

namespace spinfid::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if(b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T> T parse_number(const std::string &key, const std::string &v) {
    T           out{};
    const auto *last = v.data() + v.size();
    const auto  res  = std::from_chars(v.data(), last, out);
    if(v.empty() || res.ec != std::errc() || res.ptr != last)
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "'");
    return out;
}

std::vector<int> parse_lengths(const std::string &key, const std::string &v) {
    std::vector<int> out;
    std::string      item;
    std::string      norm = v;
    for(char &c : norm)
        if(c == ',') c = ' ';
    std::istringstream in(norm);
    while(in >> item) out.push_back(parse_number<int>(key, item));
    if(out.empty()) throw ConfigError("config key '" + key + "' is empty");
    return out;
}

std::string g17(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

std::string g6(double v) {
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.6g", v);
    return buf.data();
}

std::string fit_kind_name(FitKind k) {
    switch(k) {
        case FitKind::dc_nu: return "dc-nu";
        case FitKind::powerlaw: return "powerlaw";
        case FitKind::saturation: return "saturation";
        case FitKind::central_charge: return "central-charge";
    }
    return {};
}

// Flags shared by `scan` and `ed-check`. Values land in `flags` and are
// copied over the config-file values only when given on the command line.
struct ScanFlags {
    std::string         config_path;
    ScanConfig          values;
    std::string         sz_sector;
    std::vector<CLI::Option *> given;
    std::map<CLI::Option *, std::string> key;

    void attach(CLI::App &app) {
        app.add_option("--config", config_path, "key = value configuration file");
        auto add = [&](const std::string &flag, auto &target, const std::string &help) {
            CLI::Option *o = app.add_option("--" + flag, target, help);
            key[o]         = flag;
            given.push_back(o);
        };
        add("lambda", values.lambda, "Ising-like anisotropy");
        add("d-min", values.d_min, "first D of the grid");
        add("d-max", values.d_max, "last D of the grid");
        add("d-step", values.d_step, "grid spacing in D");
        add("delta", values.delta, "fidelity step in D");
        add("lengths", values.lengths, "chain lengths");
        add("m", values.m, "kept states");
        add("sweeps", values.sweeps, "finite-system sweeps");
        add("lanczos-tol", values.lanczos_tol, "superblock residual tolerance");
        add("h1", values.h1, "boundary field on site 1");
        add("sz-sector", sz_sector, "total-Sz sector or 'none'");
        add("output", values.output, "CSV path (default: standard output)");
        add("checkpoint-dir", values.checkpoint_dir, "directory for ground-state checkpoints");
        add("workers", values.workers, "worker threads");
        app.get_option("--lengths")->delimiter(',');
    }

    [[nodiscard]] ScanConfig resolve() const {
        ScanConfig c;
        if(!config_path.empty()) apply_config_file(config_path, c);
        for(CLI::Option *o : given) {
            if(o->count() == 0) continue;
            const std::string &k = key.at(o);
            if(k == "lambda") c.lambda = values.lambda;
            else if(k == "d-min") c.d_min = values.d_min;
            else if(k == "d-max") c.d_max = values.d_max;
            else if(k == "d-step") c.d_step = values.d_step;
            else if(k == "delta") c.delta = values.delta;
            else if(k == "lengths") c.lengths = values.lengths;
            else if(k == "m") c.m = values.m;
            else if(k == "sweeps") c.sweeps = values.sweeps;
            else if(k == "lanczos-tol") c.lanczos_tol = values.lanczos_tol;
            else if(k == "h1") c.h1 = values.h1;
            else if(k == "sz-sector") {
                std::istringstream in("sz_sector = " + sz_sector);
                apply_config_text(in, c);
            } else if(k == "output") c.output = values.output;
            else if(k == "checkpoint-dir") c.checkpoint_dir = values.checkpoint_dir;
            else if(k == "workers") c.workers = values.workers;
        }
        c.validate();
        return c;
    }
};

int do_scan(const ScanConfig &config, std::ostream &out, std::ostream &err) {
    std::size_t failed = 0;
    if(config.output.empty()) {
        for(const auto &r : run_scan(config, out, &err)) failed += r.error.empty() ? 0 : 1;
    } else {
        std::ofstream file(config.output, std::ios::trunc);
        if(!file) throw IoError("cannot open " + config.output + " for writing");
        for(const auto &r : run_scan(config, file, &err)) failed += r.error.empty() ? 0 : 1;
        file.close();
        if(!file) throw IoError("writing " + config.output + " failed");
    }
    if(failed > 0) err << failed << " grid point(s) failed; their rows hold NaN\n";
    return kOk;
}

int do_ed_check(const ScanConfig &config, std::ostream &out) {
    const EdTolerance tol;
    const auto        rows = run_ed_check(config, tol);
    bool              ok   = true;
    out << "L,D,energy_delta,overlap_delta,entropy_delta,status\n";
    for(const auto &r : rows) {
        out << r.length << ',' << g17(r.d) << ',' << g6(r.energy_delta) << ',' << g6(r.overlap_delta) << ','
            << g6(r.entropy_delta) << ',' << (r.ok ? "ok" : "FAIL") << '\n';
        ok = ok && r.ok;
    }
    return ok ? kOk : kCheckFailed;
}

int do_fid(const std::string &path_a, const std::string &path_b, double delta, std::ostream &out) {
    const auto a = load_checkpoint(path_a);
    const auto b = load_checkpoint(path_b);
    if(!(delta > 0.0)) {
        delta = std::abs(b.params.d_aniso - a.params.d_aniso);
        if(!(delta > 0.0)) delta = kDefaultDelta;
    }
    const double f = std::min(overlap(a, b), 1.0);
    out << "fidelity " << g17(f) << '\n';
    out << "delta " << g17(delta) << '\n';
    out << "susceptibility " << g17(susceptibility(f, delta, a.params.length)) << '\n';
    return kOk;
}

} // namespace

int exit_code_for(const std::exception &e) {
    if(dynamic_cast<const ConfigError *>(&e)) return kConfig;
    if(dynamic_cast<const CapacityError *>(&e)) return kCapacity;
    if(dynamic_cast<const ConvergenceError *>(&e)) return kConvergence;
    if(dynamic_cast<const IoError *>(&e)) return kIo;
    if(dynamic_cast<const ParseError *>(&e)) return kParse;
    if(dynamic_cast<const FitError *>(&e)) return kFit;
    if(dynamic_cast<const Error *>(&e)) return kDomain;
    return kDomain;
}

void apply_config_text(std::istream &in, ScanConfig &c) {
    std::string line;
    int         lineno = 0;
    while(std::getline(in, line)) {
        ++lineno;
        if(const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if(t.empty()) continue;
        const auto eq = t.find('=');
        if(eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string k = trim(std::string_view(t).substr(0, eq));
        const std::string v = trim(std::string_view(t).substr(eq + 1));

        if(k == "lambda") c.lambda = parse_number<double>(k, v);
        else if(k == "d_min") c.d_min = parse_number<double>(k, v);
        else if(k == "d_max") c.d_max = parse_number<double>(k, v);
        else if(k == "d_step") c.d_step = parse_number<double>(k, v);
        else if(k == "delta") c.delta = parse_number<double>(k, v);
        else if(k == "lengths") c.lengths = parse_lengths(k, v);
        else if(k == "m") c.m = parse_number<int>(k, v);
        else if(k == "sweeps") c.sweeps = parse_number<int>(k, v);
        else if(k == "lanczos_tol") c.lanczos_tol = parse_number<double>(k, v);
        else if(k == "h1") c.h1 = parse_number<double>(k, v);
        else if(k == "sz_sector") {
            if(v == "none") c.sz_sector.reset();
            else c.sz_sector = parse_number<int>(k, v);
        } else if(k == "output") c.output = v;
        else if(k == "checkpoint_dir") c.checkpoint_dir = v;
        else if(k == "workers") c.workers = parse_number<int>(k, v);
        else throw ConfigError("unknown config key '" + k + "' on line " + std::to_string(lineno));
    }
}

void apply_config_file(const std::filesystem::path &path, ScanConfig &config) {
    std::ifstream in(path);
    if(!in) throw IoError("cannot open config file " + path.string());
    apply_config_text(in, config);
}

FitKind parse_fit_kind(const std::string &name) {
    if(name == "dc-nu") return FitKind::dc_nu;
    if(name == "powerlaw") return FitKind::powerlaw;
    if(name == "saturation") return FitKind::saturation;
    if(name == "central-charge") return FitKind::central_charge;
    throw ConfigError("unknown fit kind '" + name + "' (expected dc-nu, powerlaw, saturation or central-charge)");
}

Observable default_observable(FitKind kind) {
    return kind == FitKind::central_charge ? Observable::entropy : Observable::susceptibility;
}

FitReport run_fit(FitKind kind, const std::vector<std::filesystem::path> &csvs, Observable observable) {
    std::vector<ScanRecord> rows;
    for(const auto &p : csvs) {
        auto part = read_scan_csv(p);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    if(rows.empty()) throw ParseError("no data rows", 2, 1);
    for(const auto &r : rows)
        if(r.lambda != rows.front().lambda) throw ConfigError("fit input mixes several lambda values");

    FitReport rep;
    rep.kind       = kind;
    rep.observable = observable;
    rep.peaks      = series_peaks(group_series(rows), observable);

    std::vector<SizePoint> pts;
    for(const auto &p : rep.peaks)
        pts.push_back({static_cast<double>(p.length), kind == FitKind::dc_nu ? p.peak.x : p.peak.y});

    switch(kind) {
        case FitKind::dc_nu: rep.result = fit_dc_nu(pts); break;
        case FitKind::powerlaw: {
            rep.result         = fit_powerlaw(pts);
            const double slope = rep.result.parameter("slope").value;
            try {
                if(observable == Observable::susceptibility)
                    rep.result.exponents = exponents_from_k(k_from_delta_q(-slope));
                else if(observable == Observable::energy_curvature)
                    rep.result.exponents = exponents_from_k(k_from_energy_exponent(slope));
            } catch(const DomainError &) {
                // slope maps outside 0 < K < 2; report the fit alone
            }
            break;
        }
        case FitKind::saturation: rep.result = fit_saturation(pts); break;
        case FitKind::central_charge: rep.result = fit_central_charge(pts); break;
    }
    return rep;
}

void print_fit_report(std::ostream &out, const FitReport &rep) {
    out << "fit " << fit_kind_name(rep.kind) << " on " << observable_name(rep.observable) << " peaks\n";
    out << "  L      D_max                 peak value\n";
    for(const auto &p : rep.peaks) {
        std::array<char, 96> buf{};
        std::snprintf(buf.data(), buf.size(), "  %-6d %-21.12g %.12g\n", p.length, p.peak.x, p.peak.y);
        out << buf.data();
    }
    out << "parameters (" << rep.result.points_used << " points, rss " << g6(rep.result.rss) << ")\n";
    for(const auto &p : rep.result.parameters) {
        std::array<char, 128> buf{};
        std::snprintf(buf.data(), buf.size(), "  %-10s %.10g +/- %.3g\n", p.name.c_str(), p.value, p.sigma);
        out << buf.data();
    }
    if(const auto &e = rep.result.exponents) {
        out << "implied exponents\n";
        out << "  K " << g6(e->K) << "  nu " << g6(e->nu) << "  Delta_Q " << g6(e->delta_q) << "  rho " << g6(e->rho)
            << "  -(rho-1)/nu " << g6(e->energy_exponent) << '\n';
        out << "  first singular energy derivative: order " << (e->order >= 5 ? ">= 5" : std::to_string(e->order))
            << (e->marginal ? " (marginal)" : "") << '\n';
    }
}

void write_fit_csv(std::ostream &out, const FitReport &rep) {
    out << "parameter,value,sigma\n";
    for(const auto &p : rep.result.parameters) out << p.name << ',' << g17(p.value) << ',' << g17(p.sigma) << '\n';
    out << "rss," << g17(rep.result.rss) << ",nan\n";
    out << "points_used," << rep.result.points_used << ",nan\n";
    if(rep.result.exponents) out << "K," << g17(rep.result.exponents->K) << ",nan\n";
}

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Fidelity and entanglement scans of the spin-1 XXZ chain with single-ion anisotropy"};
    app.require_subcommand(1);

    ScanFlags scan_flags;
    auto     *scan = app.add_subcommand("scan", "paired DMRG runs over a (L, D) grid, CSV output");
    scan_flags.attach(*scan);

    ScanFlags ed_flags;
    auto     *ed = app.add_subcommand("ed-check", "compare DMRG with exact diagonalization (L <= 12)");
    ed_flags.attach(*ed);

    std::string ckpt_a, ckpt_b;
    double      fid_delta = 0.0;
    auto       *fid       = app.add_subcommand("fid", "fidelity between two checkpoints");
    fid->add_option("ckptA", ckpt_a)->required();
    fid->add_option("ckptB", ckpt_b)->required();
    fid->add_option("--delta", fid_delta, "parameter step (default: difference of the stored D values)");

    std::string              kind_name;
    std::vector<std::string> csvs;
    std::string              obs_name;
    std::string              fit_output;
    auto                    *fit = app.add_subcommand("fit", "finite-size fit of per-L peaks from scan CSVs");
    fit->add_option("kind", kind_name, "dc-nu, powerlaw, saturation or central-charge")->required();
    fit->add_option("csv", csvs, "scan CSV files")->required();
    fit->add_option("--observable", obs_name, "susceptibility, entropy or energy-curvature");
    fit->add_option("--output", fit_output, "write fitted parameters as CSV");

    try {
        app.parse(argc, argv);
    } catch(const CLI::ParseError &e) {
        std::ostringstream o, x;
        const int          code = app.exit(e, o, x);
        out << o.str();
        err << x.str();
        return code == 0 ? kOk : kConfig;
    }

    try {
        if(*scan) return do_scan(scan_flags.resolve(), out, err);
        if(*ed) return do_ed_check(ed_flags.resolve(), out);
        if(*fid) return do_fid(ckpt_a, ckpt_b, fid_delta, out);
        if(*fit) {
            const FitKind kind = parse_fit_kind(kind_name);
            const auto    obs  = obs_name.empty() ? default_observable(kind) : parse_observable(obs_name);
            const auto    rep  = run_fit(kind, {csvs.begin(), csvs.end()}, obs);
            print_fit_report(out, rep);
            if(!fit_output.empty()) {
                std::ofstream f(fit_output, std::ios::trunc);
                if(!f) throw IoError("cannot open " + fit_output + " for writing");
                write_fit_csv(f, rep);
                if(!f) throw IoError("writing " + fit_output + " failed");
            }
            return kOk;
        }
    } catch(const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
    return kConfig;
}

} // namespace spinfid::cli
