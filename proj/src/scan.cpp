#include "spinfid/scan.hpp"

#include "spinfid/checkpoint.hpp"
#include "spinfid/errors.hpp"
#include "spinfid/fidelity.hpp"
#include "spinfid/oracle.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

namespace spinfid {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double v) {
    if(std::isnan(v)) return "nan";
    std::array<char, 32> buf{};
    std::snprintf(buf.data(), buf.size(), "%.17g", v);
    return buf.data();
}

std::string checkpoint_name(double lambda, int length, double d) {
    std::array<char, 96> buf{};
    std::snprintf(buf.data(), buf.size(), "lambda%.6g_L%d_D%.12g.fdmr", lambda, length, d);
    return buf.data();
}

} // namespace

void ScanConfig::validate() const {
    if(!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
    if(!(d_min < d_max)) throw ConfigError("d_min must be below d_max");
    if(!(d_step > 0.0)) throw ConfigError("d_step must be positive");
    if(!(delta > 0.0)) throw ConfigError("delta must be positive");
    if(lengths.empty()) throw ConfigError("at least one length is required");
    for(int L : lengths)
        if(L < 4 || L % 2 != 0) throw ConfigError("lengths must be even and at least 4, got " + std::to_string(L));
    if(m < 2) throw ConfigError("m must be at least 2");
    if(sweeps < 1) throw ConfigError("sweeps must be at least 1");
    if(!(lanczos_tol > 0.0)) throw ConfigError("lanczos_tol must be positive");
    if(!std::isfinite(h1)) throw ConfigError("h1 must be finite");
    if(workers < 1) throw ConfigError("workers must be at least 1");
}

std::vector<double> ScanConfig::d_grid() const {
    const auto          n = static_cast<long>(std::floor((d_max - d_min) / d_step + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n + 1));
    for(long i = 0; i <= n; ++i) grid.push_back(d_min + static_cast<double>(i) * d_step);
    return grid;
}

DmrgConfig ScanConfig::dmrg() const {
    DmrgConfig c;
    c.m           = m;
    c.sweeps      = sweeps;
    c.lanczos_tol = lanczos_tol;
    c.sz_sector   = sz_sector;
    return c;
}

PointResult scan_point(const ScanConfig &config, int length, double d) {
    PointResult out;
    auto       &row = out.row;
    row.lambda      = config.lambda;
    row.length      = length;
    row.d_aniso     = d;
    row.delta       = config.delta;
    row.m           = config.m;
    row.energy = row.e_density = row.fidelity = row.susceptibility = row.entropy = row.max_trunc_error = kNaN;

    try {
        ModelParams pa{config.lambda, d, config.h1, length};
        ModelParams pb{config.lambda, d + config.delta, config.h1, length};
        const auto  a = run_dmrg(pa, config.dmrg());
        const auto  b = run_dmrg(pb, config.dmrg());
        if(!config.checkpoint_dir.empty()) {
            const std::filesystem::path dir(config.checkpoint_dir);
            save_checkpoint(dir / checkpoint_name(config.lambda, length, pa.d_aniso), a);
            save_checkpoint(dir / checkpoint_name(config.lambda, length, pb.d_aniso), b);
        }
        row.energy          = a.energy;
        row.e_density       = a.energy / length;
        row.fidelity        = std::min(overlap(a, b), 1.0);
        row.susceptibility  = susceptibility(row.fidelity, config.delta, length);
        row.entropy         = entanglement_entropy(a.rho_spectrum);
        row.max_trunc_error = std::max(a.max_trunc_error, b.max_trunc_error);
    } catch(const Error &e) {
        out.error = e.what();
        if(dynamic_cast<const IoError *>(&e) != nullptr) throw;
    }
    return out;
}

std::string format_csv_row(const ScanRecord &r) {
    std::string s;
    s += fmt17(r.lambda) + ',' + std::to_string(r.length) + ',' + fmt17(r.d_aniso) + ',' + fmt17(r.delta) + ',' +
         std::to_string(r.m) + ',' + fmt17(r.energy) + ',' + fmt17(r.e_density) + ',' + fmt17(r.fidelity) + ',' +
         fmt17(r.susceptibility) + ',' + fmt17(r.entropy) + ',' + fmt17(r.max_trunc_error);
    return s;
}

std::vector<PointResult> run_scan(const ScanConfig &config, std::ostream &csv, std::ostream *log) {
    config.validate();
    if(!config.checkpoint_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(config.checkpoint_dir, ec);
        if(ec) throw IoError("cannot create checkpoint directory " + config.checkpoint_dir + ": " + ec.message());
    }

    struct Task {
        int    length;
        double d;
    };
    std::vector<Task> tasks;
    for(int L : config.lengths)
        for(double d : config.d_grid()) tasks.push_back({L, d});

    std::vector<std::optional<PointResult>> results(tasks.size());
    std::vector<std::exception_ptr>         failures(tasks.size());
    std::mutex                              mu;
    std::condition_variable                 ready;
    std::atomic<std::size_t>                next{0};

    auto worker = [&] {
        for(std::size_t i = next++; i < tasks.size(); i = next++) {
            std::optional<PointResult> r;
            std::exception_ptr         fail;
            try {
                r = scan_point(config, tasks[i].length, tasks[i].d);
            } catch(...) {
                fail = std::current_exception();
            }
            {
                std::lock_guard lock(mu);
                results[i]  = std::move(r);
                failures[i] = fail;
            }
            ready.notify_all();
        }
    };

    const int                nthreads = std::min<int>(config.workers, static_cast<int>(tasks.size()));
    std::vector<std::thread> pool;
    for(int t = 0; t < nthreads; ++t) pool.emplace_back(worker);

    csv << kCsvHeader << '\n';
    std::vector<PointResult> out;
    std::exception_ptr       abort;
    for(std::size_t i = 0; i < tasks.size(); ++i) {
        std::unique_lock lock(mu);
        ready.wait(lock, [&] { return results[i].has_value() || failures[i]; });
        if(failures[i]) {
            abort = failures[i];
            next  = tasks.size();
            break;
        }
        PointResult r = std::move(*results[i]);
        lock.unlock();
        csv << format_csv_row(r.row) << '\n';
        csv.flush();
        if(!csv) {
            next  = tasks.size();
            abort = std::make_exception_ptr(IoError("writing scan CSV failed"));
            break;
        }
        if(log != nullptr) {
            *log << "L=" << r.row.length << " D=" << fmt17(r.row.d_aniso);
            if(r.error.empty())
                *log << " S=" << r.row.susceptibility << " E=" << r.row.entropy << '\n';
            else
                *log << " error: " << r.error << '\n';
        }
        out.push_back(std::move(r));
    }
    for(auto &t : pool) t.join();
    if(abort) std::rethrow_exception(abort);
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t                   start = 0;
    for(;;) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if(comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double parse_real(std::string_view f, long row, long col) {
    if(f == "nan" || f == "NaN" || f == "-nan") return kNaN;
    double v         = 0.0;
    const auto *last = f.data() + f.size();
    const auto  res  = std::from_chars(f.data(), last, v);
    if(f.empty() || res.ec != std::errc() || res.ptr != last)
        throw ParseError("expected a number, got '" + std::string(f) + "'", row, col);
    return v;
}

int parse_int(std::string_view f, long row, long col) {
    int         v    = 0;
    const auto *last = f.data() + f.size();
    const auto  res  = std::from_chars(f.data(), last, v);
    if(f.empty() || res.ec != std::errc() || res.ptr != last)
        throw ParseError("expected an integer, got '" + std::string(f) + "'", row, col);
    return v;
}

} // namespace

std::vector<ScanRecord> read_scan_csv(std::istream &in) {
    std::string line;
    if(!std::getline(in, line)) throw ParseError("empty CSV", 1, 1);
    if(!line.empty() && line.back() == '\r') line.pop_back();
    if(line != kCsvHeader) {
        const auto got  = split_fields(line);
        const auto want = split_fields(kCsvHeader);
        std::size_t col = 0;
        while(col < got.size() && col < want.size() && got[col] == want[col]) ++col;
        throw ParseError("unexpected CSV header", 1, static_cast<long>(col + 1));
    }

    std::vector<ScanRecord> rows;
    long                    row = 1;
    while(std::getline(in, line)) {
        ++row;
        if(!line.empty() && line.back() == '\r') line.pop_back();
        if(line.empty()) continue;
        const auto f = split_fields(line);
        if(f.size() != 11)
            throw ParseError("expected 11 fields, got " + std::to_string(f.size()), row,
                             static_cast<long>(std::min<std::size_t>(f.size(), 11) + (f.size() < 11 ? 1 : 0)));
        ScanRecord r;
        r.lambda          = parse_real(f[0], row, 1);
        r.length          = parse_int(f[1], row, 2);
        r.d_aniso         = parse_real(f[2], row, 3);
        r.delta           = parse_real(f[3], row, 4);
        r.m               = parse_int(f[4], row, 5);
        r.energy          = parse_real(f[5], row, 6);
        r.e_density       = parse_real(f[6], row, 7);
        r.fidelity        = parse_real(f[7], row, 8);
        r.susceptibility  = parse_real(f[8], row, 9);
        r.entropy         = parse_real(f[9], row, 10);
        r.max_trunc_error = parse_real(f[10], row, 11);
        rows.push_back(r);
    }
    if(in.bad()) throw IoError("reading CSV failed");
    return rows;
}

std::vector<ScanRecord> read_scan_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if(!in) throw IoError("cannot open " + path.string());
    return read_scan_csv(in);
}

std::vector<ScanSeries> group_series(const std::vector<ScanRecord> &rows) {
    std::map<std::pair<double, int>, ScanSeries> groups;
    for(const auto &r : rows) groups[{r.lambda, r.length}].records.push_back(r);
    std::vector<ScanSeries> out;
    for(auto &[key, s] : groups) {
        std::sort(s.records.begin(), s.records.end(),
                  [](const ScanRecord &a, const ScanRecord &b) { return a.d_aniso < b.d_aniso; });
        s.validate();
        out.push_back(std::move(s));
    }
    return out;
}

Observable parse_observable(std::string_view name) {
    if(name == "susceptibility") return Observable::susceptibility;
    if(name == "entropy") return Observable::entropy;
    if(name == "energy-curvature") return Observable::energy_curvature;
    throw ConfigError("unknown observable '" + std::string(name) +
                      "' (expected susceptibility, entropy or energy-curvature)");
}

std::string observable_name(Observable obs) {
    switch(obs) {
        case Observable::susceptibility: return "susceptibility";
        case Observable::entropy: return "entropy";
        case Observable::energy_curvature: return "energy-curvature";
    }
    return {};
}

std::vector<CurvePoint> observable_curve(const ScanSeries &series, Observable obs) {
    std::vector<CurvePoint> curve;
    if(obs == Observable::energy_curvature) {
        for(const auto &r : series.records)
            if(std::isnan(r.e_density))
                throw DomainError("energy curvature needs every grid point; L = " + std::to_string(r.length) +
                                  " has a failed row at D = " + fmt17(r.d_aniso));
        for(const auto &p : second_derivative(series)) curve.push_back({p.x, -p.y});
        return curve;
    }
    for(const auto &r : series.records) {
        const double v = obs == Observable::susceptibility ? r.susceptibility : r.entropy;
        if(!std::isnan(v)) curve.push_back({r.d_aniso, v});
    }
    return curve;
}

std::vector<SeriesPeak> series_peaks(const std::vector<ScanSeries> &series, Observable obs) {
    std::vector<SeriesPeak> out;
    for(const auto &s : series) {
        if(s.records.empty()) continue;
        const auto curve = observable_curve(s, obs);
        out.push_back({s.records.front().lambda, s.records.front().length, peak_location(curve)});
    }
    return out;
}

std::vector<EdCheckRow> run_ed_check(const ScanConfig &config, const EdTolerance &tol) {
    config.validate();
    for(int L : config.lengths)
        if(L > kMaxExactLength)
            throw CapacityError("exact diagonalization is limited to L <= " + std::to_string(kMaxExactLength) +
                                ", got " + std::to_string(L));

    std::vector<EdCheckRow> out;
    for(int L : config.lengths) {
        DmrgConfig dc = config.dmrg();
        if(L <= 10) dc.m = static_cast<int>(std::lround(std::pow(3.0, L / 2 - 1)));
        dc.m = std::max(dc.m, 2);
        for(double d : config.d_grid()) {
            const ModelParams pa{config.lambda, d, config.h1, L};
            const ModelParams pb{config.lambda, d + config.delta, config.h1, L};
            const auto        a  = run_dmrg(pa, dc);
            const auto        b  = run_dmrg(pb, dc);
            const auto        ea = exact_ground_state(pa);
            const auto        eb = exact_ground_state(pb);

            EdCheckRow row;
            row.length        = L;
            row.d             = d;
            row.energy_delta  = std::abs(a.energy - ea.energy);
            row.overlap_delta = std::abs(overlap(a, b) - exact_overlap(ea, eb));
            row.entropy_delta = std::abs(entanglement_entropy(a.rho_spectrum) - exact_half_chain_entropy(ea));
            row.ok = row.energy_delta <= tol.energy && row.overlap_delta <= tol.overlap && row.entropy_delta <= tol.entropy;
            out.push_back(row);
        }
    }
    return out;
}

} // namespace spinfid
