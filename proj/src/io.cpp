#include "nss/io.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nss {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'N', 'S', 'S', 'C', 'K', 'P', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;

std::uint64_t fnv1a64(const unsigned char* data, std::size_t n,
                      std::uint64_t h = 0xcbf29ce484222325ull) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

void atomic_write(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    fs::rename(tmp, path);
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void parse_fail(const fs::path& path, int line, const std::string& msg) {
    throw std::runtime_error(path.string() + ":" + std::to_string(line) + ": " +
                             msg);
}

double to_double(const std::string& v, const fs::path& p, int line) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        parse_fail(p, line, "expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& v, const fs::path& p, int line) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    parse_fail(p, line, "expected true/false, got '" + v + "'");
}

template <typename T>
void append_raw(std::string& buf, const T& v) {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint format is little-endian");
    buf.append(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(const std::string& buf, std::size_t& off) {
    if (off + sizeof(T) > buf.size())
        throw std::runtime_error("checkpoint truncated");
    T v;
    std::memcpy(&v, buf.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

}  // namespace

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path.string());

    RunConfig cfg;
    cfg.schedule.clear();
    std::string section;
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') parse_fail(path, lineno, "malformed section header");
            section = line.substr(1, line.size() - 2);
            if (section != "run" && section != "model" && section != "grid" &&
                section != "schedule" && section != "init" && section != "convergence")
                parse_fail(path, lineno, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) parse_fail(path, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string qkey = section + "." + key;

        if (qkey == "run.kind") {
            if (val == "coarsening") cfg.kind = ExperimentKind::Coarsening;
            else if (val == "convergence") cfg.kind = ExperimentKind::Convergence;
            else parse_fail(path, lineno, "unknown experiment kind '" + val + "'");
        } else if (qkey == "run.output_dir") {
            cfg.output_dir = val;
        } else if (qkey == "run.sample_interval") {
            cfg.sample_interval = to_double(val, path, lineno);
        } else if (qkey == "run.checkpoint_interval") {
            cfg.checkpoint_interval = to_double(val, path, lineno);
        } else if (qkey == "model.eps") {
            cfg.model.eps = to_double(val, path, lineno);
        } else if (qkey == "model.kappa") {
            cfg.model.kappa = to_double(val, path, lineno);
        } else if (qkey == "model.A") {
            cfg.model.A = to_double(val, path, lineno);
        } else if (qkey == "model.dealias") {
            cfg.model.dealias = to_bool(val, path, lineno);
        } else if (qkey == "grid.N") {
            cfg.N = static_cast<int>(to_double(val, path, lineno));
        } else if (qkey == "grid.L") {
            cfg.L = to_double(val, path, lineno);
        } else if (qkey == "schedule.segment") {
            std::istringstream ss(val);
            ScheduleSegment seg;
            if (!(ss >> seg.t_end >> seg.dt))
                parse_fail(path, lineno, "segment wants 't_end dt'");
            std::string extra;
            if (ss >> extra) parse_fail(path, lineno, "trailing data in segment");
            cfg.schedule.push_back(seg);
        } else if (qkey == "init.kind") {
            if (val != "random" && val != "zero")
                parse_fail(path, lineno, "unknown init kind '" + val + "'");
            cfg.init_kind = val;
        } else if (qkey == "init.seed") {
            cfg.seed = static_cast<std::uint64_t>(std::stoull(val));
        } else if (qkey == "init.amplitude") {
            cfg.amplitude = to_double(val, path, lineno);
        } else if (qkey == "init.smooth") {
            cfg.smooth_init = to_bool(val, path, lineno);
        } else if (qkey == "init.startup") {
            if (val == "copy-initial") cfg.startup = StartupPolicy::CopyInitial;
            else if (val == "etd1-bootstrap") cfg.startup = StartupPolicy::Etd1Bootstrap;
            else parse_fail(path, lineno, "unknown startup policy '" + val + "'");
        } else if (qkey == "convergence.Ns") {
            std::istringstream ss(val);
            int n;
            cfg.conv_Ns.clear();
            while (ss >> n) cfg.conv_Ns.push_back(n);
            if (cfg.conv_Ns.empty()) parse_fail(path, lineno, "empty N list");
        } else if (qkey == "convergence.cfl") {
            cfg.conv_cfl = to_double(val, path, lineno);
        } else if (qkey == "convergence.T") {
            cfg.conv_T = to_double(val, path, lineno);
        } else {
            parse_fail(path, lineno, "unknown key '" + qkey + "'");
        }
    }

    // invariants
    double prev_end = 0.0;
    for (const auto& seg : cfg.schedule) {
        if (!(seg.dt > 0.0))
            throw std::runtime_error(path.string() + ": schedule dt must be positive");
        if (!(seg.t_end > prev_end))
            throw std::runtime_error(path.string() +
                                     ": schedule t_end must be strictly increasing");
        prev_end = seg.t_end;
    }
    if (cfg.kind == ExperimentKind::Coarsening && cfg.schedule.empty())
        throw std::runtime_error(path.string() + ": coarsening run needs a schedule");

    if (const char* env = std::getenv("NSS_OUTDIR")) cfg.output_dir = env;
    return cfg;
}

void save_config(const RunConfig& cfg, const fs::path& path) {
    std::string out;
    out += "[run]\n";
    out += std::string("kind = ") +
           (cfg.kind == ExperimentKind::Coarsening ? "coarsening" : "convergence") +
           "\n";
    out += "output_dir = " + cfg.output_dir + "\n";
    out += "sample_interval = " + fmt_double(cfg.sample_interval) + "\n";
    out += "checkpoint_interval = " + fmt_double(cfg.checkpoint_interval) + "\n";
    out += "\n[model]\n";
    out += "eps = " + fmt_double(cfg.model.eps) + "\n";
    out += "kappa = " + fmt_double(cfg.model.kappa) + "\n";
    out += "A = " + fmt_double(cfg.model.A) + "\n";
    out += std::string("dealias = ") + (cfg.model.dealias ? "true" : "false") + "\n";
    out += "\n[grid]\n";
    out += "N = " + std::to_string(cfg.N) + "\n";
    out += "L = " + fmt_double(cfg.L) + "\n";
    out += "\n[schedule]\n";
    for (const auto& seg : cfg.schedule)
        out += "segment = " + fmt_double(seg.t_end) + " " + fmt_double(seg.dt) +
               "\n";
    out += "\n[init]\n";
    out += "kind = " + cfg.init_kind + "\n";
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "amplitude = " + fmt_double(cfg.amplitude) + "\n";
    out += std::string("smooth = ") + (cfg.smooth_init ? "true" : "false") + "\n";
    out += std::string("startup = ") +
           (cfg.startup == StartupPolicy::CopyInitial ? "copy-initial"
                                                      : "etd1-bootstrap") +
           "\n";
    if (!cfg.conv_Ns.empty() || cfg.kind == ExperimentKind::Convergence) {
        out += "\n[convergence]\n";
        std::string ns;
        for (int n : cfg.conv_Ns) ns += (ns.empty() ? "" : " ") + std::to_string(n);
        out += "Ns = " + ns + "\n";
        out += "cfl = " + fmt_double(cfg.conv_cfl) + "\n";
        out += "T = " + fmt_double(cfg.conv_T) + "\n";
    }
    atomic_write(path, out);
}

CoarseningConfig coarsening_config(const RunConfig& cfg) {
    CoarseningConfig c;
    c.eps = cfg.model.eps;
    c.kappa = cfg.model.kappa;
    c.A = cfg.model.A;
    c.dealias = cfg.model.dealias;
    c.L = cfg.L;
    c.N = cfg.N;
    c.schedule = cfg.schedule;
    c.seed = cfg.seed;
    c.init_amplitude = cfg.init_kind == "zero" ? 0.0 : cfg.amplitude;
    c.smooth_init = cfg.smooth_init;
    c.sample_interval = cfg.sample_interval;
    return c;
}

ConvergenceConfig convergence_config(const RunConfig& cfg) {
    ConvergenceConfig c;
    c.Ns = cfg.conv_Ns;
    c.eps = cfg.model.eps;
    c.kappa = cfg.model.kappa;
    c.A = cfg.model.A;
    c.cfl = cfg.conv_cfl;
    c.T = cfg.conv_T;
    return c;
}

void write_checkpoint(const SchemeState& state, const RunConfig& cfg,
                      const fs::path& path) {
    std::string buf;
    buf.append(kMagic, sizeof(kMagic));
    append_raw(buf, kVersion);
    append_raw(buf, static_cast<std::uint32_t>(state.grid().N));
    append_raw(buf, state.grid().L);
    append_raw(buf, cfg.model.eps);
    append_raw(buf, cfg.model.kappa);
    append_raw(buf, cfg.model.A);
    append_raw(buf, static_cast<std::uint8_t>(cfg.model.dealias ? 1 : 0));
    append_raw(buf, state.t());
    append_raw(buf, static_cast<std::int64_t>(state.step_count()));
    append_raw(buf, state.dt());
    auto append_field = [&buf](const Field& f) {
        buf.append(reinterpret_cast<const char*>(f.v.data()),
                   f.v.size() * sizeof(double));
    };
    append_field(state.u());
    append_field(state.u_prev());
    append_field(state.u_prev2());
    const std::uint64_t sum =
        fnv1a64(reinterpret_cast<const unsigned char*>(buf.data()), buf.size());
    append_raw(buf, sum);
    atomic_write(path, buf);
}

SchemeState read_checkpoint(const fs::path& path, const RunConfig& cfg,
                            const SpectralGrid& grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (buf.size() < sizeof(kMagic) + sizeof(std::uint64_t))
        throw std::runtime_error("checkpoint truncated: " + path.string());

    const std::size_t payload = buf.size() - sizeof(std::uint64_t);
    std::uint64_t stored;
    std::memcpy(&stored, buf.data() + payload, sizeof(stored));
    const std::uint64_t computed =
        fnv1a64(reinterpret_cast<const unsigned char*>(buf.data()), payload);
    if (stored != computed)
        throw std::runtime_error("checkpoint checksum mismatch: " + path.string());

    std::size_t off = 0;
    if (std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file: " + path.string());
    off += sizeof(kMagic);
    if (read_raw<std::uint32_t>(buf, off) != kVersion)
        throw std::runtime_error("unsupported checkpoint version");
    const auto N = read_raw<std::uint32_t>(buf, off);
    const double L = read_raw<double>(buf, off);
    const double eps = read_raw<double>(buf, off);
    const double kappa = read_raw<double>(buf, off);
    const double A = read_raw<double>(buf, off);
    const bool dealias = read_raw<std::uint8_t>(buf, off) != 0;
    const double t = read_raw<double>(buf, off);
    const auto steps = read_raw<std::int64_t>(buf, off);
    const double dt = read_raw<double>(buf, off);

    if (static_cast<int>(N) != grid.N || L != grid.L)
        throw std::runtime_error("checkpoint grid does not match config");
    if (eps != cfg.model.eps || kappa != cfg.model.kappa || A != cfg.model.A ||
        dealias != cfg.model.dealias)
        throw std::runtime_error("checkpoint model parameters do not match config");

    const std::size_t field_bytes = grid.modes() * sizeof(double);
    if (payload != off + 3 * field_bytes)
        throw std::runtime_error("checkpoint payload length mismatch");

    auto read_field = [&](Field& f) {
        f = Field(grid);
        std::memcpy(f.v.data(), buf.data() + off, field_bytes);
        off += field_bytes;
    };
    Field u_n, u_nm1, u_nm2;
    read_field(u_n);
    read_field(u_nm1);
    read_field(u_nm2);

    SchemeState state(grid, u_n, dt, cfg.model, StartupPolicy::CopyInitial);
    state.restore(u_n, u_nm1, u_nm2, t, steps, cfg.model);
    return state;
}

namespace {
std::string trace_row_csv(const TraceRow& r) {
    return fmt_double(r.t) + "," + fmt_double(r.energy) + "," +
           fmt_double(r.modified_energy) + "," + fmt_double(r.roughness) + "," +
           fmt_double(r.slope) + "," +
           (r.char_length ? fmt_double(*r.char_length) : "nan") + "," +
           fmt_double(r.mass_mean) + "\n";
}
}  // namespace

void write_trace_csv(const CoarseningTrace& trace, const fs::path& path) {
    std::string out =
        "t,energy,modified_energy,roughness,slope,char_length,mass_mean\n";
    for (const TraceRow& r : trace.rows) out += trace_row_csv(r);
    atomic_write(path, out);
}

CoarseningTrace read_trace_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace: " + path.string());
    CoarseningTrace trace;
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("empty trace file: " + path.string());
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        if (vals.size() != 7)
            throw std::runtime_error(path.string() + ":" +
                                     std::to_string(lineno) +
                                     ": expected 7 columns");
        TraceRow r;
        r.t = vals[0];
        r.energy = vals[1];
        r.modified_energy = vals[2];
        r.roughness = vals[3];
        r.slope = vals[4];
        if (!std::isnan(vals[5])) r.char_length = vals[5];
        r.mass_mean = vals[6];
        trace.rows.push_back(r);
    }
    return trace;
}

void write_convergence_csv(const ConvergenceResult& result, const fs::path& path) {
    std::string out = "N,h,dt,err_l1,err_l2,err_linf\n";
    for (const auto& r : result.rows)
        out += std::to_string(r.N) + "," + fmt_double(r.h) + "," +
               fmt_double(r.dt) + "," + fmt_double(r.err_l1) + "," +
               fmt_double(r.err_l2) + "," + fmt_double(r.err_linf) + "\n";
    atomic_write(path, out);
}

}  // namespace nss
