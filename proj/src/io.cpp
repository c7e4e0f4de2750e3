#include "gdnls/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gdnls {

namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

void reject_unknown_keys(const json& j, const std::string& path,
                         std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok) config_error(path.empty() ? key : path + "." + key, "unknown key");
    }
}

cplx cplx_from_json(const json& j, const std::string& path) {
    if (j.is_number()) return cplx(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return cplx(j[0].get<double>(), j[1].get<double>());
    config_error(path, "expected number or [re, im]");
}

json cplx_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

Cutoff cutoff_from_json(const json& j, const std::string& path) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return Cutoff::infinite();
        config_error(path, "expected integer or \"inf\"");
    }
    if (j.is_number_integer()) {
        const int k = j.get<int>();
        if (k < 0) config_error(path, "cutoff must be >= 0");
        return Cutoff::at(k);
    }
    config_error(path, "expected integer or \"inf\"");
}

json cutoff_to_json(Cutoff c) {
    if (c.is_infinite()) return "inf";
    return c.k_max;
}

void store_le64(std::vector<std::byte>& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xff));
}

uint64_t load_le64(std::span<const std::byte> in, size_t off) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(in[off + i]) << (8 * i);
    return v;
}

void store_double(std::vector<std::byte>& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, 8);
    store_le64(out, bits);
}

double load_double(std::span<const std::byte> in, size_t off) {
    const uint64_t bits = load_le64(in, off);
    double d;
    std::memcpy(&d, &bits, 8);
    return d;
}

std::vector<std::byte> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::vector<char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::byte> bytes(data.size());
    std::memcpy(bytes.data(), data.data(), data.size());
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

uint64_t fnv1a64(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    uint64_t h = 1469598103934665603ull;
    for (size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number: " + s);
    return v;
}

SpectralField InitialSpec::realize(int num_modes) const {
    SpectralField f(num_modes);
    switch (kind) {
        case Kind::plane_wave:
            if (std::abs(wavenumber) > num_modes)
                throw std::invalid_argument("initial: wavenumber exceeds grid modes");
            f.mode(wavenumber) = amplitude;
            return f;
        case Kind::mode_list:
            for (const auto& [k, a] : modes) {
                if (std::abs(k) > num_modes)
                    throw std::invalid_argument("initial: mode exceeds grid modes");
                f.mode(k) = a;
            }
            return f;
        case Kind::smooth_preset:
            return smooth_preset(preset_name, preset_amplitude, num_modes);
        case Kind::file: {
            const auto bytes = read_file_bytes(path);
            if (checksum != 0 && fnv1a64(bytes.data(), bytes.size()) != checksum)
                throw std::runtime_error("initial: checksum mismatch for " + path.string());
            SpectralField loaded = field_from_binary(bytes);
            if (loaded.num_modes() != num_modes)
                throw std::runtime_error("initial: stored field has wrong mode count");
            return loaded;
        }
    }
    throw std::logic_error("unreachable");
}

SpectralField smooth_preset(const std::string& name, double amplitude, int num_modes) {
    if (name != "bump") throw std::invalid_argument("unknown preset: " + name);
    const int m = friendly_grid_size(4 * (2 * num_modes + 1));
    std::vector<cplx> grid(static_cast<size_t>(m));
    for (int j = 0; j < m; ++j) {
        const double x = 2.0 * M_PI * j / m;
        grid[static_cast<size_t>(j)] =
            amplitude * (1.0 + 0.3 * std::cos(x)) * std::exp(cplx(0.0, std::sin(x)));
    }
    return to_spectral(grid, num_modes);
}

void RunConfig::validate() const {
    if (num_modes < 1) throw std::invalid_argument("config: num_modes: must be >= 1");
    model.validate();
    solver.validate();
    if (!model.cutoff.is_infinite() && model.cutoff.k_max > num_modes)
        throw std::invalid_argument("config: model.cutoff exceeds num_modes");
}

json field_to_json(const SpectralField& f) {
    json coeffs = json::array();
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) coeffs.push_back(cplx_to_json(f.mode(k)));
    return json{{"N", n}, {"coeffs", coeffs}};
}

SpectralField field_from_json(const json& j) {
    reject_unknown_keys(j, "field", {"N", "coeffs"});
    const int n = j.at("N").get<int>();
    const auto& coeffs = j.at("coeffs");
    if (static_cast<int>(coeffs.size()) != 2 * n + 1)
        throw std::invalid_argument("field: coeffs must have 2N+1 entries");
    SpectralField f(n);
    for (int k = -n; k <= n; ++k) f.mode(k) = cplx_from_json(coeffs[static_cast<size_t>(k + n)], "coeffs");
    f.check_finite();
    return f;
}

std::vector<std::byte> field_to_binary(const SpectralField& f) {
    std::vector<std::byte> out;
    out.reserve(8 + 16 * static_cast<size_t>(f.size()));
    store_le64(out, static_cast<uint64_t>(f.num_modes()));
    const int n = f.num_modes();
    for (int k = -n; k <= n; ++k) {
        store_double(out, f.mode(k).real());
        store_double(out, f.mode(k).imag());
    }
    return out;
}

SpectralField field_from_binary(std::span<const std::byte> bytes) {
    if (bytes.size() < 8) throw std::invalid_argument("binary field: truncated header");
    const int n = static_cast<int>(load_le64(bytes, 0));
    const size_t expect = 8 + 16 * static_cast<size_t>(2 * n + 1);
    if (bytes.size() != expect) throw std::invalid_argument("binary field: size mismatch");
    SpectralField f(n);
    size_t off = 8;
    for (int k = -n; k <= n; ++k, off += 16)
        f.mode(k) = cplx(load_double(bytes, off), load_double(bytes, off + 8));
    f.check_finite();
    return f;
}

void write_invariants_csv(const std::filesystem::path& path,
                          const std::vector<InvariantRecord>& trace) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "t,mass,momentum,hamiltonian,hamiltonian_eps,energy_eps,h1,h2\n";
    for (const auto& r : trace) {
        out << format_double(r.t) << ',' << format_double(r.mass) << ','
            << format_double(r.momentum) << ',' << format_double(r.hamiltonian) << ','
            << format_double(r.hamiltonian_eps) << ',' << format_double(r.energy_eps) << ','
            << format_double(r.h1_norm) << ',' << format_double(r.h2_norm) << '\n';
    }
}

std::vector<InvariantRecord> read_invariants_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + path.string());
    std::vector<InvariantRecord> trace;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ss, cell, ',')) vals.push_back(parse_double(cell));
        if (vals.size() != 8) throw std::runtime_error("csv row with wrong column count");
        trace.push_back({vals[0], vals[1], vals[2], vals[3], vals[4], vals[5], vals[6], vals[7]});
    }
    return trace;
}

json config_to_json(const RunConfig& cfg) {
    json initial;
    switch (cfg.initial.kind) {
        case InitialSpec::Kind::plane_wave:
            initial = {{"kind", "plane_wave"},
                       {"amplitude", cplx_to_json(cfg.initial.amplitude)},
                       {"wavenumber", cfg.initial.wavenumber}};
            break;
        case InitialSpec::Kind::mode_list: {
            json modes = json::array();
            for (const auto& [k, a] : cfg.initial.modes)
                modes.push_back(json::array({k, cplx_to_json(a)}));
            initial = {{"kind", "mode_list"}, {"modes", modes}};
            break;
        }
        case InitialSpec::Kind::smooth_preset:
            initial = {{"kind", "smooth_preset"},
                       {"name", cfg.initial.preset_name},
                       {"amplitude", cfg.initial.preset_amplitude}};
            break;
        case InitialSpec::Kind::file:
            initial = {{"kind", "file"}, {"path", cfg.initial.path.string()}};
            if (cfg.initial.checksum != 0) initial["checksum"] = cfg.initial.checksum;
            break;
    }
    return json{
        {"num_modes", cfg.num_modes},
        {"model",
         {{"sigma", cfg.model.sigma},
          {"cutoff", cutoff_to_json(cfg.model.cutoff)},
          {"oversample", cfg.model.oversample}}},
        {"solver",
         {{"dt", cfg.solver.dt},
          {"t_final", cfg.solver.t_final},
          {"scheme", cfg.solver.scheme == Scheme::if_rk4 ? "if_rk4" : "if_euler"},
          {"snapshot_every", cfg.solver.snapshot_every},
          {"invariant_every", cfg.solver.invariant_every},
          {"blowup_threshold", cfg.solver.blowup_threshold}}},
        {"initial", initial},
        {"out_dir", cfg.out_dir.string()},
        {"seed", cfg.seed}};
}

RunConfig config_from_json(const json& j) {
    RunConfig cfg;
    reject_unknown_keys(j, "", {"num_modes", "model", "solver", "initial", "out_dir", "seed"});
    if (j.contains("num_modes")) cfg.num_modes = j["num_modes"].get<int>();
    if (j.contains("model")) {
        const json& m = j["model"];
        reject_unknown_keys(m, "model", {"sigma", "cutoff", "epsilon", "oversample"});
        if (m.contains("sigma")) cfg.model.sigma = m["sigma"].get<double>();
        if (m.contains("cutoff") && m.contains("epsilon"))
            config_error("model", "give cutoff or epsilon, not both");
        if (m.contains("cutoff")) cfg.model.cutoff = cutoff_from_json(m["cutoff"], "model.cutoff");
        if (m.contains("epsilon")) cfg.model.cutoff = Cutoff::from_epsilon(m["epsilon"].get<double>());
        if (m.contains("oversample")) cfg.model.oversample = m["oversample"].get<int>();
    }
    if (j.contains("solver")) {
        const json& s = j["solver"];
        reject_unknown_keys(s, "solver",
                            {"dt", "t_final", "scheme", "snapshot_every", "invariant_every",
                             "blowup_threshold"});
        if (s.contains("dt")) cfg.solver.dt = s["dt"].get<double>();
        if (s.contains("t_final")) cfg.solver.t_final = s["t_final"].get<double>();
        if (s.contains("scheme")) {
            const std::string scheme = s["scheme"].get<std::string>();
            if (scheme == "if_rk4") cfg.solver.scheme = Scheme::if_rk4;
            else if (scheme == "if_euler") cfg.solver.scheme = Scheme::if_euler;
            else config_error("solver.scheme", "expected if_rk4 or if_euler");
        }
        if (s.contains("snapshot_every")) cfg.solver.snapshot_every = s["snapshot_every"].get<int>();
        if (s.contains("invariant_every"))
            cfg.solver.invariant_every = s["invariant_every"].get<int>();
        if (s.contains("blowup_threshold"))
            cfg.solver.blowup_threshold = s["blowup_threshold"].get<double>();
    }
    if (j.contains("initial")) {
        const json& ic = j["initial"];
        const std::string kind = ic.value("kind", "plane_wave");
        if (kind == "plane_wave") {
            reject_unknown_keys(ic, "initial", {"kind", "amplitude", "wavenumber"});
            cfg.initial.kind = InitialSpec::Kind::plane_wave;
            if (ic.contains("amplitude"))
                cfg.initial.amplitude = cplx_from_json(ic["amplitude"], "initial.amplitude");
            if (ic.contains("wavenumber")) cfg.initial.wavenumber = ic["wavenumber"].get<int>();
        } else if (kind == "mode_list") {
            reject_unknown_keys(ic, "initial", {"kind", "modes"});
            cfg.initial.kind = InitialSpec::Kind::mode_list;
            cfg.initial.modes.clear();
            for (const auto& entry : ic.at("modes"))
                cfg.initial.modes.emplace_back(entry.at(0).get<int>(),
                                               cplx_from_json(entry.at(1), "initial.modes"));
        } else if (kind == "smooth_preset") {
            reject_unknown_keys(ic, "initial", {"kind", "name", "amplitude"});
            cfg.initial.kind = InitialSpec::Kind::smooth_preset;
            cfg.initial.preset_name = ic.value("name", "bump");
            if (ic.contains("amplitude")) cfg.initial.preset_amplitude = ic["amplitude"].get<double>();
        } else if (kind == "file") {
            reject_unknown_keys(ic, "initial", {"kind", "path", "checksum"});
            cfg.initial.kind = InitialSpec::Kind::file;
            cfg.initial.path = ic.at("path").get<std::string>();
            cfg.initial.checksum = ic.value("checksum", uint64_t{0});
        } else {
            config_error("initial.kind", "unknown kind " + kind);
        }
    }
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

void save_config(const RunConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << config_to_json(cfg).dump(2) << '\n';
}

void apply_override(json& config, const std::string& assignment) {
    const size_t eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("override must be key=value: " + assignment);
    const std::string key_path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    json* node = &config;
    std::stringstream ss(key_path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    if (parts.empty()) throw std::invalid_argument("override: empty key");
    for (size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];

    json parsed;
    try {
        parsed = json::parse(value);
    } catch (const json::parse_error&) {
        parsed = value;  // bare string
    }
    (*node)[parts.back()] = parsed;
}

void save_trajectory(const Trajectory& traj, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "snapshots");
    write_invariants_csv(dir / "invariants.csv", traj.invariant_trace);

    json index = json::array();
    int i = 0;
    for (const auto& [t, field] : traj.snapshots) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%06d.bin", i++);
        const auto bytes = field_to_binary(field);
        write_file_bytes(dir / "snapshots" / name, bytes);
        index.push_back({{"t", t},
                         {"file", std::string("snapshots/") + name},
                         {"checksum", fnv1a64(bytes.data(), bytes.size())}});
    }

    const char* term = traj.termination == Termination::completed     ? "completed"
                       : traj.termination == Termination::blowup_abort ? "blowup_abort"
                                                                       : "nonfinite_abort";
    json manifest{
        {"num_modes", traj.initial().num_modes()},
        {"model",
         {{"sigma", traj.params.sigma},
          {"cutoff", traj.params.cutoff.is_infinite() ? json("inf") : json(traj.params.cutoff.k_max)},
          {"oversample", traj.params.oversample}}},
        {"solver",
         {{"dt", traj.config.dt},
          {"t_final", traj.config.t_final},
          {"scheme", traj.config.scheme == Scheme::if_rk4 ? "if_rk4" : "if_euler"},
          {"snapshot_every", traj.config.snapshot_every},
          {"invariant_every", traj.config.invariant_every},
          {"blowup_threshold", traj.config.blowup_threshold}}},
        {"termination", term},
        {"snapshots", index}};
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << '\n';
}

Trajectory load_trajectory(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::runtime_error("cannot open manifest in " + dir.string());
    const json manifest = json::parse(in);

    Trajectory traj;
    const json& m = manifest.at("model");
    traj.params.sigma = m.at("sigma").get<double>();
    traj.params.cutoff = m.at("cutoff").is_string() ? Cutoff::infinite()
                                                    : Cutoff::at(m.at("cutoff").get<int>());
    traj.params.oversample = m.at("oversample").get<int>();

    const json& s = manifest.at("solver");
    traj.config.dt = s.at("dt").get<double>();
    traj.config.t_final = s.at("t_final").get<double>();
    traj.config.scheme =
        s.at("scheme").get<std::string>() == "if_euler" ? Scheme::if_euler : Scheme::if_rk4;
    traj.config.snapshot_every = s.at("snapshot_every").get<int>();
    traj.config.invariant_every = s.at("invariant_every").get<int>();
    traj.config.blowup_threshold = s.at("blowup_threshold").get<double>();

    const std::string term = manifest.at("termination").get<std::string>();
    traj.termination = term == "completed"     ? Termination::completed
                       : term == "blowup_abort" ? Termination::blowup_abort
                                                : Termination::nonfinite_abort;

    for (const auto& entry : manifest.at("snapshots")) {
        const auto bytes = read_file_bytes(dir / entry.at("file").get<std::string>());
        if (fnv1a64(bytes.data(), bytes.size()) != entry.at("checksum").get<uint64_t>())
            throw std::runtime_error("snapshot checksum mismatch in " + dir.string());
        traj.snapshots.emplace_back(entry.at("t").get<double>(), field_from_binary(bytes));
    }
    traj.invariant_trace = read_invariants_csv(dir / "invariants.csv");
    return traj;
}

}  // namespace gdnls
