// chaokey: batch front end for the 9D chaotic cipher toolkit.
// Subcommands: simulate, analyze {lyapunov,bifurcation,zero-one,complexity},
// encrypt, decrypt, frame {protect,verify}, keystream, metrics.
//
// Exit codes: 0 success, 1 I/O, 2 usage/invalid argument, 3 numeric
// divergence, 4 format error, 5 missing key, 6 verification reject.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "chaokey/bifurcation.hpp"
#include "chaokey/chen9.hpp"
#include "chaokey/complexity.hpp"
#include "chaokey/csv.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/image.hpp"
#include "chaokey/image_cipher.hpp"
#include "chaokey/image_metrics.hpp"
#include "chaokey/integrate.hpp"
#include "chaokey/keystream.hpp"
#include "chaokey/lyapunov.hpp"
#include "chaokey/modbus.hpp"
#include "chaokey/modbus_crypt.hpp"
#include "chaokey/nist.hpp"
#include "chaokey/zero_one.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;
using namespace chaokey;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_usage = 2;
constexpr int exit_numeric = 3;
constexpr int exit_format = 4;
constexpr int exit_missing_key = 5;
constexpr int exit_reject = 6;

struct ExitWith {
    int code;
    std::string message;
};

State9 parse_init(const std::vector<double>& values) {
    State9 init{};
    if (values.empty()) {
        init.fill(0.1);
    } else if (values.size() == 1) {
        init.fill(values[0]);
    } else if (values.size() == 9) {
        for (int i = 0; i < 9; ++i) init[i] = values[i];
    } else {
        throw InvalidArgError("--init takes 1 or 9 values");
    }
    return init;
}

ordered_json init_json(const State9& init) {
    ordered_json arr = ordered_json::array();
    for (double v : init) arr.push_back(v);
    return arr;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const ordered_json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path.string());
}

void echo_config(const ordered_json& cfg) {
    ordered_json doc;
    doc["config"] = cfg;
    std::cout << doc.dump() << '\n';
}

std::vector<std::uint8_t> parse_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw InvalidArgError("hex string must have even length");
    auto nibble = [](char ch) -> int {
        if (ch >= '0' && ch <= '9') return ch - '0';
        if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
        if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
        throw InvalidArgError(std::string("bad hex digit '") + ch + "'");
    };
    std::vector<std::uint8_t> out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2)
        out.push_back(static_cast<std::uint8_t>(nibble(hex[i]) << 4 | nibble(hex[i + 1])));
    return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0xF]);
    }
    return out;
}

CipherKey load_key_checked(const std::string& path) {
    if (path.empty()) throw ExitWith{exit_missing_key, "no key file given (--key)"};
    if (!fs::exists(path)) throw ExitWith{exit_missing_key, "key file not found: " + path};
    return load_key(path);
}

/// Column of a trajectory-style CSV (header row naming the columns).
std::vector<double> read_csv_column(const fs::path& path, const std::string& column,
                                    std::size_t every) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw FormatError("empty CSV: " + path.string());

    int col = -1;
    {
        std::istringstream hs(header);
        std::string name;
        for (int i = 0; std::getline(hs, name, ','); ++i)
            if (name == column) { col = i; break; }
    }
    if (col < 0)
        throw InvalidArgError("column '" + column + "' not found in " + path.string());

    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row++ % every != 0) continue;
        std::istringstream ls(line);
        std::string field;
        for (int i = 0; i <= col; ++i)
            if (!std::getline(ls, field, ','))
                throw FormatError("short row in " + path.string());
        values.push_back(std::stod(field));
    }
    return values;
}

ordered_json channel_metrics_json(const ChannelView& view, int n_pairs, std::uint64_t seed) {
    const auto counts = histogram(view.bytes());
    ordered_json hist = ordered_json::array();
    for (auto c : counts) hist.push_back(c);

    ordered_json m;
    m["histogram"] = std::move(hist);
    m["chi_square"] = histogram_chi_square(counts);
    m["entropy"] = information_entropy(view.bytes());
    for (Direction dir : {Direction::Horizontal, Direction::Vertical, Direction::Diagonal}) {
        try {
            m[std::string("corr_") + direction_name(dir)] =
                adjacent_correlation(view, dir, n_pairs, seed);
        } catch (const DegenerateInputError&) {
            m[std::string("corr_") + direction_name(dir)] = nullptr;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const SystemParams& params, const State9& init, double dt,
                 std::int64_t steps, std::int64_t transient, bool include_u4u8,
                 const std::string& out_path) {
    ordered_json cfg{{"command", "simulate"},
                     {"a", params.a}, {"b", params.b}, {"c", params.c},
                     {"init", init_json(init)},
                     {"dt", dt}, {"steps", steps}, {"transient", transient},
                     {"include_u4u8", include_u4u8}, {"output", out_path}};
    const Trajectory traj = simulate(init, params, dt, steps, transient, include_u4u8);
    auto out = open_output(out_path);
    csv::write_trajectory(out, traj);
    if (!out) throw IoError("short write to " + out_path);
    echo_config(cfg);
    return exit_ok;
}

int cmd_analyze_lyapunov(const SystemParams& params, const State9& init,
                         const LyapunovOptions& opt, const std::string& out_path,
                         const std::string& trace_path) {
    ordered_json cfg{{"command", "analyze lyapunov"},
                     {"a", params.a}, {"b", params.b}, {"c", params.c},
                     {"init", init_json(init)},
                     {"dt", opt.dt}, {"total_time", opt.total_time},
                     {"transient_time", opt.transient_time},
                     {"reorth_interval", opt.reorth_interval}};

    std::vector<LyapunovTracePoint> trace;
    const LyapunovSpectrum spec =
        lyapunov_spectrum(params, init, opt, trace_path.empty() ? nullptr : &trace);

    double sum = 0.0;
    std::string signs;
    for (double e : spec.exponents) {
        sum += e;
        if (e > 0.1) signs.push_back('+');
        else if (std::fabs(e) < 0.05) signs.push_back('0');
        else if (e < -0.1) signs.push_back('-');
        else signs.push_back('?');
    }

    ordered_json doc;
    doc["config"] = cfg;
    doc["exponents"] = spec.exponents;
    doc["sum"] = sum;
    doc["analytic_divergence"] = Chen9System{params}.divergence();
    doc["sign_pattern"] = signs;
    doc["settle_time"] = spec.settle_time;
    write_json(out_path, doc);

    if (!trace_path.empty()) {
        auto out = open_output(trace_path);
        csv::write_lyapunov_trace(out, trace);
    }
    return exit_ok;
}

int cmd_analyze_bifurcation(const SystemParams& params, const std::string& vary,
                            double lo, double hi, int points, int component_1based,
                            double dt, std::int64_t steps, std::int64_t transient,
                            const std::string& out_path) {
    ordered_json cfg{{"command", "analyze bifurcation"},
                     {"vary", vary}, {"lo", lo}, {"hi", hi}, {"points", points},
                     {"component", component_1based},
                     {"a", params.a}, {"b", params.b}, {"c", params.c},
                     {"dt", dt}, {"steps", steps}, {"transient", transient},
                     {"output", out_path}};
    const BifurcationData data =
        bifurcation_scan(params, param_axis_from_name(vary), lo, hi, points,
                         component_1based - 1, dt, steps, transient);
    auto out = open_output(out_path);
    csv::write_bifurcation(out, data);
    echo_config(cfg);
    return exit_ok;
}

int cmd_analyze_zero_one(const std::string& input, const std::string& column,
                         std::size_t every, std::optional<double> c01, std::uint64_t seed,
                         const std::string& out_path, const std::string& sp_path) {
    ordered_json cfg{{"command", "analyze zero-one"},
                     {"input", input}, {"column", column}, {"every", every},
                     {"seed", seed}};
    if (c01) cfg["c01"] = *c01;

    const std::vector<double> x = read_csv_column(input, column, every);
    const ZeroOneResult res = zero_one_test(x, c01, seed);

    ordered_json doc;
    doc["config"] = cfg;
    doc["K"] = res.K;
    doc["c_used"] = res.c_used;
    doc["samples"] = x.size();
    write_json(out_path, doc);

    if (!sp_path.empty()) {
        auto out = open_output(sp_path);
        out << "n,s,p\n";
        for (std::size_t i = 0; i < res.s.size(); ++i)
            out << (i + 1) << ',' << csv::num(res.s[i]) << ',' << csv::num(res.p[i]) << '\n';
    }
    return exit_ok;
}

int cmd_analyze_complexity_grid(double a_lo, double a_hi, std::size_t a_points,
                                double c_lo, double c_hi, std::size_t c_points,
                                double b_fixed, const ComplexityGridOptions& opt,
                                const std::string& se_path, const std::string& c0_path) {
    ordered_json cfg{{"command", "analyze complexity"},
                     {"a_lo", a_lo}, {"a_hi", a_hi}, {"a_points", a_points},
                     {"c_lo", c_lo}, {"c_hi", c_hi}, {"c_points", c_points},
                     {"b", b_fixed}, {"dt", opt.dt}, {"transient", opt.transient},
                     {"downsample", opt.downsample}, {"samples", opt.samples},
                     {"c0_threshold", opt.c0_threshold}};
    const ComplexityGrid grid =
        complexity_grid(a_lo, a_hi, a_points, c_lo, c_hi, c_points, b_fixed, opt);
    {
        auto out = open_output(se_path);
        csv::write_grid(out, grid.a_values, grid.c_values, grid.se);
    }
    {
        auto out = open_output(c0_path);
        csv::write_grid(out, grid.a_values, grid.c_values, grid.c0);
    }
    echo_config(cfg);
    return exit_ok;
}

int cmd_analyze_complexity_sequence(const std::string& input, const std::string& column,
                                    std::size_t every, double c0_threshold,
                                    const std::string& out_path) {
    ordered_json cfg{{"command", "analyze complexity"},
                     {"input", input}, {"column", column}, {"every", every},
                     {"c0_threshold", c0_threshold}};
    const std::vector<double> x = read_csv_column(input, column, every);
    ordered_json doc;
    doc["config"] = cfg;
    doc["spectral_entropy"] = spectral_entropy(x);
    doc["c0"] = c0_complexity(x, c0_threshold);
    doc["samples"] = x.size();
    write_json(out_path, doc);
    return exit_ok;
}

int cmd_encrypt(const std::string& in_path, const std::string& out_path,
                const std::string& key_path, const std::string& user_seed,
                const std::optional<Rect>& region, const std::string& metrics_path,
                int metric_pairs, std::uint64_t metric_seed) {
    const RgbImage img = read_image(in_path);
    std::span<const std::uint8_t> seed_bytes(
        reinterpret_cast<const std::uint8_t*>(user_seed.data()), user_seed.size());
    const CipherKey key = derive_key(img, seed_bytes);

    const auto t0 = std::chrono::steady_clock::now();
    const CipherImage cipher = encrypt_image(img, key, region);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    save_cipher(out_path, cipher);
    save_key(key_path, key);

    ordered_json cfg{{"command", "encrypt"},
                     {"input", in_path}, {"output", out_path}, {"key", key_path},
                     {"region", {cipher.region.x, cipher.region.y, cipher.region.w,
                                 cipher.region.h}},
                     {"user_seed_bytes", user_seed.size()}};
    ordered_json doc;
    doc["config"] = cfg;
    doc["padded_width"] = cipher.padded_w();
    doc["padded_height"] = cipher.padded_h();
    doc["encrypt_seconds"] = seconds; // informational only

    if (!metrics_path.empty()) {
        ordered_json rep;
        rep["config"] = cfg;
        const char* names[3] = {"R", "G", "B"};
        for (int c = 0; c < 3; ++c) {
            const ChannelView view(cipher.ch[c].data(), cipher.padded_w(), cipher.padded_h());
            rep[names[c]] = channel_metrics_json(view, metric_pairs, metric_seed);
        }
        write_json(metrics_path, rep);
        doc["metrics"] = metrics_path;
    }
    std::cout << doc.dump() << '\n';
    return exit_ok;
}

int cmd_decrypt(const std::string& in_path, const std::string& key_path,
                const std::string& out_path) {
    const CipherKey key = load_key_checked(key_path);
    const CipherImage cipher = load_cipher(in_path);

    const auto t0 = std::chrono::steady_clock::now();
    const RgbImage img = decrypt_image(cipher, key);
    const auto t1 = std::chrono::steady_clock::now();

    write_image(out_path, img);

    ordered_json doc;
    doc["config"] = ordered_json{{"command", "decrypt"},
                                 {"input", in_path}, {"key", key_path},
                                 {"output", out_path}};
    doc["width"] = img.width;
    doc["height"] = img.height;
    doc["decrypt_seconds"] = std::chrono::duration<double>(t1 - t0).count();
    std::cout << doc.dump() << '\n';
    return exit_ok;
}

int cmd_frame_protect(const std::string& key_path, std::uint64_t nonce,
                      const std::string& hex_body) {
    const CipherKey key = load_key_checked(key_path);
    const auto body = parse_hex(hex_body);
    if (body.size() < 2) throw InvalidArgError("frame body needs address and function bytes");

    const modbus::Frame plain = modbus::build_frame(
        body[0], body[1], std::span(body).subspan(2));
    const modbus::Frame protected_frame = modbus::encrypt_crc(plain, key, nonce);
    std::cout << to_hex(modbus::to_bytes(protected_frame)) << '\n';
    return exit_ok;
}

int cmd_frame_verify(const std::string& key_path, std::uint64_t nonce,
                     const std::string& hex_frame) {
    const CipherKey key = load_key_checked(key_path);
    const auto bytes = parse_hex(hex_frame);
    const modbus::Frame frame = modbus::parse_frame(bytes);
    const auto verdict = modbus::verify_frame(frame, key, nonce);
    if (verdict == modbus::Verdict::Accept) {
        std::cout << "Accept\n";
        return exit_ok;
    }
    std::cout << "Reject\n";
    return exit_reject;
}

int cmd_keystream(const std::string& key_path, std::int64_t bits, std::int64_t bytes,
                  const std::string& sequence, const std::string& out_path,
                  const std::string& nist_path) {
    CipherKey key;
    if (!key_path.empty()) {
        key = load_key_checked(key_path);
    } else {
        key.init.fill(0.1); // reference key: system defaults, init all 0.1
    }
    if ((bits > 0) == (bytes > 0))
        throw InvalidArgError("pass exactly one of --bits or --bytes");

    const std::size_t n_values =
        bits > 0 ? static_cast<std::size_t>((bits + 7) / 8) : static_cast<std::size_t>(bytes);
    const KeystreamSequences seq = generate_sequences(key, n_values);

    const std::vector<double>* chosen = &seq.a;
    if (sequence == "x") chosen = &seq.x;
    else if (sequence == "y") chosen = &seq.y;
    else if (sequence == "h") chosen = &seq.h;
    else if (sequence == "v") chosen = &seq.v;
    else if (sequence == "m") chosen = &seq.m;
    else if (sequence != "a") throw InvalidArgError("--sequence must be one of a,x,y,h,v,m");

    ordered_json cfg{{"command", "keystream"},
                     {"key", key_path.empty() ? "(reference)" : key_path},
                     {"sequence", sequence}, {"output", out_path}};
    if (bits > 0) {
        auto all_bits = quantize_bits(*chosen, key.quantizer_scale);
        all_bits.resize(static_cast<std::size_t>(bits));
        nist::export_bits(all_bits, out_path);
        cfg["bits"] = bits;
        if (!nist_path.empty()) {
            ordered_json rep;
            rep["config"] = cfg;
            rep["nist"] = ordered_json::array();
            for (const auto& r : nist::nist_subset(all_bits))
                rep["nist"].push_back(ordered_json{{"name", r.name},
                                                   {"p", r.p},
                                                   {"pass", r.pass},
                                                   {"applicable", r.applicable}});
            write_json(nist_path, rep);
        }
    } else {
        if (!nist_path.empty())
            throw InvalidArgError("--nist needs --bits output");
        const auto data = quantize_bytes(*chosen, key.quantizer_scale);
        auto out = open_output(out_path);
        out.write(reinterpret_cast<const char*>(data.data()),
                  static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("short write to " + out_path);
        cfg["bytes"] = bytes;
    }
    echo_config(cfg);
    return exit_ok;
}

int cmd_metrics(const std::string& img1_path, const std::string& img2_path,
                const std::string& out_path, int n_pairs, std::uint64_t seed) {
    ordered_json cfg{{"command", "metrics"},
                     {"image1", img1_path}, {"pairs", n_pairs}, {"seed", seed}};
    if (!img2_path.empty()) cfg["image2"] = img2_path;

    const RgbImage img1 = read_image(img1_path);
    ordered_json doc;
    doc["config"] = cfg;

    const char* names[3] = {"R", "G", "B"};
    for (int c = 0; c < 3; ++c)
        doc[names[c]] = channel_metrics_json(ChannelView(img1, c), n_pairs, seed);

    if (!img2_path.empty()) {
        const RgbImage img2 = read_image(img2_path);
        doc["ssim"] = ssim(img1, img2);
        const PixelDiff diff = pixel_diff(img1, img2);
        doc["pixel_diff"] = ordered_json{{"max", diff.max_difference},
                                         {"count", diff.differing_pixels}};
    }
    write_json(out_path, doc);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"chaokey: chaotic keystream toolkit (9D system, DNA image cipher, "
                 "Modbus CRC protection, security metrics)"};
    app.require_subcommand(1);
    app.set_config("--config")->description("flat key=value config file");

    // shared system/trajectory options
    SystemParams params;
    std::vector<double> init_values;
    double dt = 1e-3;
    std::int64_t steps = 1000000, transient = 50000;
    bool include_u4u8 = false;

    auto add_system_opts = [&](CLI::App* sub) {
        sub->add_option("--a", params.a, "parameter a")->capture_default_str();
        sub->add_option("--b", params.b, "parameter b")->capture_default_str();
        sub->add_option("--c", params.c, "parameter c")->capture_default_str();
        sub->add_option("--init", init_values,
                        "initial condition: one value for all components or nine values");
        sub->add_option("--dt", dt, "integration step")->capture_default_str();
    };

    // simulate
    std::string out_path;
    auto* sim = app.add_subcommand("simulate", "integrate the system, write trajectory CSV");
    add_system_opts(sim);
    sim->add_option("--steps", steps, "retained steps")->capture_default_str();
    sim->add_option("--transient", transient, "discarded steps")->capture_default_str();
    sim->add_flag("--include-u4u8", include_u4u8, "add the u4*u8 term to the ninth equation");
    sim->add_option("-o,--output", out_path, "trajectory CSV path")->required();

    // analyze
    auto* analyze = app.add_subcommand("analyze", "dynamics analyses");
    analyze->require_subcommand(1);

    LyapunovOptions lyap_opt;
    std::string trace_path;
    auto* lyap = analyze->add_subcommand("lyapunov", "Benettin/QR Lyapunov spectrum");
    add_system_opts(lyap);
    lyap->add_option("--total-time", lyap_opt.total_time)->capture_default_str();
    lyap->add_option("--transient-time", lyap_opt.transient_time)->capture_default_str();
    lyap->add_option("--reorth", lyap_opt.reorth_interval, "steps between QR passes")
        ->capture_default_str();
    lyap->add_option("-o,--output", out_path, "result JSON path")->required();
    lyap->add_option("--trace", trace_path, "convergence trace CSV path");

    std::string vary = "a";
    double lo = 20.0, hi = 30.0;
    int points = 500, component = 1;
    auto* bif = analyze->add_subcommand("bifurcation", "local-maxima bifurcation scan");
    add_system_opts(bif);
    bif->add_option("--vary", vary, "swept parameter: a, b or c")->capture_default_str();
    bif->add_option("--lo", lo)->capture_default_str();
    bif->add_option("--hi", hi)->capture_default_str();
    bif->add_option("--points", points)->capture_default_str();
    bif->add_option("--component", component, "state component, 1-based (1 = u1)")
        ->capture_default_str();
    bif->add_option("--steps", steps, "retained steps per value")->capture_default_str();
    bif->add_option("--transient", transient)->capture_default_str();
    bif->add_option("-o,--output", out_path, "CSV path")->required();

    std::string input_path, column = "u1", sp_path;
    std::size_t every = 1;
    double c01_value = 0.0;
    std::uint64_t seed = 1;
    auto* zo = analyze->add_subcommand("zero-one", "0-1 test for chaos on a CSV column");
    zo->add_option("--input", input_path, "trajectory/sequence CSV")->required();
    zo->add_option("--column", column, "CSV column name")->capture_default_str();
    zo->add_option("--every", every, "keep every k-th row")->capture_default_str();
    auto* c01_opt = zo->add_option("--c01", c01_value, "explicit test frequency in (0, pi)");
    zo->add_option("--seed", seed)->capture_default_str();
    zo->add_option("-o,--output", out_path, "result JSON path")->required();
    zo->add_option("--sp-out", sp_path, "translation components CSV path");

    double a_lo = 20.0, a_hi = 30.0, c_lo = 0.5, c_hi = 2.0, b_fixed = 23.0;
    std::size_t a_points = 21, c_points = 21;
    ComplexityGridOptions grid_opt;
    std::string se_path, c0_path;
    auto* cx = analyze->add_subcommand(
        "complexity", "SE/C0 of a sequence (--input) or over an (a,c) grid");
    cx->add_option("--input", input_path, "sequence CSV (single-sequence mode)");
    cx->add_option("--column", column)->capture_default_str();
    cx->add_option("--every", every)->capture_default_str();
    cx->add_option("--a-lo", a_lo)->capture_default_str();
    cx->add_option("--a-hi", a_hi)->capture_default_str();
    cx->add_option("--a-points", a_points)->capture_default_str();
    cx->add_option("--c-lo", c_lo)->capture_default_str();
    cx->add_option("--c-hi", c_hi)->capture_default_str();
    cx->add_option("--c-points", c_points)->capture_default_str();
    cx->add_option("--b", b_fixed)->capture_default_str();
    cx->add_option("--samples", grid_opt.samples, "per-cell sequence length")
        ->capture_default_str();
    cx->add_option("--downsample", grid_opt.downsample)->capture_default_str();
    cx->add_option("--transient", grid_opt.transient)->capture_default_str();
    cx->add_option("--r", grid_opt.c0_threshold, "C0 spectral threshold")->capture_default_str();
    cx->add_option("-o,--output", out_path, "result JSON (single-sequence mode)");
    cx->add_option("--se-out", se_path, "SE grid CSV (grid mode)");
    cx->add_option("--c0-out", c0_path, "C0 grid CSV (grid mode)");

    // encrypt / decrypt
    std::string image_path, key_path, metrics_path, user_seed;
    std::vector<std::uint32_t> region_values;
    int metric_pairs = 3000;
    std::uint64_t metric_seed = 1;
    auto* enc = app.add_subcommand("encrypt", "encrypt an image, emit container + key file");
    enc->add_option("-i,--input", image_path, "PNG or PPM input")->required();
    enc->add_option("-o,--output", out_path, "cipher container path")->required();
    enc->add_option("--key-out", key_path, "key file to write")->required();
    enc->add_option("--user-seed", user_seed, "extra secret stirred into the key");
    enc->add_option("--region", region_values, "x y w h of the sub-image to encrypt")
        ->expected(4);
    enc->add_option("--metrics", metrics_path, "write cipher-quality report JSON here");
    enc->add_option("--pairs", metric_pairs)->capture_default_str();
    enc->add_option("--seed", metric_seed, "metrics sampling seed")->capture_default_str();

    auto* dec = app.add_subcommand("decrypt", "decrypt a cipher container");
    dec->add_option("-i,--input", image_path, "cipher container")->required();
    dec->add_option("--key", key_path, "key file written by encrypt");
    dec->add_option("-o,--output", out_path, "decrypted image path (PNG or .ppm)")->required();

    // frame
    std::uint64_t nonce = 0;
    std::string hex_arg;
    auto* frame = app.add_subcommand("frame", "Modbus RTU CRC protection");
    frame->require_subcommand(1);
    auto* protect = frame->add_subcommand("protect", "build frame, encrypt its CRC");
    protect->add_option("--key", key_path, "key file");
    protect->add_option("--nonce", nonce, "per-frame counter")->required();
    protect->add_option("frame", hex_arg, "address+function+data as hex")->required();
    auto* verify = frame->add_subcommand("verify", "decrypt CRC and check the frame");
    verify->add_option("--key", key_path, "key file");
    verify->add_option("--nonce", nonce, "per-frame counter")->required();
    verify->add_option("frame", hex_arg, "full frame (encrypted CRC) as hex")->required();

    // keystream
    std::int64_t ks_bits = 0, ks_bytes = 0;
    std::string sequence = "a", nist_path;
    auto* ks = app.add_subcommand("keystream", "export quantized keystream");
    ks->add_option("--key", key_path, "key file (default: reference key, init all 0.1)");
    ks->add_option("--bits", ks_bits, "emit this many bits as ASCII 0/1");
    ks->add_option("--bytes", ks_bytes, "emit this many raw bytes");
    ks->add_option("--sequence", sequence, "which sequence: a,x,y,h,v,m")
        ->capture_default_str();
    ks->add_option("-o,--output", out_path)->required();
    ks->add_option("--nist", nist_path,
                   "also run the Frequency/Block Frequency/Runs subset, write JSON here");

    // metrics
    std::string img2_path;
    auto* met = app.add_subcommand("metrics", "security metrics of one or two images");
    met->add_option("image1", image_path, "image to analyse")->required();
    met->add_option("image2", img2_path, "reference image (adds SSIM / pixel diff)");
    met->add_option("-o,--output", out_path, "report JSON path")->required();
    met->add_option("--pairs", metric_pairs)->capture_default_str();
    met->add_option("--seed", metric_seed)->capture_default_str();

    try {
        app.parse(argc, argv);

        if (sim->parsed())
            return cmd_simulate(params, parse_init(init_values), dt, steps, transient,
                                include_u4u8, out_path);
        if (lyap->parsed()) {
            lyap_opt.dt = dt;
            return cmd_analyze_lyapunov(params, parse_init(init_values), lyap_opt, out_path,
                                        trace_path);
        }
        if (bif->parsed())
            return cmd_analyze_bifurcation(params, vary, lo, hi, points, component, dt,
                                           steps, transient, out_path);
        if (zo->parsed())
            return cmd_analyze_zero_one(input_path, column, every,
                                        c01_opt->count() ? std::optional<double>(c01_value)
                                                         : std::nullopt,
                                        seed, out_path, sp_path);
        if (cx->parsed()) {
            if (!input_path.empty()) {
                if (out_path.empty())
                    throw InvalidArgError("single-sequence mode needs -o/--output");
                return cmd_analyze_complexity_sequence(input_path, column, every,
                                                       grid_opt.c0_threshold, out_path);
            }
            if (se_path.empty() || c0_path.empty())
                throw InvalidArgError("grid mode needs --se-out and --c0-out");
            return cmd_analyze_complexity_grid(a_lo, a_hi, a_points, c_lo, c_hi, c_points,
                                               b_fixed, grid_opt, se_path, c0_path);
        }
        if (enc->parsed()) {
            std::optional<Rect> region;
            if (!region_values.empty())
                region = Rect{region_values[0], region_values[1], region_values[2],
                              region_values[3]};
            return cmd_encrypt(image_path, out_path, key_path, user_seed, region,
                               metrics_path, metric_pairs, metric_seed);
        }
        if (dec->parsed()) return cmd_decrypt(image_path, key_path, out_path);
        if (protect->parsed()) return cmd_frame_protect(key_path, nonce, hex_arg);
        if (verify->parsed()) return cmd_frame_verify(key_path, nonce, hex_arg);
        if (ks->parsed())
            return cmd_keystream(key_path, ks_bits, ks_bytes, sequence, out_path, nist_path);
        if (met->parsed())
            return cmd_metrics(image_path, img2_path, out_path, metric_pairs, metric_seed);
        return exit_usage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_usage;
    } catch (const ExitWith& e) {
        std::cerr << "chaokey: " << e.message << '\n';
        return e.code;
    } catch (const InvalidArgError& e) {
        std::cerr << "chaokey: " << e.what() << '\n';
        return exit_usage;
    } catch (const DimensionMismatchError& e) {
        std::cerr << "chaokey: " << e.what() << '\n';
        return exit_usage;
    } catch (const NonFiniteError& e) {
        std::cerr << "chaokey: " << e.what() << '\n';
        return exit_numeric;
    } catch (const FormatError& e) {
        std::cerr << "chaokey: " << e.what() << '\n';
        return exit_format;
    } catch (const IoError& e) {
        std::cerr << "chaokey: " << e.what() << '\n';
        return exit_io;
    } catch (const std::exception& e) {
        std::cerr << "chaokey: " << e.what() << '\n';
        return exit_usage;
    }
}
