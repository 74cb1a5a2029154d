#include "pcbench/config.hpp"

#include "pcbench/csv.hpp"
#include "pcbench/units.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace pcbench::io {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Key suggestions for mistyped fields.

namespace {

// Optimal string alignment distance (Levenshtein with adjacent transpositions).
std::size_t osa_distance(std::string_view a, std::string_view b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<std::vector<std::size_t>> d(n + 1, std::vector<std::size_t>(m + 1));
    for (std::size_t i = 0; i <= n; ++i) d[i][0] = i;
    for (std::size_t j = 0; j <= m; ++j) d[0][j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        for (std::size_t j = 1; j <= m; ++j) {
            const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
            d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost});
            if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
                d[i][j] = std::min(d[i][j], d[i - 2][j - 2] + 1);
            }
        }
    }
    return d[n][m];
}

// Spellings a user might type for a snake_case key: the key itself, without
// underscores, and as an abbreviation (initials, or initials plus the last
// word: r_theta_ja -> "rtj", "rtja").
std::vector<std::string> spellings(std::string_view key) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : key) {
        if (c == '_') {
            if (!cur.empty()) parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) parts.push_back(cur);

    std::vector<std::string> out{std::string(key)};
    std::string joined, initials;
    for (const auto& p : parts) {
        joined += p;
        initials.push_back(p.front());
    }
    out.push_back(joined);
    if (parts.size() > 1) {
        out.push_back(initials);
        out.push_back(initials.substr(0, initials.size() - 1) + parts.back());
    }
    return out;
}

std::string suggest(std::string_view unknown, std::span<const std::string_view> known) {
    std::string best;
    std::size_t best_d = std::numeric_limits<std::size_t>::max();
    for (auto k : known) {
        for (const auto& s : spellings(k)) {
            const std::size_t d = osa_distance(unknown, s);
            if (d < best_d) {
                best_d = d;
                best = std::string(k);
            }
        }
    }
    const std::size_t limit = std::max<std::size_t>(2, unknown.size() / 3);
    return best_d <= limit ? best : std::string();
}

// ---------------------------------------------------------------------------
// Strict section reader.

class Section {
public:
    Section(const json& j, std::string path, std::initializer_list<std::string_view> keys)
        : j_(j), path_(std::move(path)), keys_(keys) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
        for (const auto& [key, value] : j_.items()) {
            if (std::find(keys_.begin(), keys_.end(), key) == keys_.end()) {
                std::string reason = "unknown key '" + key + "'";
                const auto s = suggest(key, keys_);
                if (!s.empty()) reason += " (did you mean '" + s + "'?)";
                throw ConfigError(at(key), reason);
            }
        }
    }

    [[nodiscard]] bool has(std::string_view key) const { return j_.contains(std::string(key)); }
    [[nodiscard]] const json& raw(std::string_view key) const { return j_.at(std::string(key)); }
    [[nodiscard]] std::string at(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    [[nodiscard]] double number(std::string_view key, double fallback) const {
        return has(key) ? as_number(raw(key), at(key)) : fallback;
    }
    [[nodiscard]] double required_number(std::string_view key) const {
        if (!has(key)) throw ConfigError(at(key), "required field is missing");
        return as_number(raw(key), at(key));
    }
    [[nodiscard]] std::optional<double> optional_number(std::string_view key) const {
        if (!has(key)) return std::nullopt;
        return as_number(raw(key), at(key));
    }
    [[nodiscard]] std::uint64_t count(std::string_view key, std::uint64_t fallback) const {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_number_unsigned()) throw ConfigError(at(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }
    [[nodiscard]] bool flag(std::string_view key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!raw(key).is_boolean()) throw ConfigError(at(key), "expected true or false");
        return raw(key).get<bool>();
    }
    [[nodiscard]] std::optional<std::string> text(std::string_view key) const {
        if (!has(key)) return std::nullopt;
        if (!raw(key).is_string()) throw ConfigError(at(key), "expected a string");
        return raw(key).get<std::string>();
    }
    [[nodiscard]] std::vector<double> numbers(std::string_view key, std::vector<double> fallback) const {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], at(key) + "[" + std::to_string(i) + "]"));
        return out;
    }
    [[nodiscard]] Section child(std::string_view key, std::initializer_list<std::string_view> keys) const {
        static const json empty = json::object();
        return {has(key) ? raw(key) : empty, at(key), keys};
    }

    static double as_number(const json& v, const std::string& path) {
        if (!v.is_number()) throw ConfigError(path, "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(path, "expected a finite number");
        return d;
    }

private:
    const json& j_;
    std::string path_;
    std::vector<std::string_view> keys_;
};

void require(bool ok, const std::string& path, const std::string& reason) {
    if (!ok) throw ConfigError(path, reason);
}

std::string resolve_path(const std::string& p, const std::filesystem::path& base) {
    std::filesystem::path path(p);
    if (path.is_relative() && !base.empty()) path = base / path;
    return path.lexically_normal().string();
}

std::string num(double v) { return format_number(v); }

DeviceCard parse_device(const json& j, const std::string& path) {
    const Section s(j, path, {"k", "mu", "w_channel", "l_channel", "c_ox", "v_t", "t_ref", "mu_exponent", "vt_slope"});
    DeviceCard c;
    c.k = s.optional_number("k");
    c.mu = s.optional_number("mu");
    c.w_channel = s.optional_number("w_channel");
    c.l_channel = s.optional_number("l_channel");
    c.c_ox = s.optional_number("c_ox");
    c.v_t = s.required_number("v_t");
    c.t_ref = s.number("t_ref", c.t_ref);
    c.mu_exponent = s.number("mu_exponent", c.mu_exponent);
    c.vt_slope = s.number("vt_slope", c.vt_slope);

    const int geometry = int(c.mu.has_value()) + int(c.w_channel.has_value()) + int(c.l_channel.has_value()) +
                         int(c.c_ox.has_value());
    if (c.k) {
        require(geometry == 0, s.at("k"), "give either k or (mu, w_channel, l_channel, c_ox), not both");
        require(*c.k > 0.0, s.at("k"), "must be > 0");
    } else {
        require(geometry == 4, path, "needs k or all of mu, w_channel, l_channel, c_ox");
    }
    require(to_kelvin(c.t_ref) > 0.0, s.at("t_ref"), "must be above absolute zero");
    try {
        const auto m = c.model();
        m.params.validate();
        m.coeffs.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    }
    return c;
}

}  // namespace

// ---------------------------------------------------------------------------

device::DeviceModel DeviceCard::model() const {
    device::DeviceModel m;
    if (k) {
        m.params = device::DeviceParams::from_gain(*k, v_t, to_kelvin(t_ref));
    } else {
        m.params.mu = mu.value_or(0.0);
        m.params.w_channel = w_channel.value_or(0.0);
        m.params.l_channel = l_channel.value_or(0.0);
        m.params.c_ox = c_ox.value_or(0.0);
        m.params.v_t = v_t;
        m.params.t_ref = to_kelvin(t_ref);
    }
    m.coeffs.mu_exponent = mu_exponent;
    m.coeffs.vt_slope = vt_slope;
    return m;
}

thermal::ThermalNetwork ThermalSection::network() const { return {stages, to_kelvin(t_c)}; }

cycling::TestConfig RunConfig::test_config() const {
    cycling::TestConfig t;
    t.v_dc = cycling.v_dc;
    t.v_gs = cycling.v_gs;
    t.t_c = to_kelvin(thermal.t_c);
    t.t_j_max = to_kelvin(cycling.t_j_max);
    t.f_sw = cycling.f_sw;
    t.n_cycles = cycling.n_cycles;
    t.switching = losses::dpt_energies(dpt, 2).energies;
    if (cycling.i_pulse) {
        t.i_pulse = *cycling.i_pulse;
    } else if (cycling.r_load) {
        t.i_pulse = cycling::current_from_series_resistance(t, device_model(), *cycling.r_load);
    }
    return t;
}

cycling::PulseSchedule RunConfig::schedule() const {
    return cycling::make_schedule(cycling.period, cycling.duty, cycling.n_devices, cycling.mode);
}

cycling::AgingModel RunConfig::aging_model() const {
    return {aging.degradation, aging.clamp, aging.electrical_feedback};
}

RunConfig load_config(std::string_view text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<document>", std::string("malformed JSON: ") + e.what());
    }

    const Section root(doc, "",
                       {"device", "thermal", "dpt", "cycling", "aging", "iv_sweep", "sweep", "lifetime", "fit_device",
                        "output_dir"});
    RunConfig cfg;

    // device: inline card or path to a card file
    if (!root.has("device")) throw ConfigError("device", "required section is missing");
    if (root.raw("device").is_string()) {
        const auto card_path = resolve_path(root.raw("device").get<std::string>(), base_dir);
        json card;
        try {
            card = json::parse(read_text_file(card_path));
        } catch (const json::parse_error& e) {
            throw ConfigError("device", "malformed device card '" + card_path + "': " + e.what());
        } catch (const IoError& e) {
            throw ConfigError("device", e.what());
        }
        cfg.device = parse_device(card, "device");
    } else {
        cfg.device = parse_device(root.raw("device"), "device");
    }

    // thermal
    {
        if (!root.has("thermal")) throw ConfigError("thermal", "required section is missing");
        const auto s = root.child("thermal", {"t_c", "r_theta_ja", "tau", "stages"});
        cfg.thermal.t_c = s.required_number("t_c");
        require(to_kelvin(cfg.thermal.t_c) > 0.0, s.at("t_c"), "must be above absolute zero");
        if (s.has("stages")) {
            require(!s.has("r_theta_ja") && !s.has("tau"), s.at("stages"),
                    "give either stages or r_theta_ja/tau, not both");
            const auto& arr = s.raw("stages");
            require(arr.is_array() && !arr.empty(), s.at("stages"), "expected a non-empty array");
            cfg.thermal.stages.clear();
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const Section st(arr[i], s.at("stages") + "[" + std::to_string(i) + "]", {"r_theta", "tau"});
                const thermal::Stage stage{st.required_number("r_theta"), st.required_number("tau")};
                require(stage.r_theta > 0.0, st.at("r_theta"), "must be > 0");
                require(stage.tau > 0.0, st.at("tau"), "must be > 0");
                cfg.thermal.stages.push_back(stage);
            }
        } else {
            const thermal::Stage stage{s.number("r_theta_ja", kDefaultRThetaJa), s.number("tau", kDefaultTau)};
            require(stage.r_theta > 0.0, s.at("r_theta_ja"), "must be > 0");
            require(stage.tau > 0.0, s.at("tau"), "must be > 0");
            cfg.thermal.stages = {stage};
        }
    }

    // dpt
    {
        const auto s = root.child("dpt", {"v_dc", "inductance", "first_pulse", "t_rise", "t_fall", "off_time",
                                          "second_pulse", "current_limit"});
        auto& d = cfg.dpt;
        d.v_dc = s.number("v_dc", d.v_dc);
        d.inductance = s.number("inductance", d.inductance);
        d.first_pulse = s.number("first_pulse", d.first_pulse);
        d.t_rise = s.number("t_rise", d.t_rise);
        d.t_fall = s.number("t_fall", d.t_fall);
        d.off_time = s.number("off_time", d.off_time);
        d.second_pulse = s.number("second_pulse", d.second_pulse);
        d.current_limit = s.number("current_limit", d.current_limit);
        try {
            d.validate();
            (void)losses::dpt_energies(d, 2);
        } catch (const std::invalid_argument& e) {
            throw ConfigError("dpt", e.what());
        }
    }

    // cycling
    {
        const auto s = root.child("cycling", {"v_dc", "i_pulse", "r_load", "v_gs", "t_j_max", "f_sw", "n_cycles",
                                              "period", "duty", "n_devices", "mode"});
        auto& c = cfg.cycling;
        c.v_dc = s.number("v_dc", c.v_dc);
        c.i_pulse = s.optional_number("i_pulse");
        c.r_load = s.optional_number("r_load");
        c.v_gs = s.number("v_gs", c.v_gs);
        c.t_j_max = s.number("t_j_max", c.t_j_max);
        c.f_sw = s.number("f_sw", c.f_sw);
        c.n_cycles = s.count("n_cycles", c.n_cycles);
        c.period = s.number("period", c.period);
        c.duty = s.number("duty", c.duty);
        c.n_devices = s.count("n_devices", c.n_devices);
        if (const auto m = s.text("mode")) {
            try {
                c.mode = cycling::mode_from_string(*m);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(s.at("mode"), e.what());
            }
        }
        require(c.v_dc > 0.0, s.at("v_dc"), "must be > 0");
        require(!(c.i_pulse && c.r_load), s.at("i_pulse"), "give either i_pulse or r_load, not both");
        if (c.i_pulse) require(*c.i_pulse >= 0.0, s.at("i_pulse"), "must be >= 0");
        if (c.r_load) require(*c.r_load >= 0.0, s.at("r_load"), "must be >= 0");
        require(c.f_sw >= 0.0, s.at("f_sw"), "must be >= 0");
        if (!(c.t_j_max > cfg.thermal.t_c)) {
            throw ConfigError(s.at("t_j_max"), "cycling.t_j_max (" + num(c.t_j_max) +
                                                   " degC) must exceed thermal.t_c (" + num(cfg.thermal.t_c) +
                                                   " degC)");
        }
        try {
            (void)cfg.schedule();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("cycling", e.what());
        }
    }

    // aging
    {
        const auto s = root.child("aging", {"alpha", "n0", "beta", "delta_t_ref", "m", "threshold", "v_clamp",
                                            "v_offset", "electrical_feedback"});
        auto& a = cfg.aging;
        a.degradation.alpha = s.number("alpha", a.degradation.alpha);
        a.degradation.n0 = s.number("n0", a.degradation.n0);
        a.degradation.beta = s.number("beta", a.degradation.beta);
        a.degradation.delta_t_ref = s.number("delta_t_ref", a.degradation.delta_t_ref);
        a.degradation.m = s.number("m", a.degradation.m);
        a.failure.threshold = s.number("threshold", a.failure.threshold);
        a.clamp.v_clamp = s.number("v_clamp", a.clamp.v_clamp);
        a.clamp.v_offset = s.number("v_offset", a.clamp.v_offset);
        a.electrical_feedback = s.flag("electrical_feedback", a.electrical_feedback);
        try {
            a.degradation.validate();
            a.failure.validate();
            a.clamp.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError("aging", e.what());
        }
    }

    // iv_sweep
    {
        const auto s = root.child("iv_sweep", {"v_gs", "v_ds", "v_ds_start", "v_ds_stop", "v_ds_step", "t_j"});
        auto& iv = cfg.iv_sweep;
        iv.v_gs = s.numbers("v_gs", iv.v_gs);
        iv.t_j = s.number("t_j", iv.t_j);
        require(to_kelvin(iv.t_j) > 0.0, s.at("t_j"), "must be above absolute zero");
        const bool range = s.has("v_ds_start") || s.has("v_ds_stop") || s.has("v_ds_step");
        if (s.has("v_ds")) {
            require(!range, s.at("v_ds"), "give either v_ds or v_ds_start/v_ds_stop/v_ds_step, not both");
            iv.v_ds = s.numbers("v_ds", {});
        } else {
            const double start = s.number("v_ds_start", 0.0);
            const double stop = s.number("v_ds_stop", 20.0);
            const double step = s.number("v_ds_step", 0.5);
            require(step > 0.0, s.at("v_ds_step"), "must be > 0");
            iv.v_ds.clear();
            if (stop >= start) {
                const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
                for (std::size_t i = 0; i < n; ++i) iv.v_ds.push_back(start + step * static_cast<double>(i));
            }
        }
        for (std::size_t i = 0; i < iv.v_ds.size(); ++i) {
            require(iv.v_ds[i] >= 0.0, s.at("v_ds") + "[" + std::to_string(i) + "]", "must be >= 0");
        }
    }

    // sweep
    {
        const auto s = root.child("sweep", {"t_c", "delta_tj"});
        cfg.sweep.t_c = s.numbers("t_c", {});
        cfg.sweep.delta_tj = s.numbers("delta_tj", {});
        for (std::size_t i = 0; i < cfg.sweep.t_c.size(); ++i) {
            require(to_kelvin(cfg.sweep.t_c[i]) > 0.0, s.at("t_c") + "[" + std::to_string(i) + "]",
                    "must be above absolute zero");
        }
        for (std::size_t i = 0; i < cfg.sweep.delta_tj.size(); ++i) {
            require(cfg.sweep.delta_tj[i] > 0.0, s.at("delta_tj") + "[" + std::to_string(i) + "]", "must be > 0");
        }
    }

    // lifetime
    {
        const auto s = root.child("lifetime", {"points", "points_csv", "noise"});
        auto& l = cfg.lifetime;
        if (s.has("points")) {
            const auto& arr = s.raw("points");
            require(arr.is_array(), s.at("points"), "expected an array of [delta_tj_K, nf_cycles] pairs");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const auto p = s.at("points") + "[" + std::to_string(i) + "]";
                require(arr[i].is_array() && arr[i].size() == 2, p, "expected [delta_tj_K, nf_cycles]");
                l.points.push_back({Section::as_number(arr[i][0], p), Section::as_number(arr[i][1], p)});
            }
        }
        if (auto p = s.text("points_csv")) l.points_csv = resolve_path(*p, base_dir);
        l.noise = s.number("noise", l.noise);
        require(l.noise >= 0.0, s.at("noise"), "must be >= 0");
    }

    // fit_device
    {
        const auto s = root.child("fit_device", {"iv_points_csv", "noise", "t_ref"});
        auto& f = cfg.fit_device;
        if (auto p = s.text("iv_points_csv")) f.iv_points_csv = resolve_path(*p, base_dir);
        f.noise = s.number("noise", f.noise);
        f.t_ref = s.number("t_ref", f.t_ref);
        require(f.noise >= 0.0, s.at("noise"), "must be >= 0");
        require(to_kelvin(f.t_ref) > 0.0, s.at("t_ref"), "must be above absolute zero");
    }

    if (auto o = root.text("output_dir")) cfg.output_dir = *o;
    return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const IoError& e) {
        throw ConfigError("<file>", e.what());
    }
    return load_config(text, path.parent_path());
}

ordered_json device_card_json(const DeviceCard& c) {
    ordered_json j;
    if (c.k) j["k"] = *c.k;
    if (c.mu) j["mu"] = *c.mu;
    if (c.w_channel) j["w_channel"] = *c.w_channel;
    if (c.l_channel) j["l_channel"] = *c.l_channel;
    if (c.c_ox) j["c_ox"] = *c.c_ox;
    j["v_t"] = c.v_t;
    j["t_ref"] = c.t_ref;
    j["mu_exponent"] = c.mu_exponent;
    j["vt_slope"] = c.vt_slope;
    return j;
}

ordered_json echo(const RunConfig& cfg) {
    ordered_json j;
    j["device"] = device_card_json(cfg.device);

    ordered_json stages = ordered_json::array();
    for (const auto& s : cfg.thermal.stages) stages.push_back({{"r_theta", s.r_theta}, {"tau", s.tau}});
    j["thermal"] = {{"t_c", cfg.thermal.t_c}, {"stages", stages}};

    const auto& d = cfg.dpt;
    j["dpt"] = {{"v_dc", d.v_dc},           {"inductance", d.inductance}, {"first_pulse", d.first_pulse},
                {"t_rise", d.t_rise},       {"t_fall", d.t_fall},         {"off_time", d.off_time},
                {"second_pulse", d.second_pulse}};
    if (std::isfinite(d.current_limit)) j["dpt"]["current_limit"] = d.current_limit;

    const auto& c = cfg.cycling;
    ordered_json cyc;
    cyc["v_dc"] = c.v_dc;
    if (c.i_pulse) cyc["i_pulse"] = *c.i_pulse;
    if (c.r_load) cyc["r_load"] = *c.r_load;
    cyc["v_gs"] = c.v_gs;
    cyc["t_j_max"] = c.t_j_max;
    cyc["f_sw"] = c.f_sw;
    cyc["n_cycles"] = c.n_cycles;
    cyc["period"] = c.period;
    cyc["duty"] = c.duty;
    cyc["n_devices"] = c.n_devices;
    cyc["mode"] = std::string(cycling::to_string(c.mode));
    j["cycling"] = cyc;

    const auto& a = cfg.aging;
    j["aging"] = {{"alpha", a.degradation.alpha},
                  {"n0", a.degradation.n0},
                  {"beta", a.degradation.beta},
                  {"delta_t_ref", a.degradation.delta_t_ref},
                  {"m", a.degradation.m},
                  {"threshold", a.failure.threshold},
                  {"v_clamp", a.clamp.v_clamp},
                  {"v_offset", a.clamp.v_offset},
                  {"electrical_feedback", a.electrical_feedback}};

    j["iv_sweep"] = {{"v_gs", cfg.iv_sweep.v_gs}, {"v_ds", cfg.iv_sweep.v_ds}, {"t_j", cfg.iv_sweep.t_j}};
    j["sweep"] = {{"t_c", cfg.sweep.t_c}, {"delta_tj", cfg.sweep.delta_tj}};

    ordered_json pts = ordered_json::array();
    for (const auto& p : cfg.lifetime.points) pts.push_back({p.delta_t_j, p.n_f});
    ordered_json life;
    life["points"] = pts;
    if (cfg.lifetime.points_csv) life["points_csv"] = *cfg.lifetime.points_csv;
    life["noise"] = cfg.lifetime.noise;
    j["lifetime"] = life;

    ordered_json fit;
    if (cfg.fit_device.iv_points_csv) fit["iv_points_csv"] = *cfg.fit_device.iv_points_csv;
    fit["noise"] = cfg.fit_device.noise;
    fit["t_ref"] = cfg.fit_device.t_ref;
    j["fit_device"] = fit;

    j["output_dir"] = cfg.output_dir;
    return j;
}

}  // namespace pcbench::io
