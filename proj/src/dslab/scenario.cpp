#include "dslab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "dslab/energy.hpp"
#include "dslab/errors.hpp"
#include "dslab/gronwall.hpp"
#include "dslab/lp_props.hpp"
#include "dslab/rng.hpp"

namespace dslab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) {
        cur = trim(cur);
        if (!cur.empty()) out.push_back(cur);
    }
    return out;
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

double to_double(const std::string& s, int line, const std::string& key) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v))
        throw ParseError(line, "'" + key + "' expects a number, got '" + s + "'");
    return v;
}

long long to_int(const std::string& s, int line, const std::string& key) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ParseError(line, "'" + key + "' expects an integer, got '" + s + "'");
    return v;
}

std::uint64_t to_u64(const std::string& s, int line, const std::string& key) {
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ParseError(line, "'" + key + "' expects a non-negative integer, got '" + s + "'");
    return v;
}

bool to_bool(const std::string& s, int line, const std::string& key) {
    if (s == "true" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "no" || s == "0") return false;
    throw ParseError(line, "'" + key + "' expects true or false, got '" + s + "'");
}

Coupling parse_coupling(const std::string& v, int line) {
    const auto parts = split(v, ':');
    if (parts.size() != 4) throw ParseError(line, "coupling expects i:j:psi:scale, got '" + v + "'");
    Coupling c;
    c.row = static_cast<int>(to_int(parts[0], line, "coupling"));
    c.col = static_cast<int>(to_int(parts[1], line, "coupling"));
    try {
        c.psi = parse_psi(parts[2]);
    } catch (const DomainError& e) {
        throw ParseError(line, e.what());
    }
    c.scale = to_double(parts[3], line, "coupling");
    return c;
}

ForcingSpec parse_forcing(const std::string& v, int line) {
    ForcingSpec f;
    std::set<std::string> seen;
    for (const auto& tok : split_ws(v)) {
        const auto colon = tok.find(':');
        if (colon == std::string::npos) throw ParseError(line, "forcing entries are key:value, got '" + tok + "'");
        const std::string k = tok.substr(0, colon), x = tok.substr(colon + 1);
        if (!seen.insert(k).second) throw ParseError(line, "forcing repeats '" + k + "'");
        try {
            if (k == "field") f.field = static_cast<int>(to_int(x, line, k));
            else if (k == "shape") f.shape = parse_forcing_shape(x);
            else if (k == "center") f.center = to_double(x, line, k);
            else if (k == "width") f.width = to_double(x, line, k);
            else if (k == "amplitude") f.amplitude = to_double(x, line, k);
            else if (k == "decay") f.decay = to_double(x, line, k);
            else if (k == "seed") f.seed = to_u64(x, line, k);
            else if (k == "l") f.l = static_cast<int>(to_int(x, line, k));
            else if (k == "slot") f.slot = to_int(x, line, k);
            else if (k == "spatial") {
                if (x == "random") f.spatial = SpatialKind::Random;
                else if (x == "mode") f.spatial = SpatialKind::Mode;
                else if (x == "constant") f.spatial = SpatialKind::Constant;
                else throw ParseError(line, "unknown spatial kind '" + x + "' (expected random, mode, constant)");
            } else
                throw ParseError(line, "unknown forcing key '" + k + "'");
        } catch (const DomainError& e) {
            throw ParseError(line, e.what());
        }
    }
    if (!seen.count("field")) throw ParseError(line, "forcing requires field:<index>");
    return f;
}

std::vector<int> int_list(const std::string& v, int line, const std::string& key) {
    std::vector<int> out;
    for (const auto& p : split(v, ',')) out.push_back(static_cast<int>(to_int(p, line, key)));
    if (out.empty()) throw ParseError(line, "'" + key + "' expects a non-empty list");
    return out;
}

std::vector<double> double_list(const std::string& v, int line, const std::string& key) {
    std::vector<double> out;
    for (const auto& p : split(v, ',')) out.push_back(to_double(p, line, key));
    if (out.empty()) throw ParseError(line, "'" + key + "' expects a non-empty list");
    return out;
}

using Handler = std::function<void(const std::string& value, int line)>;

std::string fmt_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace

const std::vector<std::string>& known_targets() {
    static const std::vector<std::string> t{"lp-props",  "poincare",       "toy-shells", "forward-first",
                                            "backward-second", "roundtrip", "singular-split", "gronwall"};
    return t;
}

bool is_known_target(const std::string& name) {
    const auto& t = known_targets();
    return std::find(t.begin(), t.end(), name) != t.end();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

nlohmann::json Scenario::to_json() const {
    std::vector<std::string> cs, fs;
    for (const auto& c : system.couplings) {
        std::ostringstream os;
        os.precision(17);
        os << c.row << ':' << c.col << ':' << to_string(c.psi) << ':' << c.scale;
        cs.push_back(os.str());
    }
    for (const auto& f : system.forcings) fs.push_back(f.describe());
    std::sort(cs.begin(), cs.end());
    std::sort(fs.begin(), fs.end());
    std::vector<std::string> sorted_targets;
    for (const auto& t : known_targets())
        if (std::find(targets.begin(), targets.end(), t) != targets.end()) sorted_targets.push_back(t);
    const auto& v = verify;
    const auto& t = tolerances;
    return {
        {"scenario", {{"name", name}, {"targets", sorted_targets}, {"grid_refine", grid_refine}}},
        {"lattice", {{"n", n}, {"l_max", l_max}, {"resolutions", v.resolutions}}},
        {"background", background.spec()},
        {"partition", partition.spec()},
        {"system",
         {{"I", system.I},
          {"sigma", system.sigma},
          {"M", system.M_order},
          {"tau_seed", system.tau_seed},
          {"rtol", system.rtol},
          {"atol", system.atol},
          {"frobenius_order", system.frobenius_order},
          {"log_time_below", system.log_time_below},
          {"couplings", cs}}},
        {"forcings", fs},
        {"seeds", {{"master", seed}}},
        {"tolerances",
         {{"shell_slope", t.shell_slope},
          {"blowup_drift", t.blowup_drift},
          {"resolution_drift", t.resolution_drift},
          {"roundtrip_decoupled", t.roundtrip_decoupled},
          {"roundtrip_coupled", t.roundtrip_coupled},
          {"split", t.split},
          {"epsilon_ratio", t.epsilon_ratio},
          {"gronwall", t.gronwall},
          {"discrete_gronwall", t.discrete_gronwall}}},
        {"verify",
         {{"draws", v.draws},
          {"corpus", v.corpus},
          {"lp_tau", v.lp_tau},
          {"poincare_deltas", v.poincare_deltas},
          {"poincare_k_hi", v.poincare_k_hi},
          {"shell_lo", v.shell_lo},
          {"shell_hi", v.shell_hi},
          {"tau_min", v.tau_min},
          {"per_decade", v.per_decade},
          {"linear_points", v.linear_points},
          {"coupling_scale", v.coupling_scale},
          {"forcing", v.forcing},
          {"epsilon", v.epsilon},
          {"blowup_draws", v.blowup_draws},
          {"blowup_decay", v.blowup_decay},
          {"blowup_M", v.blowup_M},
          {"gronwall_instances", v.gronwall_instances},
          {"gronwall_k_max", v.gronwall_k_max},
          {"gronwall_points", v.gronwall_points},
          {"gronwall_x", v.gronwall_x},
          {"roundtrip_l_max", v.roundtrip_l_max}}},
    };
}

std::string Scenario::canonical() const { return to_json().dump(); }

std::uint64_t Scenario::hash() const { return fnv1a64(canonical()); }

Scenario parse_config(const std::string& text) {
    Scenario scn;
    scn.system = SystemConfig{};
    scn.system.couplings.clear();
    std::string bg_kind = "desitter";
    double bg_value = 0.5;
    std::vector<double> bg_coeffs;
    int k_min = -6, k_max = 16, smooth = 3;
    int system_line = 0, partition_line = 0, background_line = 0;
    double random_coupling_scale = 0.0;
    std::uint64_t coupling_seed = 7;
    std::vector<int> coupling_lines;
    bool have_targets = false;

    auto& v = scn.verify;
    auto& t = scn.tolerances;
    auto& s = scn.system;
    const auto num = [](double& dst) { return [&dst](const std::string& x, int line) { dst = to_double(x, line, "value"); }; };
    const auto integer = [](int& dst) {
        return [&dst](const std::string& x, int line) { dst = static_cast<int>(to_int(x, line, "value")); };
    };

    std::map<std::string, std::map<std::string, Handler>> schema;
    schema["scenario"] = {
        {"name", [&](const std::string& x, int) { scn.name = x; }},
        {"targets",
         [&](const std::string& x, int line) {
             for (const auto& tg : split(x, ',')) {
                 if (!is_known_target(tg)) throw ParseError(line, "unknown target '" + tg + "'");
                 if (std::find(scn.targets.begin(), scn.targets.end(), tg) == scn.targets.end())
                     scn.targets.push_back(tg);
             }
             have_targets = true;
         }},
        {"out", [&](const std::string& x, int) { scn.out_dir = x; }},
        {"grid_refine", integer(scn.grid_refine)},
    };
    schema["lattice"] = {
        {"n", integer(scn.n)},
        {"l_max", integer(scn.l_max)},
        {"resolutions", [&](const std::string& x, int line) { v.resolutions = int_list(x, line, "resolutions"); }},
    };
    schema["background"] = {
        {"kind", [&](const std::string& x, int) { bg_kind = x; }},
        {"value", num(bg_value)},
        {"coeffs", [&](const std::string& x, int line) { bg_coeffs = double_list(x, line, "coeffs"); }},
    };
    schema["partition"] = {{"k_min", integer(k_min)}, {"k_max", integer(k_max)}, {"smoothness", integer(smooth)}};
    schema["system"] = {
        {"I", integer(s.I)},
        {"sigma", integer(s.sigma)},
        {"M", integer(s.M_order)},
        {"tau_seed", num(s.tau_seed)},
        {"rtol", num(s.rtol)},
        {"atol", num(s.atol)},
        {"frobenius_order", integer(s.frobenius_order)},
        {"log_time_below", num(s.log_time_below)},
        {"coupling",
         [&](const std::string& x, int line) {
             s.couplings.push_back(parse_coupling(x, line));
             coupling_lines.push_back(line);
         }},
        {"random_couplings", num(random_coupling_scale)},
        {"coupling_seed", [&](const std::string& x, int line) { coupling_seed = to_u64(x, line, "coupling_seed"); }},
    };
    schema["forcings"] = {
        {"forcing", [&](const std::string& x, int line) { s.forcings.push_back(parse_forcing(x, line)); }},
    };
    schema["seeds"] = {{"master", [&](const std::string& x, int line) { scn.seed = to_u64(x, line, "master"); }}};
    schema["tolerances"] = {
        {"shell_slope", num(t.shell_slope)},
        {"blowup_drift", num(t.blowup_drift)},
        {"resolution_drift", num(t.resolution_drift)},
        {"roundtrip_decoupled", num(t.roundtrip_decoupled)},
        {"roundtrip_coupled", num(t.roundtrip_coupled)},
        {"split", num(t.split)},
        {"epsilon_ratio", num(t.epsilon_ratio)},
        {"gronwall", num(t.gronwall)},
        {"discrete_gronwall", num(t.discrete_gronwall)},
    };
    schema["verify"] = {
        {"draws", integer(v.draws)},
        {"corpus", integer(v.corpus)},
        {"lp_tau", num(v.lp_tau)},
        {"poincare_deltas",
         [&](const std::string& x, int line) { v.poincare_deltas = double_list(x, line, "poincare_deltas"); }},
        {"poincare_k_hi", integer(v.poincare_k_hi)},
        {"shell_lo", integer(v.shell_lo)},
        {"shell_hi", integer(v.shell_hi)},
        {"tau_min", num(v.tau_min)},
        {"per_decade", integer(v.per_decade)},
        {"linear_points", integer(v.linear_points)},
        {"coupling_scale", num(v.coupling_scale)},
        {"forcing", [&](const std::string& x, int line) { v.forcing = to_bool(x, line, "forcing"); }},
        {"epsilon", num(v.epsilon)},
        {"blowup_draws", integer(v.blowup_draws)},
        {"blowup_decay", num(v.blowup_decay)},
        {"blowup_M", integer(v.blowup_M)},
        {"gronwall_instances", integer(v.gronwall_instances)},
        {"gronwall_k_max", integer(v.gronwall_k_max)},
        {"gronwall_points", integer(v.gronwall_points)},
        {"gronwall_x", integer(v.gronwall_x)},
        {"roundtrip_l_max", integer(v.roundtrip_l_max)},
    };
    const std::set<std::string> repeatable{"coupling", "forcing"};

    std::set<std::string> sections_seen;
    std::set<std::string> keys_seen;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string l = trim(raw);
        if (l.empty() || l[0] == '#' || l[0] == ';') continue;
        if (l.front() == '[') {
            if (l.back() != ']') throw ParseError(line, "malformed section header '" + l + "'");
            section = trim(l.substr(1, l.size() - 2));
            if (!schema.count(section)) throw ParseError(line, "unknown section [" + section + "]");
            if (!sections_seen.insert(section).second) throw ParseError(line, "duplicate section [" + section + "]");
            if (section == "system") system_line = line;
            if (section == "partition") partition_line = line;
            if (section == "background") background_line = line;
            keys_seen.clear();
            continue;
        }
        const auto eq = l.find('=');
        if (eq == std::string::npos) throw ParseError(line, "expected key = value, got '" + l + "'");
        if (section.empty()) throw ParseError(line, "key outside of any section");
        const std::string key = trim(l.substr(0, eq));
        const std::string value = unquote(trim(l.substr(eq + 1)));
        const auto& keys = schema[section];
        const auto it = keys.find(key);
        if (it == keys.end()) throw ParseError(line, "unknown key '" + key + "' in section [" + section + "]");
        if (!repeatable.count(key) && !keys_seen.insert(key).second)
            throw ParseError(line, "duplicate key '" + key + "' in section [" + section + "]");
        it->second(value, line);
    }

    if (!have_targets || scn.targets.empty()) throw ParseError(0, "[scenario] must list at least one target");
    if (scn.n < 1 || scn.n > 8) throw ParseError(0, "lattice n must lie in [1, 8]");
    if (scn.l_max < 0 || scn.l_max > 4096) throw ParseError(0, "lattice l_max must lie in [0, 4096]");
    if (scn.grid_refine < 1 || scn.grid_refine > 16) throw ParseError(0, "grid_refine must lie in [1, 16]");
    try {
        if (bg_kind == "desitter") scn.background = desitter_background();
        else if (bg_kind == "constant") scn.background = ConformalBackground::constant(bg_value);
        else if (bg_kind == "polynomial") scn.background = ConformalBackground::polynomial(bg_coeffs);
        else throw DomainError("unknown background kind '" + bg_kind + "' (expected desitter, constant, polynomial)");
    } catch (const DomainError& e) {
        throw ParseError(background_line, e.what());
    }
    try {
        scn.partition = make_partition(k_min, k_max, smooth);
    } catch (const DomainError& e) {
        throw ParseError(partition_line, e.what());
    }
    if (s.sigma == 2)
        for (std::size_t i = 0; i < s.couplings.size(); ++i)
            if (s.couplings[i].row >= 1 && s.couplings[i].col == 0)
                throw ParseError(coupling_lines[i],
                                 "sigma = 2 forbids coupling regular row " + std::to_string(s.couplings[i].row) +
                                     " to the singular column 0 (regular equations sum over j >= sigma - 1)");
    try {
        if (random_coupling_scale > 0.0) {
            auto extra = random_couplings(s, random_coupling_scale, coupling_seed);
            s.couplings.insert(s.couplings.end(), extra.begin(), extra.end());
        }
        s.validate();
    } catch (const DomainError& e) {
        throw ParseError(system_line, e.what());
    }
    return scn;
}

Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot read config file '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return parse_config(os.str());
}

Scenario default_scenario() {
    Scenario scn;
    scn.name = "acceptance";
    scn.targets = known_targets();
    scn.system.I = 1;
    scn.system.sigma = 1;
    scn.system.M_order = 1;
    return scn;
}

bool RunReport::all_pass() const {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& v : verdicts) arr.push_back(v.to_json());
    return {{"scenario", scenario},
            {"config_hash", config_hash},
            {"targets", targets},
            {"all_pass", all_pass()},
            {"verdicts", arr}};
}

std::string RunReport::verdicts_json() const { return to_json().dump(2) + "\n"; }

std::string RunReport::summary() const {
    std::ostringstream os;
    os << "scenario " << scenario << "  config " << config_hash << '\n';
    int passed = 0;
    for (const auto& v : verdicts) {
        passed += v.pass ? 1 : 0;
        os << (v.pass ? "PASS" : "FAIL") << "  " << v.name << "  statistic=" << fmt_g(v.statistic)
           << "  threshold=" << fmt_g(v.threshold) << "  [" << v.ensemble << "]\n";
    }
    os << passed << " of " << verdicts.size() << " verdicts pass\n";
    return os.str();
}

void RunReport::write(const std::string& dir) const {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(dir) / "series");
    const auto put = [](const fs::path& p, const std::string& body) {
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
        out << body;
    };
    put(fs::path(dir) / "summary.txt", summary());
    put(fs::path(dir) / "verdicts.json", verdicts_json());
    for (const auto& [name, body] : series) put(fs::path(dir) / "series" / name, body);
}

namespace {

struct TargetOutput {
    std::vector<Verdict> verdicts;
    std::map<std::string, std::string> series;
};

double spread(const std::vector<double>& xs) {
    double lo = INFINITY, hi = 0.0;
    for (double x : xs) {
        if (!std::isfinite(x)) return INFINITY;
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    if (hi == 0.0) return 1.0;
    return lo > 0.0 ? hi / lo : INFINITY;
}

EnsembleSpec ensemble_for(const Scenario& scn, std::uint64_t seed, bool coupled) {
    EnsembleSpec e;
    e.draws = scn.verify.draws;
    e.seed = seed;
    e.coupling_scale = coupled ? scn.verify.coupling_scale : 0.0;
    e.forcing = scn.verify.forcing;
    e.M = scn.system.M_order;
    e.I = scn.system.I;
    e.n = scn.n;
    e.tau_min = scn.verify.tau_min;
    e.per_decade = scn.verify.per_decade * scn.grid_refine;
    e.linear_points = scn.verify.linear_points * scn.grid_refine;
    e.drift_limit = scn.tolerances.resolution_drift;
    e.background = scn.background;
    e.partition = scn.partition;
    return e;
}

TargetOutput run_lp_props(const Scenario& scn, std::uint64_t seed) {
    TargetOutput out;
    std::string csv;
    std::vector<double> orth, logn;
    nlohmann::json per = nlohmann::json::array();
    bool all = true;
    for (int L : scn.verify.resolutions) {
        const auto rep = check_lp_properties(scn.partition, seed, scn.verify.corpus, build_lattice(scn.n, L),
                                             scn.background, scn.verify.lp_tau);
        csv += rep.to_csv(csv.empty());
        all = all && rep.all_pass();
        orth.push_back(rep.find("almost_orthogonality").constant);
        logn.push_back(rep.find("log_nabla").constant);
        per.push_back({{"l_max", L}, {"checks", rep.to_json()}});
    }
    Verdict v;
    v.name = "lp-props";
    v.statistic = std::max(spread(orth), spread(logn));
    v.threshold = scn.tolerances.resolution_drift;
    v.pass = all && v.statistic < v.threshold;
    v.ensemble = std::to_string(scn.verify.corpus) + "-field corpus per resolution, tau = " + fmt_g(scn.verify.lp_tau);
    v.detail = {{"resolutions", per}, {"orthogonality_constants", orth}, {"log_nabla_constants", logn}};
    out.verdicts.push_back(v);
    out.series["lp_props.csv"] = csv;
    return out;
}

TargetOutput run_poincare(const Scenario& scn, std::uint64_t seed) {
    TargetOutput out;
    std::ostringstream csv;
    csv.precision(17);
    csv << "delta,l_max,constant\n";
    Verdict v;
    v.name = "poincare";
    v.threshold = scn.tolerances.resolution_drift;
    v.statistic = 1.0;
    nlohmann::json per = nlohmann::json::array();
    for (double d : scn.verify.poincare_deltas) {
        std::vector<double> cs;
        for (int L : scn.verify.resolutions) {
            const double c = poincare_sweep(scn.partition, d, seed, scn.verify.corpus, build_lattice(scn.n, L),
                                            scn.background, scn.verify.lp_tau, scn.verify.poincare_k_hi);
            cs.push_back(c);
            csv << d << ',' << L << ',' << c << '\n';
        }
        v.statistic = std::max(v.statistic, spread(cs));
        per.push_back({{"delta", d}, {"constants", cs}});
    }
    v.pass = v.statistic < v.threshold;
    v.ensemble = std::to_string(scn.verify.corpus) + "-field corpus, k <= " + std::to_string(scn.verify.poincare_k_hi);
    v.detail = {{"deltas", per}};
    out.verdicts.push_back(v);
    out.series["poincare.csv"] = csv.str();
    return out;
}

TargetOutput run_toy_shells(const Scenario& scn) {
    TargetOutput out;
    ShellDecayOptions opt;
    opt.tolerance = scn.tolerances.shell_slope;
    opt.rtol = scn.system.rtol;
    opt.atol = scn.system.atol;
    opt.frobenius_order = scn.system.frobenius_order;
    const Verdict v = shell_decay_check(scn.background, scn.partition, scn.verify.shell_lo, scn.verify.shell_hi, opt);
    std::ostringstream csv;
    csv.precision(17);
    csv << "l,amplitude_J,amplitude_Y\n";
    const auto& d = v.detail;
    for (std::size_t i = 0; i < d["l"].size(); ++i)
        csv << d["l"][i].get<double>() << ',' << d["amplitude_J"][i].get<double>() << ','
            << d["amplitude_Y"][i].get<double>() << '\n';
    csv << "# slope_J," << d["slope_J"].get<double>() << "\n# slope_Y," << d["slope_Y"].get<double>() << '\n';
    out.series["toy_shells.csv"] = csv.str();
    out.verdicts.push_back(v);
    out.verdicts.push_back(bessel_check({1.0, 10.0, 100.0, 1e3, 1e4}, scn.system.tau_seed));
    return out;
}

TargetOutput run_theorem(const Scenario& scn, std::uint64_t seed, Theorem which) {
    TargetOutput out;
    std::ostringstream csv;
    csv.precision(17);
    csv << "variant,l_max,sup_ratio,worst_tau\n";
    for (bool coupled : {false, true}) {
        Verdict v = verify_theorem_ratio(ensemble_for(scn, seed, coupled), which, scn.verify.resolutions);
        if (coupled) v.name += "-coupled";
        for (const auto& r : v.detail["resolutions"])
            csv << (coupled ? "coupled" : "decoupled") << ',' << r["l_max"].get<int>() << ','
                << (r["sup_ratio"].is_null() ? NAN : r["sup_ratio"].get<double>()) << ','
                << r["worst_tau"].get<double>() << '\n';
        out.verdicts.push_back(std::move(v));
    }
    out.series[which == Theorem::First ? "forward_first.csv" : "backward_second.csv"] = csv.str();
    return out;
}

TargetOutput run_roundtrip(const Scenario& scn, std::uint64_t seed) {
    TargetOutput out;
    const auto lattice = build_lattice(scn.n, scn.verify.roundtrip_l_max);
    std::ostringstream csv;
    csv.precision(17);
    csv << "variant,max_rel_error,frak_h_defect,worst_condition\n";
    for (bool coupled : {false, true}) {
        SystemConfig cfg = scn.system;
        cfg.couplings = coupled ? random_couplings(cfg, scn.verify.coupling_scale, mix_seed(seed, 17))
                                : std::vector<Coupling>{};
        const double tol = coupled ? scn.tolerances.roundtrip_coupled : scn.tolerances.roundtrip_decoupled;
        const auto rep = roundtrip_check(cfg, scn.background, lattice, scn.partition, seed, tol);
        Verdict v;
        v.name = coupled ? "roundtrip-coupled" : "roundtrip";
        v.statistic = rep.max_rel_error;
        v.threshold = tol;
        v.pass = rep.pass;
        v.ensemble = "one random data draw on " + lattice->spec() + ", sigma=" + std::to_string(cfg.sigma) +
                     (coupled ? ", coupling scale " + fmt_g(scn.verify.coupling_scale) : ", decoupled");
        v.detail = rep.to_json();
        csv << (coupled ? "coupled" : "decoupled") << ',' << rep.max_rel_error << ',' << rep.frak_h_defect << ','
            << rep.worst_condition << '\n';
        out.verdicts.push_back(std::move(v));
    }
    out.series["roundtrip.csv"] = csv.str();
    return out;
}

TargetOutput run_singular_split(const Scenario& scn, std::uint64_t seed) {
    TargetOutput out;
    const auto lattice = build_lattice(scn.n, scn.l_max);
    SystemConfig cfg = scn.system;
    Verdict d = decomposition_check(cfg, scn.background, lattice, scn.partition, seed, scn.verify.epsilon,
                                    scn.tolerances.split);
    const auto& eps = d.detail["epsilon"];
    bool ratios_ok = true;
    for (const auto& r : eps["ratios"]) ratios_ok = ratios_ok && r.get<double>() >= scn.tolerances.epsilon_ratio;
    d.pass = d.pass && ratios_ok;
    Verdict b = blowup_ensemble(cfg, scn.background, lattice, scn.partition, seed, scn.verify.blowup_draws,
                                scn.verify.blowup_M, scn.verify.blowup_decay);
    b.threshold = scn.tolerances.blowup_drift;
    b.pass = b.pass && b.statistic < b.threshold;
    std::ostringstream csv;
    csv.precision(17);
    csv << "draw,decade,sup_statistic\n";
    int i = 0;
    for (const auto& dd : b.detail["draws"]) {
        for (std::size_t k = 0; k < dd["decades"].size(); ++k)
            csv << i << ',' << dd["decades"][k].get<double>() << ',' << dd["sup_statistic"][k].get<double>() << '\n';
        ++i;
    }
    std::ostringstream ecsv;
    ecsv.precision(17);
    ecsv << "eps,discrepancy\n";
    for (std::size_t k = 0; k < eps["eps"].size(); ++k)
        ecsv << eps["eps"][k].get<double>() << ',' << eps["discrepancy"][k].get<double>() << '\n';
    out.series["singular_blowup.csv"] = csv.str();
    out.series["epsilon_ladder.csv"] = ecsv.str();
    out.verdicts.push_back(std::move(d));
    out.verdicts.push_back(std::move(b));
    return out;
}

TargetOutput run_gronwall(const Scenario& scn, std::uint64_t seed) {
    TargetOutput out;
    GronwallVerifyOptions opt;
    opt.grid.points = scn.verify.gronwall_points;
    opt.x = scn.verify.gronwall_x;
    opt.k_max = scn.verify.gronwall_k_max;
    opt.tolerance = scn.tolerances.gronwall;
    out.verdicts.push_back(verify_gronwall_lemma(seed, scn.verify.gronwall_instances, opt));
    opt.b_scale = 10.0;
    Verdict v10 = verify_gronwall_lemma(seed, scn.verify.gronwall_instances, opt);
    v10.name = "gronwall-b10";
    out.verdicts.push_back(std::move(v10));
    out.verdicts.push_back(
        verify_discrete_gronwall(seed, scn.verify.gronwall_instances, 24, scn.tolerances.discrete_gronwall));

    const auto inst = preset_instance(opt.grid, opt.x, opt.k_max, mix_seed(seed, 0));
    const auto r = gronwall_like_bound(inst);
    std::ostringstream csv;
    csv.precision(17);
    csv << "k,tau,A,bound,oracle\n";
    for (int i = 0; i < inst.levels(); ++i)
        for (std::size_t g = 0; g < inst.taus.size(); ++g) {
            const auto ii = static_cast<std::size_t>(i);
            csv << inst.x + i << ',' << inst.taus[g] << ',' << inst.A[ii][g] << ',' << r.bound[ii][g] << ','
                << r.oracle[ii][g] << '\n';
        }
    out.series["gronwall_preset.csv"] = csv.str();
    return out;
}

template <class F>
TargetOutput attributed(const std::string& target, F&& f) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw ParseError(0, target + ": " + e.what());
    } catch (const DomainError& e) {
        throw DomainError(target + ": " + e.what());
    } catch (const IntegrationError& e) {
        throw IntegrationError(target + ": " + e.what());
    } catch (const SeedingError& e) {
        throw SeedingError(target + ": " + e.what());
    }
}

}  // namespace

RunReport run_scenario(const Scenario& scn) {
    scn.system.validate();
    RunReport rep;
    rep.scenario = scn.name;
    rep.config_hash = hex64(scn.hash());
    const auto& all = known_targets();
    for (std::size_t ti = 0; ti < all.size(); ++ti) {
        const std::string& t = all[ti];
        if (std::find(scn.targets.begin(), scn.targets.end(), t) == scn.targets.end()) continue;
        rep.targets.push_back(t);
        const std::uint64_t seed = mix_seed(scn.seed, ti);
        TargetOutput o = attributed(t, [&]() -> TargetOutput {
            if (t == "lp-props") return run_lp_props(scn, seed);
            if (t == "poincare") return run_poincare(scn, seed);
            if (t == "toy-shells") return run_toy_shells(scn);
            if (t == "forward-first") return run_theorem(scn, seed, Theorem::First);
            if (t == "backward-second") return run_theorem(scn, seed, Theorem::Second);
            if (t == "roundtrip") return run_roundtrip(scn, seed);
            if (t == "singular-split") return run_singular_split(scn, seed);
            return run_gronwall(scn, seed);
        });
        for (auto& v : o.verdicts) rep.verdicts.push_back(std::move(v));
        for (auto& [k, body] : o.series) rep.series[k] = std::move(body);
    }
    return rep;
}

}  // namespace dslab
