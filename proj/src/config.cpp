#include "pslab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "pslab/io.hpp"
#include "pslab/parallel.hpp"

namespace pslab {

namespace {

using json = nlohmann::json;

struct OptionSpec {
    const char* key;
    const char* help;
};

const std::vector<OptionSpec> kCommon = {
    {"model", "jordan | ho | davies | hager"},
    {"h", "semiclassical parameter"},
    {"N", "truncation dimension"},
    {"workers", "worker threads (default: PSPEC_WORKERS or hardware)"},
    {"out", "output path"},
};

// Keys accepted by each leaf command, besides kCommon.
const std::map<std::string, std::vector<OptionSpec>> kLeafOptions = {
    {"scan", {{"grid", "re_min,re_max,im_min,im_max,nx,ny"}}},
    {"contours",
     {{"grid", "re_min,re_max,im_min,im_max,nx,ny"},
      {"levels", "comma-separated ε levels"},
      {"svg", "SVG output path"},
      {"field", "read a sigma_min CSV instead of scanning"}}},
    {"symbol sigma", {{"grid", "image grid"}, {"resolution", "phase-space lattice per axis"}}},
    {"symbol lambda", {{"grid", "image grid"}, {"resolution", "phase-space lattice per axis"}}},
    {"symbol order",
     {{"z", "spectral point, e.g. 1+1i"}, {"cap", "largest bracket depth probed"},
      {"resolution", "phase-space lattice per axis"}}},
    {"symbol volume", {{"z", "disc center"}, {"t", "disc radius"}}},
    {"symbol kappa", {{"z", "spectral point"}, {"tlist", "comma-separated radii"}}},
    {"quasimode",
     {{"z", "spectral point"}, {"hlist", "comma-separated h values"},
      {"sign", "plus | minus"}, {"energy", "Hermite truncation energy"}}},
    {"lab weyl",
     {{"delta", "perturbation size or 'auto' (N^-4)"},
      {"gamma", "counting box re_min,re_max,im_min,im_max"},
      {"draws", "number of draws"},
      {"seed", "base seed"},
      {"kind", "gaussian | potential | iid"},
      {"law", "pm1 | uniform (iid only)"},
      {"force", "allow potentials on symbols that are not xi-even"},
      {"modes", "potential modes (0: ceil(4/h))"},
      {"radius", "potential coefficient radius (0: 1/h)"},
      {"eig-csv", "eigenvalue CSV path"},
      {"svg", "figure path"}}},
    {"lab ssv",
     {{"delta", "perturbation size or 'auto' (1e-3)"},
      {"tgrid", "comma-separated t values"},
      {"draws", "number of draws"},
      {"seed", "base seed"}}},
    {"fit boundary",
     {{"z", "boundary point"}, {"hlist", "comma-separated h values"},
      {"energy", "Hermite truncation energy"}}},
};

const std::set<std::string> kFlags = {"force"};

UsageError field_error(const std::string& key, const std::string& why) {
    return UsageError("invalid value for '" + key + "': " + why);
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    while (first < last && *first == ' ') ++first;
    if (first < last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
        throw field_error(key, "'" + text + "' is not a finite number");
    }
    return v;
}

long long to_integer(const std::string& key, const std::string& text) {
    const double v = to_double(key, text);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) {
        throw field_error(key, "'" + text + "' is not an integer");
    }
    return static_cast<long long>(v);
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
    if (out.empty()) throw field_error(key, "empty list");
    return out;
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw field_error(key, "expected true or false");
}

std::string value_text(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return format_double(v.get<double>());
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!item.is_number()) throw field_error(key, "array entries must be numbers");
            if (!out.empty()) out += ',';
            out += format_double(item.get<double>());
        }
        return out;
    }
    throw field_error(key, "unsupported JSON type");
}

std::string leaf_name(const RunConfig& c) {
    return c.action.empty() ? c.command : c.command + " " + c.action;
}

void require(bool ok, const std::string& key, const std::string& why) {
    if (!ok) throw field_error(key, why);
}

void require_positive_list(const std::string& key, const std::vector<double>& v) {
    for (double x : v) require(x > 0.0, key, "entries must be positive");
}

// Applies raw string values (defaults already in `c`) and validates.
void apply_values(RunConfig& c, const std::map<std::string, std::string>& raw) {
    auto has = [&](const char* k) { return raw.count(k) > 0; };
    auto get = [&](const char* k) { return raw.at(k); };

    if (has("model")) c.model = get("model");
    require(c.model == "jordan" || c.model == "ho" || c.model == "davies" || c.model == "hager", "model",
            "expected jordan, ho, davies or hager");
    if (c.command == "symbol") require(c.model != "jordan", "model", "jordan has no symbol");

    if (has("energy")) c.energy = to_double("energy", get("energy"));
    require(c.energy > 0.0, "energy", "must be positive");

    const bool any_parity = leaf_name(c) == "lab ssv";
    if (has("N")) {
        const long long n = to_integer("N", get("N"));
        require(n >= 1, "N", "must be >= 1");
        c.N = n;
    }
    if (has("h")) {
        c.h = to_double("h", get("h"));
        require(c.h > 0.0, "h", "must be positive");
    }
    if (c.model == "hager") {
        if (c.N == 0) c.N = any_parity ? 50 : 601;
        if (!has("h")) c.h = 4.0 / double(c.N);
        require(any_parity || c.N % 2 == 1, "N", "hager needs odd N, got " + std::to_string(c.N));
    } else if (c.model == "jordan") {
        if (c.N == 0) c.N = 20;
    } else {
        if (c.N == 0) c.N = std::max<Eigen::Index>(4, Eigen::Index(std::ceil((c.energy / c.h - 1.0) / 2.0)));
        if (c.model == "davies") require(c.N >= 4, "N", "davies needs N >= 4");
    }

    if (has("workers")) {
        const long long w = to_integer("workers", get("workers"));
        require(w >= 1, "workers", "must be >= 1");
        c.workers = int(w);
    }
    if (has("out")) c.out = get("out");
    if (has("svg")) c.svg = get("svg");
    if (has("field")) c.field = get("field");
    if (has("eig-csv")) c.eig_csv = get("eig-csv");

    if (has("grid")) {
        const auto g = to_list("grid", get("grid"));
        require(g.size() == 6, "grid", "expected re_min,re_max,im_min,im_max,nx,ny");
        require(g[4] == std::floor(g[4]) && g[5] == std::floor(g[5]), "grid", "nx and ny must be integers");
        c.grid = ComplexGrid{g[0], g[1], g[2], g[3], int(g[4]), int(g[5])};
    }
    try {
        c.grid.validate();
    } catch (const InvalidArgument& e) {
        throw field_error("grid", e.what());
    }
    if (has("gamma")) {
        const auto g = to_list("gamma", get("gamma"));
        require(g.size() == 4, "gamma", "expected re_min,re_max,im_min,im_max");
        c.gamma = Rect{g[0], g[1], g[2], g[3]};
    }
    require(c.gamma.x_min <= c.gamma.x_max && c.gamma.y_min <= c.gamma.y_max, "gamma", "empty box");

    if (has("levels")) c.levels = to_list("levels", get("levels"));
    require_positive_list("levels", c.levels);
    std::sort(c.levels.begin(), c.levels.end());
    require(std::adjacent_find(c.levels.begin(), c.levels.end()) == c.levels.end(), "levels",
            "duplicate level");

    if (has("z")) {
        try {
            c.z = parse_complex(get("z"));
        } catch (const UsageError& e) {
            throw field_error("z", e.what());
        }
    }
    if (has("t")) c.t = to_double("t", get("t"));
    require(c.t > 0.0, "t", "must be positive");
    if (has("hlist")) c.hlist = to_list("hlist", get("hlist"));
    require_positive_list("hlist", c.hlist);
    require(c.hlist.size() >= 2, "hlist", "need at least two values");
    if (has("tlist")) c.tlist = to_list("tlist", get("tlist"));
    require_positive_list("tlist", c.tlist);
    if (leaf_name(c) == "symbol kappa") require(c.tlist.size() >= 4, "tlist", "need at least four values");
    if (has("tgrid")) c.tgrid = to_list("tgrid", get("tgrid"));
    if (c.tgrid.empty()) {
        for (int i = 0; i <= 30; ++i) c.tgrid.push_back(std::pow(10.0, -3.0 + 0.1 * i));
    }
    require_positive_list("tgrid", c.tgrid);
    require(std::is_sorted(c.tgrid.begin(), c.tgrid.end()) &&
                std::adjacent_find(c.tgrid.begin(), c.tgrid.end()) == c.tgrid.end(),
            "tgrid", "must be strictly ascending");

    if (has("resolution")) {
        const long long r = to_integer("resolution", get("resolution"));
        require(r >= 3 && r <= 20001, "resolution", "must be in [3, 20001]");
        c.resolution = int(r);
    }
    if (has("cap")) {
        const long long k = to_integer("cap", get("cap"));
        require(k >= 1 && k <= 3, "cap", "must be in [1, 3]");
        c.cap = int(k);
    }
    if (has("sign")) c.sign = get("sign");
    require(c.sign == "plus" || c.sign == "minus", "sign", "expected plus or minus");
    if (has("kind")) c.kind = get("kind");
    require(c.kind == "gaussian" || c.kind == "potential" || c.kind == "iid", "kind",
            "expected gaussian, potential or iid");
    if (has("law")) c.law = get("law");
    require(c.law == "pm1" || c.law == "uniform", "law", "expected pm1 or uniform");
    if (has("force")) c.force = to_bool("force", get("force"));
    if (has("modes")) {
        const long long m = to_integer("modes", get("modes"));
        require(m >= 0, "modes", "must be >= 0");
        c.modes = m;
    }
    if (has("radius")) c.radius = to_double("radius", get("radius"));
    require(c.radius >= 0.0, "radius", "must be >= 0");
    if (has("seed")) {
        const long long s = to_integer("seed", get("seed"));
        require(s >= 0, "seed", "must be >= 0");
        c.seed = std::uint64_t(s);
    }
    if (has("draws")) {
        const long long d = to_integer("draws", get("draws"));
        require(d >= 1, "draws", "must be >= 1");
        c.draws = int(d);
    }
    if (leaf_name(c) == "lab ssv") {
        if (!has("draws")) c.draws = 20000;
        require(c.draws >= 1000, "draws", "ssv needs at least 1000 draws");
    }
    if (has("delta")) {
        const std::string d = get("delta");
        if (d == "auto") {
            c.delta.reset();
        } else {
            c.delta = to_double("delta", d);
            require(*c.delta >= 0.0, "delta", "must be >= 0");
        }
    }
}

}  // namespace

Complex parse_complex(const std::string& text) {
    std::string s;
    for (char ch : text) {
        if (ch != ' ') s += ch;
    }
    if (s.empty()) throw UsageError("empty complex number");
    const bool imaginary = s.back() == 'i' || s.back() == 'j';
    if (!imaginary) return {to_double("z", s), 0.0};
    s.pop_back();
    // split at the last sign that is not an exponent sign or the leading sign
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    const std::string re = split == std::string::npos ? "" : s.substr(0, split);
    std::string im = split == std::string::npos ? s : s.substr(split);
    if (im.empty() || im == "+") im = "1";
    if (im == "-") im = "-1";
    return {re.empty() ? 0.0 : to_double("z", re), to_double("z", im)};
}

RunConfig parse_config(const std::vector<std::string>& args) {
    CLI::App app{"pseudospectra and semiclassical spectral instability lab", "pspec"};
    app.set_help_flag("--help", "print help and exit");  // -h is taken by the h parameter
    app.require_subcommand(1);
    app.fallthrough();
    std::string config_path;
    bool print_config = false;
    app.add_option("--config", config_path, "JSON config; flags given on the command line win");
    app.add_flag("--print-config", print_config, "echo the resolved configuration and exit");

    std::map<std::string, std::string> raw;
    std::map<CLI::App*, std::string> leaves;

    auto add_leaf = [&](CLI::App* sub, const std::string& leaf) {
        leaves[sub] = leaf;
        std::vector<OptionSpec> opts = kCommon;
        const auto& extra = kLeafOptions.at(leaf);
        opts.insert(opts.end(), extra.begin(), extra.end());
        for (const auto& o : opts) {
            const std::string key = o.key;
            if (kFlags.count(key)) {
                sub->add_flag_callback("--" + key, [&raw, key] { raw[key] = "true"; }, o.help);
            } else {
                sub->add_option_function<std::string>(
                    "--" + key, [&raw, key](const std::string& v) { raw[key] = v; }, o.help);
            }
        }
    };

    add_leaf(app.add_subcommand("scan", "σ_min field over a grid"), "scan");
    add_leaf(app.add_subcommand("contours", "pseudospectral level curves"), "contours");
    auto* symbol = app.add_subcommand("symbol", "symbol calculus queries");
    symbol->require_subcommand(1);
    for (const char* a : {"sigma", "lambda", "order", "volume", "kappa"}) {
        add_leaf(symbol->add_subcommand(a), std::string("symbol ") + a);
    }
    add_leaf(app.add_subcommand("quasimode", "Gaussian-beam residual decay"), "quasimode");
    auto* lab = app.add_subcommand("lab", "random perturbation experiments");
    lab->require_subcommand(1);
    add_leaf(lab->add_subcommand("weyl", "probabilistic Weyl law"), "lab weyl");
    add_leaf(lab->add_subcommand("ssv", "smallest singular value tail"), "lab ssv");
    auto* fit = app.add_subcommand("fit", "resolvent growth fits");
    fit->require_subcommand(1);
    add_leaf(fit->add_subcommand("boundary", "resolvent norm exponent"), "fit boundary");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        while (true) {
            auto subs = target->get_subcommands();
            if (subs.empty()) break;
            target = subs.front();
        }
        throw HelpRequested(target->help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    std::string leaf;
    for (const auto& [sub, name] : leaves) {
        if (sub->parsed()) leaf = name;
    }
    if (leaf.empty()) throw UsageError("missing subcommand");

    RunConfig c;
    const auto space = leaf.find(' ');
    c.command = leaf.substr(0, space);
    c.action = space == std::string::npos ? "" : leaf.substr(space + 1);
    c.workers = default_workers();
    c.print_config = print_config;
    if (c.command == "scan" || c.command == "contours") {
        c.grid = ComplexGrid{-1.0, 1.0, -1.0, 1.0, 201, 201};
    }

    if (!config_path.empty()) {
        json doc;
        try {
            doc = json::parse(read_text(config_path));
        } catch (const json::parse_error& e) {
            throw UsageError("config: " + std::string(e.what()));
        } catch (const IoError& e) {
            throw UsageError(e.what());
        }
        if (!doc.is_object()) throw UsageError("config: expected a JSON object");
        std::set<std::string> allowed;
        for (const auto& o : kCommon) allowed.insert(o.key);
        for (const auto& o : kLeafOptions.at(leaf)) allowed.insert(o.key);
        for (const auto& [key, value] : doc.items()) {
            if (key == "command" || key == "action") {
                if (!value.is_string() || value.get<std::string>() != (key == "command" ? c.command : c.action)) {
                    throw field_error(key, "does not match the subcommand on the command line");
                }
                continue;
            }
            if (!allowed.count(key)) throw UsageError("unknown config key '" + key + "' for " + leaf);
            if (!raw.count(key)) raw[key] = value_text(key, value);
        }
    }
    apply_values(c, raw);
    return c;
}

nlohmann::json to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    if (!c.action.empty()) j["action"] = c.action;
    j["model"] = c.model;
    j["h"] = c.h;
    j["N"] = c.N;
    j["workers"] = c.workers;
    if (!c.out.empty()) j["out"] = c.out;
    const std::string leaf = leaf_name(c);
    std::set<std::string> keys;
    for (const auto& o : kLeafOptions.at(leaf)) keys.insert(o.key);
    auto want = [&](const char* k) { return keys.count(k) > 0; };
    if (want("grid")) {
        j["grid"] = {c.grid.re_min, c.grid.re_max, c.grid.im_min, c.grid.im_max, c.grid.nx, c.grid.ny};
    }
    if (want("levels")) j["levels"] = c.levels;
    if (want("svg") && !c.svg.empty()) j["svg"] = c.svg;
    if (want("field") && !c.field.empty()) j["field"] = c.field;
    if (want("eig-csv") && !c.eig_csv.empty()) j["eig-csv"] = c.eig_csv;
    if (want("resolution")) j["resolution"] = c.resolution;
    if (want("cap")) j["cap"] = c.cap;
    if (want("z")) j["z"] = format_double(c.z.real()) + (c.z.imag() < 0 ? "" : "+") + format_double(c.z.imag()) + "i";
    if (want("t")) j["t"] = c.t;
    if (want("tlist")) j["tlist"] = c.tlist;
    if (want("hlist")) j["hlist"] = c.hlist;
    if (want("sign")) j["sign"] = c.sign;
    if (want("energy")) j["energy"] = c.energy;
    if (want("delta")) {
        if (c.delta) {
            j["delta"] = *c.delta;
        } else {
            j["delta"] = "auto";
        }
    }
    if (want("gamma")) j["gamma"] = {c.gamma.x_min, c.gamma.x_max, c.gamma.y_min, c.gamma.y_max};
    if (want("draws")) j["draws"] = c.draws;
    if (want("seed")) j["seed"] = c.seed;
    if (want("kind")) j["kind"] = c.kind;
    if (want("law")) j["law"] = c.law;
    if (want("force")) j["force"] = c.force;
    if (want("modes")) j["modes"] = c.modes;
    if (want("radius")) j["radius"] = c.radius;
    if (want("tgrid")) j["tgrid"] = c.tgrid;
    return j;
}

namespace {

std::string identity_text(const RunConfig& c) {
    json j = to_json(c);
    j.erase("workers");  // results do not depend on it
    return j.dump();
}

}  // namespace

std::string fingerprint(const RunConfig& c) {
    const std::string text = identity_text(c);
    std::uint64_t hash = 1469598103934665603ULL;  // FNV-1a
    for (unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ULL;
    }
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(hash));
    return hex;
}

std::string provenance(const RunConfig& c) {
    const json j = to_json(c);
    std::string out = "config=" + identity_text(c) + "\nfingerprint=" + fingerprint(c) + "\nmodel=" + c.model +
                      "\nh=" + format_double(c.h) + "\nN=" + std::to_string(c.N);
    if (j.contains("seed")) out += "\nseed=" + std::to_string(c.seed);
    return out + "\n";
}

}  // namespace pslab
