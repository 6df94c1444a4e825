#include "spectral/pasting_lab.hpp"

#include <toml.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace spectral {

namespace {

using nlohmann::json;

json toml_to_json(const std::string& text, const std::string& source)
{
    toml::table tbl;
    try {
        tbl = toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source << ": " << e.description() << " at line " << e.source().begin.line;
        throw ConfigError(msg.str());
    }
    std::ostringstream os;
    os << toml::json_formatter{tbl};
    return json::parse(os.str());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where)
{
    if (!j.is_object()) throw ConfigError(where + " must be a table");
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

double number(const json& j, const std::string& where)
{
    if (!j.is_number()) throw ConfigError(where + " must be a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& where)
{
    if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
    return j.get<int>();
}

std::vector<double> numbers(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + " must be an array");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, where));
    return out;
}

std::vector<int> integers(const json& j, const std::string& where)
{
    if (!j.is_array()) throw ConfigError(where + " must be an array");
    std::vector<int> out;
    for (const auto& v : j) out.push_back(integer(v, where));
    return out;
}

EndSpec end_spec(const json& j, const std::string& where)
{
    if (j.is_number()) return EndSpec::line_at(j.get<double>());
    if (j.is_array()) {
        auto a = numbers(j, where);
        if (a.empty()) throw ConfigError(where + " needs at least one angle");
        return {EndCondition::line, a};
    }
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "aps_greater") return {EndCondition::aps_greater, {}};
        if (s == "aps_greater_equal") return {EndCondition::aps_greater_equal, {}};
        if (s == "aps_less") return {EndCondition::aps_less, {}};
        if (s == "f_zero") return {EndCondition::f_zero, {}};
        if (s == "g_zero") return {EndCondition::g_zero, {}};
        throw ConfigError(where + ": unknown boundary condition '" + s + "'");
    }
    throw ConfigError(where + " must be an angle, an angle list or a condition name");
}

}  // namespace

SplitModel ModelFile::split() const
{
    SplitModel m;
    m.tangential = tangential;
    m.R = R;
    m.defect_width = defect_width;
    m.cap_left = left;
    m.cap_right = right;
    m.shift_left = shift_left;
    m.shift_right = shift_right;
    m.name = name;
    return m;
}

ModelFile parse_model_json(const json& j, const std::string& name)
{
    reject_unknown(j, {"name", "lambdas", "multiplicities", "R", "bc", "defect", "cutoffs"}, name);
    ModelFile m;
    m.name = j.contains("name") ? j["name"].get<std::string>() : name;
    if (!j.contains("lambdas")) throw ConfigError(name + ": lambdas is required");
    m.tangential.lambdas = numbers(j["lambdas"], name + ".lambdas");
    if (j.contains("multiplicities")) m.tangential.multiplicities = integers(j["multiplicities"], name + ".multiplicities");
    if (j.contains("R")) m.R = number(j["R"], name + ".R");
    if (j.contains("bc")) {
        const auto& bc = j["bc"];
        reject_unknown(bc, {"left", "right"}, name + ".bc");
        if (bc.contains("left")) m.left = end_spec(bc["left"], name + ".bc.left");
        if (bc.contains("right")) m.right = end_spec(bc["right"], name + ".bc.right");
    }
    if (j.contains("defect")) {
        const auto& d = j["defect"];
        reject_unknown(d, {"width", "left", "right"}, name + ".defect");
        if (d.contains("width")) m.defect_width = number(d["width"], name + ".defect.width");
        if (d.contains("left")) m.shift_left = numbers(d["left"], name + ".defect.left");
        if (d.contains("right")) m.shift_right = numbers(d["right"], name + ".defect.right");
    }
    if (j.contains("cutoffs")) {
        const auto& c = j["cutoffs"];
        reject_unknown(c, {"window", "torus"}, name + ".cutoffs");
        if (c.contains("window")) m.window = number(c["window"], name + ".cutoffs.window");
        if (c.contains("torus")) m.torus_cutoff = integer(c["torus"], name + ".cutoffs.torus");
    }
    try {
        m.tangential.validate();
    } catch (const std::exception& e) {
        throw ConfigError(name + ": " + e.what());
    }
    if (!(m.R > 0) || !(m.defect_width >= 0) || m.window < 0 || m.torus_cutoff < 1)
        throw ConfigError(name + ": R must be positive, width, window nonnegative, torus cutoff positive");
    const auto n = size_t(m.tangential.modes());
    if ((!m.shift_left.empty() && m.shift_left.size() != n) || (!m.shift_right.empty() && m.shift_right.size() != n))
        throw ConfigError(name + ": defect shifts need one value per mode");
    return m;
}

ModelFile parse_model_toml(const std::string& text, const std::string& name)
{
    return parse_model_json(toml_to_json(text, name), name);
}

ModelFile load_model_file(const std::filesystem::path& path)
{
    const std::string text = read_file(path);
    const std::string name = path.stem().string();
    if (path.extension() == ".json") {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(path.string() + ": " + e.what());
        }
        return parse_model_json(j, name);
    }
    return parse_model_toml(text, name);
}

ExperimentConfig parse_config_toml(const std::string& text, const std::filesystem::path& base_dir)
{
    const json j = toml_to_json(text, "config");
    reject_unknown(j, {"experiment", "seed", "model", "sweep", "tolerances", "output"}, "config");
    ExperimentConfig cfg;
    if (j.contains("experiment")) cfg.experiment = j["experiment"].get<std::string>();
    if (j.contains("seed")) {
        if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0)
            throw ConfigError("seed must be a nonnegative integer");
        cfg.seed = j["seed"].get<std::uint64_t>();
    }
    if (!j.contains("model")) throw ConfigError("config: [model] section is required");
    const auto& model = j["model"];
    reject_unknown(model, {"file", "defect_file"}, "[model]");
    if (!model.contains("file") || !model.contains("defect_file"))
        throw ConfigError("[model] needs file and defect_file");
    cfg.model = load_model_file(base_dir / model["file"].get<std::string>());
    cfg.defect_model = load_model_file(base_dir / model["defect_file"].get<std::string>());

    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        reject_unknown(s,
                       {"additivity_R", "additivity_small_R", "dichotomy_R", "rayleigh_R", "lowest_R", "stabilization_from", "vekua_p",
                        "vekua_N", "sf_samples", "sf_truncation", "pasting_modes", "pasting_samples"},
                       "[sweep]");
        auto& w = cfg.sweeps;
        if (s.contains("additivity_R")) w.additivity_R = numbers(s["additivity_R"], "additivity_R");
        if (s.contains("additivity_small_R")) w.additivity_small_R = numbers(s["additivity_small_R"], "additivity_small_R");
        if (s.contains("dichotomy_R")) w.dichotomy_R = numbers(s["dichotomy_R"], "dichotomy_R");
        if (s.contains("rayleigh_R")) w.rayleigh_R = numbers(s["rayleigh_R"], "rayleigh_R");
        if (s.contains("lowest_R")) w.lowest_R = numbers(s["lowest_R"], "lowest_R");
        if (s.contains("stabilization_from")) w.stabilization_from = number(s["stabilization_from"], "stabilization_from");
        if (s.contains("vekua_p")) w.vekua_p = integers(s["vekua_p"], "vekua_p");
        if (s.contains("vekua_N")) w.vekua_N = integer(s["vekua_N"], "vekua_N");
        if (s.contains("sf_samples")) w.sf_samples = integer(s["sf_samples"], "sf_samples");
        if (s.contains("sf_truncation")) w.sf_truncation = integer(s["sf_truncation"], "sf_truncation");
        if (s.contains("pasting_modes")) w.pasting_modes = integer(s["pasting_modes"], "pasting_modes");
        if (s.contains("pasting_samples")) w.pasting_samples = integer(s["pasting_samples"], "pasting_samples");
    }
    const auto& w = cfg.sweeps;
    for (const auto* grid : {&w.additivity_R, &w.additivity_small_R, &w.dichotomy_R, &w.rayleigh_R, &w.lowest_R}) {
        if (grid->empty()) throw ConfigError("[sweep] grids must be nonempty");
        for (double r : *grid)
            if (!(r > 0)) throw ConfigError("[sweep] R values must be positive");
    }
    if (w.vekua_p.empty()) throw ConfigError("[sweep] vekua_p must be nonempty");
    if (w.vekua_N < 4 || w.sf_samples < 3 || w.sf_truncation < 0 || w.pasting_modes < 1 || w.pasting_samples < 1)
        throw ConfigError("[sweep] counts out of range");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        reject_unknown(t, {"eta", "integer", "fit_r2", "a1_stability", "stabilization", "heat"}, "[tolerances]");
        auto& tol = cfg.tol;
        if (t.contains("eta")) tol.eta = number(t["eta"], "eta");
        if (t.contains("integer")) tol.integer = number(t["integer"], "integer");
        if (t.contains("fit_r2")) tol.fit_r2 = number(t["fit_r2"], "fit_r2");
        if (t.contains("a1_stability")) tol.a1_stability = number(t["a1_stability"], "a1_stability");
        if (t.contains("stabilization")) tol.stabilization = number(t["stabilization"], "stabilization");
        if (t.contains("heat")) tol.heat = number(t["heat"], "heat");
    }
    const auto& tol = cfg.tol;
    for (double v : {tol.eta, tol.integer, tol.fit_r2, tol.a1_stability, tol.stabilization, tol.heat})
        if (!(v > 0)) throw ConfigError("[tolerances] values must be positive");
    if (tol.fit_r2 > 1) throw ConfigError("[tolerances] fit_r2 must not exceed 1");

    if (j.contains("output")) {
        const auto& o = j["output"];
        reject_unknown(o, {"dir"}, "[output]");
        if (o.contains("dir")) cfg.out = o["dir"].get<std::string>();
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    auto cfg = parse_config_toml(read_file(path), path.parent_path());
    cfg.config_path = path;
    return cfg;
}

}  // namespace spectral
