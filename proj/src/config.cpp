#include "elastiform/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace ef {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "seed",
        "mesh.file",
        "geometry.kind",
        "geometry.width",
        "geometry.height",
        "geometry.h",
        "geometry.load_fraction",
        "geometry.target_volume",
        "geometry.hole_radius",
        "geometry.exact_hole_area",
        "material.E",
        "material.nu",
        "material.lambda",
        "material.mu",
        "load.fx",
        "load.fy",
        "load.gx",
        "load.gy",
        "bva.formulation",
        "bva.gradient",
        "bva.iterations",
        "bva.gamma0",
        "bva.rho",
        "bva.mu0",
        "bva.max_halvings",
        "bva.target_volume",
        "bva.strict_descent",
        "bva.vtk_every",
        "study.levels",
        "study.extra_refine",
        "check.quad_order",
        "out.dir",
        "out.tag",
    };
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

} // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key))
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" +
                              key + "'");
        if (!cfg.kv.emplace(key, value).second)
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str());
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end())
        return fallback;
    char* end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: '" + key + "' is not a number: " + it->second);
    return v;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    auto it = kv.find(key);
    if (it == kv.end())
        return fallback;
    char* end = nullptr;
    const long v = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError("config: '" + key + "' is not an integer: " + it->second);
    return static_cast<int>(v);
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end())
        return fallback;
    if (it->second == "1" || it->second == "true")
        return true;
    if (it->second == "0" || it->second == "false")
        return false;
    throw ConfigError("config: '" + key + "' is not a boolean: " + it->second);
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
}

Setup build_setup(const RunConfig& cfg) {
    Setup s;
    s.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 42));
    s.mesh_file = cfg.get_string("mesh.file", "");

    const std::string kind = cfg.get_string("geometry.kind", "bulky");
    if (kind == "bulky")
        s.geometry_kind = GeometryKind::Bulky;
    else if (kind == "holes6")
        s.geometry_kind = GeometryKind::Holes6;
    else
        throw ConfigError("config: geometry.kind must be 'bulky' or 'holes6'");

    s.geo.width = cfg.get_double("geometry.width", 10.0);
    s.geo.height = cfg.get_double("geometry.height", 4.5);
    s.geo.h = cfg.get_double("geometry.h", 0.5);
    s.geo.load_fraction = cfg.get_double("geometry.load_fraction", 0.1);
    s.geo.exact_hole_area = cfg.get_bool("geometry.exact_hole_area", true);
    s.geo.seed = s.seed;
    if (s.geometry_kind == GeometryKind::Holes6) {
        const double target = cfg.get_double("geometry.target_volume", 40.59);
        s.geo.holes = six_hole_layout(s.geo.width, s.geo.height, target);
        if (cfg.has("geometry.hole_radius")) {
            const double r = cfg.get_double("geometry.hole_radius", 0.0);
            for (auto& hole : s.geo.holes)
                hole.r = r;
        }
    }
    s.geo.validate();

    if (cfg.has("material.lambda") && cfg.has("material.mu")) {
        s.material = MaterialParams::from_lame(cfg.get_double("material.lambda", 0.0),
                                               cfg.get_double("material.mu", 0.0));
    } else {
        s.material = lame_from_young_poisson(cfg.get_double("material.E", 1.0),
                                             cfg.get_double("material.nu", 0.3));
    }

    s.loads.f = AnalyticField::constant(
        Vec2(cfg.get_double("load.fx", 0.0), cfg.get_double("load.fy", 0.0)));
    s.loads.g = AnalyticField::constant(
        Vec2(cfg.get_double("load.gx", 0.0), cfg.get_double("load.gy", -1.0)));

    const std::string form = cfg.get_string("bva.formulation", "mixed");
    if (form == "displacement")
        s.bva.formulation = Formulation::Displacement;
    else if (form == "mixed")
        s.bva.formulation = Formulation::Mixed;
    else
        throw ConfigError("config: bva.formulation must be 'displacement' or 'mixed'");
    const std::string grad = cfg.get_string("bva.gradient", "volumetric");
    if (grad == "surface")
        s.bva.gradient = GradientExpr::Surface;
    else if (grad == "volumetric")
        s.bva.gradient = GradientExpr::Volumetric;
    else
        throw ConfigError("config: bva.gradient must be 'surface' or 'volumetric'");
    s.bva.iterations = cfg.get_int("bva.iterations", 30);
    s.bva.gamma0 = cfg.get_double("bva.gamma0", 0.1);
    s.bva.rho = cfg.get_double("bva.rho", 1.1);
    s.bva.mu0 = cfg.get_double("bva.mu0", 1.0);
    s.bva.max_halvings = cfg.get_int("bva.max_halvings", 10);
    s.bva.target_volume = cfg.get_double("bva.target_volume", -1.0);
    s.bva.strict_descent = cfg.get_bool("bva.strict_descent", false);
    s.bva.vtk_every = cfg.get_int("bva.vtk_every", 0);
    s.bva.seed = s.seed;
    s.bva.validate();

    s.study_levels = cfg.get_int("study.levels", 3);
    s.study_extra_refine = cfg.get_int("study.extra_refine", 2);
    if (s.study_levels < 1)
        throw ConfigError("config: study.levels must be >= 1");
    if (s.study_extra_refine < 0)
        throw ConfigError("config: study.extra_refine must be >= 0");

    s.check_quad_order = cfg.get_int("check.quad_order", 4);
    if (s.check_quad_order < 1 || s.check_quad_order > 4)
        throw ConfigError("config: check.quad_order must be in 1..4");

    s.out_dir = cfg.get_string("out.dir", ".");
    s.tag = cfg.get_string("out.tag", "run");
    s.bva.out_dir = s.out_dir;
    s.bva.tag = s.tag;
    return s;
}

Mesh build_mesh(const Setup& setup) {
    if (!setup.mesh_file.empty())
        return read_mesh(setup.mesh_file);
    if (setup.geometry_kind == GeometryKind::Holes6)
        return build_holed_cantilever(setup.geo);
    return build_bulky_cantilever(setup.geo);
}

} // namespace ef
